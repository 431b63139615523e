mod common;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

use common::*;
use hiacc::arith::{pow2_rational, rational_to_f64, Field, FloatCtx, MpFloat, Rational};
use hiacc::exprdag::{classify_nic, SignInfo};
use hiacc::poly::{parse_poly, SparsePoly};
use hiacc::polyeval::{
    homogeneous_positive_eval, horner_dag, horner_positive_eval, motzkin_eval, motzkin_family, motzkin_poly,
    naive_sum3_demo, sum3_dag, term_paths, PolyEvalError, PositivityCert, Sum3Order,
};

fn positive_poly(seed: u64, n: usize, deg: u32, homogeneous: bool) -> SparsePoly {
    let mut r = rng(seed);
    let p = random_sparse(&mut r, n, deg, 6);
    let terms = p.terms().filter(|(e, _)| !homogeneous || e.iter().sum::<u32>() == deg).map(|(e, c)| (c.abs(), e.clone()));
    let mut q = SparsePoly::from_terms(n, terms);
    if q.is_zero() {
        let mut e = vec![0; n];
        e[0] = deg;
        q = SparsePoly::monomial(e, BigInt::from(1));
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn horner_is_the_polynomial(seed in any::<u64>(), n in 1usize..4, deg in 0u32..7) {
        let mut r = rng(seed);
        let p = random_sparse(&mut r, n, deg, 5);
        let dag = horner_dag(&p);
        prop_assert_eq!(dag.to_poly().unwrap(), p.clone());
        let expanded = term_paths(&dag).unwrap();
        let back = SparsePoly::from_terms(n, expanded.into_iter().map(|(e, c, _)| (c, e)));
        prop_assert_eq!(back, p);
    }

    #[test]
    fn positive_horner_is_nic_on_positive_inputs(seed in any::<u64>(), n in 1usize..4, deg in 1u32..6) {
        let p = positive_poly(seed, n, deg, false);
        let rep = classify_nic(&horner_dag(&p), &vec![SignInfo::Pos; n]);
        prop_assert!(rep.is_nic);
    }

    // scaling by a power of two commutes with the evaluation exactly
    #[test]
    fn homogeneous_scaling(seed in any::<u64>(), n in 1usize..4, deg in 1u32..6, k in -20i32..20) {
        let p = positive_poly(seed, n, deg, true);
        let ctx = FloatCtx::double();
        let mut r = rng(seed ^ 1);
        let x: Vec<f64> = (0..n).map(|_| positive_rational(&mut r, 9).approx_f64()).collect();
        let v = homogeneous_positive_eval(&p, &x, &ctx).unwrap();
        let xs: Vec<f64> = x.iter().map(|t| t * 2f64.powi(k)).collect();
        let vs = homogeneous_positive_eval(&p, &xs, &ctx).unwrap();
        prop_assert_eq!(vs, v * 2f64.powi(k * deg as i32));
        let exact = p.eval_rational(&x.iter().map(Field::to_rational).collect::<Vec<_>>());
        let terms = p.num_terms() as f64;
        prop_assert!(rel(&v.to_rational(), &exact).approx_f64() <= 4.0 * (deg as f64 * n as f64 + terms) * f64::EPSILON);
    }

    #[test]
    fn motzkin_branches_accurate(s in proptest::array::uniform3(any::<bool>()), a in 0.1f64..4.0, u in -1e-6f64..1e-6, v in -1e-6f64..1e-6) {
        let sg = |b: bool| if b { 1.0 } else { -1.0 };
        let x = [sg(s[0]) * a * (1.0 + u), sg(s[1]) * a * (1.0 + v), sg(s[2]) * a];
        let ev = motzkin_eval().unwrap();
        let got = ev.eval(&x, &FloatCtx::double()).unwrap();
        let exact = motzkin_poly().eval_rational(&x.iter().map(Field::to_rational).collect::<Vec<_>>());
        prop_assume!(!exact.is_zero());
        prop_assert!(rel(&got.to_rational(), &exact).approx_f64() <= 1e3 * f64::EPSILON / 2.0);
    }
}

#[test]
fn certified_horner() {
    let p = parse_poly("1 + x1^2 + x2^2 + x1*x2^2").unwrap();
    // p >= 1 - 1/4 on [-1/2, 1/2]^2 since |x1 x2^2| <= 1/8
    let cert = PositivityCert { p_min: qq(3, 4), radius: qq(1, 2), eta: pow2_rational(-30) };
    cert.check_on_grid(&p, 9).unwrap();
    let probe = horner_positive_eval::<f64>(&p, &[0.0, 0.0], Some(&cert), &FloatCtx::double()).unwrap();
    let mut bits = 2;
    while FloatCtx::new(bits).unwrap().epsilon() > probe.eps_required {
        bits += 1;
    }
    let ctx = FloatCtx::new(bits).unwrap();
    let mut r = rng(77);
    for _ in 0..50 {
        let x: Vec<Rational> = (0..2).map(|_| qq(r.gen_range(-8..=8), 16)).collect();
        let xm: Vec<MpFloat> = x.iter().map(|t| MpFloat::from_rational(t, &ctx)).collect();
        assert_representable(&x, &xm);
        let got = horner_positive_eval(&p, &xm, Some(&cert), &ctx).unwrap();
        let exact = p.eval_rational(&x);
        assert!(rel(&got.value.to_rational(), &exact) <= cert.eta);
    }
    assert!(matches!(
        horner_positive_eval::<f64>(&p, &[0.0, 0.0], None, &FloatCtx::double()),
        Err(PolyEvalError::NonPositiveCertificateMissing(_))
    ));
    let bad = PositivityCert { p_min: q(2), ..cert };
    assert!(bad.check_on_grid(&p, 5).is_err());
}

fn assert_representable(x: &[Rational], xm: &[MpFloat]) {
    for (a, b) in x.iter().zip(xm) {
        assert_eq!(&b.to_rational(), a);
    }
}

#[test]
fn sum3_cancellation() {
    for k in [10, 24, 40] {
        let eps = pow2_rational(-k);
        let demo = naive_sum3_demo(&eps).unwrap();
        // computed eps^2 - eps - eps^3 against eps^2
        assert_eq!(demo.exact, &eps * &eps);
        assert_eq!(demo.computed, &eps * &eps - &eps - &eps * &eps * &eps);
        assert!(demo.rel_error > pow2_rational(k - 1));
    }
    assert!(naive_sum3_demo(&q(1)).is_err());
    for o in [Sum3Order::Left, Sum3Order::Right] {
        assert_eq!(sum3_dag(o).to_poly().unwrap(), parse_poly("x1+x2+x3").unwrap());
        assert!(!classify_nic(&sum3_dag(o), &[SignInfo::Free; 3]).is_nic);
        assert!(classify_nic(&sum3_dag(o), &[SignInfo::Pos; 3]).is_nic);
    }
}

#[test]
fn motzkin_family_and_zero_set() {
    let m = motzkin_poly();
    assert_eq!(m, motzkin_family(1, 3));
    let ev = motzkin_eval().unwrap();
    for x in [[1.0, 1.0, 1.0], [-2.0, 2.0, 2.0], [0.5, -0.5, -0.5]] {
        assert_eq!(ev.eval(&x, &FloatCtx::double()).unwrap(), 0.0);
    }
    // nonnegative on a grid
    for i in -4..=4 {
        for j in -4..=4 {
            for k in -4..=4 {
                let x = [qq(i, 2), qq(j, 2), qq(k, 2)];
                assert!(!m.eval_rational(&x).is_negative());
            }
        }
    }
    let v = ev.eval(&[3.0, 1.0, 2.0], &FloatCtx::double()).unwrap();
    assert_eq!(v, rational_to_f64(&m.eval_rational(&[q(3), q(1), q(2)])));
}
