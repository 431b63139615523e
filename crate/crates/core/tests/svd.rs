mod common;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use common::*;
use hiacc::arith::{pow2_rational, Field, FloatCtx, MpFloat, Rational, Real};
use hiacc::exact::det_ge;
use hiacc::matrix::Matrix;
use hiacc::structmat::{cauchy_gecp_ldu, mmatrix_ldu, CauchyParams, MPivot};
use hiacc::svd::{bidiag_svd, jacobi_onesided, posdef_evd_via_rrd, rrd_svd, svd_conventional, Bidiagonal, Rrd};

/// Number of eigenvalues of the symmetric `s` below `lam`, from the sign
/// changes of the leading principal minors of `s - lam I`.
fn count_below(s: &Matrix<Rational>, lam: &Rational) -> Option<usize> {
    let n = s.rows();
    let shifted = Matrix::from_fn(n, n, |i, j| if i == j { &s[(i, j)] - lam } else { s[(i, j)].clone() });
    let mut prev = Rational::one();
    let mut changes = 0;
    for k in 1..=n {
        let idx: Vec<usize> = (0..k).collect();
        let d = det_ge(&shifted.submatrix(&idx, &idx));
        if d.is_zero() {
            return None;
        }
        if d.is_negative() != prev.is_negative() {
            changes += 1;
        }
        prev = d;
    }
    Some(changes)
}

fn two() -> Rational {
    q(2)
}

/// Eigenvalues of a positive definite rational matrix, descending, each
/// bracketed to relative width `2^-60` by exact bisection.
fn eig_oracle(s: &Matrix<Rational>) -> Vec<Rational> {
    let n = s.rows();
    let trace: Rational = (0..n).map(|i| s[(i, i)].clone()).sum();
    let tol = pow2_rational(-60);
    let count = |x: &Rational| {
        let mut x = x.clone();
        loop {
            if let Some(c) = count_below(s, &x) {
                return c;
            }
            x += pow2_rational(-400);
        }
    };
    let mut out = Vec::new();
    for k in (0..n).rev() {
        // k-th smallest: count(lo) <= k < count(hi); halve hi first so tiny
        // eigenvalues get a relative bracket
        let mut hi = &trace + Rational::one();
        let mut lo = &hi / two();
        while count(&lo) > k && lo > pow2_rational(-300) {
            hi = lo.clone();
            lo /= two();
        }
        if count(&lo) > k {
            lo = Rational::zero();
        }
        while &hi - &lo > &tol * &hi {
            let mid = (&lo + &hi) / two();
            if count(&mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push((lo + hi) / two());
    }
    out
}

/// Singular values squared of `a`, descending.
fn sigma2_oracle(a: &Matrix<Rational>) -> Vec<Rational> {
    let ctx = FloatCtx::double();
    eig_oracle(&a.transpose().matmul(a, &ctx))
}

fn max_rel_sigma<T: Field>(sigma: &[T], oracle2: &[Rational]) -> f64 {
    sigma
        .iter()
        .zip(oracle2)
        .map(|(s, o)| {
            let s = s.to_rational();
            // |s^2 - o| / o is about twice the relative error of s
            (rel(&(&s * &s), o) / two()).approx_f64()
        })
        .fold(0.0, f64::max)
}

#[test]
fn oracle_on_diagonal() {
    let a = Matrix::from_fn(3, 3, |i, j| if i == j { q([3, -1, 2][i]) } else { q(0) });
    let e = eig_oracle(&a.transpose().matmul(&a, &FloatCtx::double()));
    let want = [q(9), q(4), q(1)];
    for (x, w) in e.iter().zip(&want) {
        assert!(rel(x, w) < pow2_rational(-58));
    }
}

#[test]
fn hilbert_through_rrd() {
    let ctx = FloatCtx::double();
    for n in 3..=7 {
        let p = CauchyParams::hilbert(n);
        let oracle = sigma2_oracle(&p.to_matrix().unwrap());
        let f = cauchy_gecp_ldu::<f64>(&p, &ctx).unwrap();
        let r = Rrd::from_ldu(&f, &ctx).unwrap();
        let s = rrd_svd(&r, &ctx).unwrap();
        let err = max_rel_sigma(&s.sigma, &oracle);
        assert!(err < 1e-13, "n={n}: {err}");
        assert!(s.residual.unwrap() < 1e-14);
        // symmetric positive definite: same values as eigenvalues
        let sym = Rrd::symmetric(r.x.clone(), r.d.clone()).unwrap();
        let ev = posdef_evd_via_rrd(&sym, &ctx).unwrap();
        assert!(max_rel_sigma(&ev, &oracle) < 1e-13);
    }
}

#[test]
fn hilbert_jacobi_high_precision() {
    let ctx = FloatCtx::new(200).unwrap();
    let p = CauchyParams::hilbert(8);
    let a = p.to_matrix().unwrap();
    let oracle = sigma2_oracle(&a);
    let s = jacobi_onesided(&Matrix::<MpFloat>::from_rational(&a, &ctx), &ctx).unwrap();
    assert!(max_rel_sigma(&s.sigma, &oracle) < 1e-13);
}

#[test]
fn conventional_loses_small_values() {
    let ctx = FloatCtx::double();
    let p = CauchyParams::hilbert(8);
    let a = p.to_matrix().unwrap();
    let oracle = sigma2_oracle(&a);
    let conv = svd_conventional(&Matrix::<f64>::from_rational(&a, &ctx), &ctx).unwrap();
    // absolute accuracy only: error near eps * sigma_max
    let top = conv[0];
    for (s, o) in conv.iter().zip(&oracle) {
        let o = o.approx_f64().sqrt();
        assert!((s - o).abs() <= 50.0 * f64::EPSILON * top);
    }
    let last = rel(&conv[7].to_rational(), &(oracle[7].approx_f64().sqrt()).to_rational()).approx_f64();
    assert!(last > 1e-12);
}

#[test]
fn graded_bidiagonal_against_oracle() {
    let ctx = FloatCtx::double();
    let d = [1.0, 1e-4, 1e-8, 1e-12];
    let e = [2e-2, 3e-6, 5e-10];
    let b = Bidiagonal::new(d.to_vec(), e.to_vec()).unwrap();
    let exact = b.to_matrix(&ctx).to_rational();
    let oracle = sigma2_oracle(&exact);
    let s = bidiag_svd(&b, &ctx).unwrap();
    assert!(max_rel_sigma(&s, &oracle) < 1e-14);
}

#[test]
fn graded_mmatrix_rrd() {
    let ctx = FloatCtx::double();
    let mut r = rng(41);
    for n in [3, 5] {
        let m = random_mmatrix(&mut r, n, true);
        let oracle = sigma2_oracle(&m.to_matrix());
        let f = mmatrix_ldu::<f64>(&m, MPivot::CompleteDiagonal, &ctx).unwrap();
        let mut rr = Rrd::from_ldu(&f, &ctx).unwrap();
        let k = rr.kappa(&ctx).unwrap();
        let s = rrd_svd(&rr, &ctx).unwrap();
        assert!(max_rel_sigma(&s.sigma, &oracle) <= 1e3 * f64::EPSILON * k);
    }
}

fn bidiag() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..7).prop_flat_map(|n| {
        let entry = (1.0f64..2.0, -40i32..5, any::<bool>()).prop_map(|(m, e, s)| if s { m } else { -m } * 2f64.powi(e));
        (proptest::collection::vec(entry.clone(), n), proptest::collection::vec(entry, n - 1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // prod sigma = |det| and sum sigma^2 = ||B||_F^2, both to a few ulps
    #[test]
    fn bidiagonal_invariants((d, e) in bidiag()) {
        let ctx = FloatCtx::double();
        let b = Bidiagonal::new(d.clone(), e.clone()).unwrap();
        let s = bidiag_svd(&b, &ctx).unwrap();
        let n = d.len();
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]) && s.iter().all(|x| *x > 0.0));
        let prod: Rational = s.iter().map(Field::to_rational).product();
        let det: Rational = d.iter().map(|x| x.abs().to_rational()).product();
        prop_assert!(rel(&prod, &det).approx_f64() <= 40.0 * (n * n) as f64 * f64::EPSILON);
        let fro: Rational = d.iter().chain(&e).map(|x| x.to_rational() * x.to_rational()).sum();
        let sum2: Rational = s.iter().map(|x| x.to_rational() * x.to_rational()).sum();
        prop_assert!(rel(&sum2, &fro).approx_f64() <= 40.0 * n as f64 * f64::EPSILON);
    }

    #[test]
    fn power_of_two_scaling((d, e) in bidiag(), k in -30i32..30) {
        let ctx = FloatCtx::double();
        let s = bidiag_svd(&Bidiagonal::new(d.clone(), e.clone()).unwrap(), &ctx).unwrap();
        let c = 2f64.powi(k);
        let b2 = Bidiagonal::new(d.iter().map(|x| x * c).collect(), e.iter().map(|x| x * c).collect()).unwrap();
        let s2 = bidiag_svd(&b2, &ctx).unwrap();
        for (a, b) in s.iter().zip(&s2) {
            prop_assert!(((b / c - a) / a).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn jacobi_reconstructs(seed in any::<u64>(), m in 1usize..6, n in 1usize..6) {
        let ctx = FloatCtx::double();
        let mut r = rng(seed);
        let (m, n) = (m.max(n), m.min(n));
        let a = Matrix::from_fn(m, n, |_, _| small_rational(&mut r, 9).approx_f64());
        let s = jacobi_onesided(&a, &ctx).unwrap();
        let back = s.reconstruct(&ctx);
        let scale = s.sigma.first().copied().unwrap_or(0.0).max(1.0);
        for i in 0..m {
            for j in 0..n {
                prop_assert!((back[(i, j)] - a[(i, j)]).abs() <= 100.0 * f64::EPSILON * scale);
            }
        }
        let sq: f64 = s.sigma.iter().map(|x| x * x).sum();
        let fro: f64 = a.to_rows().iter().flatten().map(|x| x * x).sum();
        prop_assert!((sq - fro).abs() <= 100.0 * f64::EPSILON * fro.max(1e-300));
    }
}

#[test]
fn sqrt_at_precision() {
    let ctx = FloatCtx::new(80).unwrap();
    let two = MpFloat::of_int(2, &ctx);
    let r = two.sqrt();
    let back = r.clone() * r;
    assert!(rel(&back.to_rational(), &q(2)) <= pow2_rational(-78));
}
