mod common;

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;

use common::*;
use hiacc::arith::{pow2_rational, Rational};
use hiacc::decide::{
    check_nic_emission, decide_blackbox_affine, decide_complex, dominant_terms, Answer, DecideError, Witness,
};
use hiacc::exprdag::{BlackBox, DeltaAssignment};
use hiacc::poly::{parse_poly, parse_poly_in, SparsePoly};

fn permuted(p: &SparsePoly, perm: &[usize]) -> SparsePoly {
    let n = p.nvars();
    let subs: Vec<SparsePoly> = perm.iter().map(|&i| SparsePoly::var(n, i)).collect();
    p.compose(&subs)
}

fn mixed_poly(seed: u64, n: usize) -> SparsePoly {
    let mut r = rng(seed);
    match seed % 3 {
        0 => random_form_product(&mut r, n, 6),
        1 => random_sparse(&mut r, n, 5, 4),
        _ => &random_form_product(&mut r, n, 3) * &random_sparse(&mut r, n, 3, 3),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // YES answers come with a DAG that is p and obeys the error bound at
    // random points and random rounding errors.
    #[test]
    fn yes_is_sound(seed in any::<u64>(), n in 1usize..5) {
        let p = mixed_poly(seed, n);
        let v = decide_complex(&p);
        prop_assume!(v.answer.is_yes());
        let dag = v.emitted.clone().unwrap();
        prop_assert_eq!(dag.to_poly().unwrap(), p.clone());
        let rep = check_nic_emission(&v).unwrap();
        prop_assert!(rep.is_nic);
        let eps = pow2_rational(-20);
        let bound = num_traits::pow(Rational::one() + &eps, rep.root_order() as usize) - Rational::one();
        let mut r = rng(seed ^ 0x5eed);
        for _ in 0..20 {
            let x: Vec<Rational> = (0..dag.nvars()).map(|_| small_rational(&mut r, 12)).collect();
            let exact = p.eval_rational(&x);
            prop_assert_eq!(dag.oracle_eval(&x).unwrap(), exact.clone());
            let d: Vec<Rational> = (0..dag.num_roundings()).map(|_| &eps * small_rational(&mut r, 1000) / q(1000)).collect();
            let got = dag.eval_perturbed(&x, &DeltaAssignment::new(d, &eps).unwrap()).unwrap();
            if exact.is_zero() {
                prop_assert!(got.is_zero());
            } else {
                prop_assert!(rel(&got, &exact) <= bound);
            }
        }
    }

    #[test]
    fn agrees_with_oracle(seed in any::<u64>(), n in 1usize..5) {
        let p = mixed_poly(seed, n);
        let v = decide_complex(&p);
        match allowable_oracle(&p) {
            Some((c, f)) => {
                prop_assert_eq!(v.answer, Answer::EvaluableComplex);
                let Witness::Factorization(w) = &v.witness else { panic!("no witness") };
                prop_assert_eq!(Rational::from_integer(w.constant.clone()), c);
                let total: u32 = f.iter().map(|(_, k)| k).sum();
                prop_assert_eq!(w.factors.iter().map(|(_, k)| k).sum::<u32>(), total);
                prop_assert_eq!(w.expand(p.nvars()), p);
            }
            None => prop_assert_eq!(v.answer, Answer::NotEvaluableComplex),
        }
    }

    #[test]
    fn invariant_under_variable_permutation(seed in any::<u64>(), n in 1usize..5) {
        let p = mixed_poly(seed, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng(seed));
        let (a, b) = (decide_complex(&p), decide_complex(&permuted(&p, &perm)));
        prop_assert_eq!(a.answer, b.answer);
        if let (Witness::Factorization(x), Witness::Factorization(y)) = (&a.witness, &b.witness) {
            // reordering variables may flip the orientation of x_i - x_j
            prop_assert_eq!(x.constant.magnitude(), y.constant.magnitude());
            let mx: Vec<u32> = { let mut m: Vec<u32> = x.factors.iter().map(|f| f.1).collect(); m.sort(); m };
            let my: Vec<u32> = { let mut m: Vec<u32> = y.factors.iter().map(|f| f.1).collect(); m.sort(); m };
            prop_assert_eq!(mx, my);
        }
    }

    // every reported face is exactly an argmin set of eta, the faces are
    // the inclusion-maximal argmin sets over a grid of directions, and
    // p_dom collects the terms on the face
    #[test]
    fn dominant_faces_match_grid(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_sparse(&mut r, 3, 6, 5);
        prop_assume!(!p.is_zero());
        let rep = dominant_terms(&p, &[0, 1]).unwrap();
        let pts: BTreeSet<Vec<u32>> = p.terms().map(|(e, _)| vec![e[0], e[1]]).collect();
        let argmin = |eta: &[i64]| -> BTreeSet<Vec<u32>> {
            let val = |l: &Vec<u32>| eta[0] * l[0] as i64 + eta[1] * l[1] as i64;
            let m = pts.iter().map(val).min().unwrap();
            pts.iter().filter(|l| val(l) == m).cloned().collect()
        };
        let mut grid: Vec<BTreeSet<Vec<u32>>> = Vec::new();
        for a in 0..=8i64 {
            for b in 0..=8i64 {
                if a + b > 0 {
                    grid.push(argmin(&[a, b]));
                }
            }
        }
        let maximal: BTreeSet<BTreeSet<Vec<u32>>> =
            grid.iter().filter(|s| !grid.iter().any(|t| s.is_subset(t) && s != &t)).cloned().collect();
        let reported: BTreeSet<BTreeSet<Vec<u32>>> =
            rep.facets.iter().map(|f| f.lambdas.iter().cloned().collect()).collect();
        prop_assert_eq!(&reported, &maximal);
        for f in &rep.facets {
            prop_assert_eq!(&argmin(&f.eta), &f.lambdas.iter().cloned().collect::<BTreeSet<_>>());
            let on: SparsePoly = SparsePoly::from_terms(
                3,
                p.terms().filter(|(e, _)| f.lambdas.contains(&vec![e[0], e[1]])).map(|(e, c)| (c.clone(), e.clone())),
            );
            prop_assert_eq!(&f.p_dom, &on);
        }
    }
}

#[test]
fn curated_answers() {
    let yes = [
        "(x1-x2)*(x1-x3)*(x2-x3)",
        "x1^2-x2^2",
        "-4*x1^3*x2*(x2+x3)^2",
        "0",
    ];
    for s in yes {
        let v = decide_complex(&parse_poly(s).unwrap());
        assert!(v.answer.is_yes(), "{s}");
    }
    // a nonzero constant term is excluded, even for a constant polynomial
    let no = ["7", "x1+x2+x3", "x1^2+x2^2", "x1^2*x2^2*(x1^2+x2^2-3*x3^2)+x3^6", "x1*x2+1", "x1+2*x2"];
    for s in no {
        assert_eq!(decide_complex(&parse_poly(s).unwrap()).answer, Answer::NotEvaluableComplex, "{s}");
    }
}

#[test]
fn black_boxes() {
    let fma = BlackBox::new("fma", parse_poly("x1 + x2*x3").unwrap(), false).unwrap();
    let p = parse_poly_in("(x1 + x2*x3)^2*(x2 - x3)", 3).unwrap();
    let v = decide_blackbox_affine(&p, &[fma.clone()]);
    assert_eq!(v.answer, Answer::EvaluableWithBlackBoxes);
    assert_eq!(v.emitted.as_ref().unwrap().to_poly().unwrap(), p);
    assert!(check_nic_emission(&v).unwrap().is_nic);

    // no instantiation of a non-affine box divides it: undecided
    let q = parse_poly_in("x1*x2 + x3*x4 + 1", 4).unwrap();
    let v = decide_blackbox_affine(&q, &[fma]);
    assert_eq!(v.answer, Answer::Unknown);

    let add = BlackBox::new("add", parse_poly("x1 + x2").unwrap(), true).unwrap();
    let v = decide_blackbox_affine(&parse_poly("x1 + x2 + x3").unwrap(), &[add]);
    assert_eq!(v.answer, Answer::NotEvaluableComplex);
}

#[test]
fn dominant_errors() {
    let p = parse_poly("x1^2 + x2^2 + x3").unwrap();
    assert!(matches!(dominant_terms(&p, &[]), Err(DecideError::DegenerateComponent(_))));
    assert!(matches!(dominant_terms(&p, &[0, 1, 2, 0]), Err(_)));
    assert!(matches!(dominant_terms(&p, &[7]), Err(DecideError::BadVariable(7))));
    assert!(dominant_terms(&SparsePoly::zero(3), &[0]).is_err());
    let rep = dominant_terms(&p, &[0, 1]).unwrap();
    // x3 projects to (0,0); the two coordinate directions give the faces
    let faces: Vec<_> = rep.facets.iter().map(|f| (f.lambdas.clone(), f.eta.clone())).collect();
    assert_eq!(
        faces,
        vec![(vec![vec![0, 0], vec![0, 2]], vec![1, 0]), (vec![vec![0, 0], vec![2, 0]], vec![0, 1])]
    );
}
