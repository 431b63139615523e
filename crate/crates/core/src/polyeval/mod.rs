//! Accurate evaluators for particular polynomials: the branched Motzkin
//! evaluator, Horner evaluation of positive polynomials with an epsilon
//! certificate, homogeneous evaluation with exact power-of-two scaling, and
//! the constructive failure of `x + y + z`.

mod horner;
mod motzkin;

pub use horner::{
    homogeneous_positive_eval, horner_dag, horner_positive_eval, term_bound_on_box, term_paths, HornerEval,
    PositivityCert,
};
pub use motzkin::{motzkin_eval, motzkin_family, motzkin_naive_dag, motzkin_poly};

use num_traits::{One, Signed};

use crate::arith::Rational;
use crate::exprdag::{DagBuilder, DagError, DeltaAssignment, ExprDag};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyEvalError {
    #[error("positivity certificate missing or invalid: {0}")]
    NonPositiveCertificateMissing(String),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("epsilon must lie in (0, 1/4)")]
    EpsTooLarge,
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// Association order of the two additions in `x1 + x2 + x3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sum3Order {
    /// `(x1 + x2) + x3`
    Left,
    /// `x1 + (x2 + x3)`
    Right,
}

pub fn sum3_dag(order: Sum3Order) -> ExprDag {
    let mut b = DagBuilder::new(3);
    let (x1, x2, x3) = (b.input(0), b.input(1), b.input(2));
    let root = match order {
        Sum3Order::Left => {
            let s = b.add(x1, x2);
            b.add(s, x3)
        }
        Sum3Order::Right => {
            let s = b.add(x2, x3);
            b.add(x1, s)
        }
    };
    b.finish(root).expect("valid dag")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sum3Demo {
    pub dag: ExprDag,
    pub x: Vec<Rational>,
    pub delta: DeltaAssignment,
    pub computed: Rational,
    pub exact: Rational,
    pub rel_error: Rational,
}

/// Inputs `(1, eps^2, -1)` with the first addition rounded by `-eps`: the
/// left-to-right sum returns `eps^2 - eps - eps^3` instead of `eps^2`.
pub fn naive_sum3_demo(eps: &Rational) -> Result<Sum3Demo, PolyEvalError> {
    if !eps.is_positive() || *eps >= Rational::new(1.into(), 4.into()) {
        return Err(PolyEvalError::EpsTooLarge);
    }
    let dag = sum3_dag(Sum3Order::Left);
    let x = vec![Rational::one(), eps * eps, -Rational::one()];
    let delta = DeltaAssignment::new(vec![-eps.clone(), Rational::from_integer(0.into())], eps)?;
    sum3_witness(dag, x, delta)
}

pub(crate) fn sum3_witness(dag: ExprDag, x: Vec<Rational>, delta: DeltaAssignment) -> Result<Sum3Demo, PolyEvalError> {
    let computed = dag.eval_perturbed(&x, &delta)?;
    let exact = dag.oracle_eval(&x)?;
    if exact == Rational::from_integer(0.into()) {
        return Err(DagError::IllPosed.into());
    }
    let rel_error = ((&computed - &exact) / &exact).abs();
    Ok(Sum3Demo {
        dag,
        x,
        delta,
        computed,
        exact,
        rel_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::pow2_rational;

    #[test]
    fn demo_bounds() {
        for k in [10, 20] {
            let e = pow2_rational(-k);
            let d = naive_sum3_demo(&e).unwrap();
            assert!(d.rel_error >= pow2_rational(k) - Rational::from_integer(2.into()));
            // exactly 1/eps + eps
            assert_eq!(d.rel_error, pow2_rational(k) + &e);
        }
        assert_eq!(naive_sum3_demo(&Rational::new(1.into(), 4.into())).unwrap_err(), PolyEvalError::EpsTooLarge);
    }

    #[test]
    fn zero_delta_is_exact() {
        let e = pow2_rational(-10);
        let d = naive_sum3_demo(&e).unwrap();
        let z = d.dag.eval_perturbed(&d.x, &DeltaAssignment::zero(2)).unwrap();
        assert_eq!(z, d.exact);
    }
}
