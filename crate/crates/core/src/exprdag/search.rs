use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::frac::Frac;
use super::{DagError, DeltaAssignment, ExprDag};
use crate::arith::Rational;

/// Largest number of rounding slots searched exhaustively.
pub const MAX_EXHAUSTIVE_SLOTS: usize = 20;

/// Searches for rounding errors `|δ_i| = eps` maximising the relative error at
/// `x`. All `2^r` corners are tried when `r <= 20` (`budget` is then unused);
/// otherwise coordinate ascent over corners runs for at most `budget`
/// evaluations. Corners that divide by zero are skipped.
pub fn adversarial_search(
    dag: &ExprDag,
    x: &[Rational],
    eps: &Rational,
    budget: usize,
) -> Result<(DeltaAssignment, Rational), DagError> {
    let p = dag.oracle_eval(x)?;
    if p.is_zero() {
        return Err(DagError::IllPosed);
    }
    let r = dag.num_roundings();
    let xs: Vec<Frac> = x.iter().map(Frac::from_rational).collect();
    let up = Frac::from_rational(&(Rational::one() + eps));
    let down = Frac::from_rational(&(Rational::one() - eps));
    let eval = |signs: &[bool]| -> Option<Rational> {
        let ds: Vec<Frac> = signs.iter().map(|&s| if s { up.clone() } else { down.clone() }).collect();
        let v = dag.eval_frac(&xs, &ds).ok()?.to_rational();
        Some(((v - &p) / &p).abs())
    };
    let to_delta = |signs: &[bool]| DeltaAssignment {
        deltas: signs.iter().map(|&s| if s { eps.clone() } else { -eps.clone() }).collect(),
    };
    if r <= MAX_EXHAUSTIVE_SLOTS {
        let best = (0u64..1u64 << r)
            .into_par_iter()
            .filter_map(|mask| {
                let signs: Vec<bool> = (0..r).map(|k| mask >> k & 1 == 1).collect();
                eval(&signs).map(|e| (e, mask))
            })
            .reduce_with(|a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            });
        let (err, mask) = best.unwrap_or((Rational::zero(), 0));
        let signs: Vec<bool> = (0..r).map(|k| mask >> k & 1 == 1).collect();
        return Ok((to_delta(&signs), err));
    }
    // coordinate ascent from a few fixed starting corners
    let mut used = 0usize;
    let mut best: Option<(Rational, Vec<bool>)> = None;
    let starts: Vec<Vec<bool>> = vec![
        vec![true; r],
        vec![false; r],
        (0..r).map(|k| k % 2 == 0).collect(),
        (0..r).map(|k| k % 2 == 1).collect(),
    ];
    for mut cur in starts {
        if used >= budget {
            break;
        }
        let mut cur_err = eval(&cur).unwrap_or_else(Rational::zero);
        used += 1;
        let mut improved = true;
        while improved && used < budget {
            improved = false;
            for k in 0..r {
                if used >= budget {
                    break;
                }
                cur[k] = !cur[k];
                used += 1;
                match eval(&cur) {
                    Some(e) if e > cur_err => {
                        cur_err = e;
                        improved = true;
                    }
                    _ => cur[k] = !cur[k],
                }
            }
        }
        if best.as_ref().map_or(true, |(e, _)| cur_err > *e) {
            best = Some((cur_err, cur));
        }
    }
    let (err, signs) = best.unwrap_or_else(|| (Rational::zero(), vec![true; r]));
    Ok((to_delta(&signs), err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::pow2_rational;
    use crate::exprdag::DagBuilder;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn sum3_exceeds_one() {
        let d = crate::exprdag::tests::sum3();
        let x = [q(1), pow2_rational(-20), q(-1)];
        let (_, err) = adversarial_search(&d, &x, &pow2_rational(-10), 0).unwrap();
        assert!(err > q(1));
    }

    #[test]
    fn single_multiply_error_is_eps() {
        let mut b = DagBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let m = b.mul(x, y);
        let d = b.finish(m).unwrap();
        let e = pow2_rational(-10);
        let (delta, err) = adversarial_search(&d, &[q(3), q(5)], &e, 0).unwrap();
        assert_eq!(err, e);
        assert_eq!(delta.values()[0].abs(), e);
    }

    #[test]
    fn heuristic_path_runs_within_budget() {
        let mut b = DagBuilder::new(1);
        let x = b.input(0);
        let mut acc = x;
        for _ in 0..24 {
            acc = b.mul(acc, x);
        }
        let d = b.finish(acc).unwrap();
        let e = pow2_rational(-20);
        let (delta, err) = adversarial_search(&d, &[q(1)], &e, 200).unwrap();
        // all roundings up is optimal for a product chain
        assert_eq!(err, num_traits::pow(q(1) + &e, 24) - q(1));
        assert!(delta.values().iter().all(|d| *d == e));
    }
}
