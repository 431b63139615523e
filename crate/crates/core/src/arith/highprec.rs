use num_traits::Signed;

use super::float::ten_pow_neg;
use super::{ArithError, Dyadic, FloatCtx, MpFloat};

/// Precision schedule for [`highprec_eval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HighPrecConfig {
    pub initial_bits: u32,
    pub max_bits: u32,
}

impl Default for HighPrecConfig {
    fn default() -> Self {
        HighPrecConfig {
            initial_bits: 128,
            max_bits: 4096,
        }
    }
}

/// Runs `f` at doubling precisions until two successive runs agree to
/// `target_digits` relative decimal digits in every component, and returns the
/// last run.
pub fn highprec_eval<F>(
    f: F,
    target_digits: u32,
    cfg: &HighPrecConfig,
) -> Result<Vec<Dyadic>, ArithError>
where
    F: Fn(&FloatCtx) -> Vec<MpFloat>,
{
    let tol = ten_pow_neg(target_digits);
    let mut bits = cfg.initial_bits.max(2);
    let mut prev: Option<Vec<Dyadic>> = None;
    loop {
        let ctx = FloatCtx::new(bits)?;
        let cur: Vec<Dyadic> = f(&ctx).into_iter().map(MpFloat::into_value).collect();
        if let Some(p) = &prev {
            if agree(p, &cur, &tol) {
                return Ok(cur);
            }
        }
        if bits >= cfg.max_bits {
            return Err(ArithError::NonConvergence { bits });
        }
        bits = (bits * 2).min(cfg.max_bits);
        prev = Some(cur);
    }
}

fn agree(a: &[Dyadic], b: &[Dyadic], tol: &num_rational::BigRational) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            let (x, y) = (x.to_rational(), y.to_rational());
            (&x - &y).abs() <= tol * y.abs()
        })
}
