//! Exact dyadic and rational scalars, a precision-parameterised float, and
//! rounding primitives.

mod dyadic;
mod float;
mod highprec;
mod parse;
mod sum;

pub use dyadic::{dyadic_add, dyadic_mul, round_dyadic, round_rational, Dyadic};
pub use float::{
    pow2_rational, rational_to_f64, rel_close, round_to, ten_pow_neg, Exact, Field, FloatCtx,
    MpFloat, Real,
};
pub use highprec::{highprec_eval, HighPrecConfig};
pub use parse::{format_rational, parse_rational};
pub use sum::accurate_sum;

pub use crate::exprdag::oracle_eval;

/// Exact rational scalar (always normalised: positive denominator, lowest terms).
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("precision must be at least 2 bits, got {0}")]
    PrecisionTooSmall(u32),
    #[error("no agreement before reaching the {bits}-bit precision cap")]
    NonConvergence { bits: u32 },
    #[error("value is not finite")]
    NonFinite,
    #[error("cannot parse number {0:?}")]
    Parse(String),
}
