use super::dyadic::{dyadic_add, round_dyadic};
use super::{Dyadic, FloatCtx};

/// Sum of `terms` rounded once: exact accumulation, then a single rounding.
/// An exactly cancelling sum returns exact zero.
pub fn accurate_sum(terms: &[Dyadic], ctx: &FloatCtx) -> Dyadic {
    // adding in decreasing exponent order keeps intermediate mantissas short
    let mut sorted: Vec<&Dyadic> = terms.iter().filter(|t| !t.is_zero()).collect();
    sorted.sort_by_key(|t| std::cmp::Reverse(t.exponent()));
    let exact = sorted
        .into_iter()
        .fold(Dyadic::zero(), |acc, t| dyadic_add(&acc, t));
    round_dyadic(&exact, ctx.precision_bits())
}
