use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::dyadic::{dyadic_add, dyadic_mul, round_dyadic, round_div, round_rational, round_sqrt};
use super::{ArithError, Dyadic, Rational};

/// Working precision `p` of a binary floating-point format with unbounded
/// exponent range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FloatCtx {
    precision_bits: u32,
}

impl FloatCtx {
    pub fn new(precision_bits: u32) -> Result<Self, ArithError> {
        if precision_bits < 2 {
            return Err(ArithError::PrecisionTooSmall(precision_bits));
        }
        Ok(FloatCtx { precision_bits })
    }

    /// 53-bit context matching IEEE double.
    pub fn double() -> Self {
        FloatCtx { precision_bits: 53 }
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// `2^(1-p)`.
    pub fn epsilon(&self) -> Rational {
        Dyadic::pow2(1 - self.precision_bits as i64).to_rational()
    }

    pub fn epsilon_f64(&self) -> f64 {
        2f64.powi(1 - self.precision_bits as i32)
    }
}

/// Rounds an exact value to the context precision.
pub fn round_to(x: &Exact, ctx: &FloatCtx) -> Dyadic {
    match x {
        Exact::Dyadic(d) => round_dyadic(d, ctx.precision_bits),
        Exact::Rational(r) => round_rational(r, ctx.precision_bits),
    }
}

/// Either exact scalar accepted by [`round_to`].
#[derive(Clone, Debug)]
pub enum Exact {
    Dyadic(Dyadic),
    Rational(Rational),
}

impl From<Dyadic> for Exact {
    fn from(d: Dyadic) -> Self {
        Exact::Dyadic(d)
    }
}

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact::Rational(r)
    }
}

/// Scalars the structured algorithms run over.
///
/// `ctx` only matters for [`MpFloat`]; doubles are always 53-bit and rationals
/// are exact.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: &Rational, ctx: &FloatCtx) -> Self;
    fn to_rational(&self) -> Rational;
    fn approx_f64(&self) -> f64;
    fn magnitude(&self) -> Self;
    fn is_exact_zero(&self) -> bool;

    fn of_int(v: i64, ctx: &FloatCtx) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)), ctx)
    }

    fn zero_in(ctx: &FloatCtx) -> Self {
        Self::of_int(0, ctx)
    }

    fn one_in(ctx: &FloatCtx) -> Self {
        Self::of_int(1, ctx)
    }
}

/// Fields with a square root (floating types only).
pub trait Real: Field {
    fn sqrt(&self) -> Self;
    fn from_f64_in(x: f64, ctx: &FloatCtx) -> Self;
    fn eps_in(ctx: &FloatCtx) -> Self;
}

impl Field for Rational {
    fn from_rational(r: &Rational, _: &FloatCtx) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn approx_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn magnitude(&self) -> Self {
        Signed::abs(self)
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Field for f64 {
    fn from_rational(r: &Rational, _: &FloatCtx) -> Self {
        rational_to_f64(r)
    }
    fn to_rational(&self) -> Rational {
        Dyadic::from_f64(*self)
            .map(|d| d.to_rational())
            .unwrap_or_else(|_| <Rational as Zero>::zero())
    }
    fn approx_f64(&self) -> f64 {
        *self
    }
    fn magnitude(&self) -> Self {
        f64::abs(*self)
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Real for f64 {
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn from_f64_in(x: f64, _: &FloatCtx) -> Self {
        x
    }
    fn eps_in(_: &FloatCtx) -> Self {
        f64::EPSILON
    }
}

/// Correctly rounded conversion to the nearest double.
pub fn rational_to_f64(r: &Rational) -> f64 {
    round_rational(r, 53).to_f64()
}

/// Arbitrary precision float: a dyadic value tagged with its precision.
///
/// Every arithmetic result is the exact result rounded once to the larger of
/// the operand precisions.
#[derive(Clone, Debug)]
pub struct MpFloat {
    value: Dyadic,
    prec: u32,
}

impl MpFloat {
    pub fn new(value: &Dyadic, ctx: &FloatCtx) -> Self {
        MpFloat {
            value: round_dyadic(value, ctx.precision_bits),
            prec: ctx.precision_bits,
        }
    }

    pub fn value(&self) -> &Dyadic {
        &self.value
    }

    pub fn into_value(self) -> Dyadic {
        self.value
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    fn wrap(value: Dyadic, prec: u32) -> Self {
        MpFloat {
            value: round_dyadic(&value, prec),
            prec,
        }
    }
}

impl PartialEq for MpFloat {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for MpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.value.cmp(&other.value))
    }
}

impl Add for MpFloat {
    type Output = MpFloat;
    fn add(self, rhs: MpFloat) -> MpFloat {
        let p = self.prec.max(rhs.prec);
        MpFloat::wrap(dyadic_add(&self.value, &rhs.value), p)
    }
}

impl Sub for MpFloat {
    type Output = MpFloat;
    fn sub(self, rhs: MpFloat) -> MpFloat {
        let p = self.prec.max(rhs.prec);
        MpFloat::wrap(dyadic_add(&self.value, &-&rhs.value), p)
    }
}

impl Mul for MpFloat {
    type Output = MpFloat;
    fn mul(self, rhs: MpFloat) -> MpFloat {
        let p = self.prec.max(rhs.prec);
        MpFloat::wrap(dyadic_mul(&self.value, &rhs.value), p)
    }
}

impl Div for MpFloat {
    type Output = MpFloat;
    /// Division by zero panics, as for integers.
    fn div(self, rhs: MpFloat) -> MpFloat {
        assert!(!rhs.value.is_zero(), "MpFloat division by zero");
        let p = self.prec.max(rhs.prec);
        MpFloat {
            value: round_div(&self.value, &rhs.value, p),
            prec: p,
        }
    }
}

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat {
            value: -self.value,
            prec: self.prec,
        }
    }
}

impl Field for MpFloat {
    fn from_rational(r: &Rational, ctx: &FloatCtx) -> Self {
        MpFloat {
            value: round_rational(r, ctx.precision_bits),
            prec: ctx.precision_bits,
        }
    }
    fn to_rational(&self) -> Rational {
        self.value.to_rational()
    }
    fn approx_f64(&self) -> f64 {
        self.value.to_f64()
    }
    fn magnitude(&self) -> Self {
        MpFloat {
            value: self.value.abs(),
            prec: self.prec,
        }
    }
    fn is_exact_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl Real for MpFloat {
    /// Square root of a negative number panics.
    fn sqrt(&self) -> Self {
        assert!(self.value.signum() >= 0, "MpFloat sqrt of negative value");
        MpFloat {
            value: round_sqrt(&self.value, self.prec),
            prec: self.prec,
        }
    }
    fn from_f64_in(x: f64, ctx: &FloatCtx) -> Self {
        let d = Dyadic::from_f64(x).expect("finite input");
        MpFloat::new(&d, ctx)
    }
    fn eps_in(ctx: &FloatCtx) -> Self {
        MpFloat {
            value: Dyadic::pow2(1 - ctx.precision_bits as i64),
            prec: ctx.precision_bits,
        }
    }
}

impl fmt::Display for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `2^k` as a rational.
pub fn pow2_rational(k: i64) -> Rational {
    Dyadic::pow2(k).to_rational()
}

/// `|a - b| <= tol * |b|` for rationals (true when both are zero).
pub fn rel_close(a: &Rational, b: &Rational, tol: &Rational) -> bool {
    Signed::abs(&(a - b)) <= tol * Signed::abs(b)
}

/// `10^-digits` as a rational.
pub fn ten_pow_neg(digits: u32) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits as usize))
}
