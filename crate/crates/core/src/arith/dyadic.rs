use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ArithError, Rational};

/// Exact binary floating-point number `mantissa * 2^exponent`.
///
/// The mantissa is kept odd (or zero with exponent 0), so equal values have
/// equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: 0,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: e,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Number of significant bits in the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    /// Exponent of the leading bit: `2^top <= |x| < 2^(top+1)`.
    pub fn top_exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exponent + self.bits() as i64 - 1)
        }
    }

    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from_integer(&self.mantissa << self.exponent as usize)
        } else {
            Rational::new(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as usize,
            )
        }
    }

    /// Exact conversion if the rational has a power-of-two denominator.
    pub fn from_rational_exact(r: &Rational) -> Option<Self> {
        let d = r.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz as usize).is_one() {
            Some(Self::new(r.numer().clone(), -(tz as i64)))
        } else {
            None
        }
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Result<Self, ArithError> {
        if !x.is_finite() {
            return Err(ArithError::NonFinite);
        }
        if x == 0.0 {
            return Ok(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        Ok(Self::new(BigInt::from(m) * sign, e))
    }

    /// Nearest double (ties to even); saturates to infinity and flushes to zero
    /// outside the double range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = round_dyadic(self, 53);
        let m = r.mantissa.to_f64().unwrap_or(f64::NAN);
        ldexp(m, r.exponent)
    }

    /// Compares `|self|` with `|other|`.
    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        self.abs().cmp(&other.abs())
    }
}

fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
    let e = a.exponent.min(b.exponent);
    let ma = &a.mantissa << (a.exponent - e) as usize;
    let mb = &b.mantissa << (b.exponent - e) as usize;
    (ma, mb, e)
}

/// Exact sum.
pub fn dyadic_add(a: &Dyadic, b: &Dyadic) -> Dyadic {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let (ma, mb, e) = align(a, b);
    Dyadic::new(ma + mb, e)
}

/// Exact product.
pub fn dyadic_mul(a: &Dyadic, b: &Dyadic) -> Dyadic {
    if a.is_zero() || b.is_zero() {
        return Dyadic::zero();
    }
    // product of odd mantissas is odd, already canonical
    Dyadic {
        mantissa: &a.mantissa * &b.mantissa,
        exponent: a.exponent + b.exponent,
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // same nonzero sign: compare leading exponents first
        let (ta, tb) = (self.top_exponent().unwrap(), other.top_exponent().unwrap());
        if ta != tb {
            let o = ta.cmp(&tb);
            return if sa > 0 { o } else { o.reverse() };
        }
        let (ma, mb, _) = align(self, other);
        ma.cmp(&mb)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        dyadic_add(self, rhs)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        dyadic_add(self, &-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        dyadic_mul(self, rhs)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        dyadic_add(&self, &rhs)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        dyadic_mul(&self, &rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl FromStr for Dyadic {
    type Err = ArithError;

    /// Parses `m*2^e` or a plain integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ArithError::Parse(s.to_string());
        match s.split_once('*') {
            Some((m, rest)) => {
                let e = rest.trim().strip_prefix("2^").ok_or_else(bad)?;
                let m: BigInt = m.trim().parse().map_err(|_| bad())?;
                let e: i64 = e.trim().parse().map_err(|_| bad())?;
                Ok(Dyadic::new(m, e))
            }
            None => {
                let m: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Dyadic::new(m, 0))
            }
        }
    }
}

/// Rounds `|n| / d * 2^e0` to `p` significant bits (nearest, ties to even) and
/// returns the signed result. `d` must be positive.
pub(crate) fn round_quotient(n: &BigInt, d: &BigUint, e0: i64, p: u32) -> Dyadic {
    if n.is_zero() {
        return Dyadic::zero();
    }
    let neg = n.is_negative();
    let nu = n.magnitude();
    // scale so the integer quotient has at least p + 2 bits
    let s = p as i64 + 2 + d.bits() as i64 - nu.bits() as i64;
    let (q, r) = if s >= 0 {
        (nu << s as usize).div_rem(d)
    } else {
        nu.div_rem(&(d << (-s) as usize))
    };
    let sticky = !r.is_zero();
    let (m, shift) = round_bits(&q, p, sticky);
    let m = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, m);
    Dyadic::new(m, e0 - s + shift as i64)
}

/// Rounds the integer `q` (with an extra sticky bit below it) to `p` bits.
/// Returns the rounded mantissa and how many bits were shifted out.
fn round_bits(q: &BigUint, p: u32, sticky: bool) -> (BigUint, u64) {
    let bits = q.bits();
    if bits <= p as u64 {
        // exact unless sticky; callers always supply enough bits
        return (q.clone(), 0);
    }
    let k = bits - p as u64;
    let mut m = q >> k as usize;
    let rem = q - (&m << k as usize);
    let half = BigUint::one() << (k - 1) as usize;
    let up = match rem.cmp(&half) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => sticky || m.is_odd(),
    };
    if up {
        m += 1u32;
    }
    (m, k)
}

/// Rounds a dyadic to `p` significant bits, nearest with ties to even.
pub fn round_dyadic(x: &Dyadic, p: u32) -> Dyadic {
    if x.bits() <= p as u64 {
        return x.clone();
    }
    let (m, k) = round_bits(x.mantissa.magnitude(), p, false);
    let m = BigInt::from_biguint(x.mantissa.sign(), m);
    Dyadic::new(m, x.exponent + k as i64)
}

/// Rounds a rational to `p` significant bits, nearest with ties to even.
pub fn round_rational(r: &Rational, p: u32) -> Dyadic {
    if let Some(d) = Dyadic::from_rational_exact(r) {
        return round_dyadic(&d, p);
    }
    round_quotient(r.numer(), r.denom().magnitude(), 0, p)
}

/// Rounds `a / b` to `p` bits without forming a rational first.
pub(crate) fn round_div(a: &Dyadic, b: &Dyadic, p: u32) -> Dyadic {
    let neg = b.signum() < 0;
    let n = if neg { -a.mantissa.clone() } else { a.mantissa.clone() };
    round_quotient(&n, b.mantissa.magnitude(), a.exponent - b.exponent, p)
}

/// Rounds `sqrt(x)` to `p` bits; `x` must be nonnegative.
pub(crate) fn round_sqrt(x: &Dyadic, p: u32) -> Dyadic {
    if x.is_zero() {
        return Dyadic::zero();
    }
    let m = x.mantissa.magnitude();
    // shift left so the root carries at least p + 2 bits and the exponent is even
    let mut t = (2 * (p as i64 + 2) - m.bits() as i64).max(0);
    if (x.exponent - t).rem_euclid(2) != 0 {
        t += 1;
    }
    let sh = m << t as usize;
    let s = num_integer::Roots::sqrt(&sh);
    let sticky = &s * &s != sh;
    let (rm, k) = round_bits(&s, p, sticky);
    Dyadic::new(BigInt::from(rm), (x.exponent - t) / 2 + k as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn canonical_form() {
        let x = d(12, 0);
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), 2);
        let z = d(0, 17);
        assert_eq!(z.exponent(), 0);
    }

    #[test]
    fn add_examples() {
        let s = dyadic_add(&d(1, 0), &d(1, -60));
        assert_eq!(s.mantissa(), &((BigInt::one() << 60usize) + 1));
        assert_eq!(s.exponent(), -60);
        assert!(dyadic_add(&d(1, 0), &d(-1, 0)).is_zero());
        assert_eq!(dyadic_add(&d(3, 2), &d(5, 0)), d(17, 0));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(dyadic_mul(&d(3, 1), &d(5, -2)), d(15, -1));
        assert!(dyadic_mul(&d(7, 3), &Dyadic::zero()).is_zero());
        // (1 + 1/2)^(2^3)
        let mut x = d(3, -1);
        for _ in 0..3 {
            x = dyadic_mul(&x, &x);
        }
        assert_eq!(x, d(6561, -8));
    }

    #[test]
    fn third_rounds_up_at_four_bits() {
        let third = Rational::new(1.into(), 3.into());
        assert_eq!(round_rational(&third, 4), d(11, -5));
    }

    #[test]
    fn ties_to_even() {
        // 9/8 at 3 bits lies halfway between 1 and 5/4
        assert_eq!(round_dyadic(&d(9, -3), 3), d(1, 0));
        assert_eq!(round_dyadic(&d(11, -3), 3), d(3, -1));
    }

    #[test]
    fn f64_round_trip() {
        for &x in &[1.0, -0.1, 3.5e300, 2.2e-308, 5e-324, 1.0 / 3.0] {
            assert_eq!(Dyadic::from_f64(x).unwrap().to_f64(), x);
        }
    }

    #[test]
    fn sqrt_rounding() {
        let two = d(2, 0);
        let s = round_sqrt(&two, 53);
        assert_eq!(s.to_f64(), std::f64::consts::SQRT_2);
        assert_eq!(round_sqrt(&d(9, -4), 10), d(3, -2));
    }

    #[test]
    fn parse_and_display() {
        let x: Dyadic = "-3*2^-7".parse().unwrap();
        assert_eq!(x, d(-3, -7));
        assert_eq!(x.to_string(), "-3*2^-7");
        assert_eq!("40".parse::<Dyadic>().unwrap(), d(5, 3));
        assert!("3*3^2".parse::<Dyadic>().is_err());
    }

    #[test]
    fn ordering() {
        assert!(d(-3, 0) < d(1, -10));
        assert!(d(3, 0) > d(5, -1));
        assert!(d(-3, 0) < d(-5, -1));
    }
}
