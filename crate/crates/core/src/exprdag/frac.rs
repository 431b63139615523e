use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::Rational;

/// Unreduced fraction with positive denominator. Perturbed evaluation does
/// many products of `(1 + δ)` factors; skipping the gcd per operation is much
/// cheaper than normalised rationals. Only common factors of two are removed.
#[derive(Clone, Debug)]
pub(crate) struct Frac {
    n: BigInt,
    d: BigInt,
}

impl Frac {
    pub fn from_rational(r: &Rational) -> Self {
        Frac {
            n: r.numer().clone(),
            d: r.denom().clone(),
        }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.n.clone(), self.d.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.n.is_zero()
    }

    fn make(n: BigInt, d: BigInt) -> Self {
        if n.is_zero() {
            return Frac { n, d: BigInt::from(1) };
        }
        let tz = n.trailing_zeros().unwrap_or(0).min(d.trailing_zeros().unwrap_or(0));
        if tz > 0 {
            Frac { n: n >> tz, d: d >> tz }
        } else {
            Frac { n, d }
        }
    }

    pub fn neg(&self) -> Self {
        Frac {
            n: -&self.n,
            d: self.d.clone(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.d == o.d {
            return Self::make(&self.n + &o.n, self.d.clone());
        }
        Self::make(&self.n * &o.d + &o.n * &self.d, &self.d * &o.d)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::make(&self.n * &o.n, &self.d * &o.d)
    }

    pub fn div(&self, o: &Self) -> Self {
        let (n, d) = (&self.n * &o.d, &self.d * &o.n);
        if d.is_negative() {
            Self::make(-n, -d)
        } else {
            Self::make(n, d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_rational() {
        let a = Rational::new(3.into(), 4.into());
        let b = Rational::new((-5).into(), 6.into());
        let (fa, fb) = (Frac::from_rational(&a), Frac::from_rational(&b));
        assert_eq!(fa.add(&fb).to_rational(), &a + &b);
        assert_eq!(fa.sub(&fb).to_rational(), &a - &b);
        assert_eq!(fa.mul(&fb).to_rational(), &a * &b);
        assert_eq!(fa.div(&fb).to_rational(), &a / &b);
    }
}
