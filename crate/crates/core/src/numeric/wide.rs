//! A binary floating point type with a wide fixed mantissa, for orbits that
//! must track the exact ones for many steps of a fast expanding map.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::point::SimplexPoint;
use super::scalar::{ln_bigint, Field, Scalar};

/// Mantissa width in bits.
pub const WIDE_PRECISION: u64 = 256;

/// `mantissa * 2^exponent` with `|mantissa| < 2^WIDE_PRECISION`. Every
/// operation rounds toward negative infinity.
#[derive(Clone)]
pub struct WideFloat {
    mantissa: BigInt,
    exponent: i64,
}

pub type WidePoint = SimplexPoint<WideFloat>;

impl WideFloat {
    fn rounded(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return WideFloat {
                mantissa,
                exponent: 0,
            };
        }
        let bits = mantissa.bits();
        if bits <= WIDE_PRECISION {
            return WideFloat { mantissa, exponent };
        }
        let shift = bits - WIDE_PRECISION;
        WideFloat {
            mantissa: mantissa >> shift,
            exponent: exponent + shift as i64,
        }
    }

    /// Nearest-below value of a rational.
    pub fn from_rational(r: &BigRational) -> Self {
        let shift = WIDE_PRECISION + r.denom().bits() - r.numer().bits().min(r.denom().bits());
        let scaled = (r.numer() << shift).div_floor(r.denom());
        Self::rounded(scaled, -(shift as i64))
    }

    /// The exact value represented.
    pub fn to_rational(&self) -> BigRational {
        let one = BigInt::from(1);
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            BigRational::new(self.mantissa.clone(), one << (-self.exponent) as u64)
        }
    }

    fn aligned(&self, rhs: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exponent.min(rhs.exponent);
        (
            &self.mantissa << (self.exponent - e) as u64,
            &rhs.mantissa << (rhs.exponent - e) as u64,
            e,
        )
    }
}

impl PartialEq for WideFloat {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for WideFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (a, b, _) = self.aligned(other);
        Some(a.cmp(&b))
    }
}

impl fmt::Debug for WideFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.approx_f64())
    }
}

impl fmt::Display for WideFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.approx_f64())
    }
}

impl Scalar for WideFloat {
    const EXACT: bool = false;
    const FLAVOR: &'static str = "wide";

    fn zero() -> Self {
        Self::from_u64(0)
    }
    fn one() -> Self {
        Self::from_u64(1)
    }
    fn from_u64(n: u64) -> Self {
        Self::rounded(BigInt::from(n), 0)
    }
    fn from_bigint(n: &BigInt) -> Self {
        Self::rounded(n.clone(), 0)
    }
    fn plus(&self, rhs: &Self) -> Self {
        let (a, b, e) = self.aligned(rhs);
        Self::rounded(a + b, e)
    }
    fn minus(&self, rhs: &Self) -> Self {
        let (a, b, e) = self.aligned(rhs);
        Self::rounded(a - b, e)
    }
    fn times(&self, rhs: &Self) -> Self {
        Self::rounded(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
    fn eq_zero(&self) -> bool {
        self.mantissa.is_zero()
    }
    fn lt_zero(&self) -> bool {
        self.mantissa.sign() == Sign::Minus
    }
    fn floor_div(&self, divisor: &Self) -> Option<u64> {
        if divisor.eq_zero() {
            return None;
        }
        let (a, b, _) = self.aligned(divisor);
        a.div_floor(&b).to_u64()
    }
    fn near_one(&self) -> bool {
        let err = self.minus(&Self::one());
        err.eq_zero() || err.mantissa.bits() as i64 + err.exponent < -(WIDE_PRECISION as i64) + 8
    }
    fn approx_f64(&self) -> f64 {
        if self.eq_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits();
        let shift = bits.saturating_sub(64);
        let top = (&self.mantissa >> shift).to_f64().unwrap_or(f64::NAN);
        let e = self.exponent + shift as i64;
        top * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }
}

impl Field for WideFloat {
    fn divide(&self, rhs: &Self) -> Self {
        let shift = WIDE_PRECISION + rhs.mantissa.bits();
        let q = (&self.mantissa << shift).div_floor(&rhs.mantissa);
        Self::rounded(q, self.exponent - rhs.exponent - shift as i64)
    }
    fn ln_abs(&self) -> f64 {
        if self.eq_zero() {
            return f64::NEG_INFINITY;
        }
        ln_bigint(&self.mantissa.abs()) + self.exponent as f64 * std::f64::consts::LN_2
    }
}

impl SimplexPoint<BigRational> {
    /// Conversion to the wide floating flavor, each coordinate rounded down.
    pub fn to_wide(&self) -> WidePoint {
        let c = self.coords().clone().map(|r| WideFloat::from_rational(&r));
        SimplexPoint::new(c).expect("rounding keeps coordinates nonnegative and the sum positive")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rounding_error_is_below_precision() {
        let r = q(1, 3);
        let w = WideFloat::from_rational(&r);
        let err = (r.clone() - w.to_rational()).abs();
        assert!(!Signed::is_negative(&err));
        assert!(err * (BigInt::from(1) << (WIDE_PRECISION - 1)) < r);
        let back = w.times(&WideFloat::from_u64(3));
        assert!(back.near_one());
        assert!(!WideFloat::from_rational(&q(9, 10)).near_one());
    }

    #[test]
    fn arithmetic_matches_rationals_on_small_values() {
        let a = WideFloat::from_rational(&q(5, 8));
        let b = WideFloat::from_rational(&q(3, 16));
        assert_eq!(a.plus(&b).to_rational(), q(13, 16));
        assert_eq!(b.minus(&a).to_rational(), q(-7, 16));
        assert_eq!(a.times(&b).to_rational(), q(15, 128));
        assert_eq!(a.divide(&b).to_rational().floor(), q(3, 1));
        assert_eq!(a.floor_div(&b), Some(3));
        assert!(b < a && b.minus(&a).lt_zero());
        assert_eq!(a.approx_f64(), 0.625);
        assert!((b.ln_abs() - (3.0f64 / 16.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn tiny_and_huge_values() {
        let tiny = WideFloat::from_rational(&BigRational::new(BigInt::from(1), BigInt::from(1) << 2000u32));
        assert!(tiny > WideFloat::zero());
        assert!((tiny.ln_abs() + 2000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        let sum = tiny.plus(&WideFloat::one());
        assert_eq!(sum, WideFloat::one());
        assert!(WideFloat::one().minus(&tiny).near_one());
        assert_eq!(WideFloat::one().floor_div(&WideFloat::zero()), None);
    }

    fn within_precision(w: &WideFloat, exact: &BigRational) -> bool {
        let err = (w.to_rational() - exact).abs();
        err * (BigInt::from(1) << (WIDE_PRECISION - 4)) <= exact.abs()
    }

    proptest! {
        #[test]
        fn operations_round_like_rationals(a in 1i64..1 << 40, b in 1i64..1 << 40, c in 1i64..1 << 40, d in 1i64..1 << 40) {
            let (x, y) = (q(a, b), q(c, d));
            let (wx, wy) = (WideFloat::from_rational(&x), WideFloat::from_rational(&y));
            prop_assert!(within_precision(&wx, &x));
            prop_assert!(within_precision(&wx.plus(&wy), &(&x + &y)));
            prop_assert!(within_precision(&wx.times(&wy), &(&x * &y)));
            prop_assert!(within_precision(&wx.divide(&wy), &(&x / &y)));
            // distinct rationals with 40-bit parts differ far above the rounding level
            prop_assert_eq!(wx.partial_cmp(&wy), x.partial_cmp(&y));
        }
    }
}
