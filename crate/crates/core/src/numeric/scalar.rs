use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Tolerance used to decide whether a floating point vector is normalized.
pub const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

/// Ordered ring elements the step maps can run on.
///
/// The branch maps only subtract, multiply by partial quotients and compare, so
/// the same code drives exact integer vectors, exact rationals and `f64`.
pub trait Scalar: Clone + PartialOrd + fmt::Debug + Send + Sync + 'static {
    /// `true` for exact arithmetic; decides how branch boundaries are treated.
    const EXACT: bool;
    /// Short name used in reports.
    const FLAVOR: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(n: u64) -> Self;
    fn from_bigint(n: &BigInt) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn eq_zero(&self) -> bool;
    fn lt_zero(&self) -> bool;
    /// `floor(self / divisor)` for `self >= 0`, `divisor > 0`; `None` when it does not fit a `u64`.
    fn floor_div(&self, divisor: &Self) -> Option<u64>;
    /// Exact equality with one for exact flavors, `FLOAT_SUM_TOLERANCE` otherwise.
    fn near_one(&self) -> bool;
    fn approx_f64(&self) -> f64;
}

/// Scalars that also divide; required for renormalization.
pub trait Field: Scalar {
    fn divide(&self, rhs: &Self) -> Self;
    /// `ln |self|`, finite even when `self` underflows `f64`.
    fn ln_abs(&self) -> f64;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const FLAVOR: &'static str = "floating";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_u64(n: u64) -> Self {
        n as f64
    }
    fn from_bigint(n: &BigInt) -> Self {
        ToPrimitive::to_f64(n).unwrap_or(f64::NAN)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn eq_zero(&self) -> bool {
        *self == 0.0
    }
    fn lt_zero(&self) -> bool {
        *self < 0.0
    }
    fn floor_div(&self, divisor: &Self) -> Option<u64> {
        let q = (self / divisor).floor();
        if q.is_finite() && q >= 0.0 && q < u64::MAX as f64 {
            Some(q as u64)
        } else {
            None
        }
    }
    fn near_one(&self) -> bool {
        (self - 1.0).abs() <= FLOAT_SUM_TOLERANCE
    }
    fn approx_f64(&self) -> f64 {
        *self
    }
}

impl Field for f64 {
    fn divide(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn ln_abs(&self) -> f64 {
        self.abs().ln()
    }
}

impl Scalar for BigInt {
    const EXACT: bool = true;
    const FLAVOR: &'static str = "exact";

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_u64(n: u64) -> Self {
        BigInt::from(n)
    }
    fn from_bigint(n: &BigInt) -> Self {
        n.clone()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn eq_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn lt_zero(&self) -> bool {
        self.sign() == Sign::Minus
    }
    fn floor_div(&self, divisor: &Self) -> Option<u64> {
        self.div_floor(divisor).to_u64()
    }
    fn near_one(&self) -> bool {
        One::is_one(self)
    }
    fn approx_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::INFINITY)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const FLAVOR: &'static str = "exact";

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn eq_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn lt_zero(&self) -> bool {
        Signed::is_negative(self)
    }
    fn floor_div(&self, divisor: &Self) -> Option<u64> {
        (self / divisor).floor().to_integer().to_u64()
    }
    fn near_one(&self) -> bool {
        One::is_one(self)
    }
    fn approx_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
}

impl Field for BigRational {
    fn divide(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn ln_abs(&self) -> f64 {
        if Zero::is_zero(self) {
            f64::NEG_INFINITY
        } else {
            ln_ratio(&self.abs())
        }
    }
}

/// Natural logarithm of a positive big integer, accurate to `f64` precision
/// for arbitrarily large magnitudes.
pub fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.sign() == Sign::Plus, "ln of non-positive integer");
    let bits = n.bits();
    if bits <= 1000 {
        return ToPrimitive::to_f64(n).map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    ToPrimitive::to_f64(&top).unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational.
pub fn ln_ratio(r: &BigRational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// Rational to `f64` without overflow for huge numerators and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() {
            return v;
        }
    }
    if Zero::is_zero(r.numer()) {
        return 0.0;
    }
    let sign = if Signed::is_negative(r) { -1.0 } else { 1.0 };
    sign * ln_ratio(&r.abs()).exp()
}
