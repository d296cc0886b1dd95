use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::scalar::{Field, Scalar};
use crate::error::{McfError, Result};

/// A nonnegative nonzero vector of `R^3`, usually normalized onto the simplex
/// `x1 + x2 + x3 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint<S> {
    coords: [S; 3],
    normalized: bool,
}

/// Exact rational flavor, used for certificates, oracles and short orbits.
pub type ExactPoint = SimplexPoint<BigRational>;
/// Floating flavor, used for long Monte-Carlo runs.
pub type FloatPoint = SimplexPoint<f64>;

impl<S: Scalar> SimplexPoint<S> {
    /// Wraps a raw vector; fails on a negative coordinate or the zero vector.
    pub fn new(coords: [S; 3]) -> Result<Self> {
        if coords.iter().any(Scalar::lt_zero) {
            return Err(McfError::InvalidInput(format!(
                "negative coordinate in {coords:?}"
            )));
        }
        if coords.iter().all(Scalar::eq_zero) {
            return Err(McfError::InvalidInput("zero vector".into()));
        }
        let normalized = coords[0].plus(&coords[1]).plus(&coords[2]).near_one();
        Ok(SimplexPoint { coords, normalized })
    }

    pub fn coords(&self) -> &[S; 3] {
        &self.coords
    }

    pub fn into_coords(self) -> [S; 3] {
        self.coords
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn sum(&self) -> S {
        self.coords[0].plus(&self.coords[1]).plus(&self.coords[2])
    }

    /// Explicit conversion to the floating flavor.
    pub fn to_float(&self) -> FloatPoint {
        let c = [
            self.coords[0].approx_f64(),
            self.coords[1].approx_f64(),
            self.coords[2].approx_f64(),
        ];
        let normalized = (c[0] + c[1] + c[2]).near_one();
        SimplexPoint {
            coords: c,
            normalized,
        }
    }
}

impl<S: Field> SimplexPoint<S> {
    pub fn normalized(&self) -> Result<Self> {
        normalize(self.coords.clone())
    }
}

/// Scales a nonnegative vector onto the simplex by its coordinate sum.
pub fn normalize<S: Field>(v: [S; 3]) -> Result<SimplexPoint<S>> {
    if v.iter().any(Scalar::lt_zero) {
        return Err(McfError::InvalidInput(format!("negative coordinate in {v:?}")));
    }
    let sum = v[0].plus(&v[1]).plus(&v[2]);
    if sum.eq_zero() {
        return Err(McfError::InvalidInput("cannot normalize the zero vector".into()));
    }
    let coords = [v[0].divide(&sum), v[1].divide(&sum), v[2].divide(&sum)];
    Ok(SimplexPoint {
        coords,
        normalized: true,
    })
}

impl ExactPoint {
    /// Normalized point with coordinates proportional to the given integers.
    pub fn from_integers(v: [BigInt; 3]) -> Result<Self> {
        normalize(v.map(BigRational::from_integer))
    }

    /// Shorthand for small integer vectors.
    pub fn from_u64s(v: [u64; 3]) -> Result<Self> {
        Self::from_integers(v.map(BigInt::from))
    }

    /// The integer vector obtained by clearing denominators.
    pub fn to_integers(&self) -> [BigInt; 3] {
        use num_integer::Integer;
        let lcm = self
            .coords
            .iter()
            .fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
        self.coords
            .clone()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
    }

    /// Decimal rendering with `digits` digits after the point.
    pub fn to_decimal_strings(&self, digits: usize) -> [String; 3] {
        self.coords.clone().map(|c| rational_to_decimal(&c, digits))
    }
}

impl FloatPoint {
    pub fn from_f64s(v: [f64; 3]) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(McfError::InvalidInput(format!("non-finite coordinate in {v:?}")));
        }
        Self::new(v)
    }

    pub fn to_decimal_strings(&self, digits: usize) -> [String; 3] {
        self.coords.map(|c| format!("{c:.digits$}"))
    }
}

/// Truncated decimal expansion of a nonnegative rational.
pub fn rational_to_decimal(r: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = (r * BigRational::from_integer(scale.clone())).floor().to_integer();
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    if digits == 0 {
        return int_part.to_string();
    }
    format!("{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
}

impl<S: Scalar + fmt::Display> fmt::Display for SimplexPoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.coords[0], self.coords[1], self.coords[2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn normalize_scales_by_sum() {
        let p = normalize([q(1, 1), q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(p.coords(), &[q(1, 4), q(1, 4), q(1, 2)]);
        assert!(p.is_normalized());
    }

    #[test]
    fn normalize_is_identity_on_normalized_input() {
        let v = [q(1, 4), q(1, 4), q(1, 2)];
        assert_eq!(normalize(v.clone()).unwrap().into_coords(), v);
    }

    #[test]
    fn normalize_matches_hand_rational_oracle() {
        // oracle: divide each integer by 3 + 5 + 7 directly
        let p = ExactPoint::from_u64s([3, 5, 7]).unwrap();
        let oracle = [q(3, 15), q(5, 15), q(7, 15)];
        assert_eq!(p.coords(), &oracle);
        assert_eq!(oracle[0], q(1, 5));
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert!(matches!(
            normalize([0.0f64, 0.0, 0.0]),
            Err(McfError::InvalidInput(_))
        ));
        assert!(SimplexPoint::new([q(0, 1), q(0, 1), q(0, 1)]).is_err());
        assert!(SimplexPoint::new([1.0, -0.5, 0.5]).is_err());
    }

    #[test]
    fn float_normalization_tolerance() {
        let p = normalize([0.1f64, 0.2, 0.7]).unwrap();
        assert!(p.is_normalized());
        assert!((p.sum() - 1.0).abs() <= 1e-12);
        assert!(!FloatPoint::new([0.1, 0.2, 0.3]).unwrap().is_normalized());
    }

    #[test]
    fn integers_roundtrip() {
        let p = ExactPoint::from_u64s([6, 10, 14]).unwrap();
        assert_eq!(p.to_integers(), [3, 5, 7].map(BigInt::from));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_to_decimal(&q(1, 3), 5), "0.33333");
        assert_eq!(rational_to_decimal(&q(1, 40), 4), "0.0250");
    }
}
