use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

/// The monic integer cubic `x^3 + a x^2 + b x + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonicCubic {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl MonicCubic {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Self {
        MonicCubic { a, b, c }
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Self {
        MonicCubic::new(a.into(), b.into(), c.into())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        ((x + &self.a) * x + &self.b) * x + &self.c
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let (a, b, c) = self.coeffs_f64();
        ((x + a) * x + b) * x + c
    }

    pub fn coeffs_f64(&self) -> (f64, f64, f64) {
        (
            self.a.to_f64().unwrap_or(f64::NAN),
            self.b.to_f64().unwrap_or(f64::NAN),
            self.c.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Coefficients `[1, a, b, c]` from the leading term down.
    pub fn coefficients(&self) -> [BigInt; 4] {
        [BigInt::from(1), self.a.clone(), self.b.clone(), self.c.clone()]
    }
}

impl fmt::Display for MonicCubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^3")?;
        for (coeff, power) in [(&self.a, "x^2"), (&self.b, "x"), (&self.c, "")] {
            if coeff.is_zero() {
                continue;
            }
            let sign = if coeff.is_negative() { '-' } else { '+' };
            let mag = coeff.abs();
            if power.is_empty() {
                write!(f, " {sign} {mag}")?;
            } else if mag == BigInt::from(1) {
                write!(f, " {sign} {power}")?;
            } else {
                write!(f, " {sign} {mag}{power}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct CubicRepr {
    a: String,
    b: String,
    c: String,
    text: String,
}

impl Serialize for MonicCubic {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CubicRepr {
            a: self.a.to_string(),
            b: self.b.to_string(),
            c: self.c.to_string(),
            text: self.to_string(),
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_like_handwritten() {
        assert_eq!(MonicCubic::from_i64(-7, 6, -1).to_string(), "x^3 - 7x^2 + 6x - 1");
        assert_eq!(MonicCubic::from_i64(-4, 0, 1).to_string(), "x^3 - 4x^2 + 1");
        assert_eq!(MonicCubic::from_i64(0, -1, 0).to_string(), "x^3 - x");
    }

    #[test]
    fn evaluation() {
        let p = MonicCubic::from_i64(-7, 6, -1);
        assert_eq!(p.eval(&BigInt::from(1)), BigInt::from(-1));
        assert_eq!(p.eval(&BigInt::from(-1)), BigInt::from(-15));
        assert_eq!(p.eval_f64(2.0), 8.0 - 28.0 + 12.0 - 1.0);
    }
}
