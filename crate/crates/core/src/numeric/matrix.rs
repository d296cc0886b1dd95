use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};

use super::scalar::Scalar;
use crate::error::{McfError, Result};

/// Dense `3x3` floating matrix used on the Monte-Carlo paths.
pub type Mat3 = [[f64; 3]; 3];

/// Exact `3x3` integer matrix.
///
/// Step matrices and every product of them are nonnegative with determinant
/// `±1`; the type itself admits arbitrary integers so that conjugates and test
/// matrices can be represented too.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix3 {
    rows: [[BigInt; 3]; 3],
}

impl IntMatrix3 {
    pub fn new(rows: [[BigInt; 3]; 3]) -> Self {
        IntMatrix3 { rows }
    }

    pub fn from_i64(rows: [[i64; 3]; 3]) -> Self {
        IntMatrix3 {
            rows: rows.map(|r| r.map(BigInt::from)),
        }
    }

    pub fn identity() -> Self {
        Self::from_i64([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    pub fn rows(&self) -> &[[BigInt; 3]; 3] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    /// Entries as `i64`, if all of them fit.
    pub fn to_i64(&self) -> Option<[[i64; 3]; 3]> {
        let mut out = [[0i64; 3]; 3];
        for (row, src) in out.iter_mut().zip(&self.rows) {
            for (e, v) in row.iter_mut().zip(src) {
                *e = v.to_i64()?;
            }
        }
        Some(out)
    }

    pub fn to_f64(&self) -> Mat3 {
        self.rows.each_ref().map(|r| r.each_ref().map(Scalar::approx_f64))
    }

    pub fn transpose(&self) -> Self {
        let r = &self.rows;
        IntMatrix3::new(std::array::from_fn(|i| std::array::from_fn(|j| r[j][i].clone())))
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> BigInt {
        let m = &self.rows;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn trace(&self) -> BigInt {
        &self.rows[0][0] + &self.rows[1][1] + &self.rows[2][2]
    }

    /// Sum of all entries; the norm used for step-matrix size bounds.
    pub fn entry_sum(&self) -> BigInt {
        self.rows.iter().flatten().sum()
    }

    /// All nine entries are `>= 1`.
    pub fn is_positive(&self) -> bool {
        self.rows.iter().flatten().all(|e| e.sign() == Sign::Plus)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.rows.iter().flatten().all(|e| !Signed::is_negative(e))
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Exact inverse of a determinant `±1` matrix via the adjugate.
    pub fn inverse_unimodular(&self) -> Result<Self> {
        let d = self.det();
        if !d.abs().is_one() {
            return Err(McfError::InvalidInput(format!(
                "matrix with determinant {d} has no integer inverse"
            )));
        }
        let m = &self.rows;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
        };
        // adj[i][j] = cofactor(j, i)
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        Ok(IntMatrix3::new(adj.map(|r| r.map(|e| e * &d))))
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = IntMatrix3::identity();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Linear action on a column vector, exact in exact flavors.
    pub fn apply<S: Scalar>(&self, v: &[S; 3]) -> [S; 3] {
        std::array::from_fn(|i| {
            (0..3).fold(S::zero(), |acc, j| {
                acc.plus(&S::from_bigint(&self.rows[i][j]).times(&v[j]))
            })
        })
    }

    /// `j`-th column.
    pub fn column(&self, j: usize) -> [BigInt; 3] {
        std::array::from_fn(|i| self.rows[i][j].clone())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        IntMatrix3::new(self.rows.clone().map(|r| r.map(|e| e * k)))
    }

    pub fn add(&self, other: &Self) -> Self {
        IntMatrix3::new(std::array::from_fn(|i| {
            std::array::from_fn(|j| &self.rows[i][j] + &other.rows[i][j])
        }))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }
}

impl Mul for &IntMatrix3 {
    type Output = IntMatrix3;

    fn mul(self, rhs: &IntMatrix3) -> IntMatrix3 {
        let a = &self.rows;
        let b = &rhs.rows;
        IntMatrix3::new(std::array::from_fn(|i| {
            std::array::from_fn(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j] + &a[i][2] * &b[2][j])
        }))
    }
}

impl Mul for IntMatrix3 {
    type Output = IntMatrix3;

    fn mul(self, rhs: IntMatrix3) -> IntMatrix3 {
        &self * &rhs
    }
}

impl fmt::Display for IntMatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[{},{},{}]", row[0], row[1], row[2])?;
        }
        write!(f, "]")
    }
}

/// Rows of numbers; entries beyond `i64` are written as decimal strings.
impl Serialize for IntMatrix3 {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let mut seq = serializer.serialize_seq(Some(3))?;
        for row in &self.rows {
            let cells: Vec<serde_json::Value> = row
                .iter()
                .map(|e| match e.to_i64() {
                    Some(v) => serde_json::Value::from(v),
                    None => serde_json::Value::from(e.to_string()),
                })
                .collect();
            seq.serialize_element(&cells)?;
        }
        seq.end()
    }
}

/// Product of a sequence of matrices taken left to right.
///
/// Every factor must be a nonnegative unimodular cocycle matrix; debug builds
/// assert the invariant on each partial product.
pub fn cocycle_product<'a, I>(factors: I) -> IntMatrix3
where
    I: IntoIterator<Item = &'a IntMatrix3>,
{
    factors.into_iter().fold(IntMatrix3::identity(), |acc, m| {
        let p = &acc * m;
        debug_assert!(p.is_nonnegative(), "cocycle product with a negative entry: {p}");
        debug_assert!(p.is_unimodular(), "cocycle product with determinant {}", p.det());
        p
    })
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j])
    })
}

pub fn mat3_transpose(a: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub const MAT3_IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn naive_product(a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
        let mut c = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }

    #[test]
    fn identity_is_neutral() {
        let m = IntMatrix3::from_i64([[1, 2, 1], [1, 3, 2], [1, 3, 3]]);
        assert_eq!(&IntMatrix3::identity() * &m, m);
        assert_eq!(&m * &IntMatrix3::identity(), m);
    }

    #[test]
    fn triangle_first_loop_partial_and_full_products() {
        let a = IntMatrix3::from_i64([[1, 0, 0], [0, 1, 0], [0, 1, 1]]);
        let b = IntMatrix3::from_i64([[1, 0, 0], [1, 1, 1], [0, 0, 1]]);
        let c = IntMatrix3::from_i64([[1, 2, 1], [0, 1, 0], [0, 0, 1]]);
        let ab = &a * &b;
        assert_eq!(ab, IntMatrix3::from_i64([[1, 0, 0], [1, 1, 1], [1, 1, 2]]));
        assert_eq!(&ab * &c, IntMatrix3::from_i64([[1, 2, 1], [1, 3, 2], [1, 3, 3]]));
    }

    #[test]
    fn determinants() {
        assert_eq!(IntMatrix3::identity().det(), BigInt::from(1));
        assert_eq!(
            IntMatrix3::from_i64([[1, 2, 1], [1, 3, 2], [1, 3, 3]]).det(),
            BigInt::from(1)
        );
        assert_eq!(
            IntMatrix3::from_i64([[1, 2, 1], [1, 1, 1], [1, 2, 2]]).det(),
            BigInt::from(-1)
        );
    }

    #[test]
    fn apply_row_sums() {
        let m = IntMatrix3::from_i64([[1, 2, 1], [1, 3, 2], [1, 3, 3]]);
        let v = [BigInt::from(1), BigInt::from(1), BigInt::from(1)];
        assert_eq!(m.apply(&v), [4, 6, 7].map(BigInt::from));
        let id = IntMatrix3::identity();
        let w = [0.2, 0.3, 0.5];
        assert_eq!(id.apply(&w), w);
    }

    #[test]
    fn unimodular_inverse() {
        let m = IntMatrix3::from_i64([[1, 2, 2], [2, 4, 3], [1, 1, 1]]);
        let inv = m.inverse_unimodular().unwrap();
        assert_eq!(&m * &inv, IntMatrix3::identity());
        assert!(IntMatrix3::from_i64([[2, 0, 0], [0, 1, 0], [0, 0, 1]])
            .inverse_unimodular()
            .is_err());
    }

    #[test]
    fn serializes_small_entries_as_numbers() {
        let m = IntMatrix3::from_i64([[1, 2, 1], [1, 3, 2], [1, 3, 3]]);
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[1,2,1],[1,3,2],[1,3,3]]");
    }

    proptest! {
        #[test]
        fn product_matches_triple_loop(a in prop::array::uniform3(prop::array::uniform3(0i64..=10)),
                                       b in prop::array::uniform3(prop::array::uniform3(0i64..=10))) {
            let p = &IntMatrix3::from_i64(a) * &IntMatrix3::from_i64(b);
            prop_assert_eq!(p.to_i64().unwrap(), naive_product(&a, &b));
            prop_assert_eq!(p.det(), IntMatrix3::from_i64(a).det() * IntMatrix3::from_i64(b).det());
        }

        #[test]
        fn apply_matches_rational_oracle(m in prop::array::uniform3(prop::array::uniform3(0i64..=10)),
                                         num in prop::array::uniform3(0i64..1000),
                                         den in prop::array::uniform3(1i64..1000)) {
            let v: [BigRational; 3] = std::array::from_fn(|i| BigRational::new(num[i].into(), den[i].into()));
            let got = IntMatrix3::from_i64(m).apply(&v);
            for i in 0..3 {
                let mut acc = BigRational::from_integer(0.into());
                for j in 0..3 {
                    acc += BigRational::from_integer(m[i][j].into()) * &v[j];
                }
                prop_assert_eq!(&got[i], &acc);
            }
        }
    }
}
