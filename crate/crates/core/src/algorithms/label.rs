use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::Algorithm;
use crate::error::{McfError, Result};
use crate::numeric::{IntMatrix3, Mat3, Scalar};

/// A permutation of the three coordinate indices.
///
/// Stored zero-based; rendered one-based as `(a,b,c)`. Whether the order
/// reads ascending or descending depends on the algorithm that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoordOrder([u8; 3]);

impl CoordOrder {
    /// Builds an order from one-based indices.
    pub fn from_one_based(idx: [u8; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &i in &idx {
            if !(1..=3).contains(&i) || seen[(i - 1) as usize] {
                return Err(McfError::InvalidInput(format!(
                    "({},{},{}) is not a permutation of (1,2,3)",
                    idx[0], idx[1], idx[2]
                )));
            }
            seen[(i - 1) as usize] = true;
        }
        Ok(CoordOrder(idx.map(|i| i - 1)))
    }

    /// Zero-based indices.
    pub fn indices(self) -> [usize; 3] {
        self.0.map(usize::from)
    }

    pub fn one_based(self) -> [u8; 3] {
        self.0.map(|i| i + 1)
    }

    /// Indices sorted by increasing coordinate; ties are degenerate.
    pub fn ascending<S: Scalar>(x: &[S; 3]) -> Result<Self> {
        let mut idx = [0u8, 1, 2];
        idx.sort_by(|&p, &q| {
            x[p as usize]
                .partial_cmp(&x[q as usize])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let [a, b, c] = idx.map(usize::from);
        if !(x[a] < x[b] && x[b] < x[c]) {
            return Err(McfError::DegeneratePoint(format!(
                "coordinate tie in {x:?}"
            )));
        }
        Ok(CoordOrder(idx))
    }

    /// Indices sorted by decreasing coordinate; ties are degenerate.
    pub fn descending<S: Scalar>(x: &[S; 3]) -> Result<Self> {
        let [a, b, c] = Self::ascending(x)?.0;
        Ok(CoordOrder([c, b, a]))
    }

    /// The cyclic successor `(a,b,c) -> (c,a,b)`.
    pub fn rotate(self) -> Self {
        let [a, b, c] = self.0;
        CoordOrder([c, a, b])
    }

    /// Whether the permutation is even (a rotation of `(1,2,3)`).
    pub fn is_even(self) -> bool {
        matches!(self.0, [0, 1, 2] | [2, 0, 1] | [1, 2, 0])
    }

    pub fn all() -> [CoordOrder; 6] {
        [
            CoordOrder([0, 1, 2]),
            CoordOrder([2, 0, 1]),
            CoordOrder([1, 2, 0]),
            CoordOrder([0, 2, 1]),
            CoordOrder([1, 0, 2]),
            CoordOrder([2, 1, 0]),
        ]
    }
}

impl fmt::Display for CoordOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.one_based();
        write!(f, "({a},{b},{c})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CassaigneSymbol {
    /// `x1 > x3`
    One,
    /// `x3 > x1`
    Two,
}

impl CassaigneSymbol {
    pub fn digit(self) -> char {
        match self {
            CassaigneSymbol::One => '1',
            CassaigneSymbol::Two => '2',
        }
    }
}

/// Symbolic address of one step of an algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BranchLabel {
    /// Ascending coordinate order `x_a < x_b < x_c` and partial quotient
    /// `floor((x_c - x_b) / x_a)`.
    Triangle { order: CoordOrder, quotient: u64 },
    Cassaigne(CassaigneSymbol),
    /// Descending coordinate order `x_i > x_j > x_k`.
    Selmer { order: CoordOrder },
}

impl BranchLabel {
    pub fn triangle(order: [u8; 3], quotient: u64) -> Result<Self> {
        Ok(BranchLabel::Triangle {
            order: CoordOrder::from_one_based(order)?,
            quotient,
        })
    }

    pub fn cassaigne(symbol: u8) -> Result<Self> {
        match symbol {
            1 => Ok(BranchLabel::Cassaigne(CassaigneSymbol::One)),
            2 => Ok(BranchLabel::Cassaigne(CassaigneSymbol::Two)),
            s => Err(McfError::InvalidInput(format!("Cassaigne symbol {s} is not 1 or 2"))),
        }
    }

    pub fn selmer(order: [u8; 3]) -> Result<Self> {
        Ok(BranchLabel::Selmer {
            order: CoordOrder::from_one_based(order)?,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            BranchLabel::Triangle { .. } => Algorithm::Triangle,
            BranchLabel::Cassaigne(_) => Algorithm::Cassaigne,
            BranchLabel::Selmer { .. } => Algorithm::Selmer,
        }
    }

    /// The step matrix `M` with `old = M * new`.
    pub fn matrix(&self) -> IntMatrix3 {
        let m = self.matrix_f64();
        match self {
            BranchLabel::Triangle { order, quotient } => {
                let [a, b, c] = order.indices();
                let mut rows: [[BigInt; 3]; 3] = IntMatrix3::identity().rows().clone();
                rows[c][b] += 1;
                rows[c][a] += BigInt::from(*quotient);
                IntMatrix3::new(rows)
            }
            _ => IntMatrix3::new(m.map(|r| r.map(|e| BigInt::from(e as i64)))),
        }
    }

    /// Same matrix in floating point.
    pub fn matrix_f64(&self) -> Mat3 {
        let mut m = crate::numeric::MAT3_IDENTITY;
        match self {
            BranchLabel::Triangle { order, quotient } => {
                let [a, b, c] = order.indices();
                m[c][b] += 1.0;
                m[c][a] += *quotient as f64;
            }
            BranchLabel::Cassaigne(CassaigneSymbol::One) => {
                m = [[1.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]];
            }
            BranchLabel::Cassaigne(CassaigneSymbol::Two) => {
                m = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 1.0]];
            }
            BranchLabel::Selmer { order } => {
                let [i, _, k] = order.indices();
                m[i][k] = 1.0;
            }
        }
        m
    }

    /// Zero pattern of the step matrix, used for exact positivity tracking.
    pub fn pattern(&self) -> [[bool; 3]; 3] {
        self.matrix_f64().map(|r| r.map(|e| e != 0.0))
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchLabel::Triangle { order, quotient } => write!(f, "{order}b{quotient}"),
            BranchLabel::Cassaigne(s) => write!(f, "{}", s.digit()),
            BranchLabel::Selmer { order } => write!(f, "{order}"),
        }
    }
}
