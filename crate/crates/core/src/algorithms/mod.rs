//! The triangle sequence, Cassaigne and Selmer algorithms as branch-labeled
//! piecewise linear maps.
//!
//! Every branch is described by an integer step matrix `M` that inverts the
//! subtractive map: if `F(x) = y` then `x = M y`. Ties and exact zero
//! remainders are reported as [`McfError::DegeneratePoint`]; the maps are only
//! defined almost everywhere and no tie-break is canonical.

mod label;
pub mod maps;
mod path;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use label::{BranchLabel, CassaigneSymbol, CoordOrder};
pub use maps::{branch_margin, FLOAT_QUOTIENT_LIMIT};
pub use path::Path;

use crate::error::{McfError, Result};
use crate::numeric::{normalize, Field, IntMatrix3, Scalar, SimplexPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Triangle,
    Cassaigne,
    Selmer,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Triangle, Algorithm::Cassaigne, Algorithm::Selmer];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Triangle => "triangle",
            Algorithm::Cassaigne => "cassaigne",
            Algorithm::Selmer => "selmer",
        }
    }

    /// Prefix used in the path grammar.
    pub fn path_prefix(self) -> char {
        match self {
            Algorithm::Triangle => 'T',
            Algorithm::Cassaigne => 'C',
            Algorithm::Selmer => 'S',
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = McfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "triangle" | "t" => Ok(Algorithm::Triangle),
            "cassaigne" | "c" => Ok(Algorithm::Cassaigne),
            "selmer" | "s" => Ok(Algorithm::Selmer),
            other => Err(McfError::Parse(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// One step of the homogeneous map `F`, returning the raw image and the branch taken.
pub fn raw_step<S: Scalar>(algorithm: Algorithm, x: &[S; 3]) -> Result<([S; 3], BranchLabel)> {
    match algorithm {
        Algorithm::Triangle => maps::triangle(x),
        Algorithm::Cassaigne => maps::cassaigne(x),
        Algorithm::Selmer => maps::selmer(x),
    }
}

/// The branch the algorithm takes at `x`.
pub fn branch<S: Scalar>(algorithm: Algorithm, x: &[S; 3]) -> Result<BranchLabel> {
    raw_step(algorithm, x).map(|(_, l)| l)
}

pub fn triangle_branch<S: Scalar>(x: &SimplexPoint<S>) -> Result<BranchLabel> {
    branch(Algorithm::Triangle, x.coords())
}

pub fn cassaigne_branch<S: Scalar>(x: &SimplexPoint<S>) -> Result<BranchLabel> {
    branch(Algorithm::Cassaigne, x.coords())
}

pub fn triangle_step_matrix(label: &BranchLabel) -> Result<IntMatrix3> {
    match label {
        BranchLabel::Triangle { .. } => Ok(label.matrix()),
        other => Err(McfError::InvalidInput(format!("{other} is not a triangle label"))),
    }
}

pub fn cassaigne_step_matrix(symbol: CassaigneSymbol) -> IntMatrix3 {
    BranchLabel::Cassaigne(symbol).matrix()
}

/// Selmer step followed by renormalization; also returns the inverse step matrix.
pub fn selmer_step<S: Field>(
    x: &SimplexPoint<S>,
) -> Result<(SimplexPoint<S>, BranchLabel, IntMatrix3)> {
    let (y, label) = maps::selmer(x.coords())?;
    Ok((normalize(y)?, label, label.matrix()))
}

/// Strict triangle inequalities `x_i < x_j + x_k`: the Selmer absorbing region.
pub fn selmer_in_attractor<S: Scalar>(x: &SimplexPoint<S>) -> bool {
    let c = x.coords();
    (0..3).all(|i| c[i] < c[(i + 1) % 3].plus(&c[(i + 2) % 3]))
}

/// `x -> F(x) / |F(x)|` together with the branch label.
pub fn projective_step<S: Field>(
    algorithm: Algorithm,
    x: &SimplexPoint<S>,
) -> Result<(SimplexPoint<S>, BranchLabel)> {
    let (y, label) = raw_step(algorithm, x.coords())?;
    Ok((normalize(y)?, label))
}

/// Whether `next` may follow `prev` along an orbit.
///
/// Triangle: the ascending order `(a,b,c)` is always followed by `(c,a,b)`,
/// because the new `x_c` is a remainder modulo `x_a`. Cassaigne: any symbol.
/// Selmer: with `prev = (i,j,k)` descending, `x_j > x_k` survives the step, so
/// `j` must precede `k` in `next`.
pub fn valid_successor(prev: &BranchLabel, next: &BranchLabel) -> Result<bool> {
    match (prev, next) {
        (BranchLabel::Triangle { order: p, .. }, BranchLabel::Triangle { order: n, .. }) => {
            Ok(p.rotate() == *n)
        }
        (BranchLabel::Cassaigne(_), BranchLabel::Cassaigne(_)) => Ok(true),
        (BranchLabel::Selmer { order: p }, BranchLabel::Selmer { order: n }) => {
            let [_, j, k] = p.indices();
            let pos = |idx: usize| n.indices().iter().position(|&v| v == idx);
            Ok(pos(j) < pos(k))
        }
        _ => Err(McfError::InvalidInput(format!(
            "labels {prev} and {next} belong to different algorithms"
        ))),
    }
}
