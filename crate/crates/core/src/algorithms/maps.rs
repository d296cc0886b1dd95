//! The homogeneous (unnormalized) branch maps.

use super::label::{BranchLabel, CassaigneSymbol, CoordOrder};
use crate::error::{McfError, Result};
use crate::numeric::Scalar;

/// Largest triangle quotient accepted on the floating path. Larger quotients
/// only occur next to the degenerate set and are resampled by the drivers.
pub const FLOAT_QUOTIENT_LIMIT: u64 = 1_000_000_000;

/// Triangle sequence: with `x_a < x_b < x_c`, replaces `x_c` by
/// `x_c - x_b - n x_a`, `n = floor((x_c - x_b) / x_a)`.
pub fn triangle<S: Scalar>(x: &[S; 3]) -> Result<([S; 3], BranchLabel)> {
    let order = CoordOrder::ascending(x)?;
    let [a, b, c] = order.indices();
    if x[a].eq_zero() {
        return Err(McfError::DegeneratePoint(format!(
            "smallest coordinate vanishes in {x:?}"
        )));
    }
    let diff = x[c].minus(&x[b]);
    let mut n = diff
        .floor_div(&x[a])
        .ok_or(McfError::QuotientOverflow(u64::MAX))?;
    if !S::EXACT && n > FLOAT_QUOTIENT_LIMIT {
        return Err(McfError::QuotientOverflow(n));
    }
    let mut rem = diff.minus(&x[a].times(&S::from_u64(n)));
    if !S::EXACT {
        // floor of a rounded quotient can be off by one
        if rem.lt_zero() && n > 0 {
            n -= 1;
            rem = diff.minus(&x[a].times(&S::from_u64(n)));
        } else if rem >= x[a] {
            n += 1;
            rem = diff.minus(&x[a].times(&S::from_u64(n)));
        }
    }
    if rem.eq_zero() || rem.lt_zero() {
        return Err(McfError::DegeneratePoint(format!(
            "zero remainder in the triangle step at {x:?}"
        )));
    }
    let mut y = x.clone();
    y[c] = rem;
    Ok((y, BranchLabel::Triangle { order, quotient: n }))
}

/// Cassaigne map: `(x1 - x3, x3, x2)` if `x1 > x3`, `(x2, x1, x3 - x1)` if `x3 > x1`.
pub fn cassaigne<S: Scalar>(x: &[S; 3]) -> Result<([S; 3], BranchLabel)> {
    let [x1, x2, x3] = x;
    if x1 > x3 {
        Ok((
            [x1.minus(x3), x3.clone(), x2.clone()],
            BranchLabel::Cassaigne(CassaigneSymbol::One),
        ))
    } else if x3 > x1 {
        Ok((
            [x2.clone(), x1.clone(), x3.minus(x1)],
            BranchLabel::Cassaigne(CassaigneSymbol::Two),
        ))
    } else {
        Err(McfError::DegeneratePoint(format!("x1 = x3 in {x:?}")))
    }
}

/// Selmer: with `x_i > x_j > x_k`, replaces `x_i` by `x_i - x_k`.
pub fn selmer<S: Scalar>(x: &[S; 3]) -> Result<([S; 3], BranchLabel)> {
    let order = CoordOrder::descending(x)?;
    let [i, _, k] = order.indices();
    if x[k].eq_zero() {
        return Err(McfError::DegeneratePoint(format!(
            "smallest coordinate vanishes in {x:?}"
        )));
    }
    let mut y = x.clone();
    y[i] = x[i].minus(&x[k]);
    Ok((y, BranchLabel::Selmer { order }))
}

/// Relative distance of a floating point to the nearest branch boundary of
/// the next step; small values mean the floating branch choice is fragile.
pub fn branch_margin(algorithm: super::Algorithm, x: &[f64; 3]) -> f64 {
    use super::Algorithm;
    let sum = x[0] + x[1] + x[2];
    let mut s = *x;
    s.sort_by(|p, q| p.partial_cmp(q).unwrap_or(std::cmp::Ordering::Equal));
    let order_gap = ((s[1] - s[0]).min(s[2] - s[1])) / sum;
    match algorithm {
        Algorithm::Triangle => {
            if s[0] <= 0.0 {
                return 0.0;
            }
            let ratio = (s[2] - s[1]) / s[0];
            let frac = ratio - ratio.floor();
            // boundary distance measured in units of the smallest coordinate
            let quotient_gap = frac.min(1.0 - frac) * s[0] / sum;
            order_gap.min(quotient_gap)
        }
        Algorithm::Cassaigne => (x[0] - x[2]).abs() / sum,
        Algorithm::Selmer => order_gap.min(s[0] / sum),
    }
}
