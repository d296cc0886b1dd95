//! Cylinder measures, step norms, log-integrability sums, Jacobians of the
//! projective branch maps, and empirical distortion ratios.
//!
//! Areas are Lebesgue measure in the chart `(x1, x3)` of the simplex
//! `x1 + x2 + x3 = 1`. The whole simplex has chart area `1/2`, so a uniform
//! draw lands in a region with probability twice its chart area.

mod jacobian;
mod sampling;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

pub use jacobian::{log_jacobian, projective_log_jacobian};
pub use sampling::{cylinder_frequency, distortion_ratio, DistortionEstimate, FrequencyEstimate};

use crate::algorithms::{Algorithm, BranchLabel, CoordOrder, Path};
use crate::error::{McfError, Result};

/// Factor turning a chart area into the measure of the cylinder formula.
/// Fixed by the exact match at `b = 0`.
pub const CHART_NORMALIZATION: i64 = 1;

/// Coordinate order of the sector the vertex formula describes:
/// `x3 < x2 < x1`.
pub const CYLINDER_SECTOR: [u8; 3] = [3, 2, 1];

pub type ChartPoint = [BigRational; 2];

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

/// Vertices of the depth-1 triangle cylinder with quotient `b` in the sector
/// `x3 < x2 < x1`, in the chart `(x1, x3)`.
pub fn triangle_cylinder_vertices(b: u64) -> [ChartPoint; 3] {
    let r = |n: u64, d: u64| BigRational::new(big(n), big(d));
    [
        [q(1, 2), BigRational::zero()],
        [r(b + 1, b + 3), r(1, b + 3)],
        [r(b + 2, b + 4), r(1, b + 4)],
    ]
}

/// Twice the signed area.
fn signed_double_area(v: &[ChartPoint]) -> BigRational {
    let n = v.len();
    (0..n).fold(BigRational::zero(), |acc, i| {
        let (p, r) = (&v[i], &v[(i + 1) % n]);
        acc + &p[0] * &r[1] - &r[0] * &p[1]
    })
}

/// Shoelace area of a polygon.
pub fn shoelace_area(v: &[ChartPoint]) -> BigRational {
    signed_double_area(v).abs() / BigInt::from(2)
}

/// `1 / (4 (b+3) (b+4))`, checked against the shoelace area of the vertices.
pub fn triangle_cylinder_measure(b: u64) -> Result<BigRational> {
    let formula = BigRational::new(BigInt::one(), big(4) * big(b + 3) * big(b + 4));
    let area = shoelace_area(&triangle_cylinder_vertices(b)) * BigInt::from(CHART_NORMALIZATION);
    if area != formula {
        return Err(McfError::Inconsistent(format!(
            "shoelace area {area} differs from {formula} at b = {b}"
        )));
    }
    Ok(formula)
}

/// Sum of the entries of a triangle step matrix, `b + 4`.
pub fn step_norm(label: &BranchLabel) -> Result<u64> {
    match label {
        BranchLabel::Triangle { quotient, .. } => quotient
            .checked_add(4)
            .ok_or_else(|| McfError::InvalidInput(format!("quotient {quotient} too large"))),
        other => Err(McfError::InvalidInput(format!("{other} is not a triangle label"))),
    }
}

/// A cylinder of an algorithm, with its exact chart polygon when known.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderSpec {
    pub algorithm: Algorithm,
    pub word: Path,
    /// Positively oriented.
    #[serde(serialize_with = "ser_vertices")]
    pub vertices: Option<Vec<ChartPoint>>,
}

fn ser_vertices<S: Serializer>(v: &Option<Vec<ChartPoint>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let strings: Option<Vec<[String; 2]>> =
        v.as_ref().map(|v| v.iter().map(|p| [p[0].to_string(), p[1].to_string()]).collect());
    strings.serialize(s)
}

impl CylinderSpec {
    /// Depth-1 triangle cylinder `[((3,2,1), b)]`.
    pub fn triangle_depth_one(b: u64) -> Self {
        let [p, r, s] = triangle_cylinder_vertices(b);
        let mut vertices = vec![p, r, s];
        if signed_double_area(&vertices).is_negative() {
            vertices.swap(1, 2);
        }
        let label = BranchLabel::Triangle {
            order: CoordOrder::from_one_based(CYLINDER_SECTOR).expect("permutation"),
            quotient: b,
        };
        CylinderSpec {
            algorithm: Algorithm::Triangle,
            word: Path::new(Algorithm::Triangle, vec![label]).expect("single step"),
            vertices: Some(vertices),
        }
    }

    pub fn chart_area(&self) -> Option<BigRational> {
        self.vertices.as_deref().map(shoelace_area)
    }
}

/// `Σ_{b<=B} ln(b+4) / (4(b+3)(b+4))` and a bound on the remainder.
///
/// With `n = b + 4` the remaining terms are below `ln n / (2 n^2)`, and
/// `Σ_{n>N} ln n / n^2 <= (ln N + 1) / N` for `N = B + 4`.
pub fn log_integrability_partial_sum(big_b: u64) -> (f64, f64) {
    // smallest terms first
    let partial = (0..=big_b)
        .rev()
        .map(|b| {
            let b = b as f64;
            (b + 4.0).ln() / (4.0 * (b + 3.0) * (b + 4.0))
        })
        .sum();
    let n = big_b as f64 + 4.0;
    (partial, (n.ln() + 1.0) / (2.0 * n))
}

/// Smallest `B` whose tail bound is below `eps`.
pub fn log_integrability_cutoff(eps: f64) -> u64 {
    let bound = |b: u64| {
        let n = b as f64 + 4.0;
        (n.ln() + 1.0) / (2.0 * n)
    };
    let mut hi = 1u64;
    while bound(hi) >= eps {
        hi *= 2;
    }
    let mut lo = 0u64;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) < eps {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Upper bound for `∫ ln max(1, |A|) dμ` when the step matrices take finitely
/// many values: the largest log entry sum. `None` for the triangle algorithm,
/// whose norms are unbounded.
pub fn log_norm_bound(algorithm: Algorithm) -> Option<f64> {
    let labels: Vec<BranchLabel> = match algorithm {
        Algorithm::Triangle => return None,
        Algorithm::Cassaigne => vec![
            BranchLabel::cassaigne(1).expect("symbol"),
            BranchLabel::cassaigne(2).expect("symbol"),
        ],
        Algorithm::Selmer => CoordOrder::all().into_iter().map(|order| BranchLabel::Selmer { order }).collect(),
    };
    labels
        .iter()
        .map(|l| crate::numeric::ln_bigint(&l.matrix().entry_sum()))
        .max_by(f64::total_cmp)
}

/// Exact `Σ_{b<=B} 1/((b+3)(b+4)) = 1/3 - 1/(B+4)`.
pub fn telescoping_sum(big_b: u64) -> BigRational {
    q(1, 3) - BigRational::new(BigInt::one(), big(big_b + 4))
}

/// One row of the cylinder table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderRow {
    pub b: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub measure: BigRational,
    pub measure_f64: f64,
    pub norm: u64,
    /// Running `Σ ln(norm) · measure` up to this row.
    pub partial_sum: f64,
}

fn ser_ratio<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn cylinder_table(max_b: u64) -> Result<Vec<CylinderRow>> {
    let mut partial = 0.0;
    (0..=max_b)
        .map(|b| {
            let measure = triangle_cylinder_measure(b)?;
            let measure_f64 = crate::numeric::ratio_to_f64(&measure);
            let norm = b + 4;
            partial += (norm as f64).ln() * measure_f64;
            Ok(CylinderRow {
                b,
                measure,
                measure_f64,
                norm,
                partial_sum: partial,
            })
        })
        .collect()
}

pub const CYLINDER_CSV_HEADER: [&str; 4] = ["b", "measure", "norm", "partial_sum"];

/// CSV with columns `b, measure, norm, partial_sum`; the measure as a float.
pub fn cylinder_table_csv(rows: &[CylinderRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CYLINDER_CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.b.to_string(),
            r.measure_f64.to_string(),
            r.norm.to_string(),
            r.partial_sum.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
