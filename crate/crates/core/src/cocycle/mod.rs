//! Path products, positivity, orbits and the objects built from them.
//!
//! Products are taken in path order: the matrix of the first step is the
//! leftmost factor, so that with `old = M * new` the product of a path maps the
//! point reached at its end back to its start.

mod accelerate;
mod convergents;
mod nu;

use serde_json::json;

pub use accelerate::{
    accelerate, check_acceleration_loop, kac_check, Acceleration, KacReport, ReturnDetector, ReturnRule,
};
pub(crate) use accelerate::SegmentPattern;
pub(crate) use convergents::exact_convergents_bounded;
pub use convergents::{
    convergent_f64, convergent_simplex, convergents, exact_convergents, simplex_contains, Convergent,
};
pub use nu::{nu, nu_both, nu_sample, NuBoth, NuStats, NuValue};

use crate::algorithms::{projective_step, raw_step, Algorithm, BranchLabel, Path};
use crate::error::McfError;
use crate::numeric::{cocycle_product, Field, IntMatrix3, Scalar, SimplexPoint};

/// Product of the step matrices of `path`, first step leftmost.
pub fn path_matrix(path: &Path) -> IntMatrix3 {
    let mats: Vec<IntMatrix3> = path.labels().iter().map(BranchLabel::matrix).collect();
    cocycle_product(&mats)
}

/// Product of the step matrices of an arbitrary label sequence, first leftmost.
pub fn labels_matrix(labels: &[BranchLabel]) -> IntMatrix3 {
    let mats: Vec<IntMatrix3> = labels.iter().map(BranchLabel::matrix).collect();
    cocycle_product(&mats)
}

pub fn is_positive(m: &IntMatrix3) -> bool {
    m.is_positive()
}

/// Zero pattern of a nonnegative matrix. Positivity of a product of
/// nonnegative matrices depends only on the patterns of the factors.
pub type Pattern = [[bool; 3]; 3];

pub const PATTERN_IDENTITY: Pattern = [[true, false, false], [false, true, false], [false, false, true]];

pub fn pattern_mul(a: &Pattern, b: &Pattern) -> Pattern {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).any(|k| a[i][k] && b[k][j])))
}

pub fn pattern_positive(p: &Pattern) -> bool {
    p.iter().flatten().all(|&e| e)
}

/// Where and why an orbit stopped early.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub step: usize,
    pub error: McfError,
}

/// A computed orbit segment.
///
/// `points[0]` is the start and `points[k + 1]` is the projective image of
/// `points[k]` under the branch `labels[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord<S> {
    pub algorithm: Algorithm,
    pub labels: Vec<BranchLabel>,
    pub points: Vec<SimplexPoint<S>>,
    pub cumulative_product: Option<IntMatrix3>,
    pub truncated: Option<Truncation>,
}

impl<S: Scalar> OrbitRecord<S> {
    pub fn start(&self) -> &SimplexPoint<S> {
        &self.points[0]
    }

    pub fn steps(&self) -> usize {
        self.labels.len()
    }

    /// The itinerary as a path; always admissible for a computed orbit.
    pub fn path(&self) -> Path {
        Path::new(self.algorithm, self.labels.clone()).expect("orbit itineraries are admissible")
    }
}

/// Decimal rendering of point coordinates, for reports.
pub trait DecimalCoords {
    fn decimal_coords(&self, digits: usize) -> [String; 3];
}

impl DecimalCoords for crate::numeric::ExactPoint {
    fn decimal_coords(&self, digits: usize) -> [String; 3] {
        self.to_decimal_strings(digits)
    }
}

impl DecimalCoords for crate::numeric::FloatPoint {
    fn decimal_coords(&self, digits: usize) -> [String; 3] {
        self.to_decimal_strings(digits)
    }
}

impl DecimalCoords for crate::numeric::WidePoint {
    fn decimal_coords(&self, digits: usize) -> [String; 3] {
        self.coords()
            .clone()
            .map(|c| crate::numeric::rational_to_decimal(&c.to_rational(), digits))
    }
}

impl<S: Scalar> OrbitRecord<S>
where
    SimplexPoint<S>: DecimalCoords,
{
    /// JSON form: labels in the path grammar, points as decimal strings with
    /// `digits` digits after the point.
    pub fn to_json(&self, digits: usize) -> serde_json::Value {
        json!({
            "algorithm": self.algorithm,
            "flavor": S::FLAVOR,
            "digits": digits,
            "start": self.start().decimal_coords(digits),
            "labels": self.labels.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "path": self.path().to_string(),
            "points": self.points.iter().map(|p| p.decimal_coords(digits)).collect::<Vec<_>>(),
            "cumulative_product": self.cumulative_product,
            "truncated": self.truncated.as_ref().map(|t| json!({"step": t.step, "reason": t.error.to_string()})),
        })
    }
}

/// Runs `n` projective steps from `theta`. A degenerate point mid-orbit ends
/// the record early and is reported in `truncated`.
pub fn orbit<S: Field>(
    algorithm: Algorithm,
    theta: &SimplexPoint<S>,
    n: usize,
    with_product: bool,
) -> OrbitRecord<S> {
    let mut points = vec![theta.clone()];
    let mut labels = Vec::with_capacity(n);
    let mut product = with_product.then(IntMatrix3::identity);
    let mut truncated = None;
    for step in 0..n {
        match projective_step(algorithm, points.last().expect("nonempty")) {
            Ok((next, label)) => {
                if let Some(p) = product.as_mut() {
                    *p = &*p * &label.matrix();
                }
                labels.push(label);
                points.push(next);
            }
            Err(error) => {
                truncated = Some(Truncation { step, error });
                break;
            }
        }
    }
    OrbitRecord {
        algorithm,
        labels,
        points,
        cumulative_product: product,
        truncated,
    }
}

/// Orbit of the homogeneous map on unnormalized vectors.
#[derive(Clone, Debug)]
pub struct RawOrbit<S> {
    /// `points[k]` is the raw vector after `k` steps.
    pub points: Vec<[S; 3]>,
    pub labels: Vec<BranchLabel>,
    pub truncated: Option<Truncation>,
}

/// Iterates `F` without renormalizing. On integer vectors this is exact and
/// keeps the identity `path_matrix(labels[..k]) * points[k] = points[0]`.
pub fn raw_orbit<S: Scalar>(algorithm: Algorithm, start: [S; 3], n: usize) -> RawOrbit<S> {
    let mut points = vec![start];
    let mut labels = Vec::with_capacity(n);
    let mut truncated = None;
    for step in 0..n {
        match raw_step(algorithm, points.last().expect("nonempty")) {
            Ok((next, label)) => {
                labels.push(label);
                points.push(next);
            }
            Err(error) => {
                truncated = Some(Truncation { step, error });
                break;
            }
        }
    }
    RawOrbit {
        points,
        labels,
        truncated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ExactPoint;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn triangle_loop_products() {
        let g1: Path = "T:(1,2,3)b0;(3,1,2)b1;(2,3,1)b2".parse().unwrap();
        assert_eq!(path_matrix(&g1), IntMatrix3::from_i64([[1, 2, 1], [1, 3, 2], [1, 3, 3]]));
        let g2: Path = "T:(1,3,2)b0;(2,1,3)b0;(3,2,1)b4".parse().unwrap();
        assert_eq!(path_matrix(&g2), IntMatrix3::from_i64([[1, 1, 4], [1, 2, 5], [1, 1, 5]]));
    }

    #[test]
    fn cassaigne_loop_products() {
        let g1 = Path::cassaigne_word("21221").unwrap();
        assert_eq!(path_matrix(&g1), IntMatrix3::from_i64([[1, 2, 1], [1, 1, 1], [1, 2, 2]]));
        let g2 = Path::cassaigne_word("1222121").unwrap();
        assert_eq!(path_matrix(&g2), IntMatrix3::from_i64([[1, 2, 2], [2, 4, 3], [1, 1, 1]]));
    }

    #[test]
    fn positivity() {
        assert!(!is_positive(&IntMatrix3::identity()));
        assert!(is_positive(&path_matrix(&"T:(1,2,3)b0;(3,1,2)b1;(2,3,1)b2".parse().unwrap())));
        assert!(!is_positive(&BranchLabel::cassaigne(1).unwrap().matrix()));
        assert_eq!(path_matrix(&Path::empty(Algorithm::Cassaigne)), IntMatrix3::identity());
    }

    #[test]
    fn patterns_track_positivity_exactly() {
        let word = Path::cassaigne_word("21221").unwrap();
        let mut pat = PATTERN_IDENTITY;
        for (k, l) in word.labels().iter().enumerate() {
            pat = pattern_mul(&pat, &l.pattern());
            let exact = labels_matrix(&word.labels()[..=k]);
            assert_eq!(pattern_positive(&pat), exact.is_positive());
        }
    }

    #[test]
    fn orbit_first_steps() {
        let theta = ExactPoint::new([0.15, 0.3, 0.55].map(|v: f64| {
            BigRational::new(BigInt::from((v * 100.0).round() as i64), BigInt::from(100))
        }))
        .unwrap();
        let rec = orbit(Algorithm::Triangle, &theta, 2, true);
        assert_eq!(rec.labels[0], BranchLabel::triangle([1, 2, 3], 1).unwrap());
        assert_eq!(rec.points[1], ExactPoint::from_u64s([3, 6, 2]).unwrap());
        assert_eq!(rec.steps(), 2);
        assert!(rec.truncated.is_none());
        assert_eq!(rec.cumulative_product.unwrap(), labels_matrix(&rec.labels));
    }

    #[test]
    fn empty_orbit() {
        let theta = ExactPoint::from_u64s([1, 2, 4]).unwrap();
        let rec = orbit(Algorithm::Cassaigne, &theta, 0, true);
        assert_eq!(rec.points, vec![theta]);
        assert!(rec.labels.is_empty());
        assert_eq!(rec.cumulative_product, Some(IntMatrix3::identity()));
    }

    #[test]
    fn orbit_truncates_on_degenerate_point() {
        // (5,3,2) -> (3,3,2) in Selmer: tie at step 1
        let theta = ExactPoint::from_u64s([5, 3, 2]).unwrap();
        let rec = orbit(Algorithm::Selmer, &theta, 5, false);
        assert_eq!(rec.steps(), 1);
        let t = rec.truncated.unwrap();
        assert_eq!(t.step, 1);
        assert!(matches!(t.error, McfError::DegeneratePoint(_)));
    }

    #[test]
    fn orbit_json_uses_path_grammar() {
        let theta = ExactPoint::from_u64s([15, 30, 55]).unwrap();
        let rec = orbit(Algorithm::Triangle, &theta, 1, true);
        let v = rec.to_json(6);
        assert_eq!(v["labels"][0], "(1,2,3)b1");
        assert_eq!(v["points"][1][0], "0.272727");
        assert_eq!(v["flavor"], "exact");
    }

    #[test]
    fn raw_orbit_reconstructs_the_start() {
        let start = [BigInt::from(1234567), BigInt::from(2345678), BigInt::from(3456789)];
        let raw = raw_orbit(Algorithm::Triangle, start.clone(), 6);
        for k in 0..raw.labels.len() {
            let p = labels_matrix(&raw.labels[..k]);
            assert_eq!(p.apply(&raw.points[k]), start);
        }
    }
}
