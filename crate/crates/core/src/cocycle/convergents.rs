use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{orbit, raw_orbit};
use crate::algorithms::{Algorithm, BranchLabel};
use crate::numeric::{ln_bigint, normalize, ExactPoint, Field, IntMatrix3, Scalar, SimplexPoint};

/// Best of the three column approximations after `step` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Convergent {
    pub step: usize,
    /// Which column of the path product realized the best error.
    pub column: usize,
    pub numerators: [BigInt; 3],
    /// Column sum.
    pub denominator: BigInt,
    /// L∞ distance between the normalized column and θ.
    pub error: f64,
    /// `ln(error)`, accurate even when `error` underflows.
    pub ln_error: f64,
}

impl Convergent {
    pub fn approximation(&self) -> ExactPoint {
        ExactPoint::from_integers(self.numerators.clone()).expect("columns are nonnegative and nonzero")
    }

    pub fn ln_denominator(&self) -> f64 {
        ln_bigint(&self.denominator)
    }
}

/// The normalized columns of a path product: the vertices of the nested
/// simplex containing every point whose itinerary starts with the path.
pub fn convergent_simplex(product: &IntMatrix3) -> [ExactPoint; 3] {
    std::array::from_fn(|j| {
        ExactPoint::from_integers(product.column(j)).expect("columns are nonnegative and nonzero")
    })
}

/// Closed containment of `theta` in the triangle with the given vertices,
/// decided by exact orientation signs in the chart `(x1, x3)`.
pub fn simplex_contains(vertices: &[ExactPoint; 3], theta: &ExactPoint) -> bool {
    let chart = |p: &ExactPoint| (p.coords()[0].clone(), p.coords()[2].clone());
    let [a, b, c] = vertices.each_ref().map(chart);
    let p = chart(theta);
    let orient = |u: &(BigRational, BigRational), v: &(BigRational, BigRational), w: &(BigRational, BigRational)| {
        (&v.0 - &u.0) * (&w.1 - &u.1) - (&v.1 - &u.1) * (&w.0 - &u.0)
    };
    let s = [orient(&a, &b, &p), orient(&b, &c, &p), orient(&c, &a, &p)];
    s.iter().all(|v| !v.is_negative()) || s.iter().all(|v| !v.is_positive())
}

/// Convergents for `k = 0..=n` along the orbit of `theta`; `k = 0` gives the
/// simplex vertices. Stops early if the orbit reaches a degenerate point
/// (for rational θ this is where the expansion terminates).
pub fn convergents<S: Field>(
    algorithm: Algorithm,
    theta: &SimplexPoint<S>,
    n: usize,
) -> Vec<Convergent> {
    let rec = orbit(algorithm, theta, n, false);
    let theta = theta.normalized().expect("valid point");
    let target = theta.coords();
    let errors = |col: &[BigInt; 3], q: &BigInt| -> (f64, f64) {
        let qs = S::from_bigint(q);
        let mut worst = S::zero();
        for i in 0..3 {
            let d = S::from_bigint(&col[i]).divide(&qs).minus(&target[i]);
            let d = if d.lt_zero() { S::zero().minus(&d) } else { d };
            if d > worst {
                worst = d;
            }
        }
        (worst.approx_f64(), worst.ln_abs())
    };
    collect(&rec.labels, errors, f64::INFINITY)
}

/// Same as [`convergents`] for an exact point, run on the integer vector
/// `v = D θ`. Errors are `max_i |p_i D - v_i q| / (q D)`, all in integers.
pub fn exact_convergents(algorithm: Algorithm, theta: &ExactPoint, n: usize) -> Vec<Convergent> {
    exact_convergents_bounded(algorithm, theta, n, f64::INFINITY)
}

/// [`exact_convergents`], stopping once every column has `ln q > max_ln_q`.
pub(crate) fn exact_convergents_bounded(
    algorithm: Algorithm,
    theta: &ExactPoint,
    n: usize,
    max_ln_q: f64,
) -> Vec<Convergent> {
    let v = theta.to_integers();
    let d: BigInt = v.iter().sum();
    let ln_d = ln_bigint(&d);
    let raw = raw_orbit(algorithm, v.clone(), n);
    let errors = |col: &[BigInt; 3], q: &BigInt| -> (f64, f64) {
        let worst = (0..3)
            .map(|i| (&col[i] * &d - &v[i] * q).abs())
            .max()
            .expect("three coordinates");
        if worst.is_zero() {
            return (0.0, f64::NEG_INFINITY);
        }
        let ln = ln_bigint(&worst) - ln_bigint(q) - ln_d;
        (ln.exp(), ln)
    };
    collect(&raw.labels, errors, max_ln_q)
}

fn collect(
    labels: &[BranchLabel],
    errors: impl Fn(&[BigInt; 3], &BigInt) -> (f64, f64),
    max_ln_q: f64,
) -> Vec<Convergent> {
    let mut product = IntMatrix3::identity();
    let mut out = Vec::with_capacity(labels.len() + 1);
    for step in 0..=labels.len() {
        if step > 0 {
            product = &product * &labels[step - 1].matrix();
            // column sums never decrease along the orbit
            if (0..3).all(|j| ln_bigint(&product.column(j).iter().sum()) > max_ln_q) {
                break;
            }
        }
        let best = (0..3)
            .map(|j| {
                let col = product.column(j);
                let q: BigInt = col.iter().sum();
                let (error, ln_error) = errors(&col, &q);
                Convergent {
                    step,
                    column: j,
                    numerators: col,
                    denominator: q,
                    error,
                    ln_error,
                }
            })
            .min_by(|a, b| a.ln_error.total_cmp(&b.ln_error))
            .expect("three columns");
        out.push(best);
    }
    out
}

/// Normalized vector of floats for a convergent, handy for plotting.
pub fn convergent_f64(c: &Convergent) -> [f64; 3] {
    normalize(c.numerators.clone().map(|v| v.approx_f64()))
        .expect("nonzero column")
        .into_coords()
}
