#![allow(dead_code)]

use std::io::Write;

use mcf::algorithms::Algorithm;
use mcf::cocycle::{labels_matrix, orbit, raw_orbit};
use mcf::numeric::{ln_bigint, ExactPoint, Field, SimplexPoint, WIDE_PRECISION};
use mcf::sampling::{random_rational_point, rng_from_seed};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

pub const ALGORITHMS: [Algorithm; 3] = [Algorithm::Triangle, Algorithm::Cassaigne, Algorithm::Selmer];

/// Writes past the test harness capture so reports show up in plain `cargo test`.
pub fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

/// `ln` of the distance from an integer vector to the nearest boundary of its
/// branch, relative to the coordinate sum. `-inf` on a boundary.
pub fn exact_log_margin(alg: Algorithm, x: &[BigInt; 3]) -> f64 {
    let sum: BigInt = x.iter().sum();
    let mut s = x.clone();
    s.sort();
    let order_gap = (&s[1] - &s[0]).min(&s[2] - &s[1]);
    let gap = match alg {
        Algorithm::Triangle => {
            if s[0].is_zero() {
                BigInt::zero()
            } else {
                let r = (&s[2] - &s[1]).mod_floor(&s[0]);
                let quotient_gap = (&s[0] - &r).min(r);
                order_gap.min(quotient_gap)
            }
        }
        Algorithm::Cassaigne => (&x[0] - &x[2]).magnitude().clone().into(),
        Algorithm::Selmer => order_gap.min(s[0].clone()),
    };
    if gap.is_zero() {
        f64::NEG_INFINITY
    } else {
        ln_bigint(&gap) - ln_bigint(&sum)
    }
}

/// Points whose exact orbit comes closer than this (in log relative margin)
/// to a branch boundary are skipped: half the wide mantissa.
pub fn guard_log_margin() -> f64 {
    -(WIDE_PRECISION as f64 / 2.0) * std::f64::consts::LN_2
}

#[derive(Debug, Default)]
pub struct Comparison {
    pub points: usize,
    pub compared: usize,
    pub agreed: usize,
    pub skipped: Vec<usize>,
    /// `(point index, first differing step)`.
    pub disagreements: Vec<(usize, usize)>,
}

impl Comparison {
    pub fn agreement(&self) -> f64 {
        self.agreed as f64 / self.compared.max(1) as f64
    }
}

/// Branch labels of the exact integer orbit against those of a floating
/// flavor, over `points` random rationals with `bits`-bit coordinates.
pub fn compare_flavor<S: Field>(
    alg: Algorithm,
    points: usize,
    steps: usize,
    bits: u64,
    seed: u64,
    convert: impl Fn(&ExactPoint) -> SimplexPoint<S>,
    guard: bool,
) -> Comparison {
    let mut rng = rng_from_seed(seed);
    let mut cmp = Comparison {
        points,
        ..Default::default()
    };
    for i in 0..points {
        let theta = random_rational_point(&mut rng, bits);
        let exact = raw_orbit(alg, theta.to_integers(), steps);
        if guard {
            let near = exact.truncated.is_some()
                || exact.points[..exact.labels.len()]
                    .iter()
                    .any(|p| exact_log_margin(alg, p) < guard_log_margin());
            if near {
                cmp.skipped.push(i);
                continue;
            }
        }
        cmp.compared += 1;
        let float = orbit(alg, &convert(&theta), steps, false);
        match exact.labels.iter().zip(&float.labels).position(|(a, b)| a != b) {
            None if float.labels.len() == exact.labels.len() => cmp.agreed += 1,
            None => cmp.disagreements.push((i, float.labels.len().min(exact.labels.len()))),
            Some(k) => cmp.disagreements.push((i, k)),
        }
    }
    cmp
}

/// Checks `labels_matrix(labels[..k]) * x_k = x_0` on the raw integer orbit and
/// proportionality on the normalized rational orbit, for every prefix. Returns
/// the number of identities checked and the failures.
pub fn cocycle_consistency(alg: Algorithm, points: usize, steps: usize, bits: u64, seed: u64) -> (usize, usize) {
    let mut rng = rng_from_seed(seed);
    let (mut checked, mut failed) = (0, 0);
    for _ in 0..points {
        let theta = random_rational_point(&mut rng, bits);
        let raw = raw_orbit(alg, theta.to_integers(), steps);
        let normalized = orbit(alg, &theta, steps, false);
        for k in 0..=raw.labels.len() {
            let m = labels_matrix(&raw.labels[..k]);
            checked += 1;
            if m.apply(&raw.points[k]) != raw.points[0] {
                failed += 1;
            }
        }
        for k in 0..=normalized.labels.len() {
            let m = labels_matrix(&normalized.labels[..k]);
            let back = m.apply(normalized.points[k].coords());
            let start = normalized.points[0].coords();
            checked += 1;
            let cross_zero = (0..3).all(|i| {
                let (j, l) = ((i + 1) % 3, (i + 2) % 3);
                &back[j] * &start[l] == &back[l] * &start[j]
            });
            if !cross_zero {
                failed += 1;
            }
        }
    }
    (checked, failed)
}
