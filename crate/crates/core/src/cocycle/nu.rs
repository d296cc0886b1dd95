use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{pattern_mul, pattern_positive, Pattern, PATTERN_IDENTITY};
use crate::algorithms::{projective_step, Algorithm};
use crate::error::{McfError, Result};
use crate::numeric::{Field, SimplexPoint};
use crate::sampling::{rng_from_seed, uniform_float_point};

/// Positivity time, or the fact that the cap was reached first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NuValue {
    Finite(usize),
    ExceededCap,
}

impl NuValue {
    pub fn finite(self) -> Option<usize> {
        match self {
            NuValue::Finite(k) => Some(k),
            NuValue::ExceededCap => None,
        }
    }
}

/// ν computed with both product orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NuBoth {
    /// `M_1 ⋯ M_k` positive.
    pub path_order: NuValue,
    /// `M_k ⋯ M_1` positive.
    pub reversed: NuValue,
}

/// Smallest `k <= cap` such that the product of the first `k` step matrices
/// (first step leftmost) is strictly positive.
pub fn nu<S: Field>(algorithm: Algorithm, theta: &SimplexPoint<S>, cap: usize) -> Result<NuValue> {
    nu_both(algorithm, theta, cap).map(|b| b.path_order)
}

/// ν for the path order and for the reversed order `M_k ⋯ M_1`. Only zero
/// patterns are multiplied, which is exact for nonnegative matrices.
pub fn nu_both<S: Field>(algorithm: Algorithm, theta: &SimplexPoint<S>, cap: usize) -> Result<NuBoth> {
    let mut x = theta.clone();
    let mut forward: Pattern = PATTERN_IDENTITY;
    let mut backward: Pattern = PATTERN_IDENTITY;
    let mut path_order = None;
    let mut reversed = None;
    for k in 1..=cap {
        let (next, label) = projective_step(algorithm, &x).map_err(|e| at_step(e, k - 1))?;
        let p = label.pattern();
        forward = pattern_mul(&forward, &p);
        backward = pattern_mul(&p, &backward);
        if path_order.is_none() && pattern_positive(&forward) {
            path_order = Some(k);
        }
        if reversed.is_none() && pattern_positive(&backward) {
            reversed = Some(k);
        }
        if path_order.is_some() && reversed.is_some() {
            break;
        }
        x = next;
    }
    let wrap = |v: Option<usize>| v.map_or(NuValue::ExceededCap, NuValue::Finite);
    Ok(NuBoth {
        path_order: wrap(path_order),
        reversed: wrap(reversed),
    })
}

fn at_step(e: McfError, step: usize) -> McfError {
    match e {
        McfError::DegeneratePoint(msg) => McfError::DegeneratePoint(format!("step {step}: {msg}")),
        other => other,
    }
}

/// Empirical distribution of ν over uniform random starting points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuStats {
    pub algorithm: Algorithm,
    pub samples: u64,
    pub cap: usize,
    pub seed: u64,
    /// ν (path order) -> count.
    pub histogram: BTreeMap<usize, u64>,
    pub reversed_histogram: BTreeMap<usize, u64>,
    pub exceeded_cap: u64,
    pub reversed_exceeded_cap: u64,
    /// Samples where the two orders give different ν.
    pub disagreements: u64,
    /// Draws discarded because the orbit hit a degenerate point.
    pub resampled: u64,
    pub max: Option<usize>,
    pub reversed_max: Option<usize>,
    /// Mean of the finite path-order values; estimates the integral of ν.
    pub mean: f64,
}

const NU_CHUNK: u64 = 4096;

/// Samples ν on `samples` uniform points in parallel chunks, chunk `i` seeded
/// with `seed + i`. Degenerate draws are replaced.
pub fn nu_sample(algorithm: Algorithm, samples: u64, cap: usize, seed: u64) -> NuStats {
    let chunks = samples.div_ceil(NU_CHUNK);
    let parts: Vec<(Vec<NuBoth>, u64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = rng_from_seed(seed.wrapping_add(chunk));
            let want = NU_CHUNK.min(samples - chunk * NU_CHUNK);
            let mut out = Vec::with_capacity(want as usize);
            let mut resampled = 0;
            while (out.len() as u64) < want {
                let theta = uniform_float_point(&mut rng);
                match nu_both(algorithm, &theta, cap) {
                    Ok(v) => out.push(v),
                    Err(_) => resampled += 1,
                }
            }
            (out, resampled)
        })
        .collect();

    let mut stats = NuStats {
        algorithm,
        samples,
        cap,
        seed,
        histogram: BTreeMap::new(),
        reversed_histogram: BTreeMap::new(),
        exceeded_cap: 0,
        reversed_exceeded_cap: 0,
        disagreements: 0,
        resampled: 0,
        max: None,
        reversed_max: None,
        mean: f64::NAN,
    };
    let mut total = 0u64;
    for (values, resampled) in parts {
        stats.resampled += resampled;
        for v in values {
            match v.path_order {
                NuValue::Finite(k) => {
                    *stats.histogram.entry(k).or_default() += 1;
                    total += k as u64;
                }
                NuValue::ExceededCap => stats.exceeded_cap += 1,
            }
            match v.reversed {
                NuValue::Finite(k) => *stats.reversed_histogram.entry(k).or_default() += 1,
                NuValue::ExceededCap => stats.reversed_exceeded_cap += 1,
            }
            if v.path_order != v.reversed {
                stats.disagreements += 1;
            }
        }
    }
    stats.max = stats.histogram.keys().next_back().copied();
    stats.reversed_max = stats.reversed_histogram.keys().next_back().copied();
    let finite = samples - stats.exceeded_cap;
    if finite > 0 {
        stats.mean = total as f64 / finite as f64;
    }
    stats
}
