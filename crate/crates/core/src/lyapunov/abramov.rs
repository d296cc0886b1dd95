use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use super::{lyapunov_spectrum_with, Frame, LyapunovEstimate, OrbitSource, SpectrumConfig};
use crate::algorithms::{Algorithm, Path};
use crate::cocycle::{check_acceleration_loop, ReturnDetector, ReturnRule, SegmentPattern};
use crate::error::{McfError, Result};
use crate::sampling::{mean_and_stderr, rng_from_seed};

/// The accelerated trials use seeds `seed + ACCELERATED_SEED_OFFSET + trial`,
/// so that they are independent of the base trials.
pub const ACCELERATED_SEED_OFFSET: u64 = 1_000_003;

/// Comparison of the base spectrum with the spectrum of the induced cocycle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbramovReport {
    pub algorithm: Algorithm,
    pub gamma: Path,
    pub base: LyapunovEstimate,
    pub accelerated_lambda: [f64; 3],
    pub accelerated_stderr: [f64; 3],
    /// Induced steps per base step.
    pub mu_hat: f64,
    pub mu_hat_stderr: f64,
    pub mean_return_time: f64,
    /// `λ_i^acc · μ̂`, averaged over the accelerated trials.
    pub scaled: [f64; 3],
    pub scaled_stderr: [f64; 3],
    /// `|scaled_i - λ_i| <= 3 · hypot(errors)`.
    pub scaled_within: [bool; 3],
    pub ratio_base: f64,
    pub ratio_base_stderr: f64,
    pub ratio_accelerated: f64,
    pub ratio_accelerated_stderr: f64,
    pub ratio_within: bool,
    pub induced_segments: u64,
    pub non_positive_segments: u64,
    pub passed: bool,
}

struct AcceleratedTrial {
    lambda: [f64; 3],
    mu_hat: f64,
    segments: SegmentPattern,
}

fn accelerated_trial(algorithm: Algorithm, gamma: &Path, config: &SpectrumConfig, seed: u64) -> Result<AcceleratedTrial> {
    let mut rng = rng_from_seed(seed);
    let mut frame = Frame::random(&mut rng)?;
    let mut source = OrbitSource::new(algorithm, rng, config.burn_in);
    let mut detector = ReturnDetector::new(gamma, ReturnRule::AfterBlock);
    let lag = gamma.len().max(1);
    // labels not yet pushed through the frame; returns are detected `len - 1`
    // steps late, so the frame runs behind the orbit by the same amount
    let mut pending = VecDeque::with_capacity(lag + 1);
    let mut segments = SegmentPattern::new();
    let mut first = None;
    let mut last = 0usize;
    let mut returns = 0u64;
    let mut logs = [0.0; 3];
    for _ in 0..config.steps {
        let label = source.next_label();
        pending.push_back(label);
        if let Some(start) = detector.push(label) {
            if first.is_none() {
                first = Some(start);
            } else {
                segments.close();
                returns += 1;
                last = start;
                logs = frame.logs();
            }
        }
        if pending.len() >= lag {
            let l = pending.pop_front().expect("nonempty");
            if first.is_some() {
                frame.push(&l.matrix_f64())?;
                frame.renormalize()?;
                segments.push(&l);
            }
        }
    }
    let first = first.ok_or_else(|| McfError::InsufficientSamples(format!("no return to {gamma}")))?;
    if returns < 2 {
        return Err(McfError::InsufficientSamples(format!("fewer than two returns to {gamma}")));
    }
    let mut lambda = logs.map(|v| v / returns as f64);
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok(AcceleratedTrial {
        lambda,
        mu_hat: returns as f64 / (last - first) as f64,
        segments,
    })
}

/// Runs the base spectrum and an accelerated spectrum (returns to the cylinder
/// of `gamma`, non-overlapping occurrences) on independent seeds, and checks
/// that the induced exponents rescaled by the return frequency agree with the
/// base ones and that `λ1/λ2` is unchanged.
pub fn abramov_ratio_check(algorithm: Algorithm, gamma: &Path, config: &SpectrumConfig) -> Result<AbramovReport> {
    config.validate()?;
    if gamma.algorithm() != algorithm {
        return Err(McfError::InvalidInput(format!("{gamma} is not a {algorithm} path")));
    }
    check_acceleration_loop(gamma)?;
    let base = lyapunov_spectrum_with(algorithm, config)?;
    let accelerated: Vec<AcceleratedTrial> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = config.seed.wrapping_add(ACCELERATED_SEED_OFFSET).wrapping_add(t);
            accelerated_trial(algorithm, gamma, config, seed)
        })
        .collect::<Result<_>>()?;

    let stat = |f: &dyn Fn(&AcceleratedTrial) -> f64| {
        let v: Vec<f64> = accelerated.iter().map(f).collect();
        mean_and_stderr(&v)
    };
    let mut accelerated_lambda = [0.0; 3];
    let mut accelerated_stderr = [0.0; 3];
    let mut scaled = [0.0; 3];
    let mut scaled_stderr = [0.0; 3];
    let mut scaled_within = [false; 3];
    for i in 0..3 {
        (accelerated_lambda[i], accelerated_stderr[i]) = stat(&|t| t.lambda[i]);
        (scaled[i], scaled_stderr[i]) = stat(&|t| t.lambda[i] * t.mu_hat);
        scaled_within[i] = (scaled[i] - base.lambda[i]).abs() <= 3.0 * scaled_stderr[i].hypot(base.stderr[i]);
    }
    let (mu_hat, mu_hat_stderr) = stat(&|t| t.mu_hat);
    let (ratio_accelerated, ratio_accelerated_stderr) = stat(&|t| t.lambda[0] / t.lambda[1]);
    let base_ratios: Vec<f64> = base.per_trial.iter().map(|l| l[0] / l[1]).collect();
    let (ratio_base, ratio_base_stderr) = mean_and_stderr(&base_ratios);
    let ratio_within =
        (ratio_accelerated - ratio_base).abs() <= 3.0 * ratio_accelerated_stderr.hypot(ratio_base_stderr);
    let induced_segments = accelerated.iter().map(|t| t.segments.segments).sum();
    let non_positive_segments = accelerated.iter().map(|t| t.segments.non_positive).sum();
    let passed = scaled_within.iter().all(|&b| b) && ratio_within && (gamma.is_empty() || non_positive_segments == 0);
    Ok(AbramovReport {
        algorithm,
        gamma: gamma.clone(),
        base,
        accelerated_lambda,
        accelerated_stderr,
        mu_hat,
        mu_hat_stderr,
        mean_return_time: 1.0 / mu_hat,
        scaled,
        scaled_stderr,
        scaled_within,
        ratio_base,
        ratio_base_stderr,
        ratio_accelerated,
        ratio_accelerated_stderr,
        ratio_within,
        induced_segments,
        non_positive_segments,
        passed,
    })
}
