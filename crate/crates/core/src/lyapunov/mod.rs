//! Monte-Carlo Lyapunov spectra of the algorithm cocycles and the
//! approximation exponents derived from them.

mod abramov;
mod exponents;
mod frame;

use rayon::prelude::*;
use serde::Serialize;

pub use abramov::{abramov_ratio_check, AbramovReport, ACCELERATED_SEED_OFFSET};
pub use exponents::{approximation_exponent, empirical_eta, eta_profile, ExponentEstimate};
pub use frame::{ConstantCocycle, Frame, MatrixSource, OrbitSource};

use crate::algorithms::Algorithm;
use crate::error::{McfError, Result};
use crate::numeric::IntMatrix3;
use crate::sampling::{mean_and_stderr, rng_from_seed};

pub const DEFAULT_SEED: u64 = 20_170_613;
pub const DEFAULT_TRIALS: usize = 16;
pub const DEFAULT_STEPS: u64 = 1_000_000;
pub const DEFAULT_BURN_IN: u64 = 1_000;
pub const MIN_STEPS: u64 = 10_000;

/// Parameters of a spectrum run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumConfig {
    pub steps: u64,
    pub trials: usize,
    pub seed: u64,
    pub renorm_period: u64,
    pub burn_in: u64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            steps: DEFAULT_STEPS,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            renorm_period: 1,
            burn_in: DEFAULT_BURN_IN,
        }
    }
}

impl SpectrumConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps < MIN_STEPS {
            return Err(McfError::InvalidInput(format!(
                "steps must be at least {MIN_STEPS}, got {}",
                self.steps
            )));
        }
        if self.trials == 0 || self.renorm_period == 0 {
            return Err(McfError::InvalidInput("trials and renorm_period must be positive".into()));
        }
        Ok(())
    }
}

/// Mean spectrum over independent trials, in nats per step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    /// `"triangle"`, `"cassaigne"`, `"selmer"` or `"constant"`.
    pub algorithm: String,
    /// Sorted decreasingly.
    pub lambda: [f64; 3],
    /// Standard error of the mean across trials.
    pub stderr: [f64; 3],
    pub steps: u64,
    pub trials: usize,
    pub seed: u64,
    pub renorm_period: u64,
    pub burn_in: u64,
    /// Orbits restarted after a degenerate point or an oversized quotient.
    pub redraws: u64,
    pub quotient_overflows: u64,
    pub per_trial: Vec<[f64; 3]>,
}

impl LyapunovEstimate {
    /// Root-sum-square of the three standard errors.
    pub fn combined_stderr(&self) -> f64 {
        self.stderr.iter().map(|s| s * s).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// `lambda[i] - lambda[i + 1]` and the root-sum-square of their errors.
    pub fn gap(&self, i: usize) -> (f64, f64) {
        let d = self.lambda[i] - self.lambda[i + 1];
        (d, self.stderr[i].hypot(self.stderr[i + 1]))
    }

    /// Both gaps exceed `k` times their errors.
    pub fn is_simple(&self, k: f64) -> bool {
        (0..2).all(|i| {
            let (d, e) = self.gap(i);
            d > k * e
        })
    }

    pub const CSV_HEADER: [&'static str; 11] = [
        "algorithm", "lambda1", "lambda2", "lambda3", "stderr1", "stderr2", "stderr3", "eta_star", "steps",
        "trials", "seed",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        let eta = approximation_exponent(self).map(|e| e.eta_star).unwrap_or(f64::NAN);
        let mut row = vec![self.algorithm.clone()];
        row.extend(self.lambda.iter().chain(&self.stderr).map(|v| v.to_string()));
        row.extend([eta.to_string(), self.steps.to_string(), self.trials.to_string(), self.seed.to_string()]);
        row
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::CSV_HEADER).expect("in-memory write");
        w.write_record(self.csv_record()).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

pub(crate) struct TrialResult {
    pub lambda: [f64; 3],
    pub redraws: u64,
    pub quotient_overflows: u64,
}

/// Pushes a random frame through `steps` matrices of `source`.
pub(crate) fn transport<M: MatrixSource>(
    source: &mut M,
    frame: &mut Frame,
    steps: u64,
    renorm_period: u64,
) -> Result<[f64; 3]> {
    for t in 1..=steps {
        frame.push(&source.next_matrix()?)?;
        if t % renorm_period == 0 {
            frame.renormalize()?;
        }
    }
    frame.renormalize()?;
    let logs = frame.logs();
    if logs.iter().any(|v| !v.is_finite()) {
        return Err(McfError::NumericFailure(format!("non-finite log accumulation {logs:?}")));
    }
    Ok(logs.map(|v| v / steps as f64))
}

fn summarize(name: &str, config: &SpectrumConfig, trials: Vec<TrialResult>) -> LyapunovEstimate {
    let per_trial: Vec<[f64; 3]> = trials
        .iter()
        .map(|t| {
            let mut l = t.lambda;
            l.sort_by(|a, b| b.total_cmp(a));
            l
        })
        .collect();
    let mut lambda = [0.0; 3];
    let mut stderr = [0.0; 3];
    for i in 0..3 {
        let column: Vec<f64> = per_trial.iter().map(|l| l[i]).collect();
        (lambda[i], stderr[i]) = mean_and_stderr(&column);
    }
    LyapunovEstimate {
        algorithm: name.to_string(),
        lambda,
        stderr,
        steps: config.steps,
        trials: config.trials,
        seed: config.seed,
        renorm_period: config.renorm_period,
        burn_in: config.burn_in,
        redraws: trials.iter().map(|t| t.redraws).sum(),
        quotient_overflows: trials.iter().map(|t| t.quotient_overflows).sum(),
        per_trial,
    }
}

/// Spectrum of the algorithm cocycle; see [`lyapunov_spectrum_with`].
pub fn lyapunov_spectrum(
    algorithm: Algorithm,
    steps: u64,
    trials: usize,
    seed: u64,
    renorm_period: u64,
) -> Result<LyapunovEstimate> {
    let config = SpectrumConfig {
        steps,
        trials,
        seed,
        renorm_period,
        ..SpectrumConfig::default()
    };
    lyapunov_spectrum_with(algorithm, &config)
}

/// Each trial owns a generator seeded with `seed + trial`: it draws a uniform
/// start, burns in, draws a random orthonormal frame and transports it along
/// `steps` steps. Trials run in parallel; the result does not depend on the
/// number of threads.
pub fn lyapunov_spectrum_with(algorithm: Algorithm, config: &SpectrumConfig) -> Result<LyapunovEstimate> {
    config.validate()?;
    let trials: Vec<TrialResult> = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng_from_seed(config.seed.wrapping_add(trial));
            let mut frame = Frame::random(&mut rng)?;
            let mut source = OrbitSource::new(algorithm, rng, config.burn_in);
            let lambda = transport(&mut source, &mut frame, config.steps, config.renorm_period)?;
            Ok(TrialResult {
                lambda,
                redraws: source.redraws,
                quotient_overflows: source.quotient_overflows,
            })
        })
        .collect::<Result<_>>()?;
    Ok(summarize(algorithm.name(), config, trials))
}

/// Spectrum of the constant cocycle `m`; the exact answer is the logs of
/// the moduli of the eigenvalues of `m`.
pub fn constant_cocycle_spectrum(m: &IntMatrix3, config: &SpectrumConfig) -> Result<LyapunovEstimate> {
    config.validate()?;
    let mat = m.to_f64();
    let trials: Vec<TrialResult> = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng_from_seed(config.seed.wrapping_add(trial));
            let mut frame = Frame::random(&mut rng)?;
            let lambda = transport(&mut ConstantCocycle(mat), &mut frame, config.steps, config.renorm_period)?;
            Ok(TrialResult {
                lambda,
                redraws: 0,
                quotient_overflows: 0,
            })
        })
        .collect::<Result<_>>()?;
    Ok(summarize("constant", config, trials))
}
