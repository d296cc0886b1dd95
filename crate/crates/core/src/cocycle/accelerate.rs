use rayon::prelude::*;
use serde::Serialize;

use super::{path_matrix, projective_step, Pattern, PATTERN_IDENTITY};
use super::{pattern_mul, pattern_positive};
use crate::algorithms::{Algorithm, BranchLabel, Path};
use crate::error::{McfError, Result};
use crate::numeric::{Field, IntMatrix3, SimplexPoint};
use crate::sampling::{mean_and_stderr, rng_from_seed, uniform_float_point};

/// Which occurrences of the loop word count as returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnRule {
    /// Occurrences that start after the previous accepted block has ended.
    /// Every induced segment then begins with the whole loop, so its matrix
    /// is positive even when the word overlaps itself.
    AfterBlock,
    /// Every occurrence: the genuine first return to the cylinder.
    FirstReturn,
}

/// Online detector of occurrences of a fixed label word.
///
/// Labels are fed one at a time; once the last `L` labels spell the word, an
/// occurrence starting `L - 1` steps back is reported.
#[derive(Clone, Debug)]
pub struct ReturnDetector {
    word: Vec<BranchLabel>,
    rule: ReturnRule,
    window: std::collections::VecDeque<BranchLabel>,
    fed: usize,
    next_allowed: usize,
}

impl ReturnDetector {
    pub fn new(word: &Path, rule: ReturnRule) -> Self {
        ReturnDetector {
            word: word.labels().to_vec(),
            rule,
            window: std::collections::VecDeque::with_capacity(word.len()),
            fed: 0,
            next_allowed: 0,
        }
    }

    /// Feeds the label of step `fed`; returns the start index of an accepted
    /// occurrence ending at this step, if any.
    pub fn push(&mut self, label: BranchLabel) -> Option<usize> {
        let len = self.word.len();
        let t = self.fed;
        self.fed += 1;
        if len == 0 {
            return Some(t);
        }
        if self.window.len() == len {
            self.window.pop_front();
        }
        self.window.push_back(label);
        if self.window.len() < len || !self.window.iter().eq(self.word.iter()) {
            return None;
        }
        let start = t + 1 - len;
        if start < self.next_allowed {
            return None;
        }
        self.next_allowed = match self.rule {
            ReturnRule::AfterBlock => start + len,
            ReturnRule::FirstReturn => start + 1,
        };
        Some(start)
    }

    pub fn steps_fed(&self) -> usize {
        self.fed
    }
}

/// Checks that `gamma` can drive an acceleration: a positive loop, or empty.
pub fn check_acceleration_loop(gamma: &Path) -> Result<()> {
    if gamma.is_empty() {
        return Ok(());
    }
    if !gamma.is_loop() {
        return Err(McfError::InvalidInput(format!("{gamma} is not a loop")));
    }
    if !path_matrix(gamma).is_positive() {
        return Err(McfError::InvalidInput(format!("{gamma} is not a positive path")));
    }
    Ok(())
}

/// Result of running the accelerated system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Acceleration {
    pub gamma: Path,
    pub rule: ReturnRule,
    /// Orbit positions of the accepted occurrences.
    pub return_positions: Vec<usize>,
    /// Differences of consecutive positions.
    pub return_times: Vec<usize>,
    /// Product of the step matrices between consecutive positions.
    pub induced_matrices: Vec<IntMatrix3>,
    pub steps: usize,
    /// False when the step budget ran out before `n_returns` returns.
    pub complete: bool,
}

/// Runs the base map from `theta` and records returns to the cylinder of
/// `gamma` (symbolic detection) until `n_returns` induced steps are known or
/// `max_steps` steps were taken.
pub fn accelerate<S: Field>(
    algorithm: Algorithm,
    gamma: &Path,
    theta: &SimplexPoint<S>,
    n_returns: usize,
    max_steps: usize,
    rule: ReturnRule,
) -> Result<Acceleration> {
    if gamma.algorithm() != algorithm {
        return Err(McfError::InvalidInput(format!("{gamma} is not a {algorithm} path")));
    }
    check_acceleration_loop(gamma)?;
    let mut detector = ReturnDetector::new(gamma, rule);
    let mut labels = Vec::new();
    let mut positions: Vec<usize> = Vec::new();
    let mut x = theta.clone();
    // n_returns induced steps need n_returns + 1 returns
    while positions.len() <= n_returns && labels.len() < max_steps {
        let (next, label) = projective_step(algorithm, &x)?;
        labels.push(label);
        if let Some(start) = detector.push(label) {
            positions.push(start);
        }
        x = next;
    }
    let positions: Vec<usize> = positions.into_iter().take(n_returns + 1).collect();
    let return_times: Vec<usize> = positions.windows(2).map(|w| w[1] - w[0]).collect();
    let induced_matrices = positions
        .windows(2)
        .map(|w| super::labels_matrix(&labels[w[0]..w[1]]))
        .collect();
    Ok(Acceleration {
        gamma: gamma.clone(),
        rule,
        complete: return_times.len() == n_returns,
        return_positions: positions,
        return_times,
        induced_matrices,
        steps: labels.len(),
    })
}

/// Running positivity check for induced segments, using zero patterns only.
#[derive(Clone, Debug)]
pub(crate) struct SegmentPattern {
    current: Pattern,
    pub segments: u64,
    pub non_positive: u64,
}

impl SegmentPattern {
    pub fn new() -> Self {
        SegmentPattern {
            current: PATTERN_IDENTITY,
            segments: 0,
            non_positive: 0,
        }
    }

    pub fn push(&mut self, label: &BranchLabel) {
        self.current = pattern_mul(&self.current, &label.pattern());
    }

    /// Closes the segment ending before the current return.
    pub fn close(&mut self) {
        self.segments += 1;
        if !pattern_positive(&self.current) {
            self.non_positive += 1;
        }
        self.current = PATTERN_IDENTITY;
    }
}

/// Kac's lemma on orbit averages: the mean first-return time to the cylinder
/// of `gamma` times the visit frequency, both measured on independent orbits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KacReport {
    pub algorithm: Algorithm,
    pub gamma: Path,
    pub orbits: usize,
    pub steps: usize,
    pub mean_return_time: f64,
    pub mean_return_time_stderr: f64,
    pub frequency: f64,
    pub frequency_stderr: f64,
    /// `mean_return_time * frequency`; 1 in the limit.
    pub product: f64,
    pub product_stderr: f64,
}

/// Per orbit: (hits, steps, sum of return times, number of returns).
fn cylinder_visits(algorithm: Algorithm, gamma: &Path, steps: usize, burn_in: usize, seed: u64) -> (u64, u64, u64, u64) {
    let mut rng = rng_from_seed(seed);
    'draw: loop {
        let mut x = uniform_float_point(&mut rng);
        let mut detector = ReturnDetector::new(gamma, ReturnRule::FirstReturn);
        let mut last = None;
        let (mut hits, mut gaps, mut returns) = (0u64, 0u64, 0u64);
        for _ in 0..burn_in + steps {
            let Ok((next, label)) = projective_step(algorithm, &x) else {
                continue 'draw;
            };
            x = next;
            let Some(start) = detector.push(label) else { continue };
            if start < burn_in {
                continue;
            }
            hits += 1;
            if let Some(prev) = last {
                gaps += (start - prev) as u64;
                returns += 1;
            }
            last = Some(start);
        }
        return (hits, steps as u64, gaps, returns);
    }
}

/// Estimates the Kac product with `orbits` orbits for the return times and
/// another `orbits` independent orbits for the frequency.
pub fn kac_check(algorithm: Algorithm, gamma: &Path, orbits: usize, steps: usize, seed: u64) -> Result<KacReport> {
    if gamma.is_empty() {
        return Err(McfError::InvalidInput("the empty path has no proper cylinder".into()));
    }
    let burn_in = 1000;
    let runs: Vec<(u64, u64, u64, u64)> = (0..2 * orbits as u64)
        .into_par_iter()
        .map(|i| cylinder_visits(algorithm, gamma, steps, burn_in, seed.wrapping_add(i)))
        .collect();
    let (time_runs, freq_runs) = runs.split_at(orbits);
    let times: Vec<f64> = time_runs
        .iter()
        .filter(|r| r.3 > 0)
        .map(|r| r.2 as f64 / r.3 as f64)
        .collect();
    let freqs: Vec<f64> = freq_runs.iter().map(|r| r.0 as f64 / r.1 as f64).collect();
    if times.len() < 2 {
        return Err(McfError::InsufficientSamples(format!("fewer than two orbits returned to {gamma}")));
    }
    let (t, t_se) = mean_and_stderr(&times);
    let (f, f_se) = mean_and_stderr(&freqs);
    let product = t * f;
    let product_stderr = product * ((t_se / t).powi(2) + (f_se / f).powi(2)).sqrt();
    Ok(KacReport {
        algorithm,
        gamma: gamma.clone(),
        orbits,
        steps,
        mean_return_time: t,
        mean_return_time_stderr: t_se,
        frequency: f,
        frequency_stderr: f_se,
        product,
        product_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::orbit;
    use crate::sampling::random_rational_point;

    fn gamma_star() -> Path {
        Path::cassaigne_word("21221").unwrap()
    }

    #[test]
    fn detector_finds_exact_occurrences() {
        let word = Path::cassaigne_word("21221").unwrap();
        let text = Path::cassaigne_word("1212212212211").unwrap();
        let mut first = ReturnDetector::new(&word, ReturnRule::FirstReturn);
        let mut block = ReturnDetector::new(&word, ReturnRule::AfterBlock);
        let hits_first: Vec<usize> = text.labels().iter().filter_map(|l| first.push(*l)).collect();
        let hits_block: Vec<usize> = text.labels().iter().filter_map(|l| block.push(*l)).collect();
        // brute force: every start index where the next five symbols match
        let s = "1212212212211";
        let oracle: Vec<usize> = (0..=s.len() - 5).filter(|&i| &s[i..i + 5] == "21221").collect();
        assert_eq!(hits_first, oracle);
        assert_eq!(oracle, vec![1, 4, 7]);
        assert_eq!(hits_block, vec![1, 7]);
    }

    #[test]
    fn induced_matrices_are_positive_and_unimodular() {
        let mut rng = rng_from_seed(31);
        let theta = random_rational_point(&mut rng, 4096);
        let acc = accelerate(Algorithm::Cassaigne, &gamma_star(), &theta, 10, 100_000, ReturnRule::AfterBlock).unwrap();
        assert!(acc.complete);
        for m in &acc.induced_matrices {
            assert!(m.is_positive());
            assert!(m.is_unimodular());
        }
        let rec = orbit(Algorithm::Cassaigne, &theta, acc.steps, false);
        let word: String = rec.labels.iter().map(ToString::to_string).collect();
        for &p in &acc.return_positions {
            assert_eq!(&word[p..p + 5], "21221");
        }
    }

    #[test]
    fn empty_loop_is_the_base_system() {
        let theta = SimplexPoint::new([0.21f64, 0.33, 0.46]).unwrap();
        let acc = accelerate(Algorithm::Cassaigne, &Path::empty(Algorithm::Cassaigne), &theta, 6, 100, ReturnRule::AfterBlock).unwrap();
        assert!(acc.return_times.iter().all(|&t| t == 1));
        let rec = orbit(Algorithm::Cassaigne, &theta, 6, false);
        for (m, l) in acc.induced_matrices.iter().zip(&rec.labels) {
            assert_eq!(m, &l.matrix());
        }
    }

    #[test]
    fn rejects_bad_loops() {
        let theta = SimplexPoint::new([0.21f64, 0.33, 0.46]).unwrap();
        let single = Path::cassaigne_word("2").unwrap();
        assert!(matches!(
            accelerate(Algorithm::Cassaigne, &single, &theta, 1, 10, ReturnRule::AfterBlock),
            Err(McfError::InvalidInput(_))
        ));
        let open: Path = "T:(1,2,3)b0;(3,1,2)b1".parse().unwrap();
        assert!(check_acceleration_loop(&open).is_err());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let theta = SimplexPoint::new([0.21f64, 0.33, 0.46]).unwrap();
        let acc = accelerate(Algorithm::Cassaigne, &gamma_star(), &theta, 1000, 50, ReturnRule::AfterBlock).unwrap();
        assert!(!acc.complete);
    }

    #[test]
    fn kac_product_is_near_one() {
        let r = kac_check(Algorithm::Cassaigne, &gamma_star(), 8, 50_000, 3).unwrap();
        assert!((r.product - 1.0).abs() < 4.0 * r.product_stderr + 0.02, "{r:?}");
    }
}
