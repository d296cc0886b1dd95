use serde::Serialize;

use super::LyapunovEstimate;
use crate::algorithms::Algorithm;
use crate::cocycle::exact_convergents_bounded;
use crate::error::{McfError, Result};
use crate::numeric::{ln_bigint, ExactPoint};
use crate::sampling::mean_and_stderr;

/// `1 - λ2/λ1`: a lower bound for the uniform approximation exponent, and its
/// almost-everywhere value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentEstimate {
    pub eta_lower: f64,
    pub eta_star: f64,
    pub stderr: f64,
}

/// Exponent from a spectrum. The error is the spread of the per-trial ratios,
/// which keeps the correlation between `λ1` and `λ2` within a trial.
pub fn approximation_exponent(est: &LyapunovEstimate) -> Result<ExponentEstimate> {
    let [l1, l2, _] = est.lambda;
    if l1.is_nan() || l1 <= 0.0 {
        return Err(McfError::Inconsistent(format!("top exponent {l1} is not positive")));
    }
    let eta = 1.0 - l2 / l1;
    let stderr = if est.per_trial.len() >= 2 && est.per_trial.iter().all(|t| t[0] > 0.0) {
        let per: Vec<f64> = est.per_trial.iter().map(|t| 1.0 - t[1] / t[0]).collect();
        mean_and_stderr(&per).1
    } else {
        // delta method on the ratio
        (est.stderr[1] / l1).hypot(l2 * est.stderr[0] / (l1 * l1))
    };
    Ok(ExponentEstimate {
        eta_lower: eta,
        eta_star: eta,
        stderr,
    })
}

/// `(k, e_k)` with `e_k = -ln(error_k) / ln(q_k)` along the exact orbit of θ.
///
/// Only steps where the denominator is still small against the denominator
/// `D` of θ are kept (`ln q <= ln D / 4`): past that the rational θ stops
/// behaving like a generic point.
pub fn eta_profile(algorithm: Algorithm, theta: &ExactPoint, n: usize) -> Vec<(usize, f64)> {
    let d: num_bigint::BigInt = theta.to_integers().iter().sum();
    let ceiling = ln_bigint(&d) / 4.0;
    exact_convergents_bounded(algorithm, theta, n, ceiling)
        .into_iter()
        .filter(|c| c.ln_error.is_finite())
        .map(|c| (c.step, c.ln_denominator(), c.ln_error))
        .take_while(|&(_, lq, _)| lq <= ceiling)
        .filter(|&(_, lq, _)| lq > 0.0)
        .map(|(k, lq, le)| (k, -le / lq))
        .collect()
}

/// Median of `e_k` over the second half of the usable profile.
pub fn empirical_eta(algorithm: Algorithm, theta: &ExactPoint, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(McfError::InsufficientSamples(format!("need at least 2 steps, got {n}")));
    }
    let profile = eta_profile(algorithm, theta, n);
    if profile.len() < 2 {
        return Err(McfError::InsufficientSamples(format!(
            "only {} usable convergents",
            profile.len()
        )));
    }
    let mut tail: Vec<f64> = profile[profile.len() / 2..].iter().map(|&(_, e)| e).collect();
    tail.sort_by(f64::total_cmp);
    let m = tail.len();
    Ok(if m % 2 == 1 {
        tail[m / 2]
    } else {
        0.5 * (tail[m / 2 - 1] + tail[m / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::path_matrix;
    use crate::sampling::{random_rational_point, rng_from_seed};

    fn estimate(lambda: [f64; 3]) -> LyapunovEstimate {
        LyapunovEstimate {
            algorithm: "test".into(),
            lambda,
            stderr: [0.01; 3],
            steps: 1,
            trials: 1,
            seed: 0,
            renorm_period: 1,
            burn_in: 0,
            redraws: 0,
            quotient_overflows: 0,
            per_trial: vec![lambda],
        }
    }

    #[test]
    fn eta_star_values() {
        let l = std::f64::consts::LN_2;
        assert_eq!(approximation_exponent(&estimate([l, 0.0, -l])).unwrap().eta_star, 1.0);
        assert!(approximation_exponent(&estimate([0.3, -0.1, -0.2])).unwrap().eta_star > 1.0);
        assert!(matches!(
            approximation_exponent(&estimate([0.0, 0.0, 0.0])),
            Err(McfError::Inconsistent(_))
        ));
    }

    #[test]
    fn short_orbits_are_rejected() {
        let theta = ExactPoint::from_u64s([2, 3, 6]).unwrap();
        assert!(matches!(
            empirical_eta(Algorithm::Cassaigne, &theta, 1),
            Err(McfError::InsufficientSamples(_))
        ));
    }

    #[test]
    fn periodic_points_stabilize() {
        // a rational point very close to the expanding eigendirection of the
        // 21221 loop follows that loop for many periods
        let m = path_matrix(&crate::algorithms::Path::cassaigne_word("21221").unwrap());
        let v = m.pow(60).apply(&[1, 1, 1].map(num_bigint::BigInt::from));
        let theta = ExactPoint::from_integers(v).unwrap();
        let profile = eta_profile(Algorithm::Cassaigne, &theta, 150);
        let tail: Vec<f64> = profile.iter().rev().take(10).map(|p| p.1).collect();
        let spread = tail.iter().cloned().fold(f64::MIN, f64::max) - tail.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 0.1, "{tail:?}");
    }

    #[test]
    fn random_points_give_exponents_above_one() {
        let mut rng = rng_from_seed(41);
        let theta = random_rational_point(&mut rng, 2048);
        let e = empirical_eta(Algorithm::Cassaigne, &theta, 2000).unwrap();
        assert!(e > 1.0 && e < 1.6, "{e}");
    }
}
