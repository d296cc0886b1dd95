use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{projective_step, Algorithm, BranchLabel, Path};
use crate::error::{McfError, Result};
use crate::numeric::FloatPoint;
use crate::sampling::{rng_from_seed, uniform_float_point, McRng};

const CHUNK: u64 = 8192;

/// Uniform frequency of a cylinder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyEstimate {
    pub word: Path,
    pub samples: u64,
    pub hits: u64,
    pub frequency: f64,
    pub stderr: f64,
    /// Draws discarded on the degenerate set.
    pub resampled: u64,
}

impl FrequencyEstimate {
    /// Estimated chart area: the simplex has chart area `1/2`.
    pub fn chart_measure(&self) -> (f64, f64) {
        (self.frequency / 2.0, self.stderr / 2.0)
    }
}

/// Empirical `μ([w1 w2]) / (μ([w1]) μ([w2]))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionEstimate {
    pub word1: Path,
    pub word2: Path,
    pub samples: u64,
    pub hits1: u64,
    pub hits2: u64,
    pub hits12: u64,
    pub ratio: f64,
    /// Delta-method error from the joint multinomial counts.
    pub stderr: f64,
    pub resampled: u64,
}

/// First `len` labels of a uniform point, redrawing on the degenerate set.
fn itinerary(algorithm: Algorithm, rng: &mut McRng, len: usize, buf: &mut Vec<BranchLabel>) -> u64 {
    let mut redraws = 0;
    'draw: loop {
        buf.clear();
        let mut x: FloatPoint = uniform_float_point(rng);
        for _ in 0..len {
            match projective_step(algorithm, &x) {
                Ok((y, l)) => {
                    buf.push(l);
                    x = y;
                }
                Err(_) => {
                    redraws += 1;
                    continue 'draw;
                }
            }
        }
        return redraws;
    }
}

/// Counts `[hit_0, hit_1, ..]` of per-sample indicator vectors, plus the
/// pairwise joint counts, over `samples` itineraries of length `len`.
fn count<const K: usize>(
    algorithm: Algorithm,
    samples: u64,
    seed: u64,
    len: usize,
    hit: impl Fn(&[BranchLabel]) -> [bool; K] + Sync,
) -> ([[u64; K]; K], u64) {
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_from_seed(seed.wrapping_add(c));
            let n = CHUNK.min(samples - c * CHUNK);
            let mut joint = [[0u64; K]; K];
            let mut redraws = 0;
            let mut buf = Vec::with_capacity(len);
            for _ in 0..n {
                redraws += itinerary(algorithm, &mut rng, len, &mut buf);
                let h = hit(&buf);
                for i in 0..K {
                    for j in 0..K {
                        joint[i][j] += u64::from(h[i] && h[j]);
                    }
                }
            }
            (joint, redraws)
        })
        .reduce(
            || ([[0u64; K]; K], 0),
            |(mut a, ra), (b, rb)| {
                for i in 0..K {
                    for j in 0..K {
                        a[i][j] += b[i][j];
                    }
                }
                (a, ra + rb)
            },
        )
}

fn check_word(algorithm: Algorithm, word: &Path) -> Result<()> {
    if word.algorithm() != algorithm {
        return Err(McfError::InvalidInput(format!("{word} is not a {algorithm} path")));
    }
    Ok(())
}

/// Fraction of uniform points whose itinerary starts with `word`.
pub fn cylinder_frequency(algorithm: Algorithm, word: &Path, samples: u64, seed: u64) -> Result<FrequencyEstimate> {
    check_word(algorithm, word)?;
    if samples == 0 {
        return Err(McfError::InvalidInput("samples must be positive".into()));
    }
    let labels = word.labels();
    let (joint, resampled) = count(algorithm, samples, seed, labels.len(), |it| [it == labels]);
    let hits = joint[0][0];
    let p = hits as f64 / samples as f64;
    Ok(FrequencyEstimate {
        word: word.clone(),
        samples,
        hits,
        frequency: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        resampled,
    })
}

/// Bounded-distortion ratio of two cylinders. With `word2` empty the ratio
/// is exactly 1.
pub fn distortion_ratio(
    algorithm: Algorithm,
    word1: &Path,
    word2: &Path,
    samples: u64,
    seed: u64,
) -> Result<DistortionEstimate> {
    check_word(algorithm, word1)?;
    check_word(algorithm, word2)?;
    if samples == 0 {
        return Err(McfError::InvalidInput("samples must be positive".into()));
    }
    let joined = word1.concat(word2)?;
    let (w1, w2, w12) = (word1.labels(), word2.labels(), joined.labels());
    let (joint, resampled) = count(algorithm, samples, seed, w12.len(), |it| {
        [it == w12, it.starts_with(w1), it.starts_with(w2)]
    });
    let (hits12, hits1, hits2) = (joint[0][0], joint[1][1], joint[2][2]);
    if hits12 == 0 || hits1 == 0 || hits2 == 0 {
        return Err(McfError::InsufficientSamples(format!(
            "no hits in one of the cylinders ({hits1}, {hits2}, {hits12})"
        )));
    }
    let n = samples as f64;
    let ratio = hits12 as f64 * n / (hits1 as f64 * hits2 as f64);
    // Var(ln R) = g' Σ g / n with g = (1/p12, -1/p1, -1/p2)
    let p = [hits12, hits1, hits2].map(|h| h as f64 / n);
    let g = [1.0 / p[0], -1.0 / p[1], -1.0 / p[2]];
    let mut var = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let cov = joint[i][j] as f64 / n - p[i] * p[j];
            var += g[i] * g[j] * cov;
        }
    }
    Ok(DistortionEstimate {
        word1: word1.clone(),
        word2: word2.clone(),
        samples,
        hits1,
        hits2,
        hits12,
        ratio,
        stderr: ratio * (var.max(0.0) / n).sqrt(),
        resampled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::CoordOrder;
    use crate::measures::triangle_cylinder_measure;
    use crate::numeric::ratio_to_f64;

    #[test]
    fn triangle_frequencies_match_the_formula() {
        let order = CoordOrder::from_one_based([3, 2, 1]).unwrap();
        for b in [0, 1, 5] {
            let word = Path::new(Algorithm::Triangle, vec![BranchLabel::Triangle { order, quotient: b }]).unwrap();
            let f = cylinder_frequency(Algorithm::Triangle, &word, 200_000, 9).unwrap();
            let (m, err) = f.chart_measure();
            let exact = ratio_to_f64(&triangle_cylinder_measure(b).unwrap());
            assert!((m - exact).abs() < 4.0 * err, "b={b}: {m} vs {exact} ± {err}");
        }
    }

    #[test]
    fn empty_second_word_gives_one() {
        let w1 = Path::cassaigne_word("21").unwrap();
        let r = distortion_ratio(Algorithm::Cassaigne, &w1, &Path::empty(Algorithm::Cassaigne), 20_000, 1).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert_eq!(r.hits2, r.samples);
    }

    #[test]
    fn cassaigne_ratio_is_finite() {
        let w1 = Path::cassaigne_word("2").unwrap();
        let w2 = Path::cassaigne_word("1").unwrap();
        let r = distortion_ratio(Algorithm::Cassaigne, &w1, &w2, 100_000, 2).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        assert!(r.stderr > 0.0 && r.stderr < 0.1 * r.ratio);
    }

    #[test]
    fn chunking_is_reproducible() {
        let w = Path::cassaigne_word("12").unwrap();
        let a = cylinder_frequency(Algorithm::Cassaigne, &w, 30_000, 4).unwrap();
        let b = cylinder_frequency(Algorithm::Cassaigne, &w, 30_000, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inadmissible_or_foreign_words_are_rejected() {
        let w = Path::cassaigne_word("1").unwrap();
        assert!(cylinder_frequency(Algorithm::Triangle, &w, 10, 0).is_err());
        let s1: Path = "S:(1,2,3)".parse().unwrap();
        let s2: Path = "S:(3,2,1)".parse().unwrap();
        assert!(distortion_ratio(Algorithm::Selmer, &s1, &s2, 100, 0).is_err());
    }
}
