use rayon::prelude::*;
use serde::Serialize;

use super::{pinching_certificate, twisting_from, PinchingCertificate, TwistingCertificate};
use crate::algorithms::{valid_successor, Algorithm, BranchLabel, CoordOrder, Path};
use crate::cocycle::path_matrix;
use crate::error::{McfError, Result};

/// Largest number of candidate loops a search may enumerate.
pub const SEARCH_BUDGET: u64 = 5_000_000;
const MAX_SEARCH_LEN: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifiedLoop {
    pub path: Path,
    pub certificate: PinchingCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifiedPair {
    pub gamma1: Path,
    pub gamma2: Path,
    pub certificate: TwistingCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub algorithm: Algorithm,
    pub max_len: usize,
    pub max_b: u64,
    pub loops_enumerated: usize,
    pub positive_loops: usize,
    pub pinching_loops: usize,
    /// Twisting pairs ordered by total length, then length of `gamma1`,
    /// then `gamma1`, then `gamma2`.
    pub pairs: Vec<CertifiedPair>,
    /// Pairs beyond `max_pairs` were not listed.
    pub truncated: bool,
}

impl SearchReport {
    pub fn contains_pair(&self, gamma1: &Path, gamma2: &Path) -> bool {
        self.pairs
            .iter()
            .any(|p| (&p.gamma1 == gamma1 && &p.gamma2 == gamma2) || (&p.gamma1 == gamma2 && &p.gamma2 == gamma1))
    }
}

fn alphabet(algorithm: Algorithm, max_b: u64) -> Vec<BranchLabel> {
    match algorithm {
        Algorithm::Cassaigne => vec![
            BranchLabel::cassaigne(1).expect("valid symbol"),
            BranchLabel::cassaigne(2).expect("valid symbol"),
        ],
        Algorithm::Triangle => CoordOrder::all()
            .into_iter()
            .flat_map(|order| (0..=max_b).map(move |quotient| BranchLabel::Triangle { order, quotient }))
            .collect(),
        Algorithm::Selmer => CoordOrder::all().into_iter().map(|order| BranchLabel::Selmer { order }).collect(),
    }
}

/// Number of admissible words of each length, without building them.
fn count_words(labels: &[BranchLabel], max_len: usize) -> u64 {
    let mut counts = vec![1u64; labels.len()];
    let mut total = 0u64;
    for len in 1..=max_len {
        if len > 1 {
            counts = labels
                .iter()
                .map(|next| {
                    labels
                        .iter()
                        .zip(&counts)
                        .filter(|(prev, _)| valid_successor(prev, next).unwrap_or(false))
                        .map(|(_, c)| *c)
                        .fold(0u64, u64::saturating_add)
                })
                .collect();
        }
        total = total.saturating_add(counts.iter().fold(0u64, |a, c| a.saturating_add(*c)));
    }
    total
}

fn loops(labels: &[BranchLabel], algorithm: Algorithm, max_len: usize) -> Vec<Path> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<BranchLabel>> = labels.iter().map(|l| vec![*l]).collect();
    for len in 1..=max_len {
        if len > 1 {
            frontier = frontier
                .into_iter()
                .flat_map(|w| {
                    let last = *w.last().expect("nonempty");
                    labels
                        .iter()
                        .filter(move |n| valid_successor(&last, n).unwrap_or(false))
                        .map(move |n| {
                            let mut v = w.clone();
                            v.push(*n);
                            v
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        out.extend(
            frontier
                .iter()
                .map(|w| Path::new(algorithm, w.clone()).expect("built from admissible steps"))
                .filter(Path::is_loop),
        );
    }
    out
}

/// Enumerates loops of length `1..=max_len` (triangle quotients at most
/// `max_b`), keeps the positive pinching ones and lists pairs with coprime
/// discriminants, at most `max_pairs` of them.
///
/// Rotations of a loop are distinct loops here; they share the
/// characteristic polynomial.
pub fn search_certificate_pairs(
    algorithm: Algorithm,
    max_len: usize,
    max_b: u64,
    max_pairs: usize,
) -> Result<SearchReport> {
    if max_len > MAX_SEARCH_LEN {
        return Err(McfError::InvalidInput(format!("max_len is limited to {MAX_SEARCH_LEN}")));
    }
    let labels = alphabet(algorithm, max_b);
    let words = count_words(&labels, max_len);
    if words > SEARCH_BUDGET {
        return Err(McfError::Unsupported(format!(
            "{words} candidate words exceed the search budget of {SEARCH_BUDGET}"
        )));
    }
    let candidates = loops(&labels, algorithm, max_len);
    let loops_enumerated = candidates.len();
    let positive: Vec<(Path, crate::numeric::IntMatrix3)> = candidates
        .into_par_iter()
        .map(|p| {
            let m = path_matrix(&p);
            (p, m)
        })
        .filter(|(_, m)| m.is_positive())
        .collect();
    let positive_loops = positive.len();
    let mut certified: Vec<CertifiedLoop> = positive
        .into_par_iter()
        .map(|(path, m)| CertifiedLoop {
            path,
            certificate: pinching_certificate(&m),
        })
        .filter(|c| c.certificate.verdict)
        .collect();
    certified.sort_by(|x, y| (x.path.len(), &x.path).cmp(&(y.path.len(), &y.path)));

    let mut pairs = Vec::new();
    let mut truncated = false;
    'scan: for total in 2..=2 * max_len {
        for (i, c1) in certified.iter().enumerate() {
            let l1 = c1.path.len();
            if 2 * l1 > total {
                break;
            }
            let l2 = total - l1;
            for c2 in certified[i + 1..].iter().filter(|c| c.path.len() == l2) {
                let cert = twisting_from(c1.certificate.clone(), c2.certificate.clone());
                if !cert.verdict {
                    continue;
                }
                if pairs.len() == max_pairs {
                    truncated = true;
                    break 'scan;
                }
                pairs.push(CertifiedPair {
                    gamma1: c1.path.clone(),
                    gamma2: c2.path.clone(),
                    certificate: cert,
                });
            }
        }
    }
    Ok(SearchReport {
        algorithm,
        max_len,
        max_b,
        loops_enumerated,
        positive_loops,
        pinching_loops: certified.len(),
        pairs,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cassaigne_search_finds_the_known_pair() {
        let r = search_certificate_pairs(Algorithm::Cassaigne, 7, 0, usize::MAX).unwrap();
        let g1 = Path::cassaigne_word("21221").unwrap();
        let g2 = Path::cassaigne_word("1222121").unwrap();
        assert!(r.contains_pair(&g1, &g2));
        assert_eq!(r.loops_enumerated, (1..=7).map(|n| 1usize << n).sum::<usize>());
    }

    #[test]
    fn triangle_search_contains_the_first_loop() {
        let r = search_certificate_pairs(Algorithm::Triangle, 3, 4, usize::MAX).unwrap();
        let g1: Path = "T:(1,2,3)b0;(3,1,2)b1;(2,3,1)b2".parse().unwrap();
        assert!(r.pairs.iter().any(|p| p.gamma1 == g1 || p.gamma2 == g1));
        // loops close only after a multiple of three steps
        assert!(r.pairs.iter().all(|p| p.gamma1.len() % 3 == 0));
    }

    #[test]
    fn single_steps_never_certify() {
        for alg in Algorithm::ALL {
            let r = search_certificate_pairs(alg, 1, 3, usize::MAX).unwrap();
            assert!(r.pairs.is_empty());
            assert_eq!(r.positive_loops, 0);
        }
    }

    #[test]
    fn pairs_are_sorted_and_limited() {
        let r = search_certificate_pairs(Algorithm::Cassaigne, 7, 0, 5).unwrap();
        assert_eq!(r.pairs.len(), 5);
        assert!(r.truncated);
        let keys: Vec<usize> = r.pairs.iter().map(|p| p.gamma1.len() + p.gamma2.len()).collect();
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn budget_and_length_limits() {
        assert!(matches!(
            search_certificate_pairs(Algorithm::Cassaigne, 13, 0, 10),
            Err(McfError::InvalidInput(_))
        ));
        assert!(matches!(
            search_certificate_pairs(Algorithm::Triangle, 12, 20, 10),
            Err(McfError::Unsupported(_))
        ));
    }

    #[test]
    fn selmer_loops_respect_successors() {
        let r = search_certificate_pairs(Algorithm::Selmer, 6, 0, 50).unwrap();
        for p in &r.pairs {
            assert!(p.gamma1.is_loop() && p.gamma2.is_loop());
        }
    }
}
