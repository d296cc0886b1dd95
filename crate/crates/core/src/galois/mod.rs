//! Exact certificate arithmetic: characteristic polynomials, discriminants,
//! irreducibility, and the pinching and twisting predicates.

mod search;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

pub use search::{search_certificate_pairs, CertifiedLoop, CertifiedPair, SearchReport, SEARCH_BUDGET};

use crate::algorithms::{Algorithm, Path};
use crate::error::{McfError, Result};
use crate::numeric::{IntMatrix3, MonicCubic};

/// `det(xI - M)` as `x^3 + a x^2 + b x + c`.
pub fn char_poly(m: &IntMatrix3) -> MonicCubic {
    let e = |i: usize, j: usize| m.get(i, j);
    let minors = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0) + e(0, 0) * e(2, 2) - e(0, 2) * e(2, 0) + e(1, 1) * e(2, 2)
        - e(1, 2) * e(2, 1);
    MonicCubic::new(-m.trace(), minors, -m.det())
}

/// Closed-form discriminant `18abc - 4a^3c + a^2b^2 - 4b^3 - 27c^2`.
/// Positive exactly when the cubic has three distinct real roots.
pub fn discriminant(p: &MonicCubic) -> BigInt {
    let (a, b, c) = (&p.a, &p.b, &p.c);
    BigInt::from(18) * a * b * c - BigInt::from(4) * a.pow(3) * c + a * a * b * b
        - BigInt::from(4) * b.pow(3)
        - BigInt::from(27) * c * c
}

/// Determinant by fraction-free Gaussian elimination (Bareiss).
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `-Res(p, p')` from the 5x5 Sylvester determinant; an independent route to
/// the discriminant of a monic cubic.
pub fn discriminant_via_resultant(p: &MonicCubic) -> BigInt {
    let z = BigInt::zero;
    let [one, a, b, c] = p.coefficients();
    let (d2, d1, d0) = (BigInt::from(3), BigInt::from(2) * &a, b.clone());
    let rows = vec![
        vec![one.clone(), a.clone(), b.clone(), c.clone(), z()],
        vec![z(), one, a, b, c],
        vec![d2.clone(), d1.clone(), d0.clone(), z(), z()],
        vec![z(), d2.clone(), d1.clone(), d0.clone(), z()],
        vec![z(), z(), d2, d1, d0],
    ];
    -bareiss_det(rows)
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Integer roots of a monic cubic. Rational roots of a monic integer
/// polynomial are integers dividing `c`; small `|c|` is handled by testing its
/// divisors, large `|c|` by exact bisection on the monotone pieces.
pub fn integer_roots(p: &MonicCubic) -> Vec<BigInt> {
    if p.c.is_zero() {
        let mut roots = vec![BigInt::zero()];
        // x (x^2 + a x + b)
        let disc = &p.a * &p.a - BigInt::from(4) * &p.b;
        if is_perfect_square(&disc) {
            let s = disc.sqrt();
            for num in [-&p.a + &s, -&p.a - &s] {
                if num.is_even() {
                    roots.push(num / 2);
                }
            }
        }
        roots.sort();
        roots.dedup();
        return roots;
    }
    let mut roots = match p.c.abs().to_u64().filter(|&c| c <= 1u64 << 40) {
        Some(c) => divisors(c)
            .into_iter()
            .flat_map(|d| [BigInt::from(d), -BigInt::from(d)])
            .filter(|r| p.eval(r).is_zero())
            .collect(),
        None => bisection_roots(p),
    };
    roots.sort();
    roots.dedup();
    roots
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            out.push(n / d);
        }
        d += 1;
    }
    out
}

fn bisection_roots(p: &MonicCubic) -> Vec<BigInt> {
    let bound = BigInt::one() + p.a.abs().max(p.b.abs()).max(p.c.abs());
    let three = BigInt::from(3);
    let mut roots = Vec::new();
    let mut pieces = Vec::new();
    // critical points (-a ± sqrt(a^2 - 3b)) / 3, bracketed by integers
    let disc = &p.a * &p.a - &three * &p.b;
    if disc.is_positive() {
        let s = disc.sqrt();
        let l1 = (-&p.a - &s - BigInt::one()).div_floor(&three);
        let u1 = -((&p.a + &s).div_floor(&three));
        let l2 = (-&p.a + &s).div_floor(&three);
        let u2 = -((&p.a - &s - BigInt::one()).div_floor(&three));
        for (lo, hi) in [(&l1, &u1), (&l2, &u2)] {
            let mut r = lo.clone();
            while &r <= hi {
                if p.eval(&r).is_zero() {
                    roots.push(r.clone());
                }
                r += 1;
            }
        }
        pieces.extend([(-bound.clone(), l1), (u1, l2), (u2, bound)]);
    } else {
        pieces.push((-bound.clone(), bound));
    }
    // p is strictly monotone on each piece
    for (mut lo, mut hi) in pieces {
        if lo > hi {
            continue;
        }
        let (flo, fhi) = (p.eval(&lo), p.eval(&hi));
        if flo.is_zero() {
            roots.push(lo.clone());
        }
        if fhi.is_zero() {
            roots.push(hi.clone());
        }
        if flo.is_zero() || fhi.is_zero() || flo.sign() == fhi.sign() {
            continue;
        }
        let rising = fhi.is_positive();
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
            let v = p.eval(&mid);
            if v.is_zero() {
                roots.push(mid);
                break;
            }
            if v.is_positive() == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    roots
}

/// A monic cubic is irreducible over the rationals iff it has no rational root.
pub fn irreducible_over_rationals(p: &MonicCubic) -> bool {
    integer_roots(p).is_empty()
}

/// Real roots in increasing order, by the trigonometric or Cardano formula
/// followed by Newton polishing.
pub fn real_roots(p: &MonicCubic) -> Vec<f64> {
    let (a, b, c) = p.coeffs_f64();
    let shift = a / 3.0;
    let pp = b - a * a / 3.0;
    let qq = 2.0 * a.powi(3) / 27.0 - a * b / 3.0 + c;
    let disc = discriminant(p);
    let mut roots: Vec<f64> = if disc.is_positive() && pp < 0.0 {
        let m = 2.0 * (-pp / 3.0).sqrt();
        let arg = (3.0 * qq / (pp * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .collect()
    } else {
        let d = (qq / 2.0).powi(2) + (pp / 3.0).powi(3);
        let s = d.max(0.0).sqrt();
        vec![(-qq / 2.0 + s).cbrt() + (-qq / 2.0 - s).cbrt() - shift]
    };
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let f = p.eval_f64(*r);
            let df = (3.0 * *r + 2.0 * a) * *r + b;
            if df != 0.0 {
                *r -= f / df;
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Prime factors of `1 <= n <= 2^64` with multiplicity, by trial division.
pub fn factorize(n: &BigInt) -> Result<Vec<u64>> {
    if !n.is_positive() {
        return Err(McfError::InvalidInput(format!("cannot factorize {n}")));
    }
    let mut m: u128 = n
        .to_u128()
        .filter(|&v| v <= 1u128 << 64)
        .ok_or_else(|| McfError::Unsupported(format!("{n} exceeds 2^64")))?;
    let mut out = Vec::new();
    for p in [2u128, 3] {
        while m.is_multiple_of(p) {
            out.push(p as u64);
            m /= p;
        }
    }
    let mut d = 5u128;
    while d * d <= m {
        for p in [d, d + 2] {
            while m.is_multiple_of(p) {
                out.push(p as u64);
                m /= p;
            }
        }
        d += 6;
    }
    if m > 1 {
        out.push(m as u64);
    }
    Ok(out)
}

fn as_string<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Everything needed to re-check the pinching predicate by hand.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PinchingCertificate {
    pub matrix: IntMatrix3,
    pub poly: MonicCubic,
    #[serde(serialize_with = "as_string")]
    pub discriminant: BigInt,
    /// Prime factors of `|Δ|`, when it is at most `2^64`.
    pub discriminant_factors: Option<Vec<u64>>,
    pub irreducible: bool,
    pub disc_positive: bool,
    pub disc_nonsquare: bool,
    pub verdict: bool,
    pub real_roots: Vec<f64>,
}

/// Irreducible, totally real, with Galois group `S3` (irreducible and a
/// positive non-square discriminant).
pub fn pinching_certificate(m: &IntMatrix3) -> PinchingCertificate {
    let poly = char_poly(m);
    let disc = discriminant(&poly);
    let irreducible = irreducible_over_rationals(&poly);
    let disc_positive = disc.is_positive();
    let disc_nonsquare = !is_perfect_square(&disc);
    PinchingCertificate {
        matrix: m.clone(),
        discriminant_factors: (!disc.is_zero()).then(|| factorize(&disc.abs()).ok()).flatten(),
        real_roots: real_roots(&poly),
        poly,
        discriminant: disc,
        irreducible,
        disc_positive,
        disc_nonsquare,
        verdict: irreducible && disc_positive && disc_nonsquare,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwistingCertificate {
    pub cert1: PinchingCertificate,
    pub cert2: PinchingCertificate,
    #[serde(serialize_with = "as_string")]
    pub gcd_of_discriminants: BigInt,
    pub verdict: bool,
}

/// Both matrices pinching and `gcd(|Δ1|, |Δ2|) = 1`.
pub fn twisting_certificate(m1: &IntMatrix3, m2: &IntMatrix3) -> TwistingCertificate {
    twisting_from(pinching_certificate(m1), pinching_certificate(m2))
}

pub fn twisting_from(cert1: PinchingCertificate, cert2: PinchingCertificate) -> TwistingCertificate {
    let gcd = cert1.discriminant.abs().gcd(&cert2.discriminant.abs());
    let verdict = cert1.verdict && cert2.verdict && gcd.is_one();
    TwistingCertificate {
        cert1,
        cert2,
        gcd_of_discriminants: gcd,
        verdict,
    }
}

/// The two reference loops of the triangle sequence.
pub const TRIANGLE_PAIR: [&str; 2] = ["T:(1,2,3)b0;(3,1,2)b1;(2,3,1)b2", "T:(1,3,2)b0;(2,1,3)b0;(3,2,1)b4"];
/// The two reference loops of the Cassaigne algorithm.
pub const CASSAIGNE_PAIR: [&str; 2] = ["C:21221", "C:1222121"];

/// Reference pair of positive loops with a twisting certificate.
pub fn reference_pair(algorithm: Algorithm) -> Result<(Path, Path)> {
    let [a, b] = match algorithm {
        Algorithm::Triangle => TRIANGLE_PAIR,
        Algorithm::Cassaigne => CASSAIGNE_PAIR,
        Algorithm::Selmer => return Err(McfError::Unsupported("no reference pair for selmer".into())),
    };
    Ok((a.parse()?, b.parse()?))
}
