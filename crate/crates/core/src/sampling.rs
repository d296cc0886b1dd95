//! Seeded random draws on the simplex.

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::numeric::{normalize, ExactPoint, FloatPoint};

/// Generator used by every Monte-Carlo driver.
pub type McRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> McRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lebesgue-uniform point of the open simplex (normalized exponentials).
pub fn uniform_simplex<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let e: [f64; 3] = std::array::from_fn(|_| Exp1.sample(rng));
        let s = e[0] + e[1] + e[2];
        if s > 0.0 && e.iter().all(|&v| v > 0.0) {
            return e.map(|v| v / s);
        }
    }
}

pub fn uniform_float_point<R: Rng + ?Sized>(rng: &mut R) -> FloatPoint {
    normalize(uniform_simplex(rng)).expect("positive draw")
}

/// Random rational point whose coordinates carry roughly `bits` random bits,
/// approximately uniform on the simplex.
pub fn random_rational_point<R: Rng + ?Sized>(rng: &mut R, bits: u64) -> ExactPoint {
    let bits = bits.max(64);
    let x = uniform_simplex(rng);
    let low_bits = bits - 52;
    let coords = x.map(|c| {
        let head = BigInt::from((c * (1u64 << 52) as f64) as u64);
        let words = low_bits.div_ceil(32) as usize;
        let digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
        let mut tail = BigUint::new(digits);
        tail >>= (words as u64 * 32) - low_bits;
        (head << low_bits) + BigInt::from(tail) + 1
    });
    ExactPoint::from_integers(coords).expect("positive coordinates")
}

/// Sample mean and standard error of the mean; the error is NaN for fewer
/// than two values.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Scalar;

    #[test]
    fn uniform_draws_lie_in_the_simplex() {
        let mut rng = rng_from_seed(1);
        for _ in 0..1000 {
            let x = uniform_simplex(&mut rng);
            assert!(x.iter().all(|&v| v > 0.0));
            assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_draws_have_uniform_marginal_mean() {
        let mut rng = rng_from_seed(2);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| uniform_simplex(&mut rng)[0]).sum::<f64>() / n as f64;
        // Dirichlet(1,1,1) marginal has mean 1/3 and variance 1/18
        assert!((mean - 1.0 / 3.0).abs() < 4.0 * (1.0f64 / 18.0 / n as f64).sqrt());
    }

    #[test]
    fn rational_points_are_normalized_and_precise() {
        let mut rng = rng_from_seed(3);
        let p = random_rational_point(&mut rng, 256);
        assert!(p.is_normalized());
        assert!(p.to_integers().iter().all(|c| c.bits() > 200));
        assert!(p.coords().iter().all(|c| c.approx_f64() > 0.0));
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = uniform_simplex(&mut rng_from_seed(9));
        let b = uniform_simplex(&mut rng_from_seed(9));
        assert_eq!(a, b);
    }
}
