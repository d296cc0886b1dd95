use rand::Rng;
use rand_distr::StandardNormal;

use crate::algorithms::{raw_step, Algorithm, BranchLabel};
use crate::error::{McfError, Result};
use crate::numeric::Mat3;
use crate::sampling::{uniform_simplex, McRng};

/// Entries above this trigger an early re-orthonormalization.
const GROWTH_LIMIT: f64 = 1e150;

/// Orthonormal 3-frame pushed through a cocycle, with the accumulated logs of
/// the Gram-Schmidt diagonal.
///
/// The frame is stored by columns and moved by `v <- M^T v`. Pushing through
/// `M_1, ..., M_n` then applies `(M_1 ⋯ M_n)^T`, whose singular values are those
/// of the path-order product.
#[derive(Clone, Debug)]
pub struct Frame {
    cols: [[f64; 3]; 3],
    logs: [f64; 3],
}

impl Frame {
    pub fn random(rng: &mut McRng) -> Result<Self> {
        let cols = std::array::from_fn(|_| std::array::from_fn(|_| rng.sample(StandardNormal)));
        let mut f = Frame { cols, logs: [0.0; 3] };
        f.renormalize()?;
        f.logs = [0.0; 3];
        Ok(f)
    }

    pub fn logs(&self) -> [f64; 3] {
        self.logs
    }

    pub fn push(&mut self, m: &Mat3) -> Result<()> {
        let mut big = 0.0f64;
        for col in self.cols.iter_mut() {
            let v = *col;
            for (i, out) in col.iter_mut().enumerate() {
                *out = m[0][i] * v[0] + m[1][i] * v[1] + m[2][i] * v[2];
                big = big.max(out.abs());
            }
        }
        if big > GROWTH_LIMIT {
            self.renormalize()?;
        }
        Ok(())
    }

    /// Modified Gram-Schmidt; adds `ln r_jj` to the logs.
    pub fn renormalize(&mut self) -> Result<()> {
        for j in 0..3 {
            for i in 0..j {
                let (done, rest) = self.cols.split_at_mut(j);
                let d = dot(&done[i], &rest[0]);
                for k in 0..3 {
                    rest[0][k] -= d * done[i][k];
                }
            }
            let r = dot(&self.cols[j], &self.cols[j]).sqrt();
            if !(r.is_finite() && r > 0.0) {
                return Err(McfError::NumericFailure(format!("frame column {j} has norm {r}")));
            }
            self.logs[j] += r.ln();
            for v in self.cols[j].iter_mut() {
                *v /= r;
            }
        }
        Ok(())
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// A stream of cocycle matrices.
pub trait MatrixSource {
    fn next_matrix(&mut self) -> Result<Mat3>;
}

/// The same matrix at every step.
#[derive(Clone, Debug)]
pub struct ConstantCocycle(pub Mat3);

impl MatrixSource for ConstantCocycle {
    fn next_matrix(&mut self) -> Result<Mat3> {
        Ok(self.0)
    }
}

/// Floating orbit of an algorithm from a uniform random start.
///
/// Degenerate points and oversized triangle quotients are handled by drawing a
/// fresh start and burning it in again; both events are counted.
#[derive(Clone, Debug)]
pub struct OrbitSource {
    algorithm: Algorithm,
    x: [f64; 3],
    rng: McRng,
    burn_in: u64,
    pub redraws: u64,
    pub quotient_overflows: u64,
}

impl OrbitSource {
    pub fn new(algorithm: Algorithm, rng: McRng, burn_in: u64) -> Self {
        let mut s = OrbitSource {
            algorithm,
            x: [1.0 / 3.0; 3],
            rng,
            burn_in,
            redraws: 0,
            quotient_overflows: 0,
        };
        s.restart();
        s.redraws = 0;
        s.quotient_overflows = 0;
        s
    }

    fn restart(&mut self) {
        'draw: loop {
            self.x = uniform_simplex(&mut self.rng);
            for _ in 0..self.burn_in {
                if self.try_step().is_err() {
                    self.note_failure();
                    continue 'draw;
                }
            }
            return;
        }
    }

    fn note_failure(&mut self) {
        self.redraws += 1;
    }

    fn try_step(&mut self) -> Result<BranchLabel> {
        let (y, label) = raw_step(self.algorithm, &self.x).inspect_err(|e| {
            if matches!(e, McfError::QuotientOverflow(_)) {
                self.quotient_overflows += 1;
            }
        })?;
        let s = y[0] + y[1] + y[2];
        self.x = [y[0] / s, y[1] / s, y[2] / s];
        Ok(label)
    }

    /// Next branch label of the orbit.
    pub fn next_label(&mut self) -> BranchLabel {
        loop {
            match self.try_step() {
                Ok(l) => return l,
                Err(_) => {
                    self.note_failure();
                    self.restart();
                }
            }
        }
    }

    pub fn point(&self) -> [f64; 3] {
        self.x
    }
}

impl MatrixSource for OrbitSource {
    fn next_matrix(&mut self) -> Result<Mat3> {
        Ok(self.next_label().matrix_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{mat3_mul, mat3_transpose, MAT3_IDENTITY};
    use crate::sampling::rng_from_seed;

    #[test]
    fn random_frame_is_orthonormal() {
        let f = Frame::random(&mut rng_from_seed(1)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&f.cols[i], &f.cols[j]) - want).abs() < 1e-12);
            }
        }
        assert_eq!(f.logs(), [0.0; 3]);
    }

    #[test]
    fn log_sum_is_log_det() {
        // |det| of the transported block equals exp of the summed logs
        let m = [[2.0, 1.0, 0.0], [0.0, 1.0, 3.0], [1.0, 0.0, 1.0]]; // det 2 + 3 = 5
        let mut f = Frame::random(&mut rng_from_seed(2)).unwrap();
        for _ in 0..10 {
            f.push(&m).unwrap();
        }
        f.renormalize().unwrap();
        let sum: f64 = f.logs().iter().sum();
        assert!((sum - 10.0 * 5f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn transport_uses_the_transpose() {
        let a = [[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let b = [[1.0, 0.0, 0.0], [3.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut f = Frame { cols: MAT3_IDENTITY, logs: [0.0; 3] };
        f.push(&a).unwrap();
        f.push(&b).unwrap();
        // columns of (a b)^T
        let want = mat3_transpose(&mat3_mul(&a, &b));
        for (j, col) in f.cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                assert_eq!(*v, want[i][j]);
            }
        }
    }

    #[test]
    fn orbit_source_stays_on_the_simplex() {
        let mut s = OrbitSource::new(Algorithm::Triangle, rng_from_seed(3), 100);
        for _ in 0..10_000 {
            s.next_label();
            let x = s.point();
            assert!(x.iter().all(|&v| v > 0.0));
        }
    }
}
