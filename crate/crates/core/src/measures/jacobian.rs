use crate::algorithms::{branch, Algorithm, BranchLabel};
use crate::error::{McfError, Result};
use crate::numeric::{FloatPoint, Mat3};

fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Log of the Jacobian of `x -> m x / |m x|_1` on the simplex, for `m` with
/// `m x` positive: `ln|det m| - 3 ln |m x|_1`. Any affine chart of the simplex
/// gives the same value.
pub fn projective_log_jacobian(m: &Mat3, x: &[f64; 3]) -> f64 {
    let s: f64 = (0..3).map(|i| (0..3).map(|j| m[i][j] * x[j]).sum::<f64>()).sum();
    det3(m).abs().ln() - 3.0 * s.ln()
}

/// Log-Jacobian of the forward branch map at `x`; the branch inverts the
/// step matrix of `label`. Positive: the maps expand.
pub fn log_jacobian(algorithm: Algorithm, x: &FloatPoint, label: &BranchLabel) -> Result<f64> {
    if label.algorithm() != algorithm {
        return Err(McfError::InvalidInput(format!("{label} is not a {algorithm} label")));
    }
    let taken = branch(algorithm, x.coords())?;
    if &taken != label {
        return Err(McfError::InvalidInput(format!("{x:?} lies in the domain of {taken}, not {label}")));
    }
    let inverse = label.matrix().inverse_unimodular()?.to_f64();
    Ok(projective_log_jacobian(&inverse, x.coords()))
}
