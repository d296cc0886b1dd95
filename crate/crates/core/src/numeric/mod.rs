//! Exact, floating and wide floating numeric primitives: simplex points, exact `3x3` integer
//! matrices and monic cubics.

mod cubic;
mod matrix;
mod point;
mod scalar;
mod wide;

pub use cubic::MonicCubic;
pub use matrix::{cocycle_product, mat3_mul, mat3_transpose, IntMatrix3, Mat3, MAT3_IDENTITY};
pub use point::{normalize, rational_to_decimal, ExactPoint, FloatPoint, SimplexPoint};
pub use scalar::{ln_bigint, ln_ratio, ratio_to_f64, Field, Scalar, FLOAT_SUM_TOLERANCE};
pub use wide::{WideFloat, WidePoint, WIDE_PRECISION};
