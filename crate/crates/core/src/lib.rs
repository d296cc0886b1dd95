pub mod algorithms;
pub mod cli;
pub mod cocycle;
pub mod error;
pub mod galois;
pub mod lyapunov;
pub mod measures;
pub mod numeric;
pub mod sampling;
