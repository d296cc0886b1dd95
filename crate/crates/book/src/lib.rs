//! The guide in `book/`, compiled so that every listing runs under `cargo test`.
//! One module per chapter keeps failures traceable to their page.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/numerics.md")]
pub mod numerics {}
#[doc = include_str!("../../../book/src/algorithms.md")]
pub mod algorithms {}
#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}
#[doc = include_str!("../../../book/src/lyapunov.md")]
pub mod lyapunov {}
#[doc = include_str!("../../../book/src/acceleration.md")]
pub mod acceleration {}
#[doc = include_str!("../../../book/src/measures.md")]
pub mod measures {}
#[doc = include_str!("../../../book/src/positivity.md")]
pub mod positivity {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
