//! The chapters of the guide in `book/src`, compiled as doc comments so that
//! `cargo test` runs every code block in the book.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/meshes.md")]
pub mod meshes {}
#[doc = include_str!("../../../book/src/eigenbases.md")]
pub mod eigenbases {}
#[doc = include_str!("../../../book/src/spectral-operators.md")]
pub mod spectral_operators {}
#[doc = include_str!("../../../book/src/stokes.md")]
pub mod stokes {}
#[doc = include_str!("../../../book/src/time-stepping.md")]
pub mod time_stepping {}
#[doc = include_str!("../../../book/src/running.md")]
pub mod running {}
#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}
