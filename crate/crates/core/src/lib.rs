//! Lattice geometry, trigonometric test functions and Fourier-multiplier
//! summability diagnostics on the torus `T^d`.

pub mod certify;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod multiplier;
pub mod report;
pub mod trigpoly;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/trigpoly.md")]
    mod trigpoly {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/multiplier.md")]
    mod multiplier {}
    #[doc = include_str!("../../../book/src/certify.md")]
    mod certify {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/claims.md")]
    mod claims {}
}
