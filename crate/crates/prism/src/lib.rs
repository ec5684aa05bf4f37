//! Spectrum-adaptive, sketch-accelerated polynomial iterations for dense
//! matrix functions: sign, square roots, inverse p-th roots, polar
//! decomposition, and inverse.
//!
//! The solvers in [`iterations`] run classical multiplication-only updates
//! whose free top coefficient can be refit every iteration to the spectrum of
//! the current residual, either from exact power traces or from cheap
//! sketched ones ([`sketch`]). The fitting machinery lives in [`polyfit`],
//! the dense kernels and eigendecomposition oracles in [`matcore`], seeded
//! test ensembles in [`genmat`], and the experiment runner behind the
//! `prism-bench` binary in [`bench`].

pub mod bench;
pub mod error;
pub mod genmat;
pub mod iterations;
pub mod matcore;
pub mod polyfit;
mod prng;
pub mod sketch;

pub use error::{Error, Result};
pub use prng::PRNG_VERSION;
