//! Rank-based dependence analysis for bivariate samples.
//!
//! Everything in this crate is a pure function of its inputs and only needs
//! `alloc`: ranks and the rank-position vector, the empirical copula and the
//! association measures derived from it, the copula-graphic estimator for
//! competing-risks data, the independence test statistics built on the
//! rank-position vector, and a serial, seeded Monte Carlo engine.
//!
//! File formats, the CLI and the multi-threaded engine live in the `rankdep`
//! crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod copula;
mod error;
pub mod mc;
pub mod ranks;
mod sample;
pub mod special;
pub mod stats;
pub mod survival;

pub use error::{Error, Result};
pub use sample::BivariateSample;
