//! File formats, a multi-threaded Monte Carlo engine and the `rankdep`
//! command line, on top of `rankdep-core`.

pub mod cli;
pub mod engine;
pub mod io;

pub use engine::Engine;
