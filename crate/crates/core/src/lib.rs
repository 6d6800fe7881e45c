//! Information-spectrum toolkit for general sources and channels.
//!
//! Models live in [`models`]; [`spectra`] computes entropy and information
//! spectra exactly or by seeded Monte Carlo; [`coding`] evaluates the
//! Feinstein-type achievability bound, the Verdú–Han-type converse bound and
//! the random-coding threshold decoder; [`analysis`] checks transmissibility,
//! domination and separation conditions on finite block-length grids.
//!
//! All logarithms are natural; densities are in nats per symbol.

pub mod analysis;
pub mod block;
pub mod coding;
pub mod dist;
pub mod error;
pub mod models;
pub mod rng;
pub mod spectra;

pub use dist::{FiniteDistribution, Kernel};
pub use error::{Error, Result};
