//! Hyperspectral band selection by self-representation learning with a
//! sparse 1D-operational autoencoder.

pub mod baselines;
pub mod binio;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod hsi;
pub mod operational;
pub mod rng;
pub mod synthetic;
pub mod trainer;

pub use error::{Error, Result};
