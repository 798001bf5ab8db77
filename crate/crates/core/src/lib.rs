//! Bayesian MMSE fusion over a two-hop amplify-and-forward sensor network,
//! with joint sensor/relay power allocation by successive convex
//! approximation and a Monte Carlo harness for budget sweeps.

pub mod bayes;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod relay;
pub mod sca;
pub mod strategy;
pub mod validation;

pub use error::{Error, Result};
