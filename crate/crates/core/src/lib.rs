//! Exact time evolution of two coupled, lossy bosonic modes in a thermal
//! reservoir, with an independent brute-force integrator for cross-checks.

pub mod cli;
pub mod config;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod observables;
pub mod oracle;
pub mod render;
pub mod sampling;
pub mod solver;
pub mod superop;
pub mod verify;

pub use config::{Method, SimConfig};
pub use error::{Error, Result};
pub use fock::{DensityMatrix, Mode, TwoModeSpace};
