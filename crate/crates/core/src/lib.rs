//! Gaussian sideband state of a triply resonant optical parametric oscillator
//! operated above threshold.
//!
//! The crate builds the linearised crystal gain for the six sideband modes at
//! `±Ω` around pump, signal and idler, embeds it in a two-mirror cavity,
//! optionally couples a thermal phonon bath, and returns the output
//! quadrature covariance in both the frequency basis and the
//! symmetric/antisymmetric (S/A) sideband basis.
//!
//! ```
//! use opo_sideband::{config::OpoConfig, pipeline::solve};
//!
//! let sol = solve(&OpoConfig::reference()).unwrap();
//! assert_eq!(sol.covariance.dim(), 12);
//! assert!(sol.report.is_physical());
//! ```

pub mod cavity;
pub mod cli;
pub mod config;
pub mod covariance;
pub mod error;
pub mod export;
pub mod layout;
pub mod numerics;
pub mod oracle;
pub mod phonon;
pub mod pipeline;
pub mod sideband;
pub mod steady_state;
pub mod validate;

pub use config::OpoConfig;
pub use covariance::{CovarianceMatrix, PhysicalityReport, SABlocks};
pub use error::{Error, Result};
pub use pipeline::{solve, sweep, Solution};
