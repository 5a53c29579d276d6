//! Commands behind the `isoest` binary: closed-form validation, phase
//! damping curves, two-parameter sweeps of the core entangling family, and
//! single-point estimation.

pub mod common;
pub mod config;
pub mod curve;
pub mod error;
pub mod estimate;
pub mod sweep;
pub mod validate;

pub use common::Common;
pub use config::Settings;
pub use error::CliError;
