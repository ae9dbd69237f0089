//! Logical qubit channels of finite-energy square-lattice GKP teleportation.
//!
//! Everything is assembled from closed-form damped matrix elements
//! ([`lattice_theta`]); [`fock_oracle`] materializes truncated Fock-space
//! operators only to cross-check them.

// `!(x <= tol)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod decoders;
pub mod error;
pub mod exec;
pub mod export;
pub mod fock_oracle;
pub mod grn_channel;
pub mod lattice_theta;
pub mod ptd_channel;
pub mod qubit_channels;

pub use error::{Error, Result};
pub use exec::Exec;

pub type C64 = num_complex::Complex64;

/// `sqrt(pi)`, the lattice spacing of the code in scaled coordinates.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// `sqrt(pi / 2)`, a logical Pauli shift in raw syndrome coordinates.
pub const SHIFT: f64 = 1.253_314_137_315_500_3;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
