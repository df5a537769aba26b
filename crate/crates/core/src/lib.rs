//! Planning toolkit for satellite quantum key distribution.
//!
//! * [`geodesy`]: great-circle distances and DBSCAN clustering of ground stations.
//! * [`orbit`]: two-body propagation, Kepler's equation, station/satellite geometry.
//! * [`linkbudget`]: log-linear distance-to-key-rate model and rate curves.
//! * [`passsim`]: overhead-pass windows and integrated key bits per pass.
//! * [`constellation`]: equatorial relay rings, Molniya relay dwell, coverage and
//!   network key rates.

pub mod constellation;
pub mod error;
pub mod exec;
pub mod geodesy;
pub mod linkbudget;
pub mod orbit;
pub mod passsim;

pub use error::{Error, Result};
pub use exec::Execution;
