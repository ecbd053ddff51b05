//! Levitated-sphere optomechanical search for two-axion exchange forces:
//! cavity transmission spectra, sphere-plate force gradients, detection
//! thresholds and exclusion curves for the axion-nucleon coupling.

pub mod acceptance;
pub mod axion;
pub mod commands;
pub mod config;
pub mod constraint;
pub mod error;
pub mod io;
pub mod metrology;
pub mod optomech;
pub mod units;

pub use error::{Error, Result};
pub use units::{ConstantsMode, PhysConstants};
