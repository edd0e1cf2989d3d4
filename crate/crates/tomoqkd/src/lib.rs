//! Tomographic qunit quantum key distribution: protocol simulation and
//! security analysis.

pub mod attack;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod mub;
pub mod report;
pub mod security;
pub mod sim;
pub mod tomography;

pub use error::{Error, Result};
