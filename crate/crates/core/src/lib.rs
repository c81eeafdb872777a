//! Open Dicke model with a dispersively coupled transport qubit.

pub mod chaos;
pub mod cli;
pub mod criticality;
pub mod dicke;
pub mod eigen;
pub mod error;
pub mod open_system;
pub mod operators;
pub mod sparse;
pub mod transport;

pub use error::{Error, Result};

/// Complex scalar used throughout; identical to `faer::c64`.
pub type C64 = num_complex::Complex64;
