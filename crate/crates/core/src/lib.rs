//! Numerical laboratory for GUE characteristic-polynomial correlators,
//! Itzykson-Zuber type group integrals, rank-1 Kahler localization checks and
//! the Gram-matrix change of variables.

pub mod acceptance;
pub mod asymptotic;
pub mod calibration;
pub mod cli;
pub mod error;
pub mod exactrep;
pub mod gue;
pub mod hciz;
pub mod kahler;
pub mod linalg;
pub mod mc;
pub mod quad;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::C64;
pub use mc::MCEstimate;
pub use rng::RngStream;
