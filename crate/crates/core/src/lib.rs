pub mod analytic;
pub mod beamform;
pub mod channel;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod rate;

pub use error::{Error, Result};
pub use num_complex::Complex64;
