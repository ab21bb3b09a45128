//! Complex linear algebra, special functions and seeded sampling.

pub mod eigen;
pub mod matrix;
pub mod reference;
pub mod rng;
pub mod special;
pub mod stats;
pub mod svd;

pub use eigen::{hermitian_eigen, HermitianEigen};
pub use matrix::ComplexMatrix;
pub use rng::{sample_complex_gaussian, SeededRng};
pub use special::erf;
pub use stats::ks_statistic;
pub use svd::{thin_svd, SvdResult};
