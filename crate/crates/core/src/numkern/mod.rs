//! Dense linear algebra and special-function kernels.

pub mod eigen;
pub mod matrix;
pub mod special;
pub mod svd;

pub use eigen::{jacobi_eigh, SymEigen};
pub use matrix::{dot, mean, norm_sq, Matrix};
pub use special::{chisq_sf, erfc, normal_cdf, normal_sf};
pub use svd::{svd_thin, SvdResult};
