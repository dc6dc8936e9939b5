//! Rank-2 multiplicative models for probe-level data matrices.
//!
//! A data matrix `Y` (arrays × probes) is fitted as `θ₁φ₁ᵀ + θ₂φ₂ᵀ` through
//! its two leading singular triplets, and the hypothesis that the second
//! array effect has mean zero (the matrix is one-dimensional) is tested along
//! one direction, several orthogonal directions, or the maximum over a full
//! complement basis. Numerics are generic over [`Real`]; the `*64` aliases
//! fix the scalar to `f64`.

pub mod directions;
pub mod error;
pub mod inference;
pub mod numkern;
pub mod rank2;
pub mod rng;
pub mod scalar;
pub mod screenflow;
pub mod simlab;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix64 = numkern::Matrix<f64>;
pub type DataMatrix64 = rank2::DataMatrix<f64>;
pub type Rank2Fit64 = rank2::Rank2Fit<f64>;
pub type DirectionSet64 = directions::DirectionSet<f64>;
pub type TestOutcome64 = inference::TestOutcome<f64>;
pub type SvdResult64 = numkern::SvdResult<f64>;
