//! Two-mode squeezing in the ground state of the Dicke model.
//!
//! The core is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`.

pub mod analytic;
pub mod bogoliubov;
pub mod crosscheck;
pub mod ed;
pub mod error;
pub mod linalg;
pub mod meanfield;
pub mod model;
pub mod report;
pub mod scalar;
pub mod selfcheck;
pub mod squeezing;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Params = model::ModelParams<f64>;
pub type Coefficients = model::FluctuationCoefficients<f64>;
pub type MeanField = meanfield::MeanField<f64>;
pub type Modes = bogoliubov::BogoliubovModes<f64>;
pub type Covariance = bogoliubov::CovarianceMatrix<f64>;
pub type Squeezing = squeezing::SqueezingReport<f64>;
pub type Decomposition = analytic::AnalyticDecomposition<f64>;
pub type EdResult = ed::EdResult<f64>;
