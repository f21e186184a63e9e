//! Adaptive sample sharing for ridge regression.
//!
//! Given a target regression task and a stream of auxiliary source samples,
//! this library estimates how much pooling the first n source samples into
//! the target ridge fit would reduce the predictive error, and selects the
//! prefix length with the best conservative estimate — abstaining entirely
//! when no prefix certifies an improvement. Rank-one inverse updates keep
//! the whole sweep at O(d^2) per sample on top of the one-time target fit.
//!
//! Modules:
//! - [`linalg`]: small dense kernel (Gram, SPD inverse, rank-one updates).
//! - [`model`]: datasets, ground truth, and the synthetic generator.
//! - [`estimators`]: ridge closed forms and exact conditional risks.
//! - [`gain`]: the plug-in gain estimator, its moments, and the
//!   concentration lower bound.
//! - [`selector`]: the one-pass streaming selector.
//! - [`baselines`]: data-enriched and spectral fine-tuning comparisons.
//! - [`theory`]: large-source asymptotics and sensitivities.

pub mod baselines;
pub mod error;
pub mod estimators;
pub mod gain;
pub mod linalg;
pub mod model;
pub mod selector;
pub mod theory;

pub use error::{CoreError, Result};
pub use linalg::{Matrix, Vector};
