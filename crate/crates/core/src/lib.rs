//! Numerical workbench for a family of related statistical and quantum models.
//!
//! * [`data_model`]: datasets, centering, empirical moments and least squares.
//! * [`pls_sample`]: the empirical partial least squares recursion, prediction
//!   and cross-validated choice of the number of components.
//! * [`pls_population`]: the same recursion on exact second moments, together
//!   with the relevant-eigencomponent and Krylov-dimension characterizations of
//!   where it stops.
//! * [`envelope`]: envelope parameterizations of the predictor covariance.
//! * [`confidence`]: confidence curves and fiducial distributions.
//! * [`causal`]: conditioning versus intervention on discrete three-block models.
//! * [`quantum_conceptual`]: conceptual variables as operators, projector
//!   families, density operators and Born probabilities.
//!
//! All randomness is driven by explicit seeds; see [`rng`].

pub mod causal;
pub mod confidence;
pub mod data_model;
pub mod envelope;
mod error;
pub mod linalg;
pub mod pls_population;
pub mod pls_sample;
pub mod quantum_conceptual;
pub mod rng;

pub use error::{Error, Result};
