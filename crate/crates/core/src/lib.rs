//! Soft-edge gap-probability generating functions of Gaussian and Laguerre
//! random-matrix ensembles: limit laws, exact finite-n values for beta = 2,
//! asymptotic correction terms with rational polynomial coefficients, and
//! Monte Carlo cross-checks.

pub mod airy;
pub mod ensemble;
pub mod error;
pub mod expansion;
pub mod finiten;
pub mod fredholm;
pub mod jet;
pub mod mc;
pub mod painleve;
pub mod quadrature;
pub mod symbolic;
pub mod tridiag;
pub mod validation;
pub mod wave;

pub use ensemble::{n_prime, scaling, Beta, EffectiveIndex, EnsembleSpec, Family, ScalingParams};
pub use error::{Error, Result};
