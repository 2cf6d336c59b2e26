//! Numerical laboratory for the eigenvalue fluctuations of the Gaussian
//! unitary ensemble.
//!
//! The crate is organised bottom-up:
//!
//! * [`special_functions`]: weighted orthonormal Hermite functions, the Airy
//!   function and the Plancherel–Rotach / Airy asymptotic regimes.
//! * [`semicircle`]: semicircle CDF and quantile, the standardizations of
//!   individual bulk and edge eigenvalues, limit covariance models.
//! * [`kernel`]: the Hermite projection kernel `K_n` and quadrature engines
//!   for expected counts and counting variances.
//! * [`airy_identities`]: closed-form Airy integrals and their brute-force
//!   quadrature checks.
//! * [`sampler`]: dense and tridiagonal GUE samplers, Hermite zeros, uniform
//!   order statistics.
//! * [`fluctuation_lab`]: Monte Carlo experiments for the individual and
//!   joint eigenvalue central limit theorems.
//!
//! All eigenvalue indices are 1-based and ascending: `x_1 < ... < x_n`.

pub mod airy_identities;
pub mod error;
pub mod fluctuation_lab;
pub mod kernel;
pub mod linalg;
pub mod quadrature;
pub mod sampler;
pub mod semicircle;
pub mod special_functions;
pub mod stats;

pub use error::{Error, Result};
