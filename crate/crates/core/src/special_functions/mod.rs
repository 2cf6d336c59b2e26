//! Hermite functions, the Airy function and the large-`n` asymptotic
//! regimes of `h_n(√(2n) x) e^{-n x²}`.

mod airy;
mod asymptotics;
mod ddouble;
mod hermite;

pub use airy::{airy, airy_leading_oscillatory, AiryPair, AIRY_SERIES_LIMIT};
pub use asymptotics::{
    density_asymptotic, edge_log_derivative_gamma, edge_phase, edge_turning,
    edge_turning_derivative, hermite_asymptotic, DensityMode, HermiteRegime, DEFAULT_DELTA,
};
pub use hermite::{
    hermite_weighted, hermite_weighted_all, hermite_weighted_triple, HermiteFunctions,
    HermiteTable, PI_POW_MINUS_QUARTER,
};
