//! Polynomial arithmetic, elimination, and real-root isolation.

mod bivariate;
mod resultant;
mod roots;
mod univariate;

pub use bivariate::BivariatePoly;
pub use resultant::{determinant, resultant_at, resultant_eliminate_y, sylvester_matrix};
pub use roots::{real_roots, Root, RootSet, DEDUP_TOL};
pub use univariate::UnivariatePoly;

use thiserror::Error;

/// Default relative threshold for [`BivariatePoly::trim`].
pub const TRIM_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("resultant vanishes identically: the polynomials share a common component")]
    CommonComponent,
    #[error("root refinement did not converge on bracket [{lo}, {hi}]")]
    ConvergenceFailure { lo: f64, hi: f64 },
    #[error("non-finite value during polynomial evaluation")]
    NonFinite,
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}
