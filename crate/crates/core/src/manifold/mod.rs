//! Sign patterns, feasibility residuals and constructive feasible points.

mod pattern;
mod reduce;
mod residual;
mod rounding;

pub use pattern::{negative_part, ColumnSign, SignPattern};
pub use reduce::{nearest_sign_stiefel_upper, sign_reduce, SignReduction};
pub use residual::{frobenius_residual, residual, ResidualValue};
pub use rounding::{nearest_nonneg_stiefel_upper, rounding_matrix};

pub(crate) use residual::check_exponents;
