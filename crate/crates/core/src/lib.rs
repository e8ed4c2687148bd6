// `!(x > 0)` style checks are there to reject NaN; dense kernels index by loop variable.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod error;
pub mod io;
pub mod linalg;
pub mod manifold;
pub mod oracle;
pub mod penalty;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, SvdResult};
pub use scalar::Scalar;

pub type Matrix = DenseMatrix<f64>;
pub type Matrix32 = DenseMatrix<f32>;
