//! Dense real linear algebra: the matrix type, a Jacobi SVD and the
//! decompositions built on it.

mod decomp;
mod matrix;
mod svd;

pub use decomp::{
    orth_complement_basis, polar_factor, polar_from_svd, sigma_gap, singular_values,
    spectral_norm, RANK_TOL,
};
pub use matrix::DenseMatrix;
pub use svd::{thin_svd, SvdResult};

pub(crate) use decomp::solve_linear;
pub(crate) use matrix::{dot, norm2};
