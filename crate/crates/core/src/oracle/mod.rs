//! Exact references at desk scale: projection onto the nonnegative Stiefel
//! manifold by support enumeration, the nonnegative unit sphere, and the
//! nearest permutation matrix.

mod assignment;
mod enumerate;
mod sphere;

pub use assignment::{
    assignment_objective, nearest_permutation, nearest_permutation_exhaustive, permutation_matrix,
    solve_assignment,
};
pub use enumerate::{exact_project_nonneg_stiefel, min_linear_nonneg_stiefel, EnumerationBudget};
pub use sphere::{dist_nonneg_sphere, project_nonneg_sphere};
