//! Reusable numerical primitives: PCA, orthogonal complements, principal
//! angles, the group-lasso proximal solver, the norm-constrained dictionary
//! solver, and ridge least squares.

mod dictionary;
mod group_lasso;
mod least_squares;
mod pca;
mod sdm;

pub use dictionary::{dictionary_update, DictionaryFit};
pub use group_lasso::{block_soft_threshold, group_lasso_solve, LassoFit};
pub use least_squares::{ridge_least_squares, ridge_least_squares_floored, FlooredSolve};
pub use pca::{joint_pca_reduce, pca_basis, truncated_null_space, Pca, PcaSpec, Projection};
pub use sdm::subspace_disagreement_dim;
