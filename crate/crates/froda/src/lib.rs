//! Factorized shared/private subspace learning for open-set domain adaptation.
//!
//! The library fits a pair of low-dimensional subspaces to a labeled source
//! domain and an unlabeled target domain: a *shared* subspace that generates
//! the source samples and the target samples of known classes, and a
//! *private* subspace that generates target samples of classes never seen in
//! the source. Group-sparse coding forces each target sample to pick one of
//! the two, which turns the fitted coefficients into an open-set detector:
//! a target whose shared-to-private coefficient ratio falls below a
//! threshold is flagged unknown, everything else is classified over the
//! known classes.
//!
//! Three model variants are provided (see [`model`]): the basic factorization
//! (`froda`), a discriminative extension that co-trains a linear classifier
//! on the shared coefficients (`dfroda`), and an extension that additionally
//! models unknown *source* classes with their own private subspace
//! (`dfroda_u`).
//!
//! All numerics are generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the `*64` aliases at the crate root pick the
//! double-precision instantiation used by the CLI.

pub mod data;
pub mod error;
pub mod eval;
pub mod infer;
pub mod linalg;
pub mod model;
pub mod num;
pub mod solvers;
pub mod types;

pub use error::{FrodaError, Result};
pub use num::Real;
pub use types::{FeatureMatrix, GroupSpec, SolverConfig, Subspace};

/// Double-precision instantiations; the defaults everywhere outside generic code.
pub type FeatureMatrix64 = FeatureMatrix<f64>;
pub type Subspace64 = Subspace<f64>;

/// Single-precision instantiations.
pub type FeatureMatrix32 = FeatureMatrix<f32>;
pub type Subspace32 = Subspace<f32>;
