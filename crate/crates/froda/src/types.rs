//! Core domain types shared by the solvers and model fits.

use std::ops::Range;

use nalgebra::DMatrix;

use crate::error::{FrodaError, Result};
use crate::num::Real;

/// Slack on the unit column-norm constraint of a [`Subspace`].
pub const COLUMN_NORM_SLACK: f64 = 1e-9;

/// Dense matrix of column-vector samples: `dim` rows (feature dimensions)
/// by `len` columns (samples). Entries are validated finite on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T: Real> {
    data: DMatrix<T>,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn new(data: DMatrix<T>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(FrodaError::InvalidConfig(
                "feature matrix must have at least one row and one column".into(),
            ));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(FrodaError::non_finite("feature matrix"));
        }
        Ok(FeatureMatrix { data })
    }

    /// Feature dimension (rows).
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Sample count (columns).
    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.data
    }
}

/// A bundle of basis vectors, one per column, each constrained to unit
/// Euclidean norm or less (up to [`COLUMN_NORM_SLACK`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Real> {
    basis: DMatrix<T>,
}

impl<T: Real> Subspace<T> {
    pub fn new(basis: DMatrix<T>) -> Result<Self> {
        if basis.ncols() > basis.nrows() {
            return Err(FrodaError::InvalidConfig(format!(
                "subspace dimension {} exceeds ambient dimension {}",
                basis.ncols(),
                basis.nrows()
            )));
        }
        let slack = T::cast(1.0 + COLUMN_NORM_SLACK);
        for j in 0..basis.ncols() {
            let norm = basis.column(j).norm();
            if !norm.is_finite() {
                return Err(FrodaError::non_finite("subspace basis"));
            }
            if norm > slack {
                return Err(FrodaError::InvalidConfig(format!(
                    "subspace column {j} has norm {norm} > 1"
                )));
            }
        }
        Ok(Subspace { basis })
    }

    /// Ambient dimension (rows).
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Subspace dimension (columns).
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn into_basis(self) -> DMatrix<T> {
        self.basis
    }

    /// Largest deviation of `B^T B` from the identity; 0 for an exactly
    /// orthonormal basis.
    pub fn orthonormality_defect(&self) -> T {
        let gram = self.basis.transpose() * &self.basis;
        let mut defect = T::zero();
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j { T::one() } else { T::zero() };
                defect = defect.max((gram[(i, j)] - target).abs());
            }
        }
        defect
    }
}

/// Ordered partition of coefficient rows into disjoint contiguous blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    groups: Vec<Range<usize>>,
}

impl GroupSpec {
    /// Validates that the ranges are non-empty, contiguous in order, and
    /// cover `0..rows` exactly.
    pub fn new(groups: Vec<Range<usize>>, rows: usize) -> Result<Self> {
        let mut cursor = 0usize;
        for g in &groups {
            if g.start != cursor || g.end <= g.start {
                return Err(FrodaError::InvalidConfig(format!(
                    "group {}..{} breaks the contiguous cover at row {}",
                    g.start, g.end, cursor
                )));
            }
            cursor = g.end;
        }
        if cursor != rows {
            return Err(FrodaError::InvalidConfig(format!(
                "groups cover {cursor} rows, expected {rows}"
            )));
        }
        Ok(GroupSpec { groups })
    }

    /// The shared/private split used throughout: rows `0..d` and `d..2d`.
    pub fn shared_private(d: usize) -> Self {
        GroupSpec {
            groups: vec![0..d, d..2 * d],
        }
    }

    /// A single group covering all rows.
    pub fn single(rows: usize) -> Self {
        GroupSpec {
            groups: vec![0..rows],
        }
    }

    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    pub fn rows(&self) -> usize {
        self.groups.last().map(|g| g.end).unwrap_or(0)
    }
}

/// Tolerances and iteration caps for the inner solvers.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverConfig<T: Real> {
    /// Relative objective-change stopping threshold.
    pub tol: T,
    /// Iteration cap.
    pub max_iter: usize,
    /// Ridge added to least-squares Gram matrices.
    pub ridge: T,
    /// KKT tolerance for the dictionary dual solve.
    pub dual_tol: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            tol: T::cast(1e-8),
            max_iter: 500,
            ridge: T::zero(),
            dual_tol: T::cast(1e-9),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) {
            return Err(FrodaError::InvalidConfig("solver tol must be > 0".into()));
        }
        if !(self.dual_tol > T::zero()) {
            return Err(FrodaError::InvalidConfig(
                "solver dual_tol must be > 0".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(FrodaError::InvalidConfig(
                "solver max_iter must be >= 1".into(),
            ));
        }
        if self.ridge < T::zero() {
            return Err(FrodaError::InvalidConfig(
                "solver ridge must be >= 0".into(),
            ));
        }
        Ok(())
    }
}
