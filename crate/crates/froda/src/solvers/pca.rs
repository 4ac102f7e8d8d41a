//! Principal component analysis on column-sample matrices, the joint
//! source/target reduction, and orthogonal-complement bases.

use nalgebra::{DMatrix, DVector};

use crate::error::{FrodaError, Result};
use crate::linalg::{numerical_rank, sign_normalize_columns, sorted_svd};
use crate::num::Real;
use crate::types::{FeatureMatrix, Subspace};

/// How many components to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PcaSpec<T: Real> {
    /// Exactly this many leading components.
    Dim(usize),
    /// The smallest count whose cumulative explained variance reaches the
    /// fraction (in `(0, 1]`).
    VarianceFraction(T),
}

/// Mean-centered PCA result.
#[derive(Debug, Clone)]
pub struct Pca<T: Real> {
    pub basis: Subspace<T>,
    pub mean: DVector<T>,
    /// Sample variance captured by each kept component, descending.
    pub explained_variance: Vec<T>,
    /// All squared singular values of the centered data, descending.
    pub spectrum: Vec<T>,
}

/// Affine projection onto a subspace: `z = basis^T (x - mean)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T: Real> {
    pub basis: DMatrix<T>,
    pub mean: DVector<T>,
}

impl<T: Real> Projection<T> {
    /// Identity projection in `dim` ambient dimensions.
    pub fn identity(dim: usize) -> Self {
        Projection {
            basis: DMatrix::identity(dim, dim),
            mean: DVector::zeros(dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn reduced_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn project(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        if x.nrows() != self.basis.nrows() {
            return Err(FrodaError::DimensionMismatch {
                context: "projection input rows",
                expected: self.basis.nrows(),
                got: x.nrows(),
            });
        }
        let mut centered = x.clone();
        for mut col in centered.column_iter_mut() {
            col -= &self.mean;
        }
        Ok(self.basis.transpose() * centered)
    }

    /// Maps reduced coordinates back to the ambient space.
    pub fn lift(&self, z: &DMatrix<T>) -> DMatrix<T> {
        let mut out = &self.basis * z;
        for mut col in out.column_iter_mut() {
            col += &self.mean;
        }
        out
    }
}

/// Subtracts the column mean; returns the centered matrix and the mean.
pub(crate) fn center_columns<T: Real>(x: &DMatrix<T>) -> (DMatrix<T>, DVector<T>) {
    let n = T::from_count(x.ncols());
    let mut mean = DVector::zeros(x.nrows());
    for col in x.column_iter() {
        mean += col;
    }
    mean /= n;
    let mut centered = x.clone();
    for mut col in centered.column_iter_mut() {
        col -= &mean;
    }
    (centered, mean)
}

/// Orthonormal basis of the leading principal directions of the
/// mean-centered data. Columns follow the deterministic sign convention
/// (largest-magnitude entry non-negative).
pub fn pca_basis<T: Real>(x: &FeatureMatrix<T>, spec: PcaSpec<T>) -> Result<Pca<T>> {
    let (centered, mean) = center_columns(x.matrix());
    let svd = sorted_svd(&centered);
    let rank = numerical_rank(&svd.singular_values, centered.nrows(), centered.ncols());
    let spectrum: Vec<T> = svd.singular_values.iter().map(|&s| s * s).collect();
    let total: T = spectrum.iter().take(rank).fold(T::zero(), |a, &b| a + b);

    let keep = match spec {
        PcaSpec::Dim(d) => {
            if d == 0 || d > x.dim().min(x.len()) {
                return Err(FrodaError::InvalidConfig(format!(
                    "pca dimension {d} outside 1..={}",
                    x.dim().min(x.len())
                )));
            }
            if d > rank {
                return Err(FrodaError::RankDeficient {
                    requested: d,
                    attainable: rank,
                });
            }
            d
        }
        PcaSpec::VarianceFraction(f) => {
            if !(f > T::zero()) || f > T::one() {
                return Err(FrodaError::InvalidConfig(
                    "variance fraction must lie in (0, 1]".into(),
                ));
            }
            if rank == 0 || total <= T::zero() {
                return Err(FrodaError::ZeroVariance);
            }
            let target = f * total;
            let mut cum = T::zero();
            let mut keep = rank;
            for (i, &var) in spectrum.iter().take(rank).enumerate() {
                cum += var;
                if cum >= target {
                    keep = i + 1;
                    break;
                }
            }
            keep
        }
    };

    let basis = svd.u.columns(0, keep).into_owned();
    let denom = if x.len() > 1 {
        T::from_count(x.len() - 1)
    } else {
        T::one()
    };
    let explained_variance = spectrum.iter().take(keep).map(|&v| v / denom).collect();
    Ok(Pca {
        basis: Subspace::new(basis)?,
        mean,
        explained_variance,
        spectrum,
    })
}

/// PCA of the column-concatenation `[xs, xt]`, returning both inputs
/// projected onto the joint basis together with the projection itself
/// (which retains the joint mean for mapping new samples later).
pub fn joint_pca_reduce<T: Real>(
    xs: &FeatureMatrix<T>,
    xt: &FeatureMatrix<T>,
    variance_fraction: T,
) -> Result<(DMatrix<T>, DMatrix<T>, Projection<T>)> {
    if xs.dim() != xt.dim() {
        return Err(FrodaError::DimensionMismatch {
            context: "joint pca feature dimensions",
            expected: xs.dim(),
            got: xt.dim(),
        });
    }
    let joint = crate::linalg::hcat(&[xs.matrix(), xt.matrix()]);
    let joint = FeatureMatrix::new(joint)?;
    let pca = pca_basis(&joint, PcaSpec::VarianceFraction(variance_fraction))?;
    let projection = Projection {
        basis: pca.basis.basis().clone(),
        mean: pca.mean.clone(),
    };
    let xs_red = projection.project(xs.matrix())?;
    let xt_red = projection.project(xt.matrix())?;
    Ok((xs_red, xt_red, projection))
}

/// `d` orthonormal directions spanning part of the orthogonal complement of
/// `span(v)`, obtained deterministically from the eigendecomposition of the
/// complement projector `I - V V^T`.
pub fn truncated_null_space<T: Real>(v: &Subspace<T>, d: usize) -> Result<Subspace<T>> {
    let ortho_tol = T::cast(1e-6);
    if v.orthonormality_defect() > ortho_tol {
        return Err(FrodaError::InvalidConfig(
            "null space requires an orthonormal input basis".into(),
        ));
    }
    let ambient = v.ambient_dim();
    let rank = v.dim();
    let complement = ambient - rank;
    if d == 0 || d > complement {
        return Err(FrodaError::RankDeficient {
            requested: d,
            attainable: complement,
        });
    }

    let projector = DMatrix::identity(ambient, ambient) - v.basis() * v.basis().transpose();
    let eig = projector.symmetric_eigen();
    let mut order: Vec<usize> = (0..ambient).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut basis = DMatrix::zeros(ambient, d);
    for (dst, &src) in order.iter().take(d).enumerate() {
        basis.set_column(dst, &eig.eigenvectors.column(src));
    }
    sign_normalize_columns(&mut basis);
    Subspace::new(basis)
}
