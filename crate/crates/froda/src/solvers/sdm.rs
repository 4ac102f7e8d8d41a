//! Subspace-dimension selection via the disagreement between source,
//! target, and joint PCA bases.

use nalgebra::DMatrix;

use crate::error::{FrodaError, Result};
use crate::linalg::{hcat, numerical_rank, sorted_svd};
use crate::num::Real;
use crate::types::FeatureMatrix;

use super::pca::center_columns;

/// Absorbs floating-point noise in sines of near-right angles when testing
/// the maximal-disagreement threshold D(d) >= 1.
const DISAGREEMENT_THRESHOLD_SLACK: f64 = 1e-6;

fn centered_basis<T: Real>(x: &DMatrix<T>) -> Result<(DMatrix<T>, usize)> {
    let (centered, _) = center_columns(x);
    let svd = sorted_svd(&centered);
    let rank = numerical_rank(&svd.singular_values, centered.nrows(), centered.ncols());
    if rank == 0 {
        return Err(FrodaError::ZeroVariance);
    }
    Ok((svd.u, rank))
}

/// Sine of the d-th (largest) principal angle between the leading-`d`
/// columns of two orthonormal bases.
fn sin_last_angle<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>, d: usize) -> T {
    let overlap = a.columns(0, d).transpose() * b.columns(0, d);
    let svd = overlap.svd(false, false);
    let sigma_min = svd
        .singular_values
        .iter()
        .cloned()
        .fold(T::infinity(), T::min)
        .clamp(T::zero(), T::one());
    (T::one() - sigma_min * sigma_min).max(T::zero()).sqrt()
}

/// Picks the subspace dimension `d*` at which the source-vs-joint and
/// target-vs-joint PCA bases start to disagree maximally.
///
/// For each `d` up to `d_max`, `D(d) = (sin a_d + sin b_d) / 2`, where
/// `a_d`, `b_d` are the d-th principal angles between the truncated source
/// (resp. target) basis and the truncated joint basis; dimensions beyond the
/// attainable rank of any basis count as maximal disagreement. The result is
/// the last dimension before `D` saturates at 1, clamped to `[1, d_max]`.
pub fn subspace_disagreement_dim<T: Real>(
    xs: &FeatureMatrix<T>,
    xt: &FeatureMatrix<T>,
    d_max: usize,
) -> Result<usize> {
    if xs.dim() != xt.dim() {
        return Err(FrodaError::DimensionMismatch {
            context: "subspace disagreement feature dimensions",
            expected: xs.dim(),
            got: xt.dim(),
        });
    }
    if d_max == 0 || d_max > xs.dim() {
        return Err(FrodaError::InvalidConfig(format!(
            "d_max {d_max} outside 1..={}",
            xs.dim()
        )));
    }

    let (basis_s, rank_s) = centered_basis(xs.matrix())?;
    let (basis_t, rank_t) = centered_basis(xt.matrix())?;
    let joint = hcat(&[xs.matrix(), xt.matrix()]);
    let (basis_st, rank_st) = centered_basis(&joint)?;

    let usable = rank_s.min(rank_t).min(rank_st);
    let threshold = T::one() - T::cast(DISAGREEMENT_THRESHOLD_SLACK);
    let half = T::cast(0.5);

    for d in 1..=d_max {
        let disagreement = if d > usable {
            T::one()
        } else {
            let sin_a = sin_last_angle(&basis_s, &basis_st, d);
            let sin_b = sin_last_angle(&basis_t, &basis_st, d);
            half * (sin_a + sin_b)
        };
        if disagreement >= threshold {
            return Ok(d.saturating_sub(1).clamp(1, d_max));
        }
    }
    Ok(d_max)
}
