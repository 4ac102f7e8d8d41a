//! Small dense linear-algebra helpers shared by the solvers.

use nalgebra::{DMatrix, DVector};

use crate::error::{FrodaError, Result};
use crate::num::Real;

/// Singular value decomposition with a deterministic presentation:
/// singular values sorted descending (ties broken by original position)
/// and each left singular vector sign-normalized so its largest-magnitude
/// entry is non-negative. Right vectors are flipped in lockstep so
/// `u * diag(s) * v_t` still reconstructs the input.
pub struct SortedSvd<T: Real> {
    pub u: DMatrix<T>,
    pub singular_values: DVector<T>,
    pub v_t: DMatrix<T>,
}

pub fn sorted_svd<T: Real>(m: &DMatrix<T>) -> SortedSvd<T> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let s = svd.singular_values;

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| {
        s[b].partial_cmp(&s[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let k = s.len();
    let mut u_sorted = DMatrix::zeros(u.nrows(), k);
    let mut vt_sorted = DMatrix::zeros(k, v_t.ncols());
    let mut s_sorted = DVector::zeros(k);
    for (dst, &src) in order.iter().enumerate() {
        let flip = sign_flip(&u.column(src).into_owned());
        u_sorted.set_column(dst, &(u.column(src) * flip));
        vt_sorted.set_row(dst, &(v_t.row(src) * flip));
        s_sorted[dst] = s[src];
    }
    SortedSvd {
        u: u_sorted,
        singular_values: s_sorted,
        v_t: vt_sorted,
    }
}

/// -1 if the largest-magnitude entry of `v` is negative, else +1.
/// Ties resolve to the first index in column order.
fn sign_flip<T: Real>(v: &DVector<T>) -> T {
    let mut best = 0usize;
    let mut best_abs = T::zero();
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if v[best] < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

/// Applies the sign convention of [`sorted_svd`] to the columns of a matrix.
pub fn sign_normalize_columns<T: Real>(m: &mut DMatrix<T>) {
    for j in 0..m.ncols() {
        let flip = sign_flip(&m.column(j).into_owned());
        if flip < T::zero() {
            let mut col = m.column_mut(j);
            col.neg_mut();
        }
    }
}

/// Numerical rank: number of singular values above
/// `max(nrows, ncols) * eps * sigma_max`.
pub fn numerical_rank<T: Real>(singular_values: &DVector<T>, nrows: usize, ncols: usize) -> usize {
    let smax = singular_values.iter().cloned().fold(T::zero(), T::max);
    if smax == T::zero() {
        return 0;
    }
    let tol = T::from_count(nrows.max(ncols)) * T::default_epsilon() * smax;
    singular_values.iter().filter(|&&s| s > tol).count()
}

/// Principal angles (radians, ascending) between the column spans of two
/// orthonormal bases of equal ambient dimension.
pub fn principal_angles<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<Vec<T>> {
    if a.nrows() != b.nrows() {
        return Err(FrodaError::DimensionMismatch {
            context: "principal angles: ambient dimensions",
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    let overlap = a.transpose() * b;
    let svd = overlap.svd(false, false);
    let mut cosines: Vec<T> = svd.singular_values.iter().cloned().collect();
    cosines.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(cosines
        .into_iter()
        .map(|c| c.min(T::one()).max(-T::one()).acos())
        .collect())
}

/// Horizontal concatenation `[blocks[0], blocks[1], ...]`.
pub fn hcat<T: Real>(blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    assert!(!blocks.is_empty());
    let rows = blocks[0].nrows();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hcat: row mismatch");
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Vertical concatenation.
pub fn vcat<T: Real>(blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    assert!(!blocks.is_empty());
    let cols = blocks[0].ncols();
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vcat: column mismatch");
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(*b);
        at += b.nrows();
    }
    out
}

/// Largest eigenvalue of a symmetric positive semi-definite matrix.
pub fn psd_max_eigenvalue<T: Real>(m: &DMatrix<T>) -> T {
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .cloned()
        .fold(T::zero(), T::max)
        .max(T::zero())
}

/// 2-norm condition number of a symmetric PSD matrix; `None` when singular
/// to machine precision.
pub fn psd_condition<T: Real>(m: &DMatrix<T>) -> Option<T> {
    let eig = m.clone().symmetric_eigen();
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for &e in eig.eigenvalues.iter() {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    if lo <= T::zero() || hi == T::zero() {
        None
    } else {
        Some(hi / lo)
    }
}

/// Frobenius norm squared.
pub fn fro2<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc + x * x)
}
