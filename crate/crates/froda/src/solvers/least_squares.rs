//! Ridge least squares via the normal equations.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{FrodaError, Result};
use crate::linalg::psd_condition;
use crate::num::Real;

/// Gram condition number beyond which the automatic ridge floor engages.
const CONDITION_LIMIT: f64 = 1e12;
/// Ridge applied when the floor engages.
const RIDGE_FLOOR: f64 = 1e-8;

/// `argmin_S ||X - V S||_F^2 + ridge ||S||_F^2` through
/// `(V^T V + ridge I) S = V^T X`.
///
/// A singular system with `ridge = 0` is an error; callers that cannot
/// guarantee full rank should use [`ridge_least_squares_floored`].
pub fn ridge_least_squares<T: Real>(
    v: &DMatrix<T>,
    x: &DMatrix<T>,
    ridge: T,
) -> Result<DMatrix<T>> {
    if v.nrows() != x.nrows() {
        return Err(FrodaError::DimensionMismatch {
            context: "least squares row counts",
            expected: v.nrows(),
            got: x.nrows(),
        });
    }
    if ridge < T::zero() {
        return Err(FrodaError::InvalidConfig("ridge must be >= 0".into()));
    }
    let gram = gram_plus_ridge(v, ridge);
    let chol = Cholesky::new(gram).ok_or(FrodaError::SingularSystem)?;
    Ok(solve_normal(&chol, v, x))
}

/// Outcome of a floored solve; `floored` records that the Gram matrix was
/// ill-conditioned and the ridge floor was applied on top of `ridge`.
pub struct FlooredSolve<T: Real> {
    pub solution: DMatrix<T>,
    pub floored: bool,
}

/// Like [`ridge_least_squares`], but when the Gram condition number exceeds
/// 1e12 (or the factorization fails outright) the ridge is raised to at
/// least 1e-8 instead of erroring.
pub fn ridge_least_squares_floored<T: Real>(
    v: &DMatrix<T>,
    x: &DMatrix<T>,
    ridge: T,
) -> Result<FlooredSolve<T>> {
    if v.nrows() != x.nrows() {
        return Err(FrodaError::DimensionMismatch {
            context: "least squares row counts",
            expected: v.nrows(),
            got: x.nrows(),
        });
    }
    let gram = gram_plus_ridge(v, ridge);
    let ill = match psd_condition(&gram) {
        Some(cond) => cond > T::cast(CONDITION_LIMIT),
        None => true,
    };
    if !ill {
        if let Some(chol) = Cholesky::new(gram.clone()) {
            return Ok(FlooredSolve {
                solution: solve_normal(&chol, v, x),
                floored: false,
            });
        }
    }
    let floored_ridge = ridge.max(T::cast(RIDGE_FLOOR));
    let gram = gram_plus_ridge(v, floored_ridge);
    let chol = Cholesky::new(gram).ok_or(FrodaError::SingularSystem)?;
    Ok(FlooredSolve {
        solution: solve_normal(&chol, v, x),
        floored: true,
    })
}

fn gram_plus_ridge<T: Real>(v: &DMatrix<T>, ridge: T) -> DMatrix<T> {
    let mut gram = v.transpose() * v;
    if ridge > T::zero() {
        for i in 0..gram.nrows() {
            gram[(i, i)] += ridge;
        }
    }
    gram
}

fn solve_normal<T: Real>(chol: &Cholesky<T, Dyn>, v: &DMatrix<T>, x: &DMatrix<T>) -> DMatrix<T> {
    let rhs = v.transpose() * x;
    chol.solve(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn orthonormal_design_gives_projection() {
        let v = dmatrix![1.0, 0.0; 0.0, 1.0; 0.0, 0.0];
        let x = random(3, 4, 1);
        let s = ridge_least_squares(&v, &x, 0.0).unwrap();
        assert_relative_eq!(s, v.transpose() * &x, epsilon = 1e-12);
    }

    #[test]
    fn exact_system_is_recovered() {
        let v = random(10, 4, 2);
        let s_true = random(4, 6, 3);
        let x = &v * &s_true;
        let s = ridge_least_squares(&v, &x, 0.0).unwrap();
        assert_relative_eq!(s, s_true, epsilon = 1e-10);
    }

    #[test]
    fn normal_equation_residual_is_tiny() {
        let v = random(10, 4, 4);
        let x = random(10, 6, 5);
        let ridge = 1e-8;
        let s = ridge_least_squares(&v, &x, ridge).unwrap();
        let gram = v.transpose() * &v + DMatrix::identity(4, 4) * ridge;
        let residual = gram * &s - v.transpose() * &x;
        assert!(residual.norm() < 1e-9, "residual {}", residual.norm());
    }

    #[test]
    fn singular_without_ridge_errors() {
        // Two identical columns make the Gram singular.
        let base = random(6, 1, 7);
        let v = crate::linalg::hcat(&[&base, &base]);
        assert!(matches!(
            ridge_least_squares(&v, &random(6, 2, 8), 0.0),
            Err(FrodaError::SingularSystem)
        ));
        let floored = ridge_least_squares_floored(&v, &random(6, 2, 8), 0.0).unwrap();
        assert!(floored.floored);
    }

    #[test]
    fn residual_orthogonal_to_design() {
        let v = random(12, 5, 9);
        let x = random(12, 3, 10);
        let s = ridge_least_squares(&v, &x, 0.0).unwrap();
        let residual = &x - &v * &s;
        let inner = v.transpose() * residual;
        assert!(inner.amax() < 1e-8);
    }
}
