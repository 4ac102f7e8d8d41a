//! Norm-constrained dictionary update through the Lagrange dual.
//!
//! Solves `min_U ||A - U C||_F^2  s.t.  ||U_j||_2 <= 1 for every column j`.
//! The dual over the per-column multipliers `lambda_j >= 0`,
//!
//! `D(lambda) = ||A||^2 - tr(P K^-1 P^T) - sum lambda`,
//! `K = C C^T + diag(lambda)`, `P = A C^T`,
//!
//! is concave and maximized by a damped (backtracking) Newton iteration;
//! the primal recovers as `U = P K^-1`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{FrodaError, Result};
use crate::linalg::{fro2, psd_condition};
use crate::num::Real;
use crate::types::SolverConfig;

/// Multipliers below this are treated as inactive constraints.
const ACTIVE_EPS: f64 = 1e-8;
/// Gram condition number beyond which a diagonal floor enters the dual solve.
const CONDITION_LIMIT: f64 = 1e12;
const RIDGE_FLOOR: f64 = 1e-8;
const MAX_NEWTON_ITER: usize = 200;
const MAX_BACKTRACK: usize = 60;

/// Dual-solve output with KKT diagnostics.
#[derive(Debug, Clone)]
pub struct DictionaryFit<T: Real> {
    /// The updated basis, feasible (every column norm <= 1) by construction.
    pub basis: DMatrix<T>,
    /// Optimal dual multipliers, one per column.
    pub dual: DVector<T>,
    /// Largest complementary-slackness violation at exit, in squared-norm
    /// units: `| ||U_j||^2 - 1 |` over active columns and
    /// `max(||U_j||^2 - 1, 0)` over inactive ones.
    pub kkt_residual: T,
    pub newton_iterations: usize,
    /// `||A - U C||_F^2` at the returned basis.
    pub objective: T,
    /// The feasible warm start beat the dual solution and was kept.
    pub used_warm_start: bool,
    /// The Gram matrix needed the diagonal floor at least once.
    pub ridge_floored: bool,
}

struct DualState<T: Real> {
    chol: Cholesky<T, Dyn>,
    basis: DMatrix<T>,
    value: T,
    floored: bool,
}

fn dual_state<T: Real>(
    gram: &DMatrix<T>,
    p: &DMatrix<T>,
    a_norm2: T,
    lambda: &DVector<T>,
) -> Result<DualState<T>> {
    let k = gram.nrows();
    let mut kmat = gram.clone();
    for i in 0..k {
        kmat[(i, i)] += lambda[i];
    }
    let ill = match psd_condition(&kmat) {
        Some(cond) => cond > T::cast(CONDITION_LIMIT),
        None => true,
    };
    let mut floored = false;
    if ill {
        for i in 0..k {
            kmat[(i, i)] += T::cast(RIDGE_FLOOR);
        }
        floored = true;
    }
    let chol = match Cholesky::new(kmat.clone()) {
        Some(c) => c,
        None => {
            // Escalate once; Gram matrices this degenerate only appear with
            // essentially zero coefficients.
            for i in 0..k {
                kmat[(i, i)] += T::cast(1e-4);
            }
            floored = true;
            Cholesky::new(kmat).ok_or(FrodaError::SingularSystem)?
        }
    };
    let basis_t = chol.solve(&p.transpose());
    let basis = basis_t.transpose();
    let mut value = a_norm2;
    value -= basis
        .iter()
        .zip(p.iter())
        .fold(T::zero(), |acc, (&u, &q)| acc + u * q);
    value -= lambda.sum();
    Ok(DualState {
        chol,
        basis,
        value,
        floored,
    })
}

fn kkt_residual<T: Real>(lambda: &DVector<T>, norms2: &DVector<T>) -> T {
    let active_eps = T::cast(ACTIVE_EPS);
    let mut worst = T::zero();
    for j in 0..lambda.len() {
        let g = norms2[j] - T::one();
        let violation = if lambda[j] >= active_eps {
            g.abs()
        } else {
            g.max(T::zero())
        };
        worst = worst.max(violation);
    }
    worst
}

/// Updates a dictionary against fixed coefficients. `coeffs` has one row per
/// dictionary column and one column per sample of `a`.
pub fn dictionary_update<T: Real>(
    a: &DMatrix<T>,
    coeffs: &DMatrix<T>,
    cfg: &SolverConfig<T>,
    warm_start: Option<&DMatrix<T>>,
) -> Result<DictionaryFit<T>> {
    cfg.validate()?;
    if a.ncols() != coeffs.ncols() {
        return Err(FrodaError::DimensionMismatch {
            context: "dictionary update sample counts",
            expected: a.ncols(),
            got: coeffs.ncols(),
        });
    }
    if !a.iter().all(|v| v.is_finite()) || !coeffs.iter().all(|v| v.is_finite()) {
        return Err(FrodaError::non_finite("dictionary update inputs"));
    }

    let k = coeffs.nrows();
    let gram = coeffs * coeffs.transpose();
    let p = a * coeffs.transpose();
    let a_norm2 = fro2(a);

    let mut lambda = DVector::<T>::zeros(k);
    let mut state = dual_state(&gram, &p, a_norm2, &lambda)?;
    let mut floored = state.floored;
    let mut newton_iterations = 0;
    let mut residual;

    loop {
        let norms2 = DVector::from_fn(k, |j, _| state.basis.column(j).norm_squared());
        residual = kkt_residual(&lambda, &norms2);
        if residual <= cfg.dual_tol || newton_iterations >= MAX_NEWTON_ITER {
            break;
        }
        newton_iterations += 1;

        let gradient = DVector::from_fn(k, |j, _| norms2[j] - T::one());
        // Negated dual Hessian: 2 (U^T U) .* K^-1, positive semi-definite.
        let kinv = state.chol.inverse();
        let basis_gram = state.basis.transpose() * &state.basis;
        let mut hess = DMatrix::<T>::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                hess[(i, j)] = T::cast(2.0) * basis_gram[(i, j)] * kinv[(i, j)];
            }
        }
        let jitter = T::cast(1e-12) * (T::one() + hess.diagonal().amax());
        for i in 0..k {
            hess[(i, i)] += jitter;
        }
        let direction = match Cholesky::new(hess) {
            Some(c) => c.solve(&gradient),
            None => gradient.clone(),
        };

        // Backtracking on the (concave) dual value, clamping at zero.
        let mut step = T::one();
        let mut advanced = false;
        for _ in 0..MAX_BACKTRACK {
            let trial = DVector::from_fn(k, |j, _| (lambda[j] + step * direction[j]).max(T::zero()));
            if trial == lambda {
                step *= T::cast(0.5);
                continue;
            }
            let trial_state = dual_state(&gram, &p, a_norm2, &trial)?;
            if trial_state.value > state.value {
                floored |= trial_state.floored;
                lambda = trial;
                state = trial_state;
                advanced = true;
                break;
            }
            step *= T::cast(0.5);
        }
        if !advanced {
            break;
        }
    }

    // Hard feasibility: rescale any column the tolerance left above 1.
    let mut basis = state.basis;
    for j in 0..basis.ncols() {
        let norm = basis.column(j).norm();
        if norm > T::one() {
            let mut col = basis.column_mut(j);
            col /= norm;
        }
    }

    let mut objective = fro2(&(a - &basis * coeffs));
    let mut used_warm_start = false;
    if let Some(w) = warm_start {
        if w.nrows() == basis.nrows() && w.ncols() == basis.ncols() {
            let feasible = (0..w.ncols()).all(|j| w.column(j).norm() <= T::one() + T::cast(1e-9));
            if feasible {
                let warm_objective = fro2(&(a - w * coeffs));
                if warm_objective < objective {
                    basis = w.clone();
                    objective = warm_objective;
                    used_warm_start = true;
                }
            }
        }
    }

    Ok(DictionaryFit {
        basis,
        dual: lambda,
        kkt_residual: residual,
        newton_iterations,
        objective,
        used_warm_start,
        ridge_floored: floored,
    })
}
