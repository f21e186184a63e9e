//! Comparison methods, both expressed as matrix-weighted interpolations
//! `theta = W theta_s + (I - W) theta_t`.
//!
//! The data-enriched baseline mixes source and target least squares through
//! `W(lambda) = Gamma(lambda)^{-1} Psi(lambda)` built from the Gram matrices
//! and the validation Gram; the spectral baseline is equivalent to `k`
//! gradient steps on the target squared-error objective started at the
//! source coefficients, i.e. the filter `(I - alpha Lambda)^k` in the target
//! Gram eigenbasis. Both pick their transfer strength by validation error.

use crate::error::{CoreError, Result};
use crate::estimators::{validation_mse, TaskState};
use crate::linalg::{spd_inverse, spd_solve, sym_eigen, Matrix, Vector};
use crate::model::Dataset;

/// Data-enriched baseline inputs: a regularization grid and the validation
/// Gram matrix.
#[derive(Debug, Clone)]
pub struct EnrichedParams {
    pub lambda_grid: Vec<f64>,
    pub g_t_val: Matrix,
}

impl EnrichedParams {
    pub fn new(lambda_grid: Vec<f64>, g_t_val: Matrix) -> Result<Self> {
        if lambda_grid.is_empty() {
            return Err(CoreError::InvalidInput("empty lambda grid".into()));
        }
        if lambda_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::InvalidInput(
                "lambda grid must be strictly increasing".into(),
            ));
        }
        if lambda_grid[0] < 0.0 {
            return Err(CoreError::InvalidInput("lambda must be >= 0".into()));
        }
        Ok(Self {
            lambda_grid,
            g_t_val,
        })
    }
}

/// Spectral fine-tuning inputs: step size, step-count grid, and the
/// eigendecomposition of the target Gram.
#[derive(Debug, Clone)]
pub struct SpectralParams {
    pub alpha_step: f64,
    pub k_grid: Vec<u32>,
    pub eigenvalues: Vector,
    pub basis: Matrix,
}

impl SpectralParams {
    /// Decomposes the target Gram and derives a stable default step size
    /// `alpha = 0.5 / max(eigenvalue)` with k in {0, 1, 2, 4, ..., 1024}.
    pub fn from_target(target: &TaskState) -> Result<Self> {
        let (eigenvalues, basis) = sym_eigen(&target.gram)?;
        let max_ev = eigenvalues
            .as_slice()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if max_ev <= 0.0 {
            return Err(CoreError::InvalidInput(
                "target Gram has no positive eigenvalue".into(),
            ));
        }
        let mut k_grid = vec![0u32, 1];
        let mut k = 2u32;
        while k <= 1024 {
            k_grid.push(k);
            k *= 2;
        }
        Self::new(0.5 / max_ev, k_grid, eigenvalues, basis)
    }

    pub fn new(alpha_step: f64, k_grid: Vec<u32>, eigenvalues: Vector, basis: Matrix) -> Result<Self> {
        if alpha_step <= 0.0 {
            return Err(CoreError::InvalidInput("step size must be > 0".into()));
        }
        let max_ev = eigenvalues
            .as_slice()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if alpha_step * max_ev >= 2.0 {
            return Err(CoreError::InvalidInput(format!(
                "unstable step size: alpha * max(eigenvalue) = {} >= 2",
                alpha_step * max_ev
            )));
        }
        if k_grid.is_empty() {
            return Err(CoreError::InvalidInput("empty k grid".into()));
        }
        Ok(Self {
            alpha_step,
            k_grid,
            eigenvalues,
            basis,
        })
    }
}

/// Mixture `W theta_s + (I - W) theta_t`.
fn interpolate(w: &Matrix, theta_s: &Vector, theta_t: &Vector) -> Vector {
    theta_t.add(&w.mul_vec(&theta_s.sub(theta_t)))
}

/// Data-enriched estimator: for each lambda on the grid forms
/// `Psi = G_T + lambda G_T_val G_S^{-1} G_T`, `Gamma = Psi + lambda G_T_val`,
/// `W = Gamma^{-1} Psi`, and returns the mixture minimizing the validation
/// mean squared error.
pub fn data_enriched(
    target: &TaskState,
    source: &TaskState,
    params: &EnrichedParams,
    val: &Dataset,
) -> Result<Vector> {
    let d = target.dim();
    if source.dim() != d || params.g_t_val.rows() != d || val.dim() != d {
        return Err(CoreError::InvalidInput(
            "data-enriched: dimensions disagree".into(),
        ));
    }
    let g_s_inv = spd_inverse(&source.gram)?;
    let cross = params.g_t_val.matmul(&g_s_inv).matmul(&target.gram);

    let mut best: Option<(f64, Vector)> = None;
    for &lambda in &params.lambda_grid {
        let theta = if lambda == 0.0 {
            // Psi = Gamma = G_T, so W is the identity: the source fit.
            source.theta_hat.clone()
        } else {
            let psi = target.gram.add(&cross.scale(lambda));
            let gamma = psi.add(&params.g_t_val.scale(lambda));
            // Gamma is not symmetric in general; solve column by column.
            let w = general_solve_matrix(&gamma, &psi).map_err(|_| {
                CoreError::InvalidInput(format!("singular Gamma at lambda = {lambda}"))
            })?;
            interpolate(&w, &source.theta_hat, &target.theta_hat)
        };
        let err = validation_mse(&theta, val);
        if best.as_ref().map_or(true, |(e, _)| err < *e) {
            best = Some((err, theta));
        }
    }
    Ok(best.expect("nonempty grid").1)
}

/// Solves `A X = B` column-wise by Gaussian elimination with partial
/// pivoting (the mixing matrix `Gamma` is generally unsymmetric).
fn general_solve_matrix(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let cols = b.cols();
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a.row_slice(i).to_vec();
            row.extend_from_slice(b.row_slice(i));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().partial_cmp(&aug[j][col].abs()).unwrap())
            .unwrap();
        if aug[piv][col].abs() < 1e-300 {
            return Err(CoreError::NotPositiveDefinite { pivot: col });
        }
        aug.swap(col, piv);
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = aug[i][col] / aug[col][col];
            if f == 0.0 {
                continue;
            }
            for j in col..(n + cols) {
                aug[i][j] -= f * aug[col][j];
            }
        }
    }
    let mut out = Matrix::zeros(n, cols);
    for i in 0..n {
        for j in 0..cols {
            out.set(i, j, aug[i][n + j] / aug[i][i]);
        }
    }
    Ok(out)
}

/// Spectral candidate `W(alpha, k) theta_s + (I - W) theta_ols` with
/// `W = basis diag((1 - alpha ev_i)^k) basis^T`. Equals `k` gradient steps
/// with step `alpha` on the target squared-error loss started at `theta_s`.
pub(crate) fn spectral_candidate(
    params: &SpectralParams,
    theta_s: &Vector,
    theta_ols: &Vector,
    k: u32,
) -> Option<Vector> {
    if params
        .eigenvalues
        .as_slice()
        .iter()
        .any(|&ev| (1.0 - params.alpha_step * ev).abs() > 1.0)
    {
        return None; // unstable candidate, skip
    }
    let diff = theta_s.sub(theta_ols);
    let mut coeffs = params.basis.t_mul_vec(&diff);
    for (c, &ev) in coeffs.as_mut_slice().iter_mut().zip(params.eigenvalues.as_slice()) {
        *c *= (1.0 - params.alpha_step * ev).powi(k as i32);
    }
    Some(theta_ols.add(&params.basis.mul_vec(&coeffs)))
}

/// Spectral fine-tuning baseline: picks `k` by validation error among the
/// stable candidates and reverts to the target-only coefficients when no
/// candidate beats them.
pub fn spectral_finetune(
    target: &TaskState,
    source: &TaskState,
    params: &SpectralParams,
    val: &Dataset,
) -> Result<Vector> {
    let d = target.dim();
    if source.dim() != d || val.dim() != d {
        return Err(CoreError::InvalidInput(
            "spectral fine-tuning: dimensions disagree".into(),
        ));
    }
    // Gradient descent on the target loss converges to the OLS solution, so
    // the mixture interpolates toward it; needs an invertible target Gram.
    let theta_ols = spd_solve(&target.gram, &target.xty)?;

    let mut best_theta = target.theta_hat.clone();
    let mut best_err = validation_mse(&target.theta_hat, val);
    for &k in &params.k_grid {
        let Some(theta) = spectral_candidate(params, &source.theta_hat, &theta_ols, k) else {
            continue;
        };
        let err = validation_mse(&theta, val);
        if err < best_err {
            best_err = err;
            best_theta = theta;
        }
    }
    Ok(best_theta)
}
