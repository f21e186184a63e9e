//! Closed-form ridge estimators and their exact conditional prediction
//! errors.
//!
//! `xi_single` and `xi_collab` are oracle quantities: conditioned on the
//! design matrices, they give the exact expected validation risk of the
//! single-task and pooled estimators under the ground-truth parameters.
//! They drive the oracle transfer gain and all Monte Carlo cross-checks.

use crate::error::{CoreError, Result};
use crate::linalg::{gram, spd_inverse, trace_product, Matrix, Vector};
use crate::model::{Dataset, GroundTruth};

/// Sufficient statistics of one fitted ridge task.
#[derive(Debug, Clone)]
pub struct TaskState {
    /// Gram matrix `X^T X`.
    pub gram: Matrix,
    /// Inverse of the regularized Gram `(G + lambda I)^{-1}`.
    pub a_inv: Matrix,
    /// Cross term `X^T y`.
    pub xty: Vector,
    pub lambda: f64,
    pub theta_hat: Vector,
    /// Number of samples absorbed.
    pub n: usize,
}

impl TaskState {
    pub fn dim(&self) -> usize {
        self.gram.rows()
    }
}

/// Streaming state of the pooled (target + source prefix) problem.
#[derive(Debug, Clone)]
pub struct CollabState {
    /// `(G_T + G_S(n) + lambda_c I)^{-1}`.
    pub a_inv: Matrix,
    pub lambda: f64,
    /// `X_T^T y_T + X_S(n)^T y_S(n)`.
    pub xty_total: Vector,
    /// Source samples pooled so far.
    pub n: usize,
    pub theta_hat: Vector,
}

/// Fits ridge regression by the normal equations `(G + lambda I) theta = X^T y`.
pub fn fit_ridge(data: &Dataset, lambda: f64) -> Result<TaskState> {
    if lambda < 0.0 {
        return Err(CoreError::InvalidInput("lambda must be >= 0".into()));
    }
    let g = gram(&data.x)?;
    let mut a = g.clone();
    a.add_diag(lambda);
    let a_inv = spd_inverse(&a)?;
    let xty = data.x.t_mul_vec(&data.y);
    let theta_hat = a_inv.mul_vec(&xty);
    Ok(TaskState {
        gram: g,
        a_inv,
        xty,
        lambda,
        theta_hat,
        n: data.n(),
    })
}

/// Fits the pooled ridge on the target statistics plus a source prefix,
/// with its own parameter `lambda_c`.
pub fn fit_collaborative(
    target: &TaskState,
    source_prefix: &Dataset,
    lambda_c: f64,
) -> Result<CollabState> {
    if source_prefix.n() > 0 && source_prefix.dim() != target.dim() {
        return Err(CoreError::InvalidInput(
            "source rows must share the target dimension".into(),
        ));
    }
    let g_s = if source_prefix.n() > 0 {
        gram(&source_prefix.x)?
    } else {
        Matrix::zeros(target.dim(), target.dim())
    };
    let mut a = target.gram.add(&g_s);
    a.add_diag(lambda_c);
    let a_inv = spd_inverse(&a)?;
    let mut xty_total = target.xty.clone();
    if source_prefix.n() > 0 {
        let b_s = source_prefix.x.t_mul_vec(&source_prefix.y);
        xty_total = xty_total.add(&b_s);
    }
    let theta_hat = a_inv.mul_vec(&xty_total);
    Ok(CollabState {
        a_inv,
        lambda: lambda_c,
        xty_total,
        n: source_prefix.n(),
        theta_hat,
    })
}

/// Exact conditional risk of the single-task estimator on the validation
/// design:
/// `lambda^2 ||X_val A^{-1} theta*||^2 + sigma^2 tr(X_val A^{-1} G A^{-1} X_val^T)`.
pub fn xi_single(target: &TaskState, val_x: &Matrix, truth: &GroundTruth) -> f64 {
    let u = val_x.matmul(&target.a_inv);
    let bias = u.mul_vec(&truth.theta_t).norm_sq() * target.lambda * target.lambda;
    let utu = u.t_matmul(&u);
    let variance = truth.sigma_t * truth.sigma_t * trace_product(&target.gram, &utu);
    bias + variance
}

/// Exact conditional risk of the pooled estimator:
/// `||X_val A_c^{-1}(G_S dtheta - lambda_c theta_t*)||^2
///  + tr(X_val A_c^{-1}(sigma_s^2 G_S + sigma_t^2 G_T) A_c^{-1} X_val^T)`.
pub fn xi_collab(
    collab: &CollabState,
    target: &TaskState,
    source_gram: &Matrix,
    val_x: &Matrix,
    truth: &GroundTruth,
) -> f64 {
    let v = val_x.matmul(&collab.a_inv);
    let dtheta = truth.theta_s.sub(&truth.theta_t);
    let mut drift = source_gram.mul_vec(&dtheta);
    drift.scaled_add(-collab.lambda, &truth.theta_t);
    let bias = v.mul_vec(&drift).norm_sq();
    let vtv = v.t_matmul(&v);
    let noise = source_gram
        .scale(truth.sigma_s * truth.sigma_s)
        .add(&target.gram.scale(truth.sigma_t * truth.sigma_t));
    bias + trace_product(&noise, &vtv)
}

/// Oracle transfer gain: reduction in exact risk from pooling,
/// `xi_single - xi_collab`. Positive means sharing helps.
pub fn oracle_gain(
    collab: &CollabState,
    target: &TaskState,
    source_gram: &Matrix,
    val_x: &Matrix,
    truth: &GroundTruth,
) -> f64 {
    xi_single(target, val_x, truth) - xi_collab(collab, target, source_gram, val_x, truth)
}

/// Log-spaced grid, endpoints included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Default ridge-parameter grid: 25 log-spaced points in [1e-3, 1e3].
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 25)
}

/// Oracle grid search for the target ridge parameter: minimizes the exact
/// conditional validation risk, which needs the ground truth but not the
/// validation responses.
pub fn tune_lambda_oracle(
    train: &Dataset,
    val_x: &Matrix,
    truth: &GroundTruth,
    grid: &[f64],
) -> Result<(f64, TaskState)> {
    let mut best: Option<(f64, f64, TaskState)> = None;
    for &lambda in grid {
        let state = fit_ridge(train, lambda)?;
        let risk = xi_single(&state, val_x, truth);
        if best.as_ref().map_or(true, |(_, r, _)| risk < *r) {
            best = Some((lambda, risk, state));
        }
    }
    best.map(|(l, _, s)| (l, s))
        .ok_or_else(|| CoreError::InvalidInput("empty lambda grid".into()))
}

/// Mean squared prediction error on a labelled validation split.
pub fn validation_mse(theta: &Vector, val: &Dataset) -> f64 {
    let resid = val.x.mul_vec(theta).sub(&val.y);
    resid.norm_sq() / val.n() as f64
}

/// Grid search for the target ridge parameter by held-out validation error
/// (no ground truth required); used on real data.
pub fn tune_lambda_validation(
    train: &Dataset,
    val: &Dataset,
    grid: &[f64],
) -> Result<(f64, TaskState)> {
    let mut best: Option<(f64, f64, TaskState)> = None;
    for &lambda in grid {
        let state = fit_ridge(train, lambda)?;
        let err = validation_mse(&state.theta_hat, val);
        if best.as_ref().map_or(true, |(_, r, _)| err < *r) {
            best = Some((lambda, err, state));
        }
    }
    best.map(|(l, _, s)| (l, s))
        .ok_or_else(|| CoreError::InvalidInput("empty lambda grid".into()))
}

/// Residual-based noise estimate: `||y - X theta_ols||^2 / (n - d)`,
/// returned as a standard deviation. Needs n > d.
pub fn estimate_noise_std(data: &Dataset) -> Result<f64> {
    let (n, d) = (data.n(), data.dim());
    if n <= d {
        return Err(CoreError::InvalidInput(format!(
            "noise estimation needs n > d (got n = {n}, d = {d})"
        )));
    }
    let ols = fit_ridge(data, 0.0)?;
    let resid = data.x.mul_vec(&ols.theta_hat).sub(&data.y);
    Ok((resid.norm_sq() / (n - d) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{attach_noise, generate, generate_designs, SynthConfig};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_dataset(rng: &mut StdRng, n: usize, d: usize) -> Dataset {
        let x = Matrix::new(
            n,
            d,
            (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let y = Vector::from((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        Dataset::new(x, y).unwrap()
    }

    /// Gaussian-elimination solve, independent of the Cholesky path.
    fn gauss_solve(a: &Matrix, b: &Vector) -> Vector {
        let n = a.rows();
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row = a.row_slice(i).to_vec();
                row.push(b.get(i));
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
                .unwrap();
            m.swap(col, piv);
            let p = m[col][col];
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = m[i][col] / p;
                for j in col..=n {
                    m[i][j] -= f * m[col][j];
                }
            }
        }
        Vector::from((0..n).map(|i| m[i][n] / m[i][i]).collect::<Vec<_>>())
    }

    #[test]
    fn identity_design_cases() {
        let d = 5;
        let y = Vector::from(vec![1.0, -2.0, 0.5, 3.0, -1.0]);
        let data = Dataset::new(Matrix::identity(d), y.clone()).unwrap();

        let ols = fit_ridge(&data, 0.0).unwrap();
        assert!(ols.theta_hat.max_abs_diff(&y) < 1e-12);

        let lam = 0.5;
        let ridge = fit_ridge(&data, lam).unwrap();
        assert!(ridge.theta_hat.max_abs_diff(&y.scale(1.0 / (1.0 + lam))) < 1e-12);
    }

    #[test]
    fn ridge_matches_direct_normal_equation_solve() {
        let mut rng = StdRng::seed_from_u64(2);
        let data = random_dataset(&mut rng, 100, 20);
        let lambda = 0.3;
        let state = fit_ridge(&data, lambda).unwrap();
        let mut a = gram(&data.x).unwrap();
        a.add_diag(lambda);
        let direct = gauss_solve(&a, &data.x.t_mul_vec(&data.y));
        assert!(state.theta_hat.max_abs_diff(&direct) <= 1e-9);
    }

    #[test]
    fn task_state_invariants_hold() {
        let mut rng = StdRng::seed_from_u64(3);
        let data = random_dataset(&mut rng, 60, 8);
        let state = fit_ridge(&data, 1.2).unwrap();
        let mut a = state.gram.clone();
        a.add_diag(state.lambda);
        let resid = state.a_inv.matmul(&a).max_abs_diff(&Matrix::identity(8));
        assert!(resid <= 1e-8);
        let theta = state.a_inv.mul_vec(&state.xty);
        assert!(theta.max_abs_diff(&state.theta_hat) <= 1e-10);
    }

    #[test]
    fn collaborative_with_empty_source_equals_target_fit() {
        let mut rng = StdRng::seed_from_u64(4);
        let data = random_dataset(&mut rng, 40, 6);
        let target = fit_ridge(&data, 0.8).unwrap();
        let empty = Dataset::new(Matrix::new(0, 6, vec![]).unwrap(), Vector::zeros(0)).unwrap();
        let collab = fit_collaborative(&target, &empty, 0.8).unwrap();
        // Same linear system, bit for bit.
        assert_eq!(collab.theta_hat, target.theta_hat);
    }

    #[test]
    fn collaborative_recovers_truth_on_consistent_noiseless_tasks() {
        let mut rng = StdRng::seed_from_u64(5);
        let d = 4;
        let theta = Vector::from(vec![1.0, -0.5, 2.0, 0.25]);
        let mk = |rng: &mut StdRng, n: usize| {
            let x = Matrix::new(
                n,
                d,
                (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let y = x.mul_vec(&theta);
            Dataset::new(x, y).unwrap()
        };
        let target_data = mk(&mut rng, 3);
        let source_data = mk(&mut rng, 5);
        // Stacked system has rank d even though the target alone does not.
        let target = fit_ridge(&target_data, 1e-9).unwrap();
        let collab = fit_collaborative(&target, &source_data, 0.0).unwrap();
        assert!(collab.theta_hat.max_abs_diff(&theta) <= 1e-9);
    }

    #[test]
    fn collaborative_matches_physically_stacked_fit() {
        let mut rng = StdRng::seed_from_u64(6);
        let target_data = random_dataset(&mut rng, 30, 5);
        let source_data = random_dataset(&mut rng, 20, 5);
        let lambda_c = 0.7;
        let target = fit_ridge(&target_data, 0.2).unwrap();
        let collab = fit_collaborative(&target, &source_data, lambda_c).unwrap();

        let mut rows = Vec::new();
        let mut ys = Vec::new();
        for r in 0..30 {
            rows.push(target_data.x.row_slice(r).to_vec());
            ys.push(target_data.y.get(r));
        }
        for r in 0..20 {
            rows.push(source_data.x.row_slice(r).to_vec());
            ys.push(source_data.y.get(r));
        }
        let stacked = Dataset::new(Matrix::from_rows(&rows).unwrap(), Vector::from(ys)).unwrap();
        let direct = fit_ridge(&stacked, lambda_c).unwrap();
        assert!(collab.theta_hat.max_abs_diff(&direct.theta_hat) <= 1e-9);
    }

    #[test]
    fn xi_single_special_cases() {
        let data = generate(&SynthConfig::default()).unwrap();
        // lambda = 0: bias term vanishes, only the noise trace remains.
        let ols = fit_ridge(&data.target, 0.0).unwrap();
        let xi = xi_single(&ols, &data.val.x, &data.truth);
        let u = data.val.x.matmul(&ols.a_inv);
        let noise_only = trace_product(&ols.gram, &u.t_matmul(&u));
        assert!((xi - noise_only).abs() <= 1e-9 * noise_only.abs());

        // sigma = 0: pure shrinkage bias.
        let mut truth = data.truth.clone();
        truth.sigma_t = 0.0;
        let ridge = fit_ridge(&data.target, 5.0).unwrap();
        let xi = xi_single(&ridge, &data.val.x, &truth);
        let bias = 25.0 * u_times(&data.val.x, &ridge.a_inv, &truth.theta_t);
        assert!((xi - bias).abs() <= 1e-12 * bias.max(1.0));
    }

    fn u_times(val_x: &Matrix, a_inv: &Matrix, theta: &Vector) -> f64 {
        val_x.matmul(a_inv).mul_vec(theta).norm_sq()
    }

    #[test]
    fn xi_collab_reduces_to_single_task_at_n_zero() {
        let data = generate(&SynthConfig::default()).unwrap();
        let target = fit_ridge(&data.target, 3.0).unwrap();
        let empty = Dataset::new(Matrix::new(0, 20, vec![]).unwrap(), Vector::zeros(0)).unwrap();
        let collab = fit_collaborative(&target, &empty, 3.0).unwrap();
        let g_s = Matrix::zeros(20, 20);
        let a = xi_collab(&collab, &target, &g_s, &data.val.x, &data.truth);
        let b = xi_single(&target, &data.val.x, &data.truth);
        assert!((a - b).abs() <= 1e-10 * b);
    }

    #[test]
    fn xi_collab_zero_when_all_error_sources_off() {
        let cfg = SynthConfig {
            epsilon: 0.0,
            sigma_t: 0.0,
            sigma_s: 0.0,
            seed: 8,
            ..Default::default()
        };
        let data = generate(&cfg).unwrap();
        let target = fit_ridge(&data.target, 1.0).unwrap();
        let collab = fit_collaborative(&target, &data.source, 0.0).unwrap();
        let g_s = gram(&data.source.x).unwrap();
        let xi = xi_collab(&collab, &target, &g_s, &data.val.x, &data.truth);
        assert!(xi.abs() <= 1e-18);
    }

    #[test]
    fn xi_monte_carlo_oracle() {
        // The exact conditional risks must match empirical means over noise
        // redraws within 3 Monte Carlo standard errors.
        let cfg = SynthConfig {
            seed: 11,
            ..Default::default()
        };
        let designs = generate_designs(&cfg).unwrap();
        let base = attach_noise(&designs, 0);
        let target = fit_ridge(&base.target, 4.0).unwrap();
        let n_collab = 500;
        let prefix = Dataset::new(
            Matrix::from_rows(
                &(0..n_collab)
                    .map(|r| designs.source_x.row_slice(r).to_vec())
                    .collect::<Vec<_>>(),
            )
            .unwrap(),
            Vector::zeros(n_collab),
        )
        .unwrap();
        let collab_shape = fit_collaborative(&target, &prefix, 5.0).unwrap();
        let g_s = gram(&prefix.x).unwrap();

        let xi_t = xi_single(&target, &designs.val_x, &designs.truth);
        let xi_c = xi_collab(&collab_shape, &target, &g_s, &designs.val_x, &designs.truth);

        let redraws = 10_000;
        let mut err_t = Vec::with_capacity(redraws);
        let mut err_c = Vec::with_capacity(redraws);
        for k in 0..redraws {
            let data = attach_noise(&designs, 10_000 + k as u64);
            let bt = data.target.x.t_mul_vec(&data.target.y);
            let theta_t = target.a_inv.mul_vec(&bt);
            err_t.push(
                designs
                    .val_x
                    .mul_vec(&theta_t.sub(&designs.truth.theta_t))
                    .norm_sq(),
            );
            let mut b_total = bt.clone();
            for r in 0..n_collab {
                let row = data.source.x.row_vec(r);
                b_total.scaled_add(data.source.y.get(r), &row);
            }
            let theta_c = collab_shape.a_inv.mul_vec(&b_total);
            err_c.push(
                designs
                    .val_x
                    .mul_vec(&theta_c.sub(&designs.truth.theta_t))
                    .norm_sq(),
            );
        }
        for (xi, errs) in [(xi_t, &err_t), (xi_c, &err_c)] {
            let n = errs.len() as f64;
            let mean = errs.iter().sum::<f64>() / n;
            let var = errs.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0);
            let se = (var / n).sqrt();
            assert!(
                (mean - xi).abs() <= 3.0 * se,
                "xi {xi} vs MC mean {mean} (se {se})"
            );
        }
    }

    #[test]
    fn oracle_gain_signs() {
        // Much noisier source with many samples: sharing hurts.
        let cfg = SynthConfig {
            sigma_s: 100.0,
            seed: 13,
            ..Default::default()
        };
        let data = generate(&cfg).unwrap();
        let target = fit_ridge(&data.target, 4.0).unwrap();
        let collab = fit_collaborative(&target, &data.source, 5.0).unwrap();
        let g_s = gram(&data.source.x).unwrap();
        assert!(oracle_gain(&collab, &target, &g_s, &data.val.x, &data.truth) < 0.0);

        // Identical tasks, cleaner source, no shrinkage: pure variance
        // reduction, sharing helps.
        let cfg = SynthConfig {
            epsilon: 0.0,
            sigma_s: 1.0,
            n_source: 500,
            seed: 14,
            ..Default::default()
        };
        let data = generate(&cfg).unwrap();
        let target = fit_ridge(&data.target, 0.0).unwrap();
        let collab = fit_collaborative(&target, &data.source, 0.0).unwrap();
        let g_s = gram(&data.source.x).unwrap();
        assert!(oracle_gain(&collab, &target, &g_s, &data.val.x, &data.truth) > 0.0);

        // n = 0 with matching lambda: identical estimators, zero gain.
        let empty = Dataset::new(Matrix::new(0, 20, vec![]).unwrap(), Vector::zeros(0)).unwrap();
        let same = fit_collaborative(&target, &empty, target.lambda).unwrap();
        let zero = oracle_gain(
            &same,
            &target,
            &Matrix::zeros(20, 20),
            &data.val.x,
            &data.truth,
        );
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn pooled_estimator_is_matrix_weighted_interpolation() {
        // With lambda_c = lambda_s + lambda_t the pooled fit equals
        // W theta_s + (I - W) theta_t with W = A_c^{-1} A_S.
        let mut rng = StdRng::seed_from_u64(15);
        let target_data = random_dataset(&mut rng, 50, 6);
        let source_data = random_dataset(&mut rng, 40, 6);
        let (lambda_t, lambda_s) = (0.9, 1.7);
        let target = fit_ridge(&target_data, lambda_t).unwrap();
        let source = fit_ridge(&source_data, lambda_s).unwrap();
        let collab = fit_collaborative(&target, &source_data, lambda_t + lambda_s).unwrap();

        let mut a_s = source.gram.clone();
        a_s.add_diag(lambda_s);
        let w = collab.a_inv.matmul(&a_s);
        let mixed = w
            .mul_vec(&source.theta_hat)
            .add(&target.theta_hat.sub(&w.mul_vec(&target.theta_hat)));
        assert!(collab.theta_hat.max_abs_diff(&mixed) <= 1e-8);
    }

    #[test]
    fn xi_is_invariant_to_training_row_permutations() {
        let mut rng = StdRng::seed_from_u64(16);
        let data = random_dataset(&mut rng, 25, 4);
        let truth = GroundTruth::new(
            Vector::from(vec![1.0, 0.0, 0.0, 0.0]),
            Vector::from(vec![1.0, 0.3, 0.0, 0.0]),
            1.0,
            0.5,
        )
        .unwrap();
        let val_x = Matrix::new(
            10,
            4,
            (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let state = fit_ridge(&data, 0.5).unwrap();
        let xi = xi_single(&state, &val_x, &truth);

        let perm: Vec<usize> = (0..25).rev().collect();
        let shuffled = Dataset::new(
            Matrix::from_rows(&perm.iter().map(|&i| data.x.row_slice(i).to_vec()).collect::<Vec<_>>())
                .unwrap(),
            Vector::from(perm.iter().map(|&i| data.y.get(i)).collect::<Vec<_>>()),
        )
        .unwrap();
        let state2 = fit_ridge(&shuffled, 0.5).unwrap();
        let xi2 = xi_single(&state2, &val_x, &truth);
        assert!((xi - xi2).abs() <= 1e-9 * xi.abs().max(1.0));
    }

    #[test]
    fn shrinkage_is_monotone_in_lambda() {
        let mut rng = StdRng::seed_from_u64(17);
        let data = random_dataset(&mut rng, 40, 6);
        let mut last = f64::INFINITY;
        for lambda in log_grid(1e-3, 1e3, 25) {
            let norm = fit_ridge(&data, lambda).unwrap().theta_hat.norm();
            assert!(norm <= last + 1e-12, "norm increased at lambda {lambda}");
            last = norm;
        }
    }

    #[test]
    fn oracle_tuning_matches_exhaustive_scan() {
        let data = generate(&SynthConfig {
            seed: 19,
            ..Default::default()
        })
        .unwrap();
        let grid = default_lambda_grid();
        let (best, _) = tune_lambda_oracle(&data.target, &data.val.x, &data.truth, &grid).unwrap();
        let mut best_scan = (f64::NAN, f64::INFINITY);
        for &l in &grid {
            let s = fit_ridge(&data.target, l).unwrap();
            let r = xi_single(&s, &data.val.x, &data.truth);
            if r < best_scan.1 {
                best_scan = (l, r);
            }
        }
        assert_eq!(best, best_scan.0);
    }

    #[test]
    fn noise_estimate_recovers_sigma() {
        let cfg = SynthConfig {
            n_target: 2000,
            sigma_t: 1.4,
            seed: 21,
            ..Default::default()
        };
        let data = generate(&cfg).unwrap();
        let est = estimate_noise_std(&data.target).unwrap();
        assert!((est - 1.4).abs() < 0.1, "estimated sigma {est}");
        let tiny = Dataset::new(Matrix::identity(3), Vector::zeros(3)).unwrap();
        assert!(estimate_noise_std(&tiny).is_err());
    }

    #[test]
    fn singular_ols_reports_error() {
        // More columns than rows and lambda = 0: the system is singular.
        let data = Dataset::new(
            Matrix::new(1, 3, vec![1.0, 2.0, 3.0]).unwrap(),
            Vector::from(vec![1.0]),
        )
        .unwrap();
        assert!(matches!(
            fit_ridge(&data, 0.0),
            Err(CoreError::NotPositiveDefinite { .. })
        ));
    }
}
