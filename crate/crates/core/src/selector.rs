//! Streaming source-sample selector.
//!
//! One pass over the source stream: each sample updates the source and
//! pooled inverse Gram matrices by a Sherman-Morrison step (O(d^2)), the
//! conservative gain statistic kappa is evaluated on the current prefix,
//! and the prefix length with the best kappa wins. If every kappa is
//! negative the selector abstains (n_star = 0) and returns the target-only
//! coefficients unchanged.
//!
//! A run is a single-threaded state machine over the stream; independent
//! runs are freely parallel and the returned trace is immutable.

use crate::error::{CoreError, Result};
use crate::estimators::{xi_collab, xi_single, CollabState, TaskState};
use crate::gain::{
    decision_statistic, GainCoupling, GainEvaluator, GainReport, OracleReport, TargetGainContext,
};
use crate::linalg::{sherman_morrison_in_place, spd_inverse, Matrix, Vector};
use crate::model::GroundTruth;

/// Selector inputs: conservatism, budget, ridge parameters, noise levels.
#[derive(Debug, Clone)]
pub struct SelectorParams {
    pub alpha: f64,
    pub n_max: usize,
    pub lambda_s: f64,
    pub lambda_c: f64,
    pub sigma_t: f64,
    pub sigma_s: f64,
    /// Evaluate kappa every `stride` samples (the budget endpoint is always
    /// evaluated). 1 evaluates every prefix.
    pub stride: usize,
    pub coupling: GainCoupling,
}

impl SelectorParams {
    pub fn new(
        alpha: f64,
        n_max: usize,
        lambda_s: f64,
        lambda_c: f64,
        sigma_t: f64,
        sigma_s: f64,
    ) -> Self {
        Self {
            alpha,
            n_max,
            lambda_s,
            lambda_c,
            sigma_t,
            sigma_s,
            stride: 1,
            coupling: GainCoupling::default(),
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride.max(1);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(CoreError::InvalidInput("n_max must be >= 1".into()));
        }
        if self.alpha < 0.0
            || self.lambda_s < 0.0
            || self.lambda_c < 0.0
            || self.sigma_t < 0.0
            || self.sigma_s < 0.0
        {
            return Err(CoreError::InvalidInput(
                "alpha, ridge parameters and noise levels must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one selector run: the per-n reports (for every evaluated
/// prefix), the selected prefix length, and the selected coefficients.
#[derive(Debug, Clone)]
pub struct SelectorTrace {
    pub reports: Vec<GainReport>,
    /// Selected number of borrowed samples; 0 means abstention.
    pub n_star: usize,
    pub theta_selected: Vector,
}

/// Pooled inverse at n = 0: `(G_T + lambda_c I)^{-1}`.
pub fn init_collab_inverse(target: &TaskState, lambda_c: f64) -> Result<Matrix> {
    let mut a = target.gram.clone();
    a.add_diag(lambda_c);
    spd_inverse(&a)
}

/// Runs the streaming selector over the first `n_max` stream samples.
///
/// When `truth` is supplied, each report additionally carries the oracle
/// gain, the exact bias, and the exact variance for that prefix.
pub fn run_triple_s(
    target: &TaskState,
    stream: &[(Vector, f64)],
    val_x: &Matrix,
    params: &SelectorParams,
    truth: Option<&GroundTruth>,
) -> Result<SelectorTrace> {
    params.validate()?;
    if stream.len() < params.n_max {
        return Err(CoreError::StreamTruncated {
            consumed: stream.len(),
            requested: params.n_max,
        });
    }
    let d = target.dim();
    let ctx = TargetGainContext::new(target, val_x, params.sigma_t)?;
    let xi_t = truth.map(|t| xi_single(target, val_x, t));

    let mut g_s = Matrix::zeros(d, d);
    let mut b_s = Vector::zeros(d);
    let mut a_c_inv = init_collab_inverse(target, params.lambda_c)?;
    // With lambda_s = 0 the source inverse does not exist until the source
    // Gram gains full rank; reports for those prefixes are unavailable.
    let mut a_s_inv = if params.lambda_s > 0.0 {
        Some(Matrix::identity(d).scale(1.0 / params.lambda_s))
    } else {
        None
    };

    let mut reports = Vec::new();
    let mut thetas: Vec<(usize, Vector)> = Vec::new();

    for (idx, (x, y)) in stream.iter().take(params.n_max).enumerate() {
        let n = idx + 1;
        if x.dim() != d {
            return Err(CoreError::InvalidInput(format!(
                "stream sample {idx} has dimension {} (expected {d})",
                x.dim()
            )));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(CoreError::NonFiniteStream { index: idx });
        }

        g_s.add_outer(x, 1.0);
        b_s.scaled_add(*y, x);
        sherman_morrison_in_place(&mut a_c_inv, x)?;
        match a_s_inv.as_mut() {
            Some(inv) => sherman_morrison_in_place(inv, x)?,
            None => {
                // Deferred OLS source state: invert once the Gram admits it.
                if n >= d {
                    if let Ok(inv) = spd_inverse(&g_s) {
                        a_s_inv = Some(inv);
                    }
                }
            }
        }

        let evaluate = n % params.stride == 0 || n == params.n_max;
        let (Some(a_s_inv_ref), true) = (a_s_inv.as_ref(), evaluate) else {
            continue;
        };

        let eval = GainEvaluator::new(
            &ctx,
            &g_s,
            a_s_inv_ref,
            params.lambda_s,
            &a_c_inv,
            params.lambda_c,
            params.sigma_s,
            params.coupling,
        );
        let theta_s = a_s_inv_ref.mul_vec(&b_s);
        let theta_c = a_c_inv.mul_vec(&target.xty.add(&b_s));
        let delta_hat = eval.delta_hat(&target.theta_hat, &theta_s);
        let var_hat = eval.plugin_variance(&target.theta_hat, &theta_s);
        let kappa = decision_statistic(delta_hat, var_hat, params.alpha);

        let oracle = truth.map(|t| {
            let collab = CollabState {
                a_inv: a_c_inv.clone(),
                lambda: params.lambda_c,
                xty_total: target.xty.add(&b_s),
                n,
                theta_hat: theta_c.clone(),
            };
            let moments = eval.oracle_moments(t);
            OracleReport {
                delta_star: xi_t.unwrap() - xi_collab(&collab, target, &g_s, val_x, t),
                bias: moments.bias,
                variance_exact: moments.variance,
            }
        });

        reports.push(GainReport {
            n,
            delta_hat,
            var_hat,
            kappa,
            oracle,
        });
        thetas.push((n, theta_c));
    }

    // Argmax over the evaluated prefixes plus the abstention sentinel
    // kappa(0) = 0; ties break toward the smaller n.
    let mut n_star = 0usize;
    let mut best_kappa = 0.0f64;
    for report in &reports {
        if report.kappa > best_kappa {
            best_kappa = report.kappa;
            n_star = report.n;
        }
    }
    let theta_selected = if n_star == 0 {
        target.theta_hat.clone()
    } else {
        thetas
            .into_iter()
            .find(|(n, _)| *n == n_star)
            .map(|(_, t)| t)
            .expect("selected prefix was evaluated")
    };

    Ok(SelectorTrace {
        reports,
        n_star,
        theta_selected,
    })
}
