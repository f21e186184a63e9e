//! Plug-in transfer-gain estimation.
//!
//! The estimated gain compares the single-task risk estimate with the pooled
//! risk estimate using only observable quantities:
//!
//! ```text
//! gain_hat(n) = lambda_t^2 ||U_T theta_t_hat||^2
//!             - ||V(n) (G_S(n)(theta_s_hat - theta_t_hat) - lambda_c theta_t_hat)||^2
//!             + tr(U_T M_T U_T^T) - tr(V(n) N(n) V(n)^T)
//! ```
//!
//! with `U_T = X_val A_T^{-1}` and `V(n) = X_val A_c(n)^{-1}`. The trace
//! corrections `M_T` and `N(n)` remove the noise inflation of the squared
//! norms. The random part of the estimator is exactly a quadratic form
//! `z^T D(n) z` in the jointly Gaussian vector
//! `z = [theta_s_hat; theta_t_hat]`, which yields closed forms for its mean
//! and variance; those closed forms (and the Cantelli lower bound built from
//! them) are what the decision rule consumes.

use crate::error::{CoreError, Result};
use crate::estimators::{CollabState, TaskState};
use crate::linalg::{trace_product, Matrix, Vector};
use crate::model::GroundTruth;

/// Which coupling matrix enters the noise-correction matrices `K_2`, the
/// quadratic-form blocks, and the bias expansion.
///
/// `PooledShift` uses `G_S(n) + lambda_c I` — the matrix that actually
/// multiplies `theta_t_hat` inside the estimator — which keeps the
/// expectation identity `E[gain_hat] = gain_star + bias` exact.
/// `SourceRidge` substitutes the source-ridge matrix `A_S = G_S + lambda_s I`
/// (and drops one `G_S` factor from `K_1`); it is retained for comparison
/// because it leaves a residual, uncorrected bias (see the adjudication
/// tests).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainCoupling {
    #[default]
    PooledShift,
    SourceRidge,
}

/// The intermediate matrices of the gain estimator, exposed for inspection
/// and testing.
#[derive(Debug, Clone)]
pub struct GainComponents {
    pub u_t: Matrix,
    pub v_n: Matrix,
    pub m_t: Matrix,
    pub n_n: Matrix,
    pub k1: Matrix,
    pub k2: Matrix,
    pub k3: Matrix,
    pub l1t: Matrix,
    pub l2t: Matrix,
}

/// Exact first and second moments of the gain estimator under the ground
/// truth: bias, the quadratic-form matrix `D`, the Gaussian parameters
/// `(mu, Sigma)` of `z`, and the resulting variance.
#[derive(Debug, Clone)]
pub struct GainMoments {
    pub bias: f64,
    pub d: Matrix,
    pub mu: Vector,
    pub sigma: Matrix,
    pub variance: f64,
    pub delta_theta: Vector,
    pub delta_theta_b: Vector,
}

/// Oracle quantities attached to a per-n report when the truth is known.
#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    pub delta_star: f64,
    pub bias: f64,
    pub variance_exact: f64,
}

/// Per-n record produced by the selector.
#[derive(Debug, Clone)]
pub struct GainReport {
    pub n: usize,
    pub delta_hat: f64,
    pub var_hat: f64,
    pub kappa: f64,
    pub oracle: Option<OracleReport>,
}

/// Quantities that depend only on the target task and the validation
/// design; shared across every n.
#[derive(Debug, Clone)]
pub struct TargetGainContext {
    pub(crate) val_x: Matrix,
    pub(crate) u_t: Matrix,
    pub(crate) utu: Matrix,
    /// `A_T^{-1} G_T`.
    pub(crate) t_map: Matrix,
    /// `A_T^{-1} G_T A_T^{-1}`.
    pub(crate) c_t: Matrix,
    pub(crate) m_t: Matrix,
    pub(crate) l1t: Matrix,
    pub(crate) l2t: Matrix,
    pub(crate) a_t_inv: Matrix,
    pub(crate) g_t: Matrix,
    pub(crate) lambda_t: f64,
    pub(crate) sigma_t: f64,
    trace_m: f64,
}

impl TargetGainContext {
    pub fn new(target: &TaskState, val_x: &Matrix, sigma_t: f64) -> Result<Self> {
        if val_x.cols() != target.dim() {
            return Err(CoreError::InvalidInput(
                "validation design dimension mismatch".into(),
            ));
        }
        let u_t = val_x.matmul(&target.a_inv);
        let utu = u_t.t_matmul(&u_t);
        let t_map = target.a_inv.matmul(&target.gram);
        let c_t = t_map.matmul(&target.a_inv);
        let st2 = sigma_t * sigma_t;
        let l1t = target.gram.scale(st2);
        let l2t = c_t.scale(-target.lambda * target.lambda * st2);
        let m_t = l1t.add(&l2t);
        let trace_m = trace_product(&m_t, &utu);
        Ok(Self {
            val_x: val_x.clone(),
            u_t,
            utu,
            t_map,
            c_t,
            m_t,
            l1t,
            l2t,
            a_t_inv: target.a_inv.clone(),
            g_t: target.gram.clone(),
            lambda_t: target.lambda,
            sigma_t,
            trace_m,
        })
    }
}

/// Everything needed to evaluate the gain estimator, its plug-in variance,
/// and the oracle moments at one source-prefix length n.
#[derive(Debug, Clone)]
pub struct GainEvaluator<'a> {
    ctx: &'a TargetGainContext,
    g_s: Matrix,
    /// `A_S(n)^{-1} G_S(n)`; its transpose maps responses to the source mean.
    s_map: Matrix,
    v: Matrix,
    d11: Matrix,
    d12: Matrix,
    d22: Matrix,
    sigma_s_block: Matrix,
    sigma_t_block: Matrix,
    a_s_inv: Matrix,
    lambda_s: f64,
    lambda_c: f64,
    coupling: GainCoupling,
    components: GainComponents,
    /// `tr(U_T M_T U_T^T) - tr(V N V^T)`.
    const_term: f64,
}

impl<'a> GainEvaluator<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        ctx: &'a TargetGainContext,
        source_gram: &Matrix,
        source_a_inv: &Matrix,
        lambda_s: f64,
        collab_a_inv: &Matrix,
        lambda_c: f64,
        sigma_s: f64,
        coupling: GainCoupling,
    ) -> Self {
        let d = source_gram.rows();
        let v = ctx.val_x.matmul(collab_a_inv);
        let vtv = v.t_matmul(&v);
        let ss2 = sigma_s * sigma_s;
        let st2 = ctx.sigma_t * ctx.sigma_t;

        // Coupling matrix for the target block of the quadratic form.
        let mut p = source_gram.clone();
        match coupling {
            GainCoupling::PooledShift => p.add_diag(lambda_c),
            GainCoupling::SourceRidge => p.add_diag(lambda_s),
        }

        let gs_asinv = source_gram.matmul(source_a_inv);
        let k1 = match coupling {
            GainCoupling::PooledShift => gs_asinv.matmul(&gs_asinv).matmul(source_gram).scale(-ss2),
            GainCoupling::SourceRidge => gs_asinv.matmul(&gs_asinv).scale(-ss2),
        };
        let k2 = p.matmul(&ctx.c_t).matmul(&p).scale(-st2);
        let k3 = source_gram.scale(ss2).add(&ctx.g_t.scale(st2));
        let n_n = k1.add(&k2).add(&k3);
        let const_term = ctx.trace_m - trace_product(&n_n, &vtv);

        let gs_vtv = source_gram.matmul(&vtv);
        let d11 = gs_vtv.matmul(source_gram).scale(-1.0);
        let d12 = gs_vtv.matmul(&p);
        let p_vtv = p.matmul(&vtv);
        let d22 = ctx
            .utu
            .scale(ctx.lambda_t * ctx.lambda_t)
            .sub(&p_vtv.matmul(&p));

        let mut sigma_s_block = source_a_inv.matmul(source_gram).matmul(source_a_inv);
        sigma_s_block = sigma_s_block.scale(ss2);
        sigma_s_block.symmetrize();
        let sigma_t_block = ctx.c_t.scale(st2);

        let s_map = source_a_inv.matmul(source_gram);

        let components = GainComponents {
            u_t: ctx.u_t.clone(),
            v_n: v.clone(),
            m_t: ctx.m_t.clone(),
            n_n: n_n.clone(),
            k1,
            k2,
            k3,
            l1t: ctx.l1t.clone(),
            l2t: ctx.l2t.clone(),
        };

        debug_assert_eq!(d, ctx.g_t.rows());
        Self {
            ctx,
            g_s: source_gram.clone(),
            s_map,
            v,
            vtv,
            p,
            d11,
            d12,
            d22,
            sigma_s_block,
            sigma_t_block,
            a_s_inv: source_a_inv.clone(),
            lambda_s,
            lambda_c,
            sigma_s,
            coupling,
            components,
            const_term,
        }
    }

    pub fn components(&self) -> &GainComponents {
        &self.components
    }

    pub fn coupling(&self) -> GainCoupling {
        self.coupling
    }

    /// The estimated transfer gain for fitted coefficients.
    pub fn delta_hat(&self, theta_t_hat: &Vector, theta_s_hat: &Vector) -> f64 {
        let lt = self.ctx.lambda_t;
        let shrink = lt * lt * self.ctx.u_t.mul_vec(theta_t_hat).norm_sq();
        let mut drift = self.g_s.mul_vec(&theta_s_hat.sub(theta_t_hat));
        drift.scaled_add(-self.lambda_c, theta_t_hat);
        let mismatch = self.v.mul_vec(&drift).norm_sq();
        shrink - mismatch + self.const_term
    }

    /// Same value via the quadratic form `z^T D z + c`. Equal to
    /// [`Self::delta_hat`] under the `PooledShift` coupling.
    pub fn delta_hat_quadratic(&self, theta_t_hat: &Vector, theta_s_hat: &Vector) -> f64 {
        let q_ss = self.d11.quad_form(theta_s_hat);
        let q_tt = self.d22.quad_form(theta_t_hat);
        let q_st = 2.0 * self.d12.mul_vec(theta_t_hat).dot(theta_s_hat);
        q_ss + q_tt + q_st + self.const_term
    }

    /// Mean of `z = [theta_s_hat; theta_t_hat]` for given task parameters:
    /// `[A_S^{-1} G_S theta_s; A_T^{-1} G_T theta_t]`.
    fn mean_z(&self, theta_s: &Vector, theta_t: &Vector) -> (Vector, Vector) {
        (
            self.s_map.mul_vec(theta_s),
            self.ctx.t_map.mul_vec(theta_t),
        )
    }

    /// Variance of the quadratic form for a given mean of `z`:
    /// `2 tr((D Sigma)^2) + 4 (D mu)^T Sigma (D mu)`.
    fn variance_for_mean(&self, mu_s: &Vector, mu_t: &Vector) -> f64 {
        let m11 = self.d11.matmul(&self.sigma_s_block);
        let m12 = self.d12.matmul(&self.sigma_t_block);
        let m21 = self.d12.t_matmul(&self.sigma_s_block);
        let m22 = self.d22.matmul(&self.sigma_t_block);
        let tr_sq = trace_product(&m11, &m11)
            + 2.0 * trace_product(&m12, &m21)
            + trace_product(&m22, &m22);

        let dmu_s = self.d11.mul_vec(mu_s).add(&self.d12.mul_vec(mu_t));
        let dmu_t = self.d12.t_mul_vec(mu_s).add(&self.d22.mul_vec(mu_t));
        let quad =
            self.sigma_s_block.quad_form(&dmu_s) + self.sigma_t_block.quad_form(&dmu_t);

        (2.0 * tr_sq + 4.0 * quad).max(0.0)
    }

    /// Plug-in variance: the closed-form variance with the fitted
    /// coefficients substituted into the mean. Clamped at zero.
    pub fn plugin_variance(&self, theta_t_hat: &Vector, theta_s_hat: &Vector) -> f64 {
        let (mu_s, mu_t) = self.mean_z(theta_s_hat, theta_t_hat);
        self.variance_for_mean(&mu_s, &mu_t)
    }

    /// Exact bias `E[gain_hat] - gain_star` under the ground truth.
    pub fn oracle_bias(&self, truth: &GroundTruth) -> f64 {
        let lt = self.ctx.lambda_t;
        let at_theta = self.ctx.a_t_inv.mul_vec(&truth.theta_t);
        let u_theta = self.ctx.u_t.mul_vec(&truth.theta_t);
        let u_at_theta = self.ctx.u_t.mul_vec(&at_theta);
        let t1 = lt.powi(4) * u_at_theta.norm_sq();
        let t2 = -2.0 * lt.powi(3) * u_theta.dot(&u_at_theta);

        let delta_theta = truth.theta_s.sub(&truth.theta_t);
        let delta_theta_b = at_theta
            .scale(lt)
            .sub(&self.a_s_inv.mul_vec(&truth.theta_s).scale(self.lambda_s));

        let mut m0 = self.g_s.mul_vec(&delta_theta);
        m0.scaled_add(-self.lambda_c, &truth.theta_t);
        let v_m0 = self.v.mul_vec(&m0);

        match self.coupling {
            GainCoupling::PooledShift => {
                let mut w = self.g_s.mul_vec(&delta_theta_b);
                w.scaled_add(self.lambda_c * lt, &at_theta);
                let v_w = self.v.mul_vec(&w);
                t1 + t2 - v_w.norm_sq() - 2.0 * v_m0.dot(&v_w)
            }
            GainCoupling::SourceRidge => {
                let mut w_minus = self.g_s.mul_vec(&delta_theta_b);
                w_minus.scaled_add(-self.lambda_c * lt, &at_theta);
                let mut w_plus = self.g_s.mul_vec(&delta_theta_b);
                w_plus.scaled_add(self.lambda_c * lt, &at_theta);
                let v_wm = self.v.mul_vec(&w_minus);
                let v_wp = self.v.mul_vec(&w_plus);
                t1 + t2 - v_wm.norm_sq() - v_m0.dot(&v_wp)
            }
        }
    }

    /// Exact moments of the estimator under the ground truth.
    pub fn oracle_moments(&self, truth: &GroundTruth) -> GainMoments {
        let (mu_s, mu_t) = self.mean_z(&truth.theta_s, &truth.theta_t);
        let variance = self.variance_for_mean(&mu_s, &mu_t);
        let bias = self.oracle_bias(truth);
        let d = self.assemble_d();
        let dim = mu_s.dim();
        let mut mu = Vector::zeros(2 * dim);
        mu.as_mut_slice()[..dim].copy_from_slice(mu_s.as_slice());
        mu.as_mut_slice()[dim..].copy_from_slice(mu_t.as_slice());
        let mut sigma = Matrix::zeros(2 * dim, 2 * dim);
        for i in 0..dim {
            for j in 0..dim {
                sigma.set(i, j, self.sigma_s_block.get(i, j));
                sigma.set(dim + i, dim + j, self.sigma_t_block.get(i, j));
            }
        }
        GainMoments {
            bias,
            d,
            mu,
            sigma,
            variance,
            delta_theta: truth.theta_s.sub(&truth.theta_t),
            delta_theta_b: self
                .ctx
                .a_t_inv
                .mul_vec(&truth.theta_t)
                .scale(self.ctx.lambda_t)
                .sub(&self.a_s_inv.mul_vec(&truth.theta_s).scale(self.lambda_s)),
        }
    }

    fn assemble_d(&self) -> Matrix {
        let dim = self.d11.rows();
        let mut d = Matrix::zeros(2 * dim, 2 * dim);
        for i in 0..dim {
            for j in 0..dim {
                d.set(i, j, self.d11.get(i, j));
                d.set(i, dim + j, self.d12.get(i, j));
                d.set(dim + i, j, self.d12.get(j, i));
                d.set(dim + i, dim + j, self.d22.get(i, j));
            }
        }
        d
    }

    /// Constant (non-random) part of the estimator.
    pub fn const_term(&self) -> f64 {
        self.const_term
    }
}

fn check_states(
    target: &TaskState,
    source: &TaskState,
    collab: &CollabState,
    val_x: &Matrix,
) -> Result<()> {
    let d = target.dim();
    if source.dim() != d || collab.a_inv.rows() != d || val_x.cols() != d {
        return Err(CoreError::InvalidInput(
            "gain estimation: state dimensions disagree".into(),
        ));
    }
    Ok(())
}

/// Estimated transfer gain from fitted task states.
pub fn estimate_gain(
    target: &TaskState,
    source: &TaskState,
    collab: &CollabState,
    val_x: &Matrix,
    sigma_t: f64,
    sigma_s: f64,
    coupling: GainCoupling,
) -> Result<f64> {
    check_states(target, source, collab, val_x)?;
    if sigma_t < 0.0 || sigma_s < 0.0 {
        return Err(CoreError::InvalidInput("noise levels must be >= 0".into()));
    }
    let ctx = TargetGainContext::new(target, val_x, sigma_t)?;
    let eval = GainEvaluator::new(
        &ctx,
        &source.gram,
        &source.a_inv,
        source.lambda,
        &collab.a_inv,
        collab.lambda,
        sigma_s,
        coupling,
    );
    Ok(eval.delta_hat(&target.theta_hat, &source.theta_hat))
}

/// Exact bias of the estimator; needs the ground truth.
pub fn oracle_bias(
    target: &TaskState,
    source: &TaskState,
    collab: &CollabState,
    val_x: &Matrix,
    truth: &GroundTruth,
    coupling: GainCoupling,
) -> Result<f64> {
    check_states(target, source, collab, val_x)?;
    let ctx = TargetGainContext::new(target, val_x, truth.sigma_t)?;
    let eval = GainEvaluator::new(
        &ctx,
        &source.gram,
        &source.a_inv,
        source.lambda,
        &collab.a_inv,
        collab.lambda,
        truth.sigma_s,
        coupling,
    );
    Ok(eval.oracle_bias(truth))
}

/// Exact moments (bias, variance, quadratic-form data); needs the truth.
pub fn oracle_variance(
    target: &TaskState,
    source: &TaskState,
    collab: &CollabState,
    val_x: &Matrix,
    truth: &GroundTruth,
    coupling: GainCoupling,
) -> Result<GainMoments> {
    check_states(target, source, collab, val_x)?;
    let ctx = TargetGainContext::new(target, val_x, truth.sigma_t)?;
    let eval = GainEvaluator::new(
        &ctx,
        &source.gram,
        &source.a_inv,
        source.lambda,
        &collab.a_inv,
        collab.lambda,
        truth.sigma_s,
        coupling,
    );
    Ok(eval.oracle_moments(truth))
}

/// Plug-in variance estimate from fitted coefficients.
pub fn plugin_variance(
    target: &TaskState,
    source: &TaskState,
    collab: &CollabState,
    val_x: &Matrix,
    sigma_t: f64,
    sigma_s: f64,
    coupling: GainCoupling,
) -> Result<f64> {
    check_states(target, source, collab, val_x)?;
    let ctx = TargetGainContext::new(target, val_x, sigma_t)?;
    let eval = GainEvaluator::new(
        &ctx,
        &source.gram,
        &source.a_inv,
        source.lambda,
        &collab.a_inv,
        collab.lambda,
        sigma_s,
        coupling,
    );
    Ok(eval.plugin_variance(&target.theta_hat, &source.theta_hat))
}

/// One-sided concentration lower bound on the true gain, holding with
/// probability at least `1 - delta_conf`:
/// `gain_hat - sqrt(variance (1 - delta) / delta) - bias`.
pub fn lower_bound(delta_hat: f64, variance: f64, bias: f64, delta_conf: f64) -> Result<f64> {
    if !(0.0 < delta_conf && delta_conf < 1.0) {
        return Err(CoreError::InvalidInput(format!(
            "confidence level must lie in (0, 1), got {delta_conf}"
        )));
    }
    if variance < 0.0 {
        return Err(CoreError::InvalidInput("variance must be >= 0".into()));
    }
    Ok(delta_hat - (variance * (1.0 - delta_conf) / delta_conf).sqrt() - bias)
}

/// Conservative decision statistic `kappa = gain_hat - alpha * sqrt(var_hat)`.
pub fn decision_statistic(delta_hat: f64, var_hat: f64, alpha: f64) -> f64 {
    delta_hat - alpha * var_hat.max(0.0).sqrt()
}
