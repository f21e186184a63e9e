//! Large-source asymptotics of the expected transfer gain under an
//! isotropic Gaussian design, and its sensitivities to the key parameters.
//!
//! With feature rows i.i.d. N(0, I_d), source size n large, fixed target
//! and validation sizes, and O(1) ridge parameters, Gram matrices
//! concentrate around multiples of the identity and the expected gain
//! reduces to a four-term scalar formula:
//!
//! ```text
//! E[gain(n)] ~  n_val lambda_t^2 ||theta_t||^2 / (n_t + lambda_t)^2
//!             + sigma_t^2 n_val d n_t / (n_t + lambda_t)^2
//!             - n_val ||n dtheta - lambda_c theta_t||^2 / (n_t + n + lambda_c)^2
//!             - n_val d (sigma_s^2 n + sigma_t^2 n_t) / (n_t + n + lambda_c)^2
//! ```

use crate::error::{CoreError, Result};
use crate::linalg::Vector;

/// Inputs of the asymptotic formula.
#[derive(Debug, Clone)]
pub struct AsymptoticInputs {
    pub d: usize,
    pub n_t: usize,
    pub n: usize,
    pub n_val: usize,
    pub lambda_t: f64,
    pub lambda_c: f64,
    pub theta_t: Vector,
    /// Parameter gap `theta_s - theta_t`.
    pub delta_theta: Vector,
    pub sigma_t: f64,
    pub sigma_s: f64,
}

impl AsymptoticInputs {
    fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 {
            return Err(CoreError::InvalidInput("d and n must be >= 1".into()));
        }
        if self.theta_t.dim() != self.delta_theta.dim() {
            return Err(CoreError::InvalidInput(
                "theta and delta_theta dimensions disagree".into(),
            ));
        }
        Ok(())
    }
}

/// Parameter selected for [`sensitivity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityTarget {
    LambdaC,
    DeltaTheta,
    SigmaTSq,
    SigmaSSq,
}

/// The sensitivity value: scalar for the scalar parameters, a gradient
/// vector for the parameter gap.
#[derive(Debug, Clone)]
pub enum Sensitivity {
    Scalar(f64),
    Gradient(Vector),
}

/// Evaluates the four-term large-source gain formula.
pub fn asymptotic_gain(inp: &AsymptoticInputs) -> Result<f64> {
    inp.validate()?;
    let n_val = inp.n_val as f64;
    let n_t = inp.n_t as f64;
    let n = inp.n as f64;
    let d = inp.d as f64;
    let single_denom = (n_t + inp.lambda_t).powi(2);
    let pooled_denom = (n_t + n + inp.lambda_c).powi(2);

    let shrink = n_val * inp.lambda_t * inp.lambda_t * inp.theta_t.norm_sq() / single_denom;
    let single_noise = inp.sigma_t * inp.sigma_t * n_val * d * n_t / single_denom;
    let mut drift = inp.delta_theta.scale(n);
    drift.scaled_add(-inp.lambda_c, &inp.theta_t);
    let mismatch = n_val * drift.norm_sq() / pooled_denom;
    let pooled_noise =
        n_val * d * (inp.sigma_s * inp.sigma_s * n + inp.sigma_t * inp.sigma_t * n_t) / pooled_denom;

    Ok(shrink + single_noise - mismatch - pooled_noise)
}

/// Leading-order sensitivities of the expected gain (O(1/n^2) remainders
/// dropped):
///
/// * `LambdaC`: `(2 n_val / n) (eps^2 + ||theta_t||^2 - <theta_s, theta_t>)`
/// * `DeltaTheta`: `-(n_val n / (n_t + n + lambda_c)^2) (n dtheta - lambda_c theta_t)`
/// * `SigmaTSq`: `n_val d n_t / (n_t + lambda_t)^2`
/// * `SigmaSSq`: `-n_val d n / (n_t + n + lambda_c)^2`
pub fn sensitivity(inp: &AsymptoticInputs, which: SensitivityTarget) -> Result<Sensitivity> {
    inp.validate()?;
    let n_val = inp.n_val as f64;
    let n_t = inp.n_t as f64;
    let n = inp.n as f64;
    let d = inp.d as f64;
    let pooled_denom = (n_t + n + inp.lambda_c).powi(2);

    Ok(match which {
        SensitivityTarget::LambdaC => {
            let theta_s = inp.theta_t.add(&inp.delta_theta);
            let eps_sq = inp.delta_theta.norm_sq();
            Sensitivity::Scalar(
                2.0 * n_val / n
                    * (eps_sq + inp.theta_t.norm_sq() - theta_s.dot(&inp.theta_t)),
            )
        }
        SensitivityTarget::DeltaTheta => {
            let mut drift = inp.delta_theta.scale(n);
            drift.scaled_add(-inp.lambda_c, &inp.theta_t);
            Sensitivity::Gradient(drift.scale(-n_val * n / pooled_denom))
        }
        SensitivityTarget::SigmaTSq => {
            Sensitivity::Scalar(n_val * d * n_t / (n_t + inp.lambda_t).powi(2))
        }
        SensitivityTarget::SigmaSSq => Sensitivity::Scalar(-n_val * d * n / pooled_denom),
    })
}
