use crate::{Error, Result};

/// Powers of ε entering the bilinear form, load and test norm.
///
/// Powers are formed as `exp(p · ln ε)` so that extremely small ε
/// (down to 10⁻¹²⁸ and below) never passes through an intermediate
/// overflow; a power that underflows is exactly zero and its term drops out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsWeights {
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `ε^{-α}`: σ against τ.
    pub sigma_tau: f64,
    /// `ε^{1-α} + ε^{β-α}`: σ against ∇v.
    pub sigma_grad_v: f64,
    /// `ε^{1-α+β}`: ρ against Δv.
    pub rho_laplace_v: f64,
    /// `ε^β`: trace `û_b` against `∇v·n`, and the Δv part of the load.
    pub trace_b: f64,
    /// `ε^{1-α}`: flux `σ̂_b` against v.
    pub flux_b: f64,
    /// `ε^{-2α}`: ‖τ‖² in the test norm.
    pub norm_tau: f64,
    /// `ε^{-2β}`: ‖μ‖².
    pub norm_mu: f64,
    /// `ε^{2(β-α)}`: ‖∇v‖².
    pub norm_grad_v: f64,
    /// `ε^{2(1-α)}`: ‖Δv‖².
    pub norm_laplace_v: f64,
}

pub const DEFAULT_ALPHA: f64 = 0.25;
pub const DEFAULT_BETA: f64 = 0.5;

impl EpsWeights {
    pub fn new(eps: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidArgument(format!("ε must lie in (0, 1], got {eps}")));
        }
        Self::from_ln_eps(eps.ln(), alpha, beta)
    }

    /// Balanced-norm parameters α = 1/4, β = 1/2.
    pub fn balanced(eps: f64) -> Result<Self> {
        Self::new(eps, DEFAULT_ALPHA, DEFAULT_BETA)
    }

    /// ε = 10ⁿ.
    pub fn from_exponent(n: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::from_ln_eps(n * std::f64::consts::LN_10, alpha, beta)
    }

    fn from_ln_eps(ln_eps: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(ln_eps <= 0.0) {
            return Err(Error::InvalidArgument(format!("ε must lie in (0, 1], got ln ε = {ln_eps}")));
        }
        for (name, v) in [("α", alpha), ("β", beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        let pow = |p: f64| {
            let v = (p * ln_eps).exp();
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidArgument(format!("ε^{p} overflows for ln ε = {ln_eps}")))
            }
        };
        Ok(Self {
            eps: pow(1.0)?,
            alpha,
            beta,
            sigma_tau: pow(-alpha)?,
            sigma_grad_v: pow(1.0 - alpha)? + pow(beta - alpha)?,
            rho_laplace_v: pow(1.0 - alpha + beta)?,
            trace_b: pow(beta)?,
            flux_b: pow(1.0 - alpha)?,
            norm_tau: pow(-2.0 * alpha)?,
            norm_mu: pow(-2.0 * beta)?,
            norm_grad_v: pow(2.0 * (beta - alpha))?,
            norm_laplace_v: pow(2.0 * (1.0 - alpha))?,
        })
    }

    /// `ε^α`, the scaling between σ and ∇u.
    pub fn eps_alpha(&self) -> f64 {
        1.0 / self.sigma_tau
    }
}
