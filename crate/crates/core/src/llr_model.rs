//! Gaussian model of calibrated log-likelihood-ratios.
//!
//! If non-target LLRs are Gaussian and the LLR is its own log-likelihood-ratio
//! (`e(x) = eˣ d(x)`), the target LLRs are Gaussian too, with the same
//! variance and opposite mean, and `σ² = 2μ`. The whole model therefore has a
//! single parameter `μ`, the target mean in nats.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::normal::{normal_log_pdf, normal_pdf, std_normal_cdf, std_normal_quantile};
use crate::quadrature::{expect_under_normal, Quadrature};

/// `ln(1 + eˣ)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

/// Logistic sigmoid `1 / (1 + e⁻ˣ)`, stable for any finite `x`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// Log-odds `ln(p / (1 - p))`.
pub fn logit(p: f64) -> f64 {
    libm::log(p) - libm::log1p(-p)
}

/// Calibrated Gaussian LLR model: targets `N(μ, 2μ)`, non-targets `N(-μ, 2μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedGaussianLlrModel {
    mu: f64,
}

impl CalibratedGaussianLlrModel {
    /// `mu` must be finite and non-negative. `mu = 0` is the uninformative
    /// system whose LLR is always zero.
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::Domain {
                what: "mu",
                value: mu,
            });
        }
        Ok(Self { mu })
    }

    /// Model with the given equal error rate: `μ = 2 [Φ⁻¹(eer)]²`.
    pub fn from_eer(eer: f64) -> Result<Self> {
        if !(eer > 0.0 && eer <= 0.5) {
            return Err(Error::Domain {
                what: "eer",
                value: eer,
            });
        }
        let q = std_normal_quantile(eer)?;
        Self::new(2.0 * q * q)
    }

    /// Target mean (nats).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Common standard deviation `√(2μ)`.
    pub fn sigma(&self) -> f64 {
        libm::sqrt(2.0 * self.mu)
    }

    pub fn target_mean(&self) -> f64 {
        self.mu
    }

    pub fn nontarget_mean(&self) -> f64 {
        -self.mu
    }

    /// `Φ(-μ/σ)`; the EER threshold sits at LLR 0.
    pub fn eer(&self) -> f64 {
        if self.mu == 0.0 {
            return 0.5;
        }
        std_normal_cdf(-self.mu / self.sigma())
    }

    /// `d′ = 2μ/σ`, which equals `σ` for this model.
    pub fn dprime(&self) -> f64 {
        if self.mu == 0.0 {
            return 0.0;
        }
        2.0 * self.mu / self.sigma()
    }

    fn require_density(&self) -> Result<f64> {
        if self.mu == 0.0 {
            Err(Error::DegenerateModel)
        } else {
            Ok(self.sigma())
        }
    }

    pub fn target_pdf(&self, x: f64) -> Result<f64> {
        normal_pdf(x, self.mu, self.require_density()?)
    }

    pub fn nontarget_pdf(&self, x: f64) -> Result<f64> {
        normal_pdf(x, -self.mu, self.require_density()?)
    }

    /// Log-likelihood-ratio of an observed LLR `x` under this model. Equals
    /// `x` for every valid model; evaluated in the log domain so that it
    /// stays finite far into the tails.
    pub fn llr_of_llr(&self, x: f64) -> Result<f64> {
        let sigma = self.require_density()?;
        Ok(normal_log_pdf(x, self.mu, sigma)? - normal_log_pdf(x, -self.mu, sigma)?)
    }

    /// Cllr in bits of a system whose LLRs follow this model:
    /// `E[log₂(1 + e⁻ˣ)]` over targets (non-targets contribute the same by
    /// symmetry).
    pub fn theoretical_cllr(&self, q: &Quadrature) -> Result<f64> {
        if self.mu == 0.0 {
            return Ok(1.0);
        }
        let nats = expect_under_normal(|x| softplus(-x), self.mu, self.sigma(), q)?;
        Ok(nats / LN_2)
    }
}

pub fn from_eer(eer: f64) -> Result<CalibratedGaussianLlrModel> {
    CalibratedGaussianLlrModel::from_eer(eer)
}

pub fn eer_of_model(model: &CalibratedGaussianLlrModel) -> f64 {
    model.eer()
}

pub fn dprime(model: &CalibratedGaussianLlrModel) -> f64 {
    model.dprime()
}

pub fn theoretical_cllr(model: &CalibratedGaussianLlrModel, q: &Quadrature) -> Result<f64> {
    model.theoretical_cllr(q)
}

/// Posterior probability of the target hypothesis given LLR `x` and prior
/// `P(target) = prior`: `σ(x + logit(prior))`.
pub fn posterior_target(x: f64, prior: f64) -> Result<f64> {
    if !(prior > 0.0 && prior < 1.0) {
        return Err(Error::Domain {
            what: "prior",
            value: prior,
        });
    }
    if x.is_nan() {
        return Err(Error::Domain {
            what: "llr",
            value: x,
        });
    }
    Ok(sigmoid(x + logit(prior)))
}

/// Unconstrained candidate for the non-target LLR distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPair {
    pub mu_d: f64,
    pub sigma_d: f64,
}

impl GaussianPair {
    pub fn new(mu_d: f64, sigma_d: f64) -> Result<Self> {
        if !(sigma_d > 0.0) || !sigma_d.is_finite() {
            return Err(Error::Domain {
                what: "sigma_d",
                value: sigma_d,
            });
        }
        if !mu_d.is_finite() {
            return Err(Error::Domain {
                what: "mu_d",
                value: mu_d,
            });
        }
        Ok(Self { mu_d, sigma_d })
    }
}

/// Outcome of [`validate_gaussian_pair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDiagnosis {
    /// `∫ eˣ N(x | μ_d, σ_d) dx = exp(μ_d + σ_d²/2)`; must be 1 for the
    /// implied target density to normalise.
    pub target_mass: f64,
    /// `μ_d + σ_d²/2`, zero exactly when `-2μ_d = σ_d²`.
    pub residual: f64,
    pub implied_target_mean: f64,
    pub implied_target_sigma: f64,
    pub pass: bool,
}

/// Checks whether a Gaussian non-target LLR density admits a proper target
/// density `eˣ d(x)`.
pub fn validate_gaussian_pair(pair: &GaussianPair, tol: f64) -> PairDiagnosis {
    let GaussianPair { mu_d, sigma_d } = *pair;
    let residual = mu_d + 0.5 * sigma_d * sigma_d;
    PairDiagnosis {
        target_mass: libm::exp(residual),
        residual,
        implied_target_mean: mu_d + sigma_d * sigma_d,
        implied_target_sigma: sigma_d,
        pass: residual.abs() <= tol,
    }
}
