//! Affine score-to-LLR calibration `x(s) = a·s + b`.
//!
//! Two fitters:
//!
//! * [`cmlg_fit`], the constrained maximum-likelihood Gaussian recipe. Scores
//!   are modelled as equal-variance Gaussians, and the calibrated LLRs must
//!   obey the self-consistency constraints of [`CalibratedGaussianLlrModel`]
//!   (symmetric means, `σ² = 2μ`). That pins `a = (m_e − m_d)/v` and
//!   `b = −a (m_e + m_d)/2` in closed form.
//! * [`logreg_fit`], prior-weighted logistic regression (minimum
//!   cross-entropy), solved by damped Newton.

use crate::error::{Error, Result};
use crate::llr_model::{sigmoid, softplus, CalibratedGaussianLlrModel};
use crate::par::{self, Exec};
use crate::scores::TrialScores;

/// Monotone increasing affine map from raw scores to LLRs (nats).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineCalibration {
    a: f64,
    b: f64,
}

impl AffineCalibration {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain {
                what: "a",
                value: a,
            });
        }
        if !b.is_finite() {
            return Err(Error::Domain {
                what: "b",
                value: b,
            });
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn apply(&self, s: f64) -> f64 {
        self.a * s + self.b
    }

    /// The map `x ↦ (x − b)/a`, expressed as `(1/a)·x − b/a`.
    pub fn inverse(&self) -> Self {
        Self {
            a: 1.0 / self.a,
            b: -self.b / self.a,
        }
    }
}

/// Sufficient statistics for CMLG.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreStats {
    pub m_e: f64,
    pub m_d: f64,
    /// `α/N_e Σ (s − m_e)² + (1−α)/N_d Σ (s − m_d)²`
    pub v: f64,
    pub n_e: usize,
    pub n_d: usize,
    pub alpha: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "alpha",
            value: alpha,
        })
    }
}

fn mean(xs: &[f64]) -> f64 {
    par::sum_by(xs, |&x| x) / xs.len() as f64
}

fn mean_sq_dev(xs: &[f64], m: f64) -> f64 {
    par::sum_by(xs, |&x| (x - m) * (x - m)) / xs.len() as f64
}

/// Class means and the α-weighted pooled variance, with population (1/N)
/// normalisation.
pub fn score_stats(scores: &TrialScores, alpha: f64) -> Result<ScoreStats> {
    check_alpha(alpha)?;
    scores.require_both()?;
    let (t, n) = (scores.targets(), scores.nontargets());
    let m_e = mean(t);
    let m_d = mean(n);
    let v = alpha * mean_sq_dev(t, m_e) + (1.0 - alpha) * mean_sq_dev(n, m_d);
    Ok(ScoreStats {
        m_e,
        m_d,
        v,
        n_e: t.len(),
        n_d: n.len(),
        alpha,
    })
}

/// Closed-form CMLG parameters from precomputed statistics.
pub fn cmlg_from_stats(stats: &ScoreStats) -> Result<AffineCalibration> {
    if !(stats.v > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    if !(stats.m_e > stats.m_d) {
        return Err(Error::InvertedDetector {
            m_e: stats.m_e,
            m_d: stats.m_d,
        });
    }
    let a = (stats.m_e - stats.m_d) / stats.v;
    let b = -a * (stats.m_e + stats.m_d) / 2.0;
    AffineCalibration::new(a, b)
}

/// Constrained maximum-likelihood Gaussian calibration.
pub fn cmlg_fit(scores: &TrialScores, alpha: f64) -> Result<AffineCalibration> {
    cmlg_from_stats(&score_stats(scores, alpha)?)
}

pub fn apply_calibration(cal: &AffineCalibration, scores: &TrialScores) -> TrialScores {
    scores.map(|s| cal.apply(s))
}

/// The calibrated LLR model implied by a CMLG-consistent calibration:
/// `μ_e = a·m_e + b`, `μ_d = a·m_d + b`, `σ² = a²v`.
///
/// Fails unless `μ_e = −μ_d` and `σ² = μ_e − μ_d` hold to within `1e-6`
/// (relative to the LLR scale).
pub fn implied_llr_model(
    cal: &AffineCalibration,
    stats: &ScoreStats,
) -> Result<CalibratedGaussianLlrModel> {
    const TOL: f64 = 1e-6;
    let mu_e = cal.apply(stats.m_e);
    let mu_d = cal.apply(stats.m_d);
    let var = cal.a * cal.a * stats.v;
    let symmetry = mu_e + mu_d;
    let variance = var - (mu_e - mu_d);
    let scale = 1f64.max(mu_e.abs() + mu_d.abs());
    if symmetry.abs() > TOL * scale || variance.abs() > TOL * scale {
        return Err(Error::Inconsistent { symmetry, variance });
    }
    CalibratedGaussianLlrModel::new(mu_e)
}

/// Settings for [`logreg_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRegOptions {
    /// Stop when the gradient ∞-norm falls to this value.
    pub grad_tol: f64,
    pub max_iterations: usize,
    /// `|a|` or `|b|` beyond this is treated as divergence on separable data.
    pub cap: f64,
    /// Weight of the `½ ridge (a² + b²)` penalty. Zero by default.
    pub ridge: f64,
    pub exec: Exec,
}

impl Default for LogRegOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            max_iterations: 200,
            cap: 1e6,
            ridge: 0.0,
            exec: Exec::default(),
        }
    }
}

/// Result of a logistic-regression fit with its optimisation trace.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegFit {
    pub calibration: AffineCalibration,
    pub iterations: usize,
    /// Objective value (nats) at the start point and after every iteration.
    pub objective_trace: Vec<f64>,
    pub grad_norm: f64,
}

/// Objective value, gradient and Hessian at one point.
#[derive(Debug, Clone, Copy)]
struct Local {
    value: f64,
    grad: [f64; 2],
    hess: [f64; 3], // aa, ab, bb
}

struct Objective<'a> {
    targets: &'a [f64],
    nontargets: &'a [f64],
    w_t: f64,
    w_n: f64,
    offset: f64,
    ridge: f64,
    exec: Exec,
}

impl<'a> Objective<'a> {
    fn new(scores: &'a TrialScores, alpha: f64, ridge: f64, exec: Exec) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain {
                what: "alpha",
                value: alpha,
            });
        }
        scores.require_both()?;
        Ok(Self {
            targets: scores.targets(),
            nontargets: scores.nontargets(),
            w_t: alpha / scores.n_targets() as f64,
            w_n: (1.0 - alpha) / scores.n_nontargets() as f64,
            offset: (alpha / (1.0 - alpha)).ln(),
            ridge,
            exec,
        })
    }

    fn value(&self, a: f64, b: f64) -> f64 {
        let c = b + self.offset;
        let t = par::map_sum(self.exec, self.targets, |&s| softplus(-(a * s + c)));
        let n = par::map_sum(self.exec, self.nontargets, |&s| softplus(a * s + c));
        self.w_t * t + self.w_n * n + 0.5 * self.ridge * (a * a + b * b)
    }

    fn local(&self, a: f64, b: f64) -> Local {
        let c = b + self.offset;
        // label y = 1 for targets, 0 for non-targets; residual p − y
        let terms = |y: f64| {
            move |&s: &f64| {
                let z = a * s + c;
                let p = sigmoid(z);
                let loss = if y > 0.5 { softplus(-z) } else { softplus(z) };
                let r = p - y;
                let h = p * (1.0 - p);
                [loss, r * s, r, h * s * s, h * s, h]
            }
        };
        let t = par::map_sum_n(self.exec, self.targets, terms(1.0));
        let n = par::map_sum_n(self.exec, self.nontargets, terms(0.0));
        let k = |i: usize| self.w_t * t[i] + self.w_n * n[i];
        Local {
            value: k(0) + 0.5 * self.ridge * (a * a + b * b),
            grad: [k(1) + self.ridge * a, k(2) + self.ridge * b],
            hess: [k(3) + self.ridge, k(4), k(5) + self.ridge],
        }
    }
}

/// Prior-weighted cross-entropy (nats) of the calibration `(a, b)`:
///
/// `α/N_e Σ_tgt softplus(−(a s + b + λ)) + (1−α)/N_d Σ_non softplus(a s + b + λ)`
///
/// with `λ = ln(α/(1−α))`. This is the quantity [`logreg_fit`] minimises
/// (without the optional ridge term).
pub fn logreg_objective(scores: &TrialScores, alpha: f64, a: f64, b: f64) -> Result<f64> {
    Ok(Objective::new(scores, alpha, 0.0, Exec::default())?.value(a, b))
}

fn inf_norm(g: [f64; 2]) -> f64 {
    g[0].abs().max(g[1].abs())
}

/// Logistic-regression calibration with the default options.
pub fn logreg_fit(scores: &TrialScores, alpha: f64) -> Result<AffineCalibration> {
    logreg_fit_with(scores, alpha, &LogRegOptions::default()).map(|f| f.calibration)
}

/// Damped Newton on the two-parameter convex cross-entropy, started from the
/// CMLG solution (or `a = 1e-3, b = 0` when CMLG is undefined).
pub fn logreg_fit_with(
    scores: &TrialScores,
    alpha: f64,
    opts: &LogRegOptions,
) -> Result<LogRegFit> {
    let obj = Objective::new(scores, alpha, opts.ridge, opts.exec)?;

    if opts.ridge == 0.0 {
        let max = |xs: &[f64]| xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = |xs: &[f64]| xs.iter().copied().fold(f64::INFINITY, f64::min);
        let (t, n) = (scores.targets(), scores.nontargets());
        if max(n) <= min(t) || max(t) <= min(n) {
            return Err(Error::Separable);
        }
    }

    let (mut a, mut b) = match cmlg_fit(scores, alpha) {
        Ok(cal) => (cal.a, cal.b),
        Err(_) => (1e-3, 0.0),
    };
    let mut here = obj.local(a, b);
    let mut trace = vec![here.value];

    for iteration in 0..=opts.max_iterations {
        let gnorm = inf_norm(here.grad);
        if gnorm <= opts.grad_tol {
            return Ok(LogRegFit {
                calibration: AffineCalibration::new(a, b).map_err(|_| Error::Separable)?,
                iterations: iteration,
                objective_trace: trace,
                grad_norm: gnorm,
            });
        }
        if iteration == opts.max_iterations {
            break;
        }

        let [haa, hab, hbb] = here.hess;
        let [ga, gb] = here.grad;
        let det = haa * hbb - hab * hab;
        let mut step = if det > 0.0 && det.is_finite() {
            [-(hbb * ga - hab * gb) / det, -(haa * gb - hab * ga) / det]
        } else {
            [-ga, -gb]
        };
        let mut slope = step[0] * ga + step[1] * gb;
        if !(slope < 0.0) {
            step = [-ga, -gb];
            slope = -(ga * ga + gb * gb);
        }

        // Armijo backtracking.
        let mut t = 1.0;
        let accepted = loop {
            let (na, nb) = (a + t * step[0], b + t * step[1]);
            let v = obj.value(na, nb);
            if v <= here.value + 1e-4 * t * slope {
                break Some((na, nb));
            }
            t *= 0.5;
            if t < 1e-12 {
                break None;
            }
        };
        let (na, nb) = match accepted {
            Some(p) => p,
            None => {
                // Objective is flat to rounding; take the Newton step only if
                // it reduces the gradient.
                let (na, nb) = (a + step[0], b + step[1]);
                let cand = obj.local(na, nb);
                if inf_norm(cand.grad) < gnorm && cand.value <= here.value {
                    (na, nb)
                } else {
                    return Err(Error::NotConverged {
                        iterations: iteration,
                        a,
                        b,
                        grad_norm: gnorm,
                    });
                }
            }
        };
        a = na;
        b = nb;
        if a.abs() > opts.cap || b.abs() > opts.cap {
            return Err(Error::Separable);
        }
        here = obj.local(a, b);
        trace.push(here.value);
    }

    Err(Error::NotConverged {
        iterations: opts.max_iterations,
        a,
        b,
        grad_norm: inf_norm(here.grad),
    })
}
