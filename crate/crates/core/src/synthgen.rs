//! Deterministic synthetic trials with known ground truth.
//!
//! Uniforms come from the SplitMix64 sequence: draw `i` (counting from zero)
//! is the SplitMix64 finaliser applied to `seed + (i + 1)·0x9E3779B97F4A7C15`.
//! That makes every draw addressable by its index, so draws can be computed
//! in any order or in parallel and still land in the same place. The top 53
//! bits give `u = (k + ½)·2⁻⁵³ ∈ (0, 1)`, and normals are `Φ⁻¹(u)`. Targets
//! take indices `0..n_tar`, non-targets the following `n_non` indices.

use crate::calibration::AffineCalibration;
use crate::error::{Error, Result};
use crate::llr_model::CalibratedGaussianLlrModel;
use crate::normal::std_normal_quantile;
use crate::par::{self, Exec};
use crate::scores::TrialScores;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output for draw `index` of stream `seed`.
pub fn splitmix64(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform on the open interval (0, 1).
pub fn uniform(seed: u64, index: u64) -> f64 {
    ((splitmix64(seed, index) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal draw `index` of stream `seed`.
pub fn std_normal(seed: u64, index: u64) -> f64 {
    std_normal_quantile(uniform(seed, index)).expect("uniform is inside (0, 1)")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub model: CalibratedGaussianLlrModel,
    pub n_tar: usize,
    pub n_non: usize,
    pub seed: u64,
    /// Ground-truth calibration; when present the output is raw scores
    /// `s = (x − b)/a` instead of LLRs `x`.
    pub decal: Option<AffineCalibration>,
}

impl SynthSpec {
    pub fn new(model: CalibratedGaussianLlrModel, n_tar: usize, n_non: usize, seed: u64) -> Self {
        Self {
            model,
            n_tar,
            n_non,
            seed,
            decal: None,
        }
    }

    pub fn with_eer(eer: f64, n_tar: usize, n_non: usize, seed: u64) -> Result<Self> {
        Ok(Self::new(
            CalibratedGaussianLlrModel::from_eer(eer)?,
            n_tar,
            n_non,
            seed,
        ))
    }

    pub fn decalibrated(mut self, cal: AffineCalibration) -> Self {
        self.decal = Some(cal);
        self
    }

    /// Calibrated LLRs, then the inverse ground-truth map if one is set.
    pub fn generate(&self) -> TrialScores {
        let llrs = sample_calibrated(self);
        match &self.decal {
            Some(cal) => decalibrate(&llrs, cal),
            None => llrs,
        }
    }
}

/// `n_tar` draws from `N(μ, σ²)` and `n_non` from `N(−μ, σ²)`.
pub fn sample_calibrated(spec: &SynthSpec) -> TrialScores {
    sample_calibrated_with(Exec::default(), spec)
}

pub fn sample_calibrated_with(exec: Exec, spec: &SynthSpec) -> TrialScores {
    let (mu, sigma) = (spec.model.mu(), spec.model.sigma());
    let seed = spec.seed;
    let n_tar = spec.n_tar as u64;
    let targets = par::map_range(exec, n_tar, |i| mu + sigma * std_normal(seed, i));
    let nontargets = par::map_range(exec, spec.n_non as u64, |i| {
        -mu + sigma * std_normal(seed, n_tar + i)
    });
    TrialScores::from_finite(targets, nontargets)
}

/// Raw scores whose ground-truth calibration is `cal`: `s = (x − b)/a`.
pub fn decalibrate(llrs: &TrialScores, cal: &AffineCalibration) -> TrialScores {
    let (a, b) = (cal.a(), cal.b());
    llrs.map(|x| (x - b) / a)
}

/// Samples an arbitrary (unconstrained) Gaussian pair, for control
/// experiments such as unequal-variance DET curves.
pub fn sample_gaussian_pair(
    target: (f64, f64),
    nontarget: (f64, f64),
    n_tar: usize,
    n_non: usize,
    seed: u64,
) -> Result<TrialScores> {
    for (what, s) in [
        ("target sigma", target.1),
        ("non-target sigma", nontarget.1),
    ] {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Domain { what, value: s });
        }
    }
    let exec = Exec::default();
    let nt = n_tar as u64;
    let t = par::map_range(exec, nt, |i| target.0 + target.1 * std_normal(seed, i));
    let n = par::map_range(exec, n_non as u64, |i| {
        nontarget.0 + nontarget.1 * std_normal(seed, nt + i)
    });
    TrialScores::new(t, n)
}
