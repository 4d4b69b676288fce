//! Calibration and discrimination metrics over LLR-valued trial scores.
//!
//! Everything is computed in nats and converted to bits only when a Cllr
//! value is returned.

mod det;
mod pav;

use std::f64::consts::LN_2;
use std::io::Write;

pub use det::{det_curve, det_slope, eer_rocch, DetCurve, DetPoint};
pub use pav::{pav_blocks, pav_llrs, tie_groups, PavBlock, TieGroup};

use crate::error::Result;
use crate::llr_model::softplus;
use crate::par::{self, Exec};
use crate::scores::TrialScores;
use crate::store::format_float;

/// Default DET region for slope fits: 0.1 % to 50 %.
pub const DET_LO: f64 = 0.001;
pub const DET_HI: f64 = 0.5;

/// Balanced cross-entropy in bits:
/// `½ [mean_tgt log₂(1 + e⁻ˣ) + mean_non log₂(1 + eˣ)]`.
pub fn empirical_cllr(llrs: &TrialScores) -> Result<f64> {
    empirical_cllr_with(Exec::default(), llrs)
}

pub fn empirical_cllr_with(exec: Exec, llrs: &TrialScores) -> Result<f64> {
    llrs.require_both()?;
    let t = par::map_sum(exec, llrs.targets(), |&x| softplus(-x)) / llrs.n_targets() as f64;
    let n = par::map_sum(exec, llrs.nontargets(), |&x| softplus(x)) / llrs.n_nontargets() as f64;
    Ok(0.5 * (t + n) / LN_2)
}

/// Cllr after the best monotone recalibration of the scores (PAV).
pub fn min_cllr_pav(llrs: &TrialScores) -> Result<f64> {
    llrs.require_both()?;
    let blocks = pav_blocks(&tie_groups(llrs, Exec::default()));
    let nats =
        pav::min_cross_entropy_nats(&blocks, llrs.n_targets() as u64, llrs.n_nontargets() as u64);
    Ok(nats / LN_2)
}

/// Sample checks of the expectation identities a calibrated LLR must obey:
/// `E[eˣ | non-target] = 1`, `E[e⁻ˣ | target] = 1`, and the Jensen signs
/// `E[x | target] ≥ 0`, `E[x | non-target] ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationDiagnostics {
    pub expect_r_nontarget: f64,
    pub expect_inv_r_target: f64,
    pub mean_target_llr: f64,
    pub mean_nontarget_llr: f64,
    pub expect_r_ok: bool,
    pub expect_inv_r_ok: bool,
    pub target_sign_ok: bool,
    pub nontarget_sign_ok: bool,
}

impl CalibrationDiagnostics {
    pub fn pass(&self) -> bool {
        self.expect_r_ok && self.expect_inv_r_ok && self.target_sign_ok && self.nontarget_sign_ok
    }
}

pub fn calibration_diagnostics(llrs: &TrialScores, tol: f64) -> Result<CalibrationDiagnostics> {
    llrs.require_both()?;
    let (nt, nn) = (llrs.n_targets() as f64, llrs.n_nontargets() as f64);
    let expect_r_nontarget = par::sum_by(llrs.nontargets(), |&x| libm::exp(x)) / nn;
    let expect_inv_r_target = par::sum_by(llrs.targets(), |&x| libm::exp(-x)) / nt;
    let mean_target_llr = par::sum_by(llrs.targets(), |&x| x) / nt;
    let mean_nontarget_llr = par::sum_by(llrs.nontargets(), |&x| x) / nn;
    Ok(CalibrationDiagnostics {
        expect_r_nontarget,
        expect_inv_r_target,
        mean_target_llr,
        mean_nontarget_llr,
        expect_r_ok: (expect_r_nontarget - 1.0).abs() <= tol,
        expect_inv_r_ok: (expect_inv_r_target - 1.0).abs() <= tol,
        target_sign_ok: mean_target_llr >= 0.0,
        nontarget_sign_ok: mean_nontarget_llr <= 0.0,
    })
}

/// All metrics for one LLR set.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub n_e: usize,
    pub n_d: usize,
    pub cllr: f64,
    pub min_cllr: f64,
    pub eer: f64,
    /// `None` when fewer than two DET points fall in the default region.
    pub det_slope: Option<f64>,
    pub mean_target_llr: f64,
    pub mean_nontarget_llr: f64,
    pub expect_r_nontarget: f64,
    pub expect_inv_r_target: f64,
}

impl EvaluationReport {
    /// Flat `key value` lines at full precision. A missing DET slope is
    /// written as `NA`.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n_e {}", self.n_e)?;
        writeln!(out, "n_d {}", self.n_d)?;
        for (k, v) in [
            ("cllr", Some(self.cllr)),
            ("min_cllr", Some(self.min_cllr)),
            ("eer", Some(self.eer)),
            ("det_slope", self.det_slope),
            ("mean_target_llr", Some(self.mean_target_llr)),
            ("mean_nontarget_llr", Some(self.mean_nontarget_llr)),
            ("expect_r_nontarget", Some(self.expect_r_nontarget)),
            ("expect_inv_r_target", Some(self.expect_inv_r_target)),
        ] {
            match v {
                Some(v) => writeln!(out, "{k} {}", format_float(v))?,
                None => writeln!(out, "{k} NA")?,
            }
        }
        out.flush()?;
        Ok(())
    }
}

pub fn evaluate(llrs: &TrialScores) -> Result<EvaluationReport> {
    llrs.require_both()?;
    let diag = calibration_diagnostics(llrs, f64::INFINITY)?;
    let curve = det_curve(llrs)?;
    Ok(EvaluationReport {
        n_e: llrs.n_targets(),
        n_d: llrs.n_nontargets(),
        cllr: empirical_cllr(llrs)?,
        min_cllr: min_cllr_pav(llrs)?,
        eer: eer_rocch(llrs)?,
        det_slope: det_slope(&curve, DET_LO, DET_HI).ok(),
        mean_target_llr: diag.mean_target_llr,
        mean_nontarget_llr: diag.mean_nontarget_llr,
        expect_r_nontarget: diag.expect_r_nontarget,
        expect_inv_r_target: diag.expect_inv_r_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn ts(t: &[f64], n: &[f64]) -> TrialScores {
        TrialScores::new(t.to_vec(), n.to_vec()).unwrap()
    }

    #[test]
    fn cllr_examples() {
        assert_eq!(empirical_cllr(&ts(&[0.0, 0.0], &[0.0])).unwrap(), 1.0);
        let l3 = 3f64.ln();
        let c = empirical_cllr(&ts(&[l3], &[-l3])).unwrap();
        assert!((c - (4.0f64 / 3.0).log2()).abs() < 1e-15);
        assert!((c - 0.415_037_499_278_843_8).abs() < 1e-12);
        let c = empirical_cllr(&ts(&[1000.0, -1000.0], &[1000.0])).unwrap();
        assert!(c.is_finite());
        assert!(matches!(
            empirical_cllr(&ts(&[], &[1.0])),
            Err(Error::EmptyClass(_))
        ));
    }

    #[test]
    fn min_cllr_examples() {
        assert_eq!(min_cllr_pav(&ts(&[1.0], &[-1.0])).unwrap(), 0.0);
        assert_eq!(min_cllr_pav(&ts(&[-1.0], &[1.0])).unwrap(), 1.0);
        assert!(min_cllr_pav(&ts(&[1.0], &[])).is_err());
    }

    #[test]
    fn min_cllr_is_order_invariant() {
        let t = [0.3, 2.0, 1.1, -0.5, 0.9, 0.9, 3.0];
        let n = [-1.0, 0.4, 1.0, -2.0, 0.9, 2.5];
        let a = min_cllr_pav(&ts(&t, &n)).unwrap();
        let mut t2 = t;
        t2.reverse();
        let mut n2 = n;
        n2.rotate_left(2);
        assert_eq!(a, min_cllr_pav(&ts(&t2, &n2)).unwrap());
    }

    #[test]
    fn diagnostics_examples() {
        let d = calibration_diagnostics(&ts(&[0.0], &[0.0, 0.0]), 1e-12).unwrap();
        assert_eq!(d.expect_r_nontarget, 1.0);
        assert_eq!(d.expect_inv_r_target, 1.0);
        assert!(d.pass());
        let d = calibration_diagnostics(&ts(&[-5.0, -5.0], &[0.0]), 1e9).unwrap();
        assert!(!d.target_sign_ok);
        assert!(!d.pass());
    }

    #[test]
    fn degenerate_report() {
        let r = evaluate(&ts(&[0.0; 5], &[0.0; 7])).unwrap();
        assert!((r.cllr - 1.0).abs() < 1e-15);
        assert_eq!(r.min_cllr, 1.0);
        assert_eq!(r.eer, 0.5);
        assert_eq!(r.det_slope, None);
        assert_eq!((r.n_e, r.n_d), (5, 7));
        let mut buf = Vec::new();
        r.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("det_slope NA\n"));
        assert!(text.starts_with("n_e 5\nn_d 7\ncllr "));
    }
}
