//! DET operating points, ROC-convex-hull EER and the probit-domain slope.

use std::io::Write;

use crate::error::{Error, Result};
use crate::normal::probit;
use crate::par::Exec;
use crate::scores::TrialScores;
use crate::store::format_float;

use super::pav::{pav_blocks, tie_groups};

/// Error rates when accepting every trial scoring at or above `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetPoint {
    pub threshold: f64,
    pub p_miss: f64,
    pub p_fa: f64,
    /// `(Φ⁻¹(p_fa), Φ⁻¹(p_miss))` when both rates lie strictly inside (0, 1).
    pub probit: Option<(f64, f64)>,
}

/// Empirical miss / false-alarm trade-off, thresholds strictly increasing.
///
/// The first point accepts everything (`p_miss = 0, p_fa = 1`); the last sits
/// at `+∞` and rejects everything.
#[derive(Debug, Clone, PartialEq)]
pub struct DetCurve {
    points: Vec<DetPoint>,
}

fn point(threshold: f64, p_miss: f64, p_fa: f64) -> DetPoint {
    let inside = |p: f64| p > 0.0 && p < 1.0;
    DetPoint {
        threshold,
        p_miss,
        p_fa,
        probit: (inside(p_miss) && inside(p_fa)).then(|| (probit(p_fa), probit(p_miss))),
    }
}

impl DetCurve {
    pub fn points(&self) -> &[DetPoint] {
        &self.points
    }

    /// Writes `threshold,p_miss,p_fa` rows under a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "threshold,p_miss,p_fa")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{}",
                format_float(p.threshold),
                format_float(p.p_miss),
                format_float(p.p_fa)
            )?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Sweeps the decision threshold over every distinct score. Tied scores move
/// together, giving one diagonal step per tie group.
pub fn det_curve(scores: &TrialScores) -> Result<DetCurve> {
    scores.require_both()?;
    let groups = tie_groups(scores, Exec::default());
    let (nt, nn) = (scores.n_targets() as f64, scores.n_nontargets() as f64);
    let mut points = Vec::with_capacity(groups.len() + 1);
    let (mut below_t, mut below_n) = (0u64, 0u64);
    for g in &groups {
        points.push(point(
            g.score,
            below_t as f64 / nt,
            (nn - below_n as f64) / nn,
        ));
        below_t += g.n_tar;
        below_n += g.n_non;
    }
    points.push(point(f64::INFINITY, 1.0, 0.0));
    Ok(DetCurve { points })
}

/// Equal error rate of the ROC convex hull.
///
/// Hull vertices come from the PAV blocks. The EER is where the hull crosses
/// `p_miss = p_fa`, interpolating linearly along the crossing segment.
pub fn eer_rocch(scores: &TrialScores) -> Result<f64> {
    scores.require_both()?;
    let blocks = pav_blocks(&tie_groups(scores, Exec::default()));
    let (nt, nn) = (scores.n_targets() as f64, scores.n_nontargets() as f64);

    let (mut cum_t, mut cum_n) = (0u64, 0u64);
    let mut prev = (0.0f64, 1.0f64); // (p_miss, p_fa)
    for b in &blocks {
        cum_t += b.n_tar;
        cum_n += b.n_non;
        let cur = (cum_t as f64 / nt, (nn - cum_n as f64) / nn);
        if cur.0 >= cur.1 {
            let (pm0, pf0) = prev;
            let (pm1, pf1) = cur;
            let denom = (pm1 - pm0) - (pf1 - pf0);
            if denom <= 0.0 {
                return Ok(pm0);
            }
            let t = (pf0 - pm0) / denom;
            return Ok(pm0 + t * (pm1 - pm0));
        }
        prev = cur;
    }
    unreachable!("the final hull vertex has p_miss = 1 >= p_fa = 0")
}

/// Least-squares slope of `Φ⁻¹(p_miss)` against `Φ⁻¹(p_fa)` over the points
/// whose error rates both lie in `[lo, hi]`.
pub fn det_slope(curve: &DetCurve, lo: f64, hi: f64) -> Result<f64> {
    if !(lo > 0.0 && lo < hi && hi < 1.0) {
        return Err(Error::Domain {
            what: "DET region",
            value: if lo > 0.0 { hi } else { lo },
        });
    }
    let inside = |p: f64| p >= lo && p <= hi;
    let xy: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| inside(p.p_miss) && inside(p.p_fa))
        .filter_map(|p| p.probit)
        .collect();
    if xy.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: xy.len(),
        });
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: 1,
        });
    }
    Ok(sxy / sxx)
}
