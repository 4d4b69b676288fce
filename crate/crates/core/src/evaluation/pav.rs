//! Pool-adjacent-violators over pooled, tie-grouped trials.
//!
//! Tied scores are merged into one point before pooling, so the result does
//! not depend on the order in which tied trials appear. Pooling decisions
//! compare integer counts, which makes the block structure exact and
//! independent of the class weighting: the same blocks give the optimal
//! monotone posteriors at any prior and the vertices of the ROC convex hull.

use crate::llr_model::logit;
use crate::par::{self, Exec};
use crate::scores::TrialScores;

/// Trials sharing one score value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TieGroup {
    pub score: f64,
    pub n_tar: u64,
    pub n_non: u64,
}

/// A maximal run of tie groups sharing one fitted posterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PavBlock {
    pub lo: f64,
    pub hi: f64,
    pub n_tar: u64,
    pub n_non: u64,
}

impl PavBlock {
    /// Posterior at effective prior ½, i.e. each class carrying equal mass.
    pub fn balanced_posterior(&self, total_tar: u64, total_non: u64) -> f64 {
        let wt = self.n_tar as f64 / total_tar as f64;
        let wn = self.n_non as f64 / total_non as f64;
        wt / (wt + wn)
    }
}

/// Pooled trials sorted ascending, ties merged.
pub fn tie_groups(scores: &TrialScores, exec: Exec) -> Vec<TieGroup> {
    let mut pooled: Vec<(f64, bool)> = scores
        .targets()
        .iter()
        .map(|&s| (s, true))
        .chain(scores.nontargets().iter().map(|&s| (s, false)))
        .collect();
    par::sort_by_key_f64(exec, &mut pooled, |p| p.0);

    let mut groups: Vec<TieGroup> = Vec::new();
    for (s, is_tar) in pooled {
        match groups.last_mut() {
            Some(g) if g.score == s => {}
            _ => groups.push(TieGroup {
                score: s,
                n_tar: 0,
                n_non: 0,
            }),
        }
        let g = groups.last_mut().unwrap();
        if is_tar {
            g.n_tar += 1;
        } else {
            g.n_non += 1;
        }
    }
    groups
}

/// Target fraction of block `x` is at least that of block `y`. Equal
/// fractions are pooled too, so blocks are maximal and strictly increasing.
fn must_pool(x: &PavBlock, y: &PavBlock) -> bool {
    // x.t/(x.t+x.n) ≥ y.t/(y.t+y.n)  ⇔  x.t·y.n ≥ y.t·x.n
    (x.n_tar as u128) * (y.n_non as u128) >= (y.n_tar as u128) * (x.n_non as u128)
}

/// Nondecreasing step fit of the target indicator over ascending score.
pub fn pav_blocks(groups: &[TieGroup]) -> Vec<PavBlock> {
    let mut stack: Vec<PavBlock> = Vec::with_capacity(groups.len());
    for g in groups {
        let mut cur = PavBlock {
            lo: g.score,
            hi: g.score,
            n_tar: g.n_tar,
            n_non: g.n_non,
        };
        while let Some(prev) = stack.last() {
            if !must_pool(prev, &cur) {
                break;
            }
            let prev = stack.pop().unwrap();
            cur = PavBlock {
                lo: prev.lo,
                hi: cur.hi,
                n_tar: prev.n_tar + cur.n_tar,
                n_non: prev.n_non + cur.n_non,
            };
        }
        stack.push(cur);
    }
    stack
}

/// Minimum balanced cross-entropy (nats) achievable by any monotone
/// nondecreasing score-to-posterior map, from PAV blocks. Terms with zero
/// weight contribute nothing, so separable blocks cost exactly zero.
pub(crate) fn min_cross_entropy_nats(blocks: &[PavBlock], total_tar: u64, total_non: u64) -> f64 {
    let (nt, nn) = (total_tar as f64, total_non as f64);
    blocks
        .iter()
        .map(|b| {
            let wt = b.n_tar as f64 / nt;
            let wn = b.n_non as f64 / nn;
            let w = wt + wn;
            let mut c = 0.0;
            if wt > 0.0 {
                c -= wt * (wt / w).ln();
            }
            if wn > 0.0 {
                c -= wn * (wn / w).ln();
            }
            c
        })
        .sum::<f64>()
        / 2.0
}

/// Replaces every trial's score by its PAV-optimal LLR at prior ½. Posteriors
/// are clipped to `[ε, 1−ε]` with `ε = 1/(2(N_e+N_d))` so separable segments
/// map to finite LLRs.
pub fn pav_llrs(scores: &TrialScores) -> TrialScores {
    let exec = Exec::default();
    let groups = tie_groups(scores, exec);
    let blocks = pav_blocks(&groups);
    let (nt, nn) = (scores.n_targets() as u64, scores.n_nontargets() as u64);
    let eps = 0.5 / (nt + nn) as f64;
    let llr_of = |s: f64| {
        let i = blocks.partition_point(|b| b.hi < s);
        let p = blocks[i].balanced_posterior(nt, nn).clamp(eps, 1.0 - eps);
        logit(p)
    };
    TrialScores::from_finite(
        scores.targets().iter().map(|&s| llr_of(s)).collect(),
        scores.nontargets().iter().map(|&s| llr_of(s)).collect(),
    )
}
