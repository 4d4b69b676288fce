use std::fmt;

use crate::error::{Error, Result};

/// Trial label: same-source (target) or different-source (non-target).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    Target,
    NonTarget,
}

impl Class {
    pub fn token(self) -> &'static str {
        match self {
            Class::Target => "tgt",
            Class::NonTarget => "non",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "tgt" => Some(Class::Target),
            "non" => Some(Class::NonTarget),
            _ => None,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::Target => f.write_str("target"),
            Class::NonTarget => f.write_str("non-target"),
        }
    }
}

/// One line of a score file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreFileRecord {
    pub label: Class,
    pub value: f64,
}

/// Labeled scores from a set of detection trials.
///
/// The same type holds raw recognizer scores and calibrated LLRs; which one
/// it is depends on where it came from. Element order carries no meaning.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialScores {
    targets: Vec<f64>,
    nontargets: Vec<f64>,
}

impl TrialScores {
    /// Builds a score set, rejecting NaN and infinities.
    pub fn new(targets: Vec<f64>, nontargets: Vec<f64>) -> Result<Self> {
        if let Some(&v) = targets.iter().chain(&nontargets).find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                what: "score",
                value: v,
            });
        }
        Ok(Self {
            targets,
            nontargets,
        })
    }

    /// Caller guarantees finiteness.
    pub(crate) fn from_finite(targets: Vec<f64>, nontargets: Vec<f64>) -> Self {
        debug_assert!(targets.iter().chain(&nontargets).all(|v| v.is_finite()));
        Self {
            targets,
            nontargets,
        }
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn nontargets(&self) -> &[f64] {
        &self.nontargets
    }

    pub fn class(&self, class: Class) -> &[f64] {
        match class {
            Class::Target => &self.targets,
            Class::NonTarget => &self.nontargets,
        }
    }

    pub fn n_targets(&self) -> usize {
        self.targets.len()
    }

    pub fn n_nontargets(&self) -> usize {
        self.nontargets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty() && self.nontargets.is_empty()
    }

    /// Errors with [`Error::EmptyClass`] unless both classes have scores.
    pub fn require_both(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::EmptyClass(Class::Target));
        }
        if self.nontargets.is_empty() {
            return Err(Error::EmptyClass(Class::NonTarget));
        }
        Ok(())
    }

    /// Applies `f` to every score, keeping labels.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            targets: self.targets.iter().map(|&s| f(s)).collect(),
            nontargets: self.nontargets.iter().map(|&s| f(s)).collect(),
        }
    }

    pub fn records(&self) -> impl Iterator<Item = ScoreFileRecord> + '_ {
        let t = self.targets.iter().map(|&value| ScoreFileRecord {
            label: Class::Target,
            value,
        });
        let n = self.nontargets.iter().map(|&value| ScoreFileRecord {
            label: Class::NonTarget,
            value,
        });
        t.chain(n)
    }

    /// Copy with each class sorted ascending, for order-insensitive comparison.
    pub fn sorted(&self) -> Self {
        let mut out = self.clone();
        out.targets.sort_by(f64::total_cmp);
        out.nontargets.sort_by(f64::total_cmp);
        out
    }
}

impl FromIterator<ScoreFileRecord> for TrialScores {
    fn from_iter<I: IntoIterator<Item = ScoreFileRecord>>(iter: I) -> Self {
        let mut out = TrialScores::default();
        for r in iter {
            match r.label {
                Class::Target => out.targets.push(r.value),
                Class::NonTarget => out.nontargets.push(r.value),
            }
        }
        out
    }
}
