//! Score-to-log-likelihood-ratio calibration for binary detectors.
//!
//! * [`calibration`] fits affine maps from raw scores to LLRs, either in
//!   closed form under a constrained Gaussian model ([`cmlg_fit`]) or by
//!   prior-weighted logistic regression ([`logreg_fit`]).
//! * [`evaluation`] scores LLR sets: Cllr, PAV min-Cllr, ROC-convex-hull EER,
//!   DET curves and slope, and the expectation identities of calibrated LLRs.
//! * [`llr_model`] holds the one-parameter Gaussian model of calibrated LLRs
//!   and its closed-form relations between EER, d′ and Cllr.
//! * [`synthgen`] draws reproducible synthetic trials from that model.
//!
//! Hot loops run on rayon when the `parallel` feature is on (the default).
//! Reductions use a fixed chunk order, so results are bitwise identical
//! with or without it and for any thread count.

// `!(x > 0.0)` is used on purpose so that NaN lands in the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod llr_model;
pub mod normal;
pub mod par;
pub mod quadrature;
pub mod scores;
pub mod store;
pub mod synthgen;

pub use calibration::{
    apply_calibration, cmlg_fit, implied_llr_model, logreg_fit, logreg_fit_with, score_stats,
    AffineCalibration, LogRegOptions, ScoreStats,
};
pub use error::{Error, ErrorKind, Result};
pub use evaluation::{
    calibration_diagnostics, det_curve, det_slope, eer_rocch, empirical_cllr, evaluate,
    min_cllr_pav, DetCurve, EvaluationReport,
};
pub use llr_model::{
    posterior_target, validate_gaussian_pair, CalibratedGaussianLlrModel, GaussianPair,
};
pub use quadrature::{expect_under_normal, Quadrature};
pub use scores::{Class, TrialScores};
pub use synthgen::{decalibrate, sample_calibrated, SynthSpec};
