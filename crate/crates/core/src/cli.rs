//! Command-line front end.
//!
//! Exit status: 0 success, 2 bad input (usage, parse or domain errors),
//! 3 a fit or metric could not be computed, 4 I/O failure.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use crate::calibration::{
    apply_calibration, cmlg_from_stats, implied_llr_model, logreg_fit, score_stats,
};
use crate::error::{ErrorKind, Result};
use crate::evaluation::{det_curve, det_slope, evaluate, DET_HI, DET_LO};
use crate::llr_model::CalibratedGaussianLlrModel;
use crate::quadrature::Quadrature;
use crate::scores::TrialScores;
use crate::store::{parse_score_file, read_calibration, write_calibration, write_score_file};
use crate::synthgen::SynthSpec;
use crate::AffineCalibration;

#[derive(Debug, Parser)]
#[command(
    name = "llrcal",
    version,
    about = "Fit and evaluate score-to-LLR calibrations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Cmlg,
    Logreg,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Cmlg => "cmlg",
            Method::Logreg => "logreg",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit an affine calibration on labeled training scores.
    Calibrate {
        #[arg(long, value_enum, default_value = "cmlg")]
        method: Method,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Map a score file to LLRs with a stored calibration.
    Apply {
        #[arg(long)]
        cal: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute Cllr, min-Cllr, EER, DET slope and expectation checks.
    Evaluate {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Write DET operating points as CSV and print the probit-domain slope.
    Det {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DET_LO)]
        lo: f64,
        #[arg(long, default_value_t = DET_HI)]
        hi: f64,
    },
    /// Closed-form relations of the calibrated Gaussian LLR model.
    #[command(group(ArgGroup::new("param").required(true).args(["eer", "mu"])))]
    Theory {
        #[arg(long)]
        eer: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        abs_tol: f64,
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_subdivisions: usize,
    },
    /// Generate synthetic trials from the calibrated Gaussian model.
    #[command(group(ArgGroup::new("param").required(true).args(["eer", "mu"])))]
    Simulate {
        #[arg(long)]
        eer: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        ntar: usize,
        #[arg(long)]
        nnon: usize,
        #[arg(long)]
        seed: u64,
        /// Ground-truth scale; the written scores are `(x − b)/a`.
        #[arg(long, requires = "b")]
        a: Option<f64>,
        #[arg(long, requires = "a", allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Exit status for a failure family.
pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Input => 2,
        ErrorKind::Compute => 3,
        ErrorKind::Io => 4,
    }
}

/// `%g`-style formatting with six significant digits.
pub fn fmt_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        format!("{}e{exp}", trim(mantissa))
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

fn read_scores(path: &Path) -> Result<TrialScores> {
    parse_score_file(BufReader::new(File::open(path)?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn model_from(eer: Option<f64>, mu: Option<f64>) -> Result<CalibratedGaussianLlrModel> {
    match (eer, mu) {
        (Some(e), _) => CalibratedGaussianLlrModel::from_eer(e),
        (None, Some(m)) => CalibratedGaussianLlrModel::new(m),
        (None, None) => unreachable!("clap enforces one of --eer/--mu"),
    }
}

/// Runs one command, writing human-readable results to `stdout`.
pub fn run<W: Write>(cli: Cli, mut stdout: W) -> Result<()> {
    match cli.command {
        Command::Calibrate {
            method,
            alpha,
            scores,
            out,
        } => {
            let train = read_scores(&scores)?;
            let stats = score_stats(&train, alpha)?;
            let cal = match method {
                Method::Cmlg => cmlg_from_stats(&stats)?,
                Method::Logreg => logreg_fit(&train, alpha)?,
            };
            let mut f = create(&out)?;
            write_calibration(&cal, &mut f)?;
            writeln!(f, "method {}", method.name())?;
            writeln!(f, "alpha {}", crate::store::format_float(alpha))?;
            f.flush()?;

            writeln!(stdout, "method={}", method.name())?;
            writeln!(stdout, "a={}", fmt_g6(cal.a()))?;
            writeln!(stdout, "b={}", fmt_g6(cal.b()))?;
            if method == Method::Cmlg {
                let model = implied_llr_model(&cal, &stats)?;
                writeln!(stdout, "mu={}", fmt_g6(model.mu()))?;
                writeln!(stdout, "sigma={}", fmt_g6(model.sigma()))?;
                writeln!(stdout, "eer={}", fmt_g6(model.eer()))?;
            }
        }
        Command::Apply { cal, scores, out } => {
            let cal = read_calibration(BufReader::new(File::open(&cal)?))?;
            let raw = read_scores(&scores)?;
            write_score_file(&apply_calibration(&cal, &raw), create(&out)?)?;
        }
        Command::Evaluate { scores, report } => {
            let llrs = read_scores(&scores)?;
            let r = evaluate(&llrs)?;
            r.write_to(create(&report)?)?;
            writeln!(stdout, "min_cllr={}", fmt_g6(r.min_cllr))?;
            writeln!(stdout, "cllr={}", fmt_g6(r.cllr))?;
            writeln!(stdout, "eer={}", fmt_g6(r.eer))?;
        }
        Command::Det {
            scores,
            out,
            lo,
            hi,
        } => {
            let llrs = read_scores(&scores)?;
            let curve = det_curve(&llrs)?;
            curve.write_csv(create(&out)?)?;
            match det_slope(&curve, lo, hi) {
                Ok(s) => writeln!(stdout, "slope={}", fmt_g6(s))?,
                Err(e) if e.kind() == ErrorKind::Compute => writeln!(stdout, "slope=NA")?,
                Err(e) => return Err(e),
            }
        }
        Command::Theory {
            eer,
            mu,
            abs_tol,
            rel_tol,
            max_subdivisions,
        } => {
            let q = Quadrature::new(abs_tol, rel_tol, max_subdivisions)?;
            let model = model_from(eer, mu)?;
            let cllr = model.theoretical_cllr(&q)?;
            writeln!(stdout, "mu={}", fmt_g6(model.mu()))?;
            writeln!(stdout, "sigma={}", fmt_g6(model.sigma()))?;
            writeln!(stdout, "dprime={}", fmt_g6(model.dprime()))?;
            writeln!(stdout, "eer={}", fmt_g6(model.eer()))?;
            writeln!(stdout, "cllr={}", fmt_g6(cllr))?;
        }
        Command::Simulate {
            eer,
            mu,
            ntar,
            nnon,
            seed,
            a,
            b,
            out,
        } => {
            let mut spec = SynthSpec::new(model_from(eer, mu)?, ntar, nnon, seed);
            if let (Some(a), Some(b)) = (a, b) {
                spec = spec.decalibrated(AffineCalibration::new(a, b)?);
            }
            let scores = spec.generate();
            write_score_file(&scores, create(&out)?)?;
            writeln!(stdout, "n_tar={}", scores.n_targets())?;
            writeln!(stdout, "n_non={}", scores.n_nontargets())?;
        }
    }
    stdout.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g6_formatting() {
        assert_eq!(fmt_g6(0.0), "0");
        assert_eq!(fmt_g6(1.0), "1");
        assert_eq!(fmt_g6(2.5), "2.5");
        assert_eq!(fmt_g6(-10.0), "-10");
        assert_eq!(fmt_g6(0.158_655_253_9), "0.158655");
        assert_eq!(fmt_g6(123_456_789.0), "1.23457e8");
        assert_eq!(fmt_g6(999_999.7), "1e6");
        assert_eq!(fmt_g6(1.5e-7), "1.5e-7");
        assert_eq!(fmt_g6(0.000_123_4), "0.0001234");
    }

    #[test]
    fn mutually_exclusive_model_flags() {
        assert!(Cli::try_parse_from(["llrcal", "theory", "--eer", "0.1", "--mu", "2"]).is_err());
        assert!(Cli::try_parse_from(["llrcal", "theory"]).is_err());
        assert!(Cli::try_parse_from(["llrcal", "theory", "--mu", "2"]).is_ok());
        let r = Cli::try_parse_from([
            "llrcal", "simulate", "--mu", "2", "--ntar", "1", "--nnon", "1", "--seed", "0", "--a",
            "2", "--out", "x",
        ]);
        assert!(r.is_err(), "--a without --b must be rejected");
    }

    #[test]
    fn theory_degenerate_prints_no_information_values() {
        let cli = Cli::try_parse_from(["llrcal", "theory", "--eer", "0.5"]).unwrap();
        let mut out = Vec::new();
        run(cli, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("mu=0\n"), "{text}");
        assert!(text.contains("cllr=1\n"), "{text}");
    }

    #[test]
    fn theory_mu_two() {
        let cli = Cli::try_parse_from(["llrcal", "theory", "--mu", "2"]).unwrap();
        let mut out = Vec::new();
        run(cli, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "mu=2\nsigma=2\ndprime=2\neer=0.158655\ncllr=0.514056\n"
        );
    }

    #[test]
    fn domain_errors_map_to_input_exit_code() {
        let cli = Cli::try_parse_from(["llrcal", "theory", "--eer", "0.7"]).unwrap();
        let err = run(cli, Vec::new()).unwrap_err();
        assert_eq!(exit_code(err.kind()), 2);
    }
}
