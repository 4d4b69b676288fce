use thiserror::Error;

use crate::scores::Class;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variants fall into four families, see [`Error::kind`]. The CLI maps each
/// family onto its own exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing field `{0}`")]
    MissingField(&'static str),

    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("no {0} scores")]
    EmptyClass(Class),

    #[error("pooled score variance is zero")]
    DegenerateVariance,

    #[error("inverted detector: target mean {m_e} <= non-target mean {m_d}")]
    InvertedDetector { m_e: f64, m_d: f64 },

    #[error("scores are separable, logistic regression has no finite optimum")]
    Separable,

    #[error(
        "logistic regression did not converge after {iterations} iterations \
         (a={a}, b={b}, gradient norm {grad_norm:e})"
    )]
    NotConverged {
        iterations: usize,
        a: f64,
        b: f64,
        grad_norm: f64,
    },

    #[error("quadrature did not converge: estimate {estimate}, error bound {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("model with mu = 0 has no density")]
    DegenerateModel,

    #[error(
        "calibration is not CMLG-consistent: symmetry residual {symmetry:e}, \
         variance residual {variance:e}"
    )]
    Inconsistent { symmetry: f64, variance: f64 },

    #[error("need at least {needed} points in the DET region, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse failure family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input text or an argument outside its domain.
    Input,
    /// A fit or metric could not be computed from valid input.
    Compute,
    /// Reading or writing failed.
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::MissingField(_) | Error::Domain { .. } => ErrorKind::Input,
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Compute,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
