use thiserror::Error;

/// Errors raised by algebra construction, matrix functions and verification.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("document parse error: {0}")]
    Parse(String),
    #[error("{invariant} violated: max residual {max_residual:.3e} at indices {indices:?}")]
    InvariantViolation {
        invariant: &'static str,
        max_residual: f64,
        indices: Vec<usize>,
    },
    #[error("algebra has no matrix representation")]
    MissingRepresentation,
    #[error("matrix is not in the span of the representation (residual {residual:.3e})")]
    NotInSpan { residual: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("logarithm undefined: eigenvalue {re:.6e}{im:+.6e}i on the closed negative real axis")]
    BranchCut { re: f64, im: f64 },
    #[error("matrix is not diagonalizable (eigenvalue {re:.6e}{im:+.6e}i is defective)")]
    NotDiagonalizable { re: f64, im: f64 },
    #[error("eigenvalue solver failed to converge")]
    NoConvergence,
    #[error("argument {z_re:.6e}{z_im:+.6e}i is within {distance:.3e} of the pole {pole_re:.6e}{pole_im:+.6e}i")]
    PoleProximity {
        z_re: f64,
        z_im: f64,
        pole_re: f64,
        pole_im: f64,
        distance: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Ad has eigenvalue -1; the Cayley form is undefined")]
    EigenvalueMinusOne,
    #[error("sampling failed after {attempts} attempts")]
    SamplingFailed { attempts: usize },
    #[error("composition undefined: match condition violated by {mismatch:.3e}")]
    CompositionUndefined { mismatch: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
