use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Frame operator (or Gram matrix) is singular at the rank tolerance.
    RankDeficient { lambda_min: f64, lambda_max: f64 },
    /// A supposedly PSD matrix has a clearly negative eigenvalue.
    NotPsd { eigenvalue: f64 },
    /// Iterative routine hit its iteration cap.
    NoConvergence { iterations: usize },
    /// An atom has (almost) no energy on the grid.
    DegenerateAtom { energy: f64 },
    /// Embedded wavelet filter failed one of its identities.
    FilterInvalid(&'static str),
    /// The Lemma 1 operator-norm bound failed, which means a numerics bug.
    BoundViolated { norm: f64, bound: f64 },
    /// Linear system is singular at the pivot tolerance.
    Singular,
    /// A state exceeded the divergence guard.
    Overflow { step: usize, magnitude: f64 },
    /// Signal length incompatible with the requested number of DWT levels.
    BadLength { len: usize, levels: usize },
    /// A rate fit met an exact (zero-error) budget.
    ZeroError { budget: usize },
    /// Window placement failed.
    Infeasible { attempts: usize },
    /// Shapes of the operands do not match.
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    /// Parameter outside its documented domain.
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::RankDeficient { lambda_min, lambda_max } => write!(
                f,
                "rank deficient: lambda_min = {lambda_min:e}, lambda_max = {lambda_max:e}"
            ),
            Error::NotPsd { eigenvalue } => {
                write!(f, "matrix is not PSD: eigenvalue {eigenvalue:e}")
            }
            Error::NoConvergence { iterations } => {
                write!(f, "no convergence after {iterations} iterations")
            }
            Error::DegenerateAtom { energy } => {
                write!(f, "degenerate atom: energy {energy:e} on the grid")
            }
            Error::FilterInvalid(what) => write!(f, "wavelet filter invalid: {what}"),
            Error::BoundViolated { norm, bound } => {
                write!(f, "operator norm {norm:e} exceeds bound {bound:e}")
            }
            Error::Singular => write!(f, "singular linear system"),
            Error::Overflow { step, magnitude } => {
                write!(f, "state diverged at step {step} (|h| = {magnitude:e})")
            }
            Error::BadLength { len, levels } => {
                write!(f, "length {len} is not a multiple of 2^{levels}")
            }
            Error::ZeroError { budget } => write!(f, "exact at budget {budget}"),
            Error::Infeasible { attempts } => {
                write!(f, "window placement infeasible after {attempts} attempts")
            }
            Error::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
