use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text. `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Bad index, shape mismatch or invalid parameter.
    #[error("{0}")]
    Domain(String),

    #[error("no convergence after {iterations} iterations (best estimate {best_estimate}, residual {residual:.3e})")]
    Convergence {
        iterations: usize,
        best_estimate: f64,
        residual: f64,
    },

    /// `I - alpha*H` is singular or too badly conditioned to trust.
    #[error("ill-conditioned system (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    /// The resolvent series does not converge for the given damping.
    #[error("resolvent series diverges: alpha = {alpha} is outside the convergence range")]
    Divergent { alpha: f64 },

    /// Result of an overflowing dense computation.
    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("dense evaluation needs {size}x{size} but the cap is {cap}; use the Krylov path")]
    SizeCap { size: usize, cap: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the `mlcent` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) => 2,
            Error::Domain(_) | Error::Divergent { .. } => 3,
            Error::Convergence { .. } | Error::IllConditioned { .. } | Error::Overflow(_) => 4,
            Error::SizeCap { .. } => 5,
        }
    }
}
