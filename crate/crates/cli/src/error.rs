use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

/// Exit code for a report whose cases ran but missed their required digits.
pub const EXIT_MISMATCH: i32 = 1;
/// Exit code for unreadable or invalid configuration and arguments.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for a numerical failure in at least one case.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{origin}:{line}: {message}")]
    Config {
        origin: String,
        line: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("case {case}: {source}")]
    Numerical {
        case: String,
        #[source]
        source: threecenter_core::Error,
    },

    /// Two Legendre strategies produced values that differ beyond the
    /// target precision.
    #[error("Legendre strategies disagree: {first} gives {a}, {second} gives {b} ({digits} matching digits)")]
    StrategyMismatch {
        first: String,
        second: String,
        a: String,
        b: String,
        digits: u32,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config { .. } | BenchError::Invalid(_) | BenchError::Io { .. } | BenchError::Csv(_) => EXIT_CONFIG,
            BenchError::Numerical { .. } | BenchError::StrategyMismatch { .. } => EXIT_NUMERICAL,
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }
}
