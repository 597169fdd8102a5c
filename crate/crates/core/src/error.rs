use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("{op}: non-finite entries")]
    NonFinite { op: &'static str },

    #[error("numerically singular system (pivot magnitude {pivot:.3e})")]
    Singular { pivot: f64 },

    /// The linearised cavity loop has unit gain: the operating point sits at
    /// (or past) an oscillation boundary.
    #[error("cavity loop is singular at or beyond the oscillation boundary (pivot magnitude {pivot:.3e})")]
    OscillationBoundary { pivot: f64 },

    #[error("degenerate cavity: {0}")]
    DegenerateCavity(String),

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("covariance violates the uncertainty principle (minimum eigenvalue {min_eigenvalue:.3e})")]
    Unphysical { min_eigenvalue: f64 },

    #[error("covariance is not symmetric (max asymmetry {asymmetry:.3e})")]
    Asymmetric { asymmetry: f64 },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Format(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config { field: field.into(), message: message.into() }
    }

    /// Process exit code for the command-line contract: 1 validation or
    /// internal failure, 2 config error, 3 physics boundary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io { .. } => 2,
            Error::OscillationBoundary { .. } | Error::DegenerateCavity(_) => 3,
            _ => 1,
        }
    }
}
