use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across the crate.
///
/// Each variant maps to a stable machine-readable code (see [`Error::code`]),
/// which the command-line front end prints alongside the message.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed input: dangling references, bad files, wrong shapes.
    #[error("input error: {0}")]
    Input(String),
    /// A documented precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A geometric construction could not be carried out.
    #[error("construction error: {0}")]
    Construction(String),
    /// Degenerate geometry (zero-length normals, collapsed corners).
    #[error("geometry error: {0}")]
    Geometry(String),
    /// A numerical method failed (blow-up, non-convergence).
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A computation completed but missed its accuracy target.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// A power-law fit did not meet its quality threshold.
    #[error("classification error: {0}")]
    Classification(String),
    /// The requested regime is not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable, machine-parsable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "E_DOMAIN",
            Error::Input(_) => "E_INPUT",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::Construction(_) => "E_CONSTRUCTION",
            Error::Geometry(_) => "E_GEOMETRY",
            Error::Numeric(_) => "E_NUMERIC",
            Error::Accuracy(_) => "E_ACCURACY",
            Error::Classification(_) => "E_CLASSIFICATION",
            Error::Unsupported(_) => "E_UNSUPPORTED",
            Error::Parse(_) => "E_PARSE",
            Error::Io(_) => "E_IO",
        }
    }

    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Input(_)
                | Error::Precondition(_)
                | Error::Construction(_)
                | Error::Unsupported(_)
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}

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
