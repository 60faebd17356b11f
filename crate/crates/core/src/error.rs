use thiserror::Error;

/// Errors produced by the library.
///
/// Variants map onto the CLI exit codes: validation-type errors exit 2,
/// numerical failures exit 3 and truncation contamination exits 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("numerical error: {message} (residual {residual:.3e})")]
    Numerical { message: String, residual: f64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error(
        "truncation contamination: query at vertex {center} with radius {radius} \
         reaches boundary vertex {boundary_vertex}; enlarge the network"
    )]
    Contamination {
        center: usize,
        radius: usize,
        boundary_vertex: usize,
    },

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, residual: f64) -> Self {
        Error::Numerical {
            message: msg.into(),
            residual,
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical { .. } | Error::Estimation(_) => 3,
            Error::Contamination { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
