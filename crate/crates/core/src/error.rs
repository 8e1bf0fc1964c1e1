use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the registration pipeline.
///
/// Variants carrying a `module` name identify the stage that rejected its
/// input so front ends can report where the pipeline stopped.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value {value} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("{module}: precondition violated: {msg}")]
    Precondition { module: &'static str, msg: String },

    #[error("{module}: degenerate data: {msg}")]
    Degenerate { module: &'static str, msg: String },

    #[error("{module}: need at least {needed} curves/groups, got {got}")]
    InsufficientSample {
        module: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("curve has no variation (all increments within tolerance)")]
    NoVariation,

    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),

    #[error("bandwidth selection failed at every candidate: {}", format_diagnostics(.0))]
    Selection(Vec<(f64, String)>),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_diagnostics(diag: &[(f64, String)]) -> String {
    diag.iter()
        .map(|(nu, msg)| format!("nu={nu}: {msg}"))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn precondition(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Precondition {
            module,
            msg: msg.into(),
        }
    }

    pub(crate) fn degenerate(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Degenerate {
            module,
            msg: msg.into(),
        }
    }

    /// True for errors caused by malformed input or arguments rather than
    /// by the numerical content of otherwise well-formed data.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::Domain { .. }
                | Error::InvalidBandwidth(_)
                | Error::Parse { .. }
                | Error::Io(_)
        )
    }
}
