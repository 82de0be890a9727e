use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("operator set is not closed under {operation} (worst residual {residual:.3e})")]
    NotClosed {
        operation: &'static str,
        residual: f64,
    },

    /// The Wedderburn structure could not be recovered consistently.
    #[error("algebra structure: {0}")]
    Structure(String),

    #[error("not a representation: {0}")]
    NotRepresentation(String),

    /// A characterization was invoked outside of its hypotheses.
    /// `counterexample` names a fixture showing the hypothesis is needed.
    #[error("hypothesis not satisfied: {requirement}{}", counterexample_note(.counterexample))]
    Hypothesis {
        requirement: String,
        counterexample: Option<&'static str>,
    },

    /// Two routes that must agree did not. Always a bug or a tolerance misfit.
    #[error("inconsistent results: {0}")]
    Inconsistent(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

fn counterexample_note(name: &Option<&'static str>) -> String {
    name.map(|n| format!(" (see fixture `{n}`)")).unwrap_or_default()
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
