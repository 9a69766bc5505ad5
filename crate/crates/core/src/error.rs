use thiserror::Error;

/// Errors raised by the arithmetic kernel and the verification engine.
///
/// Relation failures are never errors: they are reported as failing
/// verdicts. Errors signal that a computation could not be carried out.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("degenerate scalar: {0}")]
    DegenerateScalar(String),
    #[error("pole at expansion point: {0}")]
    PoleAtExpansionPoint(String),
    #[error("window underflow: {0}")]
    WindowUnderflow(String),
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("singular leading term: {0}")]
    SingularLeadingTerm(String),
    #[error("normalization failure: {0}")]
    NormalizationFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, EngineError>;
