use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("model mismatch: {left} vs {right}")]
    ModelMismatch { left: String, right: String },

    #[error("height representative undefined at {0}")]
    UndefinedAtPoint(String),

    #[error("unknown curve `{name}` on model {model}")]
    UnknownCurve { model: String, name: String },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("unknown map `{0}`")]
    UnknownMap(String),

    #[error("divisor class is not pseudo-effective: {0}")]
    NotPseudoEffective(String),

    #[error("intersection pairing is not defined on model {0}")]
    PairingUndefined(String),

    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid sample schedule: {0}")]
    InvalidSchedule(String),

    #[error("reference class must be ample: {0}")]
    RequiresAmple(String),

    #[error("empty estimation window: {0}")]
    Unsupported(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("point is not on the curve: {0}")]
    NotOnCurve(String),

    #[error("canonical height did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("torsion test inconclusive: {0}")]
    Inconclusive(String),

    #[error("parse error: {0}")]
    Parse(String),
}
