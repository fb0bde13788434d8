use thiserror::Error;

#[derive(Error, Debug)]
pub enum CoreError {
    #[error("singular point: registered denominator `{0}` vanishes")]
    SingularPoint(String),
    #[error("cannot register zero polynomial as denominator `{0}`")]
    ZeroDenominator(String),
    #[error("not invertible in the localized ring: {0}")]
    NotInvertible(String),
    #[error("unbound variable {0} at evaluation point")]
    UnboundVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("singular linear part: diffeomorphism rejected")]
    SingularLinearPart,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("odd-degree matrix entries in invariant polynomial")]
    OddDegreeEntries,
    #[error("invalid Chern class index: {0}")]
    InvalidClass(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("probe order too low: no finite tensor matches at order {0}")]
    OrderTooLow(u32),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("relative operator result depends on the chosen lift")]
    LiftDependent,
    #[error("template not extractable: {0}")]
    NotExtractable(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
