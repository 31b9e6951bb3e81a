use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty shape")]
    EmptyShape,

    #[error("zero total weight")]
    ZeroWeight,

    #[error("unsupported dimension {0} (expected 2 or 3)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid weight {0}: weights must be finite and nonnegative")]
    InvalidWeight(f64),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("insufficient moment order: need {needed}, have {available}")]
    InsufficientOrder { needed: usize, available: usize },

    #[error("invalid factor: {0}")]
    InvalidFactor(String),

    #[error("invalid core: {0}")]
    InvalidCore(String),

    #[error("f not affine-covariant")]
    NotAffineCovariant,

    #[error("normalization undefined: {0}")]
    Normalization(String),

    #[error("symbol {0} outside variable space")]
    SymbolOutsideSpace(String),

    #[error("singular linear map (det = {0})")]
    SingularMap(f64),

    #[error("budget exceeded: {count} cores exceed the budget of {budget}")]
    BudgetExceeded { count: u64, budget: u64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
