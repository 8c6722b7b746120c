use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has no nonzero entries")]
    AllZeroMatrix,

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid matrix shape {rows}x{cols}")]
    InvalidShape { rows: usize, cols: usize },

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("degenerate weights: {0}")]
    DegenerateWeights(&'static str),

    #[error("{name} = {value} is outside {range}")]
    InvalidRange { name: &'static str, value: f64, range: &'static str },

    #[error("{rows}x{cols} matrix exceeds the dense-work cap")]
    TooLarge { rows: usize, cols: usize },

    #[error("sparse draw produced an all-zero matrix after {0} attempts")]
    DegenerateDensity(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported Matrix Market header: {0}")]
    UnsupportedField(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
