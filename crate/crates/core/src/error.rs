use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate scalar: {0}")]
    DegenerateScalar(&'static str),

    #[error("shape mismatch in {op}: {lhs:?} vs {rhs:?}")]
    Shape {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("singular matrix (zero pivot at elimination step {stage})")]
    SingularMatrix { stage: usize },

    #[error("degenerate parameters: {0}")]
    ParameterDegenerate(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("Pearson data does not match the weight; residual {residual}")]
    PearsonMismatch { residual: String },

    #[error("block Hankel matrix of order {n} is singular; the weight is not regular")]
    Regularity { n: usize },

    #[error("truncation too short: need {needed} terms, have {available}")]
    TruncationTooShort { needed: usize, available: usize },

    #[error("identity requires a one-sided Pearson sequence (h^R = 0)")]
    OneSidedRequired,

    #[error("coefficients do not commute: {0}")]
    NonAbelianInput(String),

    #[error("missing data: {0}")]
    Missing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
