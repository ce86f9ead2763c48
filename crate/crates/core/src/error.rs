use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (deviation {deviation:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is singular to rank tolerance (lambda_min {min:.3e}, lambda_max {max:.3e})")]
    Singular { min: f64, max: f64 },

    #[error("columns are not orthonormal (deviation {0:.3e})")]
    NotIsometry(f64),

    #[error(
        "frame does not span its ambient space (lower bound {lower:.3e}, upper bound {upper:.3e})"
    )]
    NotSpanning { lower: f64, upper: f64 },

    #[error("frame is not Parseval (max |S - I| entry {0:.3e})")]
    NotParseval(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("instance too large for exhaustive search: {size} vectors (limit {limit})")]
    TooLarge { size: usize, limit: usize },

    #[error("labels do not match: {0}")]
    LabelMismatch(String),

    #[error("no truncation radius satisfies the error threshold {threshold:.3e}")]
    InfeasibleRadius {
        threshold: f64,
        /// `(R, E(R))` for every radius examined.
        table: Vec<(usize, f64)>,
    },

    #[error(
        "no box radius N with {lower} < N <= {upper} and 2N | {modulus} satisfies the growth bound"
    )]
    InfeasibleBox {
        lower: usize,
        upper: usize,
        modulus: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
