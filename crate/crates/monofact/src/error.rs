use num_bigint::BigInt;
use thiserror::Error;

/// Crate-wide error type. Variants are grouped by the layer that raises them:
/// scalar arithmetic, triple validation, script replay, factorization
/// internals, diagram translation, and file parsing.
#[derive(Debug, Error)]
pub enum Error {
    // -- scalar arithmetic --
    #[error("combine: {coeffs} coefficients but {scalars} scalars")]
    LengthMismatch { coeffs: usize, scalars: usize },
    #[error("radicand {0} is not squarefree")]
    NotSquarefree(u64),
    #[error("radicand must be a positive integer")]
    InvalidRadicand,
    #[error("sign test undecidable within declared tolerance: {0}")]
    IndependenceViolation(String),
    #[error("floor quotient requires a positive divisor")]
    NonPositiveDivisor,
    #[error("floor quotient requires a nonnegative dividend")]
    NegativeDividend,

    // -- triple validation --
    #[error("matrix is not square ({rows} rows, {cols} columns)")]
    NotSquare { rows: usize, cols: usize },
    #[error("determinant {0} is not +1 or -1")]
    DetNotUnit(BigInt),
    #[error("negative matrix entry at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize },
    #[error("w[{0}] is not positive: the matrix does not dominate the valuation")]
    NotDominated(usize),
    #[error("v[{0}] is not positive")]
    NonPositiveValuation(usize),
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("operation indices must differ")]
    EqualIndices,

    // -- script replay --
    #[error("operation not permissible{}", fmt_step(.step))]
    NotPermissible { step: Option<usize> },
    #[error("phase violation at step {step}: {what}")]
    PhaseViolation { step: usize, what: String },

    // -- factorizer --
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("internal integrity failure: {0}")]
    Integrity(String),
    #[error("column-subtraction conversion did not replay to the identity")]
    ConversionCheckFailed,

    // -- geometry --
    #[error("script does not replay to the identity matrix")]
    ScriptNotTerminal,
    #[error("valuation ordering violated at step {0}")]
    ValuationOrderViolation(usize),

    // -- files and CLI --
    #[error("parse error: {0}")]
    Parse(String),
    #[error("instance hash mismatch: script was produced from a different instance")]
    HashMismatch,
    #[error("repeated radicand across coordinates breaks rational independence (pass --override-independence to proceed)")]
    IndependenceRisk,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn fmt_step(step: &Option<usize>) -> String {
    match step {
        Some(s) => format!(" at step {s}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
