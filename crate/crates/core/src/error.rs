use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary: {0}")]
    NotUnitary(String),

    #[error("vector is not normalized: {0}")]
    NotNormalized(String),

    #[error("epsilon {0} is outside the range (0, 1]")]
    EpsilonOutOfRange(f64),

    #[error("circuit width {width} exceeds the simulation cap {cap}")]
    WidthCapExceeded { width: usize, cap: usize },

    #[error("invalid qubit assignment: {0}")]
    InvalidQubits(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("incompatible circuits: {0}")]
    CircuitMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no residue pairing for entries {first} and {second} at denominator exponent {k}")]
    Pairing { first: usize, second: usize, k: u32 },

    #[error("ancilla contract violated: {0}")]
    AncillaContract(String),

    #[error("rounding failed: {0}")]
    Rounding(String),

    #[error("certified distance {distance:e} exceeds the requested precision {eps:e}")]
    Certification { distance: f64, eps: f64 },

    #[error("synthesized circuit does not reproduce the target: {0}")]
    Verification(String),
}
