use alloc::string::String;

/// Errors raised by the construction, verification and analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("qubit count {0} outside the supported range 1..={max}", max = crate::MAX_QUBITS)]
    QubitCount(usize),
    #[error("mask bits beyond qubit count {n}")]
    MaskOutOfRange { n: usize },
    #[error("generator index {index} out of range (have {count})")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("duplicate generator index {0}")]
    DuplicateIndex(usize),
    #[error("rotation needs two distinct generators, got {0} twice")]
    SameIndex(usize),
    #[error("invalid cycle spec: {0}")]
    InvalidCycleSpec(String),
    #[error("cycle construction failed on generator {generator}: residual {residual:e}")]
    CycleCheck { generator: usize, residual: f64 },
    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("not a signed monomial (residual {0:e})")]
    NotSignedMonomial(f64),
    #[error("unsupported parameters n={n}, L={l}: {reason}")]
    Unsupported { n: usize, l: usize, reason: String },
    #[error("spacing needs a length-2 monomial, got length {0}")]
    WrongLength(usize),
    #[error("class is not simultaneously diagonalizable (residual {0:e})")]
    NotSimultaneouslyDiagonalizable(f64),
    #[error("unbiasedness violated between bases {j} and {k} at ({a}, {b}): deviation {deviation:e}")]
    Unbiasedness { j: usize, k: usize, a: usize, b: usize, deviation: f64 },
    #[error("no projector match above overlap threshold for basis {basis}, element {element} (best {best})")]
    NoProjectorMatch { basis: usize, element: usize, best: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("Rényi order must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("b-string invalid: {0}")]
    InvalidBVector(String),
    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("sweep needs {required} eigenproblems, budget is {budget}; use sampling")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("restarts must be at least 1")]
    NoRestarts,
    #[error("cannot invert zero in GF(2^n)")]
    ZeroInverse,
    #[error("operation needs a complete set of d+1 bases, got {got} for d={d}")]
    IncompleteSet { got: usize, d: usize },
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("the MUB set carries no cycling unitary")]
    MissingUnitary,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
