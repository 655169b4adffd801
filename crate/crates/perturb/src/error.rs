use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("perturbation matrix must be {expected}x{expected}, got {rows}x{cols}")]
    NotSquare { expected: usize, rows: usize, cols: usize },
    #[error("system dimension must be at least 1")]
    EmptySystem,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("coupling scale must be finite and non-negative, got {0}")]
    BadCouplingScale(f64),
    #[error("perturbation is not Hermitian: max |H1[i][j] - conj(H1[j][i])| = {violation:e}")]
    NotHermitian { violation: f64 },
    #[error(
        "degeneracy not removed: levels {i} and {j} share energy {energy} \
         but are coupled with |g| = {coupling:e}"
    )]
    IncompleteDegeneracyRemoval {
        i: usize,
        j: usize,
        energy: f64,
        coupling: f64,
    },
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("order {order} exceeds the configured maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("unsupported order {order}; supported range is {min}..={max}")]
    UnsupportedOrder { order: usize, min: usize, max: usize },
    #[error("level index {index} out of range for dimension {dimension}")]
    LevelOutOfRange { index: usize, dimension: usize },
    #[error("state vector has length {got}, expected {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("invalid term label {label:?}: {reason}")]
    BadLabel { label: String, reason: String },
    #[error("label {label} is not in the order-{order} catalog")]
    LabelNotInCatalog { label: String, order: usize },
    #[error("vanishing energy denominator between levels {i} and {j}")]
    VanishingDenominator { i: usize, j: usize },
    #[error("coupling matrix has a nonzero diagonal; build the system with redivision enabled")]
    NotRedivided,
    #[error("levels {0} and {1} are degenerate")]
    DegeneratePair(usize, usize),
    #[error("two-level closed form needs E2 > E1, got omega = {0}")]
    NonPositiveGap(f64),
    #[error("golden-rule input: {0}")]
    GoldenRule(String),
    #[error("malformed closed-form table at line {line}: {reason}")]
    ClosedFormTable { line: usize, reason: String },
}
