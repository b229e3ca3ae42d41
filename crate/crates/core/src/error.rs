use alloc::string::String;

pub type Result<T> = core::result::Result<T, QmeError>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QmeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector of length {0} is not a vectorized square matrix")]
    NotPerfectSquare(usize),
    #[error("operator is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("state is not Hermitian (imaginary residue {residue:e})")]
    NonHermitianState { residue: f64 },
    #[error("degenerate spectrum: minimum gap {gap:e} below tolerance {tolerance:e}")]
    DegenerateSpectrum { gap: f64, tolerance: f64 },
    #[error("eigenvector {index} has non-integer excitation number {value}")]
    SymmetryBroken { index: usize, value: f64 },
    #[error("occupation pole: beta*(omega-mu) = {exponent} at omega = {omega}")]
    PoleInOccupation { omega: f64, exponent: f64 },
    #[error("quadrature did not converge: {coarse:e} vs {fine:e}")]
    QuadratureDiverged { coarse: f64, fine: f64 },
    #[error("Kossakowski reassembly mismatch {mismatch:e}")]
    ExtractionFailed { mismatch: f64 },
    #[error("steady state not unique: gap {gap:e}, residual {residual:e}")]
    NonUniqueSteadyState { gap: f64, residual: f64 },
    #[error("null vector has vanishing trace {trace:e}")]
    TracelessNullVector { trace: f64 },
    #[error("rate matrix null space has dimension {nullity}")]
    NonErgodicRateMatrix { nullity: usize },
    #[error("matrix exponential failed: {0}")]
    EvolutionFailed(&'static str),
    #[error("generator has no per-bath split for terminal {0}")]
    SplitUnavailable(usize),
    #[error("test operator {index} does not commute with the coupling (defect {defect:e})")]
    InvalidTestOperator { index: usize, defect: f64 },
    #[error("slope fit needs at least 4 usable points, got {usable}")]
    InsufficientData { usable: usize },
    #[error("linear algebra failure: {0}")]
    Linalg(&'static str),
}
