use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("unsupported dimension {0}; only 2 and 4 are supported")]
    UnsupportedDim(usize),
    #[error("vector is not normalised (norm {0})")]
    NotUnit(f64),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("synthesis failed: residual loss {0:.3e}")]
    SynthesisFailure(f64),
    #[error("circuit width {0} exceeds the limit {1}")]
    WidthExceeded(usize, usize),
    #[error("width mismatch: circuit has {0} qubits, state has {1}")]
    WidthMismatch(usize, usize),
    #[error("Kraus operators are not trace preserving (deviation {0:.3e})")]
    NotCptp(f64),
    #[error("not a valid density matrix: {0}")]
    NotDensity(String),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("direction is not a unit vector (norm {0})")]
    NotUnitDirection(f64),
    #[error("denominator {0:.3e} too close to zero")]
    DegenerateDenominator(f64),
    #[error("parameter {name} = {value} out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("post-selection success probability {0:.3e} is zero")]
    ZeroSuccess(f64),
    #[error("resource is not maximally entangled (concurrence {0})")]
    NotMaximallyEntangled(f64),
    #[error("tomography setting {0} missing")]
    MissingSetting(String),
    #[error("confusion matrix is singular (condition number {0:.3e})")]
    SingularConfusion(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}
