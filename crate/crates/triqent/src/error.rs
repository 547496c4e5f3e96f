use thiserror::Error;

use crate::classify::CluEvidence;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state is not genuinely tripartite entangled (biseparable)")]
    Biseparable,
    #[error("expected a {expected}-qubit state, got {got} qubits")]
    QubitCount { expected: usize, got: usize },
    #[error("amplitude count {0} is not 2^n with 2 <= n <= 11")]
    AmplitudeCount(usize),
    #[error("state is not normalized (norm squared {0})")]
    NotNormalized(f64),
    #[error("the zero vector cannot be normalized")]
    ZeroVector,
    #[error("local unitary has {got} factors for a {expected}-qubit state")]
    FactorCount { expected: usize, got: usize },
    #[error("factor {index} is not unitary (defect {defect:e})")]
    NonUnitary { index: usize, defect: f64 },
    #[error("invalid qubit selection: {0}")]
    QubitSelection(String),
    #[error("concurrence {0} lies outside [0, 1]")]
    ConcurrenceRange(f64),
    #[error("parameter {name} = {value} lies outside its canonical range")]
    ParameterRange { name: &'static str, value: f64 },
    #[error("state is not LU-equivalent to its complex conjugate")]
    NotClu,
    #[error("CLU tests disagree")]
    CluDisagreement(Box<CluEvidence>),
    #[error("classification is inconsistent: {0}")]
    InconsistentClassification(String),
    #[error("measures are inconsistent: {0}")]
    InconsistentMeasures(String),
    #[error("generation outcome {0:?} matches no member of S_psi")]
    ClosureViolation([u8; 4]),
    #[error("unknown ensemble `{0}`")]
    UnknownEnsemble(String),
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
