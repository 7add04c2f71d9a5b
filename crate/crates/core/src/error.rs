use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: eigenvalue gap {gap:.3e} below tolerance {tol:.3e}")]
    DegenerateInput { gap: f64, tol: f64 },
    #[error("eigensolver failed to converge")]
    NoConvergence,
    #[error("left/right pair {index} is self-orthogonal (|<phi|psi>| = {overlap:.3e})")]
    SelfOrthogonal { index: usize, overlap: f64 },
    #[error("invalid sampling: {0}")]
    InvalidSampling(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("sample at t = {t} is too close to an exceptional point (gap {gap:.3e})")]
    NearEP { t: f64, gap: f64 },
    #[error("branch matching still ambiguous after maximal bisection near t = {t}")]
    AmbiguousMatching { t: f64 },
    #[error("curve is not closed")]
    OpenCurve,
    #[error("monodromy moves label {label}; lift the curve {period} times first")]
    NonCyclicBranch { label: usize, period: usize },
    #[error("step overlap deviates from 1 near t = {t}; try at least {suggested_samples} samples")]
    PrecisionLoss { t: f64, suggested_samples: usize },
    #[error("junction {index} does not match its transition value (deviation {deviation:.3e})")]
    MismatchedJunction { index: usize, deviation: f64 },
    #[error("closed-form frame singular on this patch (|denominator| = {denominator:.3e})")]
    PatchSingular { denominator: f64 },
    #[error("square-root branch ambiguous near t = {t}")]
    BranchAmbiguity { t: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("gauge rescaling is zero (sample {sample}, label {label})")]
    ZeroGauge { sample: usize, label: usize },
    #[error("integrator step collapsed at s = {s}")]
    StepUnderflow { s: f64 },
    #[error("fidelity {fidelity:.4} too low for an adiabatic decomposition")]
    LowFidelity { fidelity: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("loops do not share a base point")]
    NoSharedBasePoint,
    #[error("loop is not contractible in the nondegenerate region")]
    NotContractible,
}

pub type Result<T> = std::result::Result<T, Error>;
