use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("grid resolution {resolution} on axis {axis} cannot resolve truncation radius {radius} (need at least {needed})")]
    UnderResolved {
        axis: usize,
        resolution: usize,
        radius: i64,
        needed: usize,
    },

    #[error("real series violates conjugate symmetry at {mode:?} (defect {defect:e})")]
    NotConjugateSymmetric { mode: Vec<i64>, defect: f64 },

    #[error("enumeration of {requested} modes exceeds the budget of {budget}")]
    BudgetExceeded { requested: u128, budget: u64 },

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("every scanned mode is resonant; no exponent can be fitted")]
    AllResonant,

    #[error("leafwise form is not closed (residual {residual:e} > tol {tol:e})")]
    NotClosed { residual: f64, tol: f64 },

    #[error("components disagree at mode {mode:?} (defect {defect:e})")]
    Inconsistent { mode: Vec<i64>, defect: f64 },

    #[error("Lie algebra check failed: {0}")]
    InvalidAlgebra(String),

    #[error("singular values near the rank tolerance: {0}")]
    RankUnstable(String),

    #[error("matrix is not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("gauge map is not invertible at sample {index} (|det| = {det:e})")]
    SingularGauge { index: usize, det: f64 },

    #[error("truncation loss {loss:e} exceeds threshold {threshold:e}")]
    TruncationLoss { loss: f64, threshold: f64 },

    #[error("circle map is not orientation preserving (min derivative {min_derivative:e} at x = {at})")]
    OrientationLost { min_derivative: f64, at: f64 },

    #[error("target rotation number {target} for map {index} lies outside the enclosure [{lo}, {hi}]")]
    RotationMismatch {
        index: usize,
        target: f64,
        lo: f64,
        hi: f64,
    },

    #[error("obstructed at mode {mode}: every divisor vanishes but the numerator is {numerator:e}")]
    Obstructed { mode: i64, numerator: f64 },

    #[error("malformed input at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}
