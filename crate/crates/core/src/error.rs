//! Error type shared by all modules of the crate.

/// Crate-wide error enum.
///
/// Domain outcomes that are *answers* rather than failures (an infeasible
/// design, a certificate that does not verify, a trajectory that blows up)
/// are not errors; they are encoded in the corresponding result types.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("majorant is not positive at t = {t} (mu = {mu})")]
    NonPositiveMajorant { t: f64, mu: f64 },

    #[error("custom majorant carries no derivative and none can be derived in closed form")]
    MissingDerivative,

    #[error("time function evaluated outside its domain at t = {t} (domain [{lo}, {hi}])")]
    EvaluationDomain { t: f64, lo: f64, hi: f64 },

    #[error("trajectory contains no samples")]
    EmptyTrajectory,

    #[error("epsilon must lie in (0, {limit}), got {epsilon}")]
    BadEpsilon { epsilon: f64, limit: f64 },

    #[error("exponent p must be > 1, got {p}")]
    BadExponent { p: f64 },

    #[error("rates must satisfy 0 < k < gamma and kprime > k (k = {k}, kprime = {kprime}, gamma = {gamma})")]
    BadRates { k: f64, kprime: f64, gamma: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("t = {t} is at or past the blow-up time t_b = {t_b}")]
    PastBlowup { t: f64, t_b: f64 },

    #[error("comparison hypothesis violated: f({t}, {x}) = {f_value} > g({t}, {x}) = {g_value}")]
    HypothesisViolated {
        t: f64,
        x: f64,
        f_value: f64,
        g_value: f64,
    },

    #[error("step {index}: h*gamma = {h_gamma} must lie in (0, 1)")]
    StepConstraint { index: usize, h_gamma: f64 },

    #[error("nonlinearity sampled negative at step {index}: alpha = {value}")]
    NegativeAlpha { index: usize, value: f64 },

    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("certificate value mu[{index}] = {value} must be positive")]
    NonPositiveMu { index: usize, value: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
