use thiserror::Error;

/// Everything that can go wrong inside the laboratory.
///
/// Numerical failures are ordinary values here: a scan or a dimension field
/// records them per sample and keeps going.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DsmError {
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("the map is undefined at z = 0")]
    ZeroPoint,

    #[error("value out of floating-point range ({0})")]
    Range(String),

    #[error("no critical points for b = 0")]
    NoCriticalPoints,

    #[error("no attracting cycle found up to period {q_max}")]
    NoAttractingCycle { q_max: usize },

    #[error("orbit type is ambiguous at depth {depth} (offset {offset:.3e} from the nearest grid point)")]
    AmbiguousType { depth: usize, offset: f64 },

    #[error("orbit type {k}/{denominator} does not have exact period {q}")]
    TypePeriodMismatch { k: u64, denominator: u64, q: usize },

    #[error("x = 1/2 does not lie in any immediate-basin arc")]
    NoDistinguishedArc,

    #[error("multiplier {lambda} outside the linearization window ({min}, {max})")]
    MultiplierOutsideWindow { lambda: f64, min: f64, max: f64 },

    #[error("Koenigs iteration did not settle at x* ({0})")]
    KoenigsDivergence(String),

    #[error("Koenigs image of the outer critical point is not in the upper half-plane (arg = {arg})")]
    CriticalAngleOutOfRange { arg: f64 },

    #[error("linearization cross-check failed: {0}")]
    CrossCheck(String),

    #[error("continuation failed at step {step}: {reason}")]
    Continuation {
        step: usize,
        reason: String,
        last_a: f64,
        last_b: f64,
    },

    #[error("Newton iteration did not converge: {0}")]
    NewtonFailure(String),

    #[error("Markov property violated: {0}")]
    MarkovViolation(String),

    #[error("inverse branch failed: {0}")]
    BranchInversion(String),

    #[error("angle {0} outside [0, pi]")]
    AngleOutOfRange(f64),

    #[error("degenerate sample path: {0}")]
    DegeneratePath(String),

    #[error("{context}: {message}")]
    Io { context: String, message: String },
}

pub type Result<T> = std::result::Result<T, DsmError>;

impl DsmError {
    /// Short machine-readable tag, used as the `status` field in JSON and CSV output.
    pub fn status(&self) -> &'static str {
        match self {
            DsmError::InvalidParameter(_) => "invalid_parameter",
            DsmError::ZeroPoint => "zero_point",
            DsmError::Range(_) => "range_error",
            DsmError::NoCriticalPoints => "no_critical_points",
            DsmError::NoAttractingCycle { .. } => "no_attracting_cycle",
            DsmError::AmbiguousType { .. } => "ambiguous_type",
            DsmError::TypePeriodMismatch { .. } => "type_period_mismatch",
            DsmError::NoDistinguishedArc => "no_distinguished_arc",
            DsmError::MultiplierOutsideWindow { .. } => "multiplier_outside_window",
            DsmError::KoenigsDivergence(_) => "koenigs_divergence",
            DsmError::CriticalAngleOutOfRange { .. } => "critical_angle_out_of_range",
            DsmError::CrossCheck(_) => "cross_check_failed",
            DsmError::Continuation { .. } => "continuation_failed",
            DsmError::NewtonFailure(_) => "newton_failure",
            DsmError::MarkovViolation(_) => "markov_violation",
            DsmError::BranchInversion(_) => "branch_inversion",
            DsmError::AngleOutOfRange(_) => "angle_out_of_range",
            DsmError::DegeneratePath(_) => "degenerate_path",
            DsmError::Io { .. } => "io_error",
        }
    }
}
