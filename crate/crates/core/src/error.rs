use thiserror::Error;

/// Errors shared across the symbolic and numeric layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("point length {got}, expected {expected}")]
    PointLength { got: usize, expected: usize },
    #[error("substitution for `{0}` is not affine")]
    NonAffineSubstitution(String),
    #[error("phase-space tag mismatch: {0}")]
    SpaceMismatch(String),
    #[error("function on V*Q may not depend on p0")]
    DependsOnP0,
    #[error("operator variable-set mismatch")]
    VarSetMismatch,
    #[error("formal adjoint is defined for configuration-space operators only")]
    NotConfigSpace,
    #[error("momentum degree {found} exceeds {max}")]
    MomentumDegree { found: u32, max: u32 },
    #[error("coefficient of a configuration-space operator depends on momenta")]
    MomentumInCoefficient,
    #[error("grid axis {axis}: {msg}")]
    GridSpec { axis: usize, msg: String },
    #[error("grid spec or time mismatch between states")]
    GridMismatch,
    #[error("packet width must be positive")]
    NonPositiveWidth,
    #[error("packet tail mass {mass:.3e} at the box boundary exceeds {limit:.1e}")]
    PacketOutsideBox { mass: f64, limit: f64 },
    #[error("transformed support leaves the box (boundary tail mass {mass:.3e})")]
    SupportOverflow { mass: f64 },
    #[error("operator contains a time derivative; grid action is instantwise")]
    ContainsTimeDerivative,
    #[error("derivative order {0} exceeds 2")]
    OrderTooHigh(u32),
    #[error("zero-norm state")]
    ZeroNorm,
    #[error("linear solver did not reach residual {target:.1e} (got {achieved:.3e})")]
    SolverDiverged { target: f64, achieved: f64 },
}
