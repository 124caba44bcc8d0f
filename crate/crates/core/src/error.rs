use thiserror::Error;

/// Errors produced by scheme construction, operator application, analysis and solves.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported scheme order {order}; supported prefactored orders are 4 and 6")]
    UnsupportedOrder { order: u32 },

    #[error("unsupported explicit order {order}; supported explicit orders are 2, 4 and 6")]
    UnsupportedExplicitOrder { order: u32 },

    #[error("axis {axis} has {len} points; at least {min} are required")]
    GridTooSmall { axis: usize, len: usize, min: usize },

    #[error("grid spacing must be positive and finite, got {h}")]
    InvalidSpacing { h: f64 },

    #[error("lengths/counts give unequal spacings across axes: {h0} vs {h1} on axis {axis}")]
    AnisotropicSpacing { axis: usize, h0: f64, h1: f64 },

    #[error("expected {expected} dimensions, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("field shape {actual:?} does not match grid shape {expected:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        actual: Vec<usize>,
    },

    #[error("diagonal coupling (beta > 0) requires equal point counts on all axes, got {shape:?}")]
    NonSquare { shape: Vec<usize> },

    #[error("isotropy correction factor must be finite and non-negative, got {beta}")]
    InvalidBeta { beta: f64 },

    #[error("diagonal coupling (beta = {beta}) is undefined on a 1D grid")]
    BetaRequiresMultipleDims { beta: f64 },

    #[error("supported dimensionalities are 1, 2 and 3, got {dims}")]
    UnsupportedDims { dims: usize },

    #[error("denominator of the one-sided symbol vanishes (|a z + 1 - a| = {magnitude:.3e}) at eta = {eta:?}")]
    SingularSymbol { eta: Vec<f64>, magnitude: f64 },

    #[error("advection speeds are all zero; no time-step restriction exists")]
    ZeroVelocity,

    #[error("points per wavelength must exceed 2 (Nyquist), got {ppw}")]
    InvalidPpw { ppw: f64 },

    #[error("solution blew up at step {step}: max |u| = {max_abs:.3e}")]
    BlowUp { step: usize, max_abs: f64 },

    #[error("characteristics cross at t* = {t_star:.6}; the exact profile is multivalued at t = {t:.6}")]
    Multivalued { t: f64, t_star: f64 },

    #[error("root bracketing failed in the characteristic solve at s = {s:.6}, t = {t:.6}")]
    BracketFailure { s: f64, t: f64 },

    #[error("no stable time step found below sigma = {sigma_hi}")]
    AllUnstable { sigma_hi: f64 },

    #[error("operation does not apply to this problem: {reason}")]
    IncompatibleProblem { reason: String },

    #[error("time step must be positive and finite, got {dt}")]
    InvalidTimeStep { dt: f64 },

    #[error("isotropy objective has no interior minimum on [{lo}, {hi}]; J({lo}) = {j_lo:.3e}, J({hi}) = {j_hi:.3e}")]
    NoInteriorMinimum { lo: f64, hi: f64, j_lo: f64, j_hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
