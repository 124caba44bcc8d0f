//! Prefactored compact MacCormack schemes for linear and nonlinear advection
//! on periodic grids in one to three dimensions.
//!
//! The spatial operator splits a high-order compact first derivative into a
//! forward/backward pair of bidiagonal systems, each solved in a single sweep
//! per grid line. A blended variant adds cross-derivative information from
//! diagonal grid lines, trading a little per-step work for isotropy and a
//! larger stable time step when the advection direction is oblique. Modules:
//!
//! * [`scheme`]: coefficients and single-line sweeps (compact and explicit)
//! * [`md`]: whole-field forward/backward derivatives with optional blending
//! * [`spectral`]: wavenumber response, phase/group velocities, blend tuning
//! * [`stability`]: amplification factors, closed-form limits, measured limits
//! * [`solver`]: predictor-corrector time stepping and reference solutions

pub mod error;
pub mod grid;
pub mod md;
mod optim;
pub mod scheme;
pub mod solver;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
pub use grid::{error_norms, GridSpec, ScalarField};
pub use md::{md_backward_derivative, md_forward_derivative};
pub use scheme::{
    backward_derivative_line, centered_derivative_line, explicit_backward_line,
    explicit_forward_line, forward_derivative_line, make_coefficients, SchemeCoefficients,
    SweepDirection,
};
pub use solver::{
    burgers_diagonal_error, burgers_shock_time, exact_burgers_diagonal, exact_circular,
    exact_constant_advection, solve, stable_dt_limit, InitialCondition, ProblemSpec, SolveConfig,
    SolveResult, SpatialScheme, StepRecord, Stepper, TimeStepRule, Velocity,
};
pub use spectral::{
    fourier_symbol, group_velocity, md_wavenumber, optimize_icf, phase_speed_spread,
    phase_velocity, polar_diagram, wavenumber_1d, PolarSample,
};
pub use stability::{
    amplification_factor, analytic_limits, diagonal_limit, empirical_cfl, explicit_xi_max,
    max_abs_amplification, md_dt_per_h, md_region_margin, power_region_margin,
    wendroff_condition, xi_max, CflNumbers, EmpiricalCflOptions, MdRestriction, RegionCheck,
    StabilityReport,
};
