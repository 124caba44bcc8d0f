//! Shared fixtures for the criterion benchmarks: representative fields and
//! steppers at sizes where sweep cost dominates setup cost.

use mdpc::{GridSpec, ProblemSpec, Result, ScalarField, SpatialScheme, Stepper};

/// Smooth multi-mode field on an n-by-n periodic square of unit spacing.
pub fn sample_square(n: usize) -> Result<(GridSpec, ScalarField)> {
    let grid = GridSpec::square(n, n as f64)?;
    let tau = 2.0 * std::f64::consts::PI / n as f64;
    let field = ScalarField::from_fn(&grid, &[0.0, 0.0], |p| {
        (tau * p[0]).sin() + 0.5 * (3.0 * tau * p[1]).cos() + 0.25 * (2.0 * tau * (p[0] + p[1])).sin()
    })?;
    Ok((grid, field))
}

/// Rotating-pulse stepper on an n-by-n grid at a conservative fixed step.
pub fn rotation_stepper(n: usize, order: u32, beta: f64) -> Result<Stepper> {
    let problem = ProblemSpec::circular();
    let grid = problem.grid(n)?;
    let dt = 0.05 * grid.h();
    Stepper::new(&problem, &grid, SpatialScheme::Prefactored { order, beta }, dt)
}
