use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::md::{apply_explicit_into, apply_md_into, MdWorkspace};
use crate::scheme::{make_coefficients, SchemeCoefficients, SweepDirection};
use crate::stability::{explicit_xi_max, md_dt_per_h, xi_max};

/// Advection velocity of a model problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Velocity {
    Constant(Vec<f64>),
    /// c(x, y) = (omega*y, -omega*x); solid-body rotation of the frame.
    Rotation { omega: f64 },
    /// velocity equals the advected field itself on every axis (Burgers).
    SelfAdvection,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Gaussian {
        center: Vec<f64>,
        sigma: f64,
        amplitude: f64,
        offset: f64,
        /// scale the exponent by ln 2, making sigma the half-width at half max
        ln2_scaled: bool,
    },
    SineAxis {
        axis: usize,
        periods: f64,
    },
}

/// Periodic model problem: domain box, velocity, initial data, final time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub dims: usize,
    pub domain_min: Vec<f64>,
    pub domain_max: Vec<f64>,
    pub velocity: Velocity,
    pub initial: InitialCondition,
    pub final_time: f64,
}

impl ProblemSpec {
    /// Gaussian pulse rotating about the origin: u_t = (pi y/2) u_x - (pi x/2) u_y
    /// on [-2,2]^2; one full revolution takes t = 4.
    pub fn circular() -> Self {
        Self {
            dims: 2,
            domain_min: vec![-2.0, -2.0],
            domain_max: vec![2.0, 2.0],
            velocity: Velocity::Rotation {
                omega: std::f64::consts::FRAC_PI_2,
            },
            initial: InitialCondition::Gaussian {
                center: vec![0.25, 0.0],
                sigma: 0.04,
                amplitude: 1.0,
                offset: 0.0,
                ln2_scaled: true,
            },
            final_time: 4.0,
        }
    }

    /// Self-steepening pulse on [-0.5,0.5]^2: u_t = u (u_x + u_y),
    /// u(x,y,0) = 1 + 0.12 exp(-(x^2+y^2)/0.2^2).
    pub fn burgers_diagonal() -> Self {
        Self {
            dims: 2,
            domain_min: vec![-0.5, -0.5],
            domain_max: vec![0.5, 0.5],
            velocity: Velocity::SelfAdvection,
            initial: InitialCondition::Gaussian {
                center: vec![0.0, 0.0],
                sigma: 0.2,
                amplitude: 0.12,
                offset: 1.0,
                ln2_scaled: false,
            },
            final_time: 2.0,
        }
    }

    /// Gaussian advected along the main diagonal of [-0.5,0.5]^3 with unit
    /// speeds; returns to the initial state at t = 1.
    pub fn advection_3d() -> Self {
        Self {
            dims: 3,
            domain_min: vec![-0.5; 3],
            domain_max: vec![0.5; 3],
            velocity: Velocity::Constant(vec![1.0, 1.0, 1.0]),
            initial: InitialCondition::Gaussian {
                center: vec![0.0; 3],
                sigma: 0.08,
                amplitude: 1.0,
                offset: 0.0,
                ln2_scaled: true,
            },
            final_time: 1.0,
        }
    }

    pub fn constant_advection(
        speeds: Vec<f64>,
        domain_min: Vec<f64>,
        domain_max: Vec<f64>,
        initial: InitialCondition,
        final_time: f64,
    ) -> Result<Self> {
        let dims = speeds.len();
        if !(1..=3).contains(&dims) {
            return Err(Error::UnsupportedDims { dims });
        }
        if domain_min.len() != dims || domain_max.len() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                actual: domain_min.len().max(domain_max.len()),
            });
        }
        Ok(Self {
            dims,
            domain_min,
            domain_max,
            velocity: Velocity::Constant(speeds),
            initial,
            final_time,
        })
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.domain_min
            .iter()
            .zip(&self.domain_max)
            .map(|(lo, hi)| hi - lo)
            .collect()
    }

    /// Grid with `n` points on every axis of the domain box.
    pub fn grid(&self, n: usize) -> Result<GridSpec> {
        GridSpec::new(vec![n; self.dims], self.lengths())
    }

    fn ic_value(&self, coords: &[f64]) -> f64 {
        match &self.initial {
            InitialCondition::Gaussian {
                center,
                sigma,
                amplitude,
                offset,
                ln2_scaled,
            } => {
                let r2: f64 = coords
                    .iter()
                    .zip(center)
                    .map(|(x, c)| (x - c) * (x - c))
                    .sum();
                let k = if *ln2_scaled { std::f64::consts::LN_2 } else { 1.0 };
                offset + amplitude * (-k * r2 / (sigma * sigma)).exp()
            }
            InitialCondition::SineAxis { axis, periods } => {
                let lo = self.domain_min[*axis];
                let len = self.domain_max[*axis] - lo;
                (2.0 * std::f64::consts::PI * periods * (coords[*axis] - lo) / len).sin()
            }
        }
    }

    /// Sample the initial condition on the grid nodes.
    pub fn initial_field(&self, grid: &GridSpec) -> Result<ScalarField> {
        self.check_grid(grid)?;
        ScalarField::from_fn(grid, &self.domain_min, |p| self.ic_value(p))
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if grid.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                actual: grid.dims(),
            });
        }
        let lengths = self.lengths();
        for (axis, (&gl, pl)) in grid.lengths().iter().zip(&lengths).enumerate() {
            if (gl - pl).abs() > 1e-9 * pl.abs().max(1.0) {
                return Err(Error::AnisotropicSpacing {
                    axis,
                    h0: gl,
                    h1: *pl,
                });
            }
        }
        Ok(())
    }

    /// Per-axis velocity samples, or None when the field advects itself.
    pub fn velocity_fields(&self, grid: &GridSpec) -> Result<Option<Vec<ScalarField>>> {
        self.check_grid(grid)?;
        match &self.velocity {
            Velocity::Constant(c) => {
                let fields = c
                    .iter()
                    .map(|&ci| {
                        ScalarField::from_fn(grid, &self.domain_min, |_| ci)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Some(fields))
            }
            Velocity::Rotation { omega } => {
                if self.dims != 2 {
                    return Err(Error::IncompatibleProblem {
                        reason: "rotational velocity is defined in 2D only".into(),
                    });
                }
                let om = *omega;
                let cx = ScalarField::from_fn(grid, &self.domain_min, |p| om * p[1])?;
                let cy = ScalarField::from_fn(grid, &self.domain_min, |p| -om * p[0])?;
                Ok(Some(vec![cx, cy]))
            }
            Velocity::SelfAdvection => Ok(None),
        }
    }

    /// Largest |velocity component| per axis over the grid (for the
    /// self-advecting problem: the initial amplitude bound, on every axis).
    pub fn axis_max_speeds(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        match self.velocity_fields(grid)? {
            Some(fields) => Ok(fields.iter().map(|f| f.max_abs()).collect()),
            None => {
                let u0 = self.initial_field(grid)?;
                Ok(vec![u0.max_abs(); self.dims])
            }
        }
    }
}

/// Spatial discretization used by the time marcher.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialScheme {
    /// one-sided compact operators, optionally blended with diagonal lines
    Prefactored { order: u32, beta: f64 },
    /// classical explicit one-sided differences
    Explicit { order: u32 },
}

impl SpatialScheme {
    pub fn order(&self) -> u32 {
        match self {
            SpatialScheme::Prefactored { order, .. } | SpatialScheme::Explicit { order } => *order,
        }
    }

    pub fn beta(&self) -> f64 {
        match self {
            SpatialScheme::Prefactored { beta, .. } => *beta,
            SpatialScheme::Explicit { .. } => 0.0,
        }
    }

    /// Peak one-axis wavenumber response, used in time-step limits.
    pub fn xi_max(&self) -> Result<f64> {
        match self {
            SpatialScheme::Prefactored { order, .. } => xi_max(*order, 0.0, 1),
            SpatialScheme::Explicit { order } => explicit_xi_max(*order),
        }
    }
}

#[derive(Debug, Clone)]
enum SchemeKind {
    Compact { coeffs: SchemeCoefficients, beta: f64 },
    Explicit { order: u32 },
}

fn derivative_into(
    kind: &SchemeKind,
    src: &ScalarField,
    axis: usize,
    dir: SweepDirection,
    ws: &mut MdWorkspace,
    out: &mut ScalarField,
) -> Result<()> {
    match kind {
        SchemeKind::Compact { coeffs, beta } => {
            apply_md_into(src, axis, coeffs, *beta, dir, ws, out)
        }
        SchemeKind::Explicit { order } => apply_explicit_into(src, axis, *order, dir, ws, out),
    }
}

/// One predictor-corrector time marcher instance with its scratch state.
#[derive(Debug)]
pub struct Stepper {
    kind: SchemeKind,
    dt: f64,
    velocity: Option<Vec<ScalarField>>,
    state: ScalarField,
    stage: ScalarField,
    corr: ScalarField,
    deriv: ScalarField,
    ws: MdWorkspace,
    step_index: usize,
    time: f64,
}

impl Stepper {
    pub fn new(
        problem: &ProblemSpec,
        grid: &GridSpec,
        scheme: SpatialScheme,
        dt: f64,
    ) -> Result<Self> {
        let state = problem.initial_field(grid)?;
        Self::with_state(problem, grid, scheme, dt, state)
    }

    /// Start from a caller-provided state instead of the problem's initial data.
    pub fn with_state(
        problem: &ProblemSpec,
        grid: &GridSpec,
        scheme: SpatialScheme,
        dt: f64,
        state: ScalarField,
    ) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidTimeStep { dt });
        }
        if state.grid() != grid {
            return Err(Error::ShapeMismatch {
                expected: grid.n_per_axis().to_vec(),
                actual: state.grid().n_per_axis().to_vec(),
            });
        }
        let kind = match scheme {
            SpatialScheme::Prefactored { order, beta } => {
                if !beta.is_finite() || beta < 0.0 {
                    return Err(Error::InvalidBeta { beta });
                }
                SchemeKind::Compact {
                    coeffs: make_coefficients(order)?,
                    beta,
                }
            }
            SpatialScheme::Explicit { order } => {
                if ![2, 4, 6].contains(&order) {
                    return Err(Error::UnsupportedExplicitOrder { order });
                }
                SchemeKind::Explicit { order }
            }
        };
        let velocity = problem.velocity_fields(grid)?;
        let stage = ScalarField::zeros(grid);
        Ok(Self {
            kind,
            dt,
            velocity,
            corr: stage.clone(),
            deriv: stage.clone(),
            stage,
            state,
            ws: MdWorkspace::new(),
            step_index: 0,
            time: 0.0,
        })
    }

    pub fn state(&self) -> &ScalarField {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advance one full step: forward-biased predictor, backward-biased
    /// corrector, then the trapezoidal average with the previous state.
    /// u' = u + dt sum_i c_i D_F,i u ; u'' = u' + dt sum_i c_i D_B,i u' ;
    /// u <- (u + u'')/2. For the self-advecting problem the velocity in each
    /// stage is the field that stage differentiates.
    pub fn step(&mut self) -> Result<()> {
        let dims = self.state.grid().dims();
        let dt = self.dt;

        self.stage
            .values_mut()
            .copy_from_slice(self.state.values());
        for axis in 0..dims {
            derivative_into(
                &self.kind,
                &self.state,
                axis,
                SweepDirection::Forward,
                &mut self.ws,
                &mut self.deriv,
            )?;
            let vel = match &self.velocity {
                Some(fields) => fields[axis].values(),
                None => self.state.values(),
            };
            let tgt = self.stage.values_mut();
            let der = self.deriv.values();
            for i in 0..tgt.len() {
                tgt[i] += dt * vel[i] * der[i];
            }
        }

        self.corr
            .values_mut()
            .copy_from_slice(self.stage.values());
        for axis in 0..dims {
            derivative_into(
                &self.kind,
                &self.stage,
                axis,
                SweepDirection::Backward,
                &mut self.ws,
                &mut self.deriv,
            )?;
            let vel = match &self.velocity {
                Some(fields) => fields[axis].values(),
                None => self.stage.values(),
            };
            let tgt = self.corr.values_mut();
            let der = self.deriv.values();
            for i in 0..tgt.len() {
                tgt[i] += dt * vel[i] * der[i];
            }
        }

        {
            let new = self.state.values_mut();
            let corr = self.corr.values();
            for i in 0..new.len() {
                new[i] = 0.5 * (new[i] + corr[i]);
            }
        }
        self.step_index += 1;
        self.time += dt;
        if !self.state.is_finite() {
            return Err(Error::BlowUp {
                step: self.step_index,
                max_abs: self.state.max_abs(),
            });
        }
        Ok(())
    }
}

/// Time-step selection for `solve`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStepRule {
    /// cap; the actual step is shrunk so the final time is hit exactly
    Fixed(f64),
    /// fraction of the analytic stable limit for this problem/scheme
    StableFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub scheme: SpatialScheme,
    pub time_step: TimeStepRule,
    /// defaults to the problem's final time
    pub final_time: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub max_abs: f64,
    pub mean: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub state: ScalarField,
    pub dt: f64,
    pub steps: usize,
    pub time: f64,
    pub history: Vec<StepRecord>,
}

/// Analytic stable time step for the problem's peak speeds: the 2D
/// larger/smaller-speed restriction (with its beta enhancement), the 1D line
/// limit, or the conservative 3D per-axis heuristic.
pub fn stable_dt_limit(
    problem: &ProblemSpec,
    grid: &GridSpec,
    scheme: SpatialScheme,
) -> Result<f64> {
    let speeds = problem.axis_max_speeds(grid)?;
    let xi = scheme.xi_max()?;
    Ok(grid.h() * md_dt_per_h(xi, scheme.beta(), &speeds)?)
}

/// March the problem to its final time, recording per-step amplitude and mean.
pub fn solve(problem: &ProblemSpec, grid: &GridSpec, config: &SolveConfig) -> Result<SolveResult> {
    let dt_cap = match config.time_step {
        TimeStepRule::Fixed(dt) => {
            if !dt.is_finite() || dt <= 0.0 {
                return Err(Error::InvalidTimeStep { dt });
            }
            dt
        }
        TimeStepRule::StableFraction(f) => {
            if !f.is_finite() || f <= 0.0 {
                return Err(Error::InvalidTimeStep { dt: f });
            }
            f * stable_dt_limit(problem, grid, config.scheme)?
        }
    };
    let final_time = config.final_time.unwrap_or(problem.final_time);
    if !final_time.is_finite() || final_time < 0.0 {
        return Err(Error::InvalidTimeStep { dt: final_time });
    }
    let steps = ((final_time / dt_cap - 1e-12).ceil() as usize).max(1);
    let dt = final_time / steps as f64;
    let mut stepper = Stepper::new(problem, grid, config.scheme, dt)?;
    let mut history = Vec::with_capacity(steps + 1);
    history.push(StepRecord {
        step: 0,
        time: 0.0,
        max_abs: stepper.state().max_abs(),
        mean: stepper.state().mean(),
    });
    for _ in 0..steps {
        stepper.step()?;
        history.push(StepRecord {
            step: stepper.step_index(),
            time: stepper.time(),
            max_abs: stepper.state().max_abs(),
            mean: stepper.state().mean(),
        });
    }
    Ok(SolveResult {
        dt,
        steps,
        time: stepper.time(),
        state: std::mem::replace(&mut stepper.state, ScalarField::zeros(grid)),
        history,
    })
}

/// Exact solution of the rotating problem: the initial data evaluated at
/// coordinates rotated back by omega*t.
pub fn exact_circular(problem: &ProblemSpec, grid: &GridSpec, t: f64) -> Result<ScalarField> {
    let omega = match problem.velocity {
        Velocity::Rotation { omega } => omega,
        _ => {
            return Err(Error::IncompatibleProblem {
                reason: "exact rotation solution needs a rotational velocity".into(),
            })
        }
    };
    problem.check_grid(grid)?;
    let (s, c) = (omega * t).sin_cos();
    ScalarField::from_fn(grid, &problem.domain_min, |p| {
        let x0 = c * p[0] + s * p[1];
        let y0 = -s * p[0] + c * p[1];
        problem.ic_value(&[x0, y0])
    })
}

/// Exact solution for constant advection: the initial data shifted by c*t and
/// wrapped back into the periodic box.
pub fn exact_constant_advection(
    problem: &ProblemSpec,
    grid: &GridSpec,
    t: f64,
) -> Result<ScalarField> {
    let speeds = match &problem.velocity {
        Velocity::Constant(c) => c.clone(),
        _ => {
            return Err(Error::IncompatibleProblem {
                reason: "exact translation solution needs a constant velocity".into(),
            })
        }
    };
    problem.check_grid(grid)?;
    let lengths = problem.lengths();
    let min = problem.domain_min.clone();
    ScalarField::from_fn(grid, &problem.domain_min, move |p| {
        let mut q = [0.0f64; 3];
        for d in 0..p.len() {
            let mut x = p[d] + speeds[d] * t;
            let l = lengths[d];
            x = (x - min[d]).rem_euclid(l) + min[d];
            q[d] = x;
        }
        problem.ic_value(&q[..p.len()])
    })
}

/// Time at which characteristics of the self-advecting diagonal problem first
/// cross (profile gradient blow-up).
pub fn burgers_shock_time(problem: &ProblemSpec) -> Result<f64> {
    match (&problem.velocity, &problem.initial) {
        (
            Velocity::SelfAdvection,
            InitialCondition::Gaussian {
                sigma,
                amplitude,
                ln2_scaled,
                ..
            },
        ) => {
            let k = if *ln2_scaled { std::f64::consts::LN_2 } else { 1.0 };
            // peak slope of g(s) = offset + A exp(-k s^2 / sigma^2) is
            // A sqrt(2k/e)/sigma; crossing at 1/(sqrt(2) * peak slope)
            Ok(sigma * (std::f64::consts::E / k).sqrt() / (2.0 * amplitude))
        }
        _ => Err(Error::IncompatibleProblem {
            reason: "shock time applies to the self-advecting Gaussian problem".into(),
        }),
    }
}

/// Exact pre-shock solution of the self-advecting problem on the main grid
/// diagonal, at diagonal coordinate `s` (distance from the origin along the
/// diagonal): solves u = g(s + sqrt(2) u t) by safeguarded Newton iteration,
/// where g is the initial diagonal profile with period sqrt(2)*L.
pub fn exact_burgers_diagonal(problem: &ProblemSpec, t: f64, s: f64) -> Result<f64> {
    let (center, sigma, amplitude, offset, ln2_scaled) = match (&problem.velocity, &problem.initial)
    {
        (
            Velocity::SelfAdvection,
            InitialCondition::Gaussian {
                center,
                sigma,
                amplitude,
                offset,
                ln2_scaled,
            },
        ) => (center, *sigma, *amplitude, *offset, *ln2_scaled),
        _ => {
            return Err(Error::IncompatibleProblem {
                reason: "diagonal characteristics need the self-advecting Gaussian problem".into(),
            })
        }
    };
    if center.iter().any(|&c| c != 0.0) {
        return Err(Error::IncompatibleProblem {
            reason: "diagonal characteristics assume a pulse centered at the origin".into(),
        });
    }
    let t_star = burgers_shock_time(problem)?;
    if t >= t_star {
        return Err(Error::Multivalued { t, t_star });
    }
    let k = if ln2_scaled { std::f64::consts::LN_2 } else { 1.0 };
    let period = std::f64::consts::SQRT_2 * (problem.domain_max[0] - problem.domain_min[0]);
    let wrap = |x: f64| x - period * (x / period).round();
    let g = |x: f64| {
        let w = wrap(x);
        offset + amplitude * (-k * w * w / (sigma * sigma)).exp()
    };
    let g_prime = |x: f64| {
        let w = wrap(x);
        -2.0 * k * amplitude * w / (sigma * sigma) * (-k * w * w / (sigma * sigma)).exp()
    };
    let sqrt2 = std::f64::consts::SQRT_2;
    let (mut lo, mut hi) = (offset, offset + amplitude);
    let f = |u: f64| u - g(s + sqrt2 * u * t);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::BracketFailure { s, t });
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fu = f(u);
        if fu.abs() <= 1e-12 {
            return Ok(u);
        }
        if fu > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let fp = 1.0 - sqrt2 * t * g_prime(s + sqrt2 * u * t);
        let newton = u - fu / fp;
        u = if fp > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            return Ok(u);
        }
    }
    Ok(u)
}

/// L2 and max error of a solved state against the characteristics oracle on
/// the main diagonal nodes of a square 2D grid.
pub fn burgers_diagonal_error(
    problem: &ProblemSpec,
    grid: &GridSpec,
    state: &ScalarField,
    t: f64,
) -> Result<(f64, f64)> {
    problem.check_grid(grid)?;
    if grid.dims() != 2 || !grid.is_square() {
        return Err(Error::NonSquare {
            shape: grid.n_per_axis().to_vec(),
        });
    }
    let n = grid.n_per_axis()[0];
    let h = grid.h();
    let mut sq = 0.0;
    let mut linf = 0.0_f64;
    for i in 0..n {
        let x = problem.domain_min[0] + i as f64 * h;
        let s = std::f64::consts::SQRT_2 * x;
        let exact = exact_burgers_diagonal(problem, t, s)?;
        let d = state.values()[i + n * i] - exact;
        sq += d * d;
        linf = linf.max(d.abs());
    }
    Ok(((h * std::f64::consts::SQRT_2 * sq).sqrt(), linf))
}
