use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::optim::golden_min;
use crate::scheme::{make_coefficients, SweepDirection};
use crate::solver::{ProblemSpec, SpatialScheme, Stepper};
use crate::spectral::{fourier_symbol, md_wavenumber, wavenumber_1d};

/// Dimensionless Courant numbers sigma_i = |c_i| k / h.
#[derive(Debug, Clone, PartialEq)]
pub struct CflNumbers {
    pub sigma: Vec<f64>,
    pub time_step: f64,
    pub speeds: Vec<f64>,
}

impl CflNumbers {
    pub fn new(speeds: Vec<f64>, time_step: f64, h: f64) -> Result<Self> {
        if !time_step.is_finite() || time_step <= 0.0 {
            return Err(Error::InvalidTimeStep { dt: time_step });
        }
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::InvalidSpacing { h });
        }
        let sigma = speeds.iter().map(|c| c.abs() * time_step / h).collect();
        Ok(Self {
            sigma,
            time_step,
            speeds,
        })
    }

    /// Sigma values given directly (unit time step and spacing).
    pub fn from_sigmas(sigma: Vec<f64>) -> Self {
        Self {
            speeds: sigma.clone(),
            sigma,
            time_step: 1.0,
        }
    }

    pub fn dims(&self) -> usize {
        self.sigma.len()
    }
}

fn scan_then_refine(lo: f64, hi: f64, points: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut best_x = lo;
    let mut best = f64::NEG_INFINITY;
    for j in 0..points {
        let x = lo + (hi - lo) * j as f64 / (points - 1) as f64;
        let v = f(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let step = (hi - lo) / (points - 1) as f64;
    let a = (best_x - step).max(lo);
    let b = (best_x + step).min(hi);
    let x = golden_min(a, b, 1e-8, |x| -f(x));
    let v = f(x);
    if v > best {
        (x, v)
    } else {
        (best_x, best)
    }
}

/// Peak one-axis wavenumber response of the centered compact operator over the
/// dimensionless wavenumber box: dense scan plus golden-section refinement.
/// For beta > 0 the blend is an average of line responses, so the peak equals
/// the 1D peak; the multidimensional box is still scanned (coarser in 3D).
pub fn xi_max(order: u32, beta: f64, dims: usize) -> Result<f64> {
    wavenumber_1d(order, 0.0)?;
    if !(1..=3).contains(&dims) {
        return Err(Error::UnsupportedDims { dims });
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidBeta { beta });
    }
    if beta > 0.0 && dims == 1 {
        return Err(Error::BetaRequiresMultipleDims { beta });
    }
    let pi = std::f64::consts::PI;
    if beta == 0.0 || dims == 1 {
        let (_, v) = scan_then_refine(0.0, pi, 2001, |e| wavenumber_1d(order, e).unwrap().abs());
        return Ok(v);
    }
    let response = |eta: &[f64]| md_wavenumber(order, beta, eta).unwrap().abs();
    let points = if dims == 2 { 2001 } else { 201 };
    let step = pi / (points - 1) as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_eta = vec![0.0; dims];
    let mut eta = vec![0.0; dims];
    let counts = vec![points; dims];
    let mut idx = vec![0usize; dims];
    loop {
        for d in 0..dims {
            eta[d] = step * idx[d] as f64;
        }
        let v = response(&eta);
        if v > best {
            best = v;
            best_eta.copy_from_slice(&eta);
        }
        // odometer increment
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == dims {
                // coordinate-descent refinement around the best grid point
                let mut x = best_eta.clone();
                for _ in 0..4 {
                    for ax in 0..dims {
                        let mut probe = x.clone();
                        let refined = golden_min(
                            (x[ax] - step).max(0.0),
                            (x[ax] + step).min(pi),
                            1e-9,
                            |v| {
                                probe[ax] = v;
                                -response(&probe)
                            },
                        );
                        x[ax] = refined;
                    }
                }
                return Ok(response(&x).max(best));
            }
        }
    }
}

/// Peak response of the classical explicit centered differences (orders 2/4/6).
pub fn explicit_xi_max(order: u32) -> Result<f64> {
    let response: fn(f64) -> f64 = match order {
        2 => |e| e.sin(),
        4 => |e| (8.0 * e.sin() - (2.0 * e).sin()) / 6.0,
        6 => |e| (45.0 * e.sin() - 9.0 * (2.0 * e).sin() + (3.0 * e).sin()) / 30.0,
        _ => return Err(Error::UnsupportedExplicitOrder { order }),
    };
    let (_, v) = scan_then_refine(0.0, std::f64::consts::PI, 2001, |e| response(e).abs());
    Ok(v)
}

/// Amplification factor of one full predictor-corrector step at wavevector
/// `eta`: G = 1/2 [1 + (1 - S)(1 + conj(S))] with S the sigma-weighted sum of
/// forward one-sided symbols.
pub fn amplification_factor(
    sigma: &CflNumbers,
    eta: &[f64],
    order: u32,
    beta: f64,
) -> Result<Complex64> {
    if eta.len() != sigma.dims() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dims(),
            actual: eta.len(),
        });
    }
    let coeffs = make_coefficients(order)?;
    let mut s = Complex64::new(0.0, 0.0);
    for (axis, &sig) in sigma.sigma.iter().enumerate() {
        s += sig * fourier_symbol(&coeffs, beta, eta, axis, SweepDirection::Forward)?;
    }
    Ok(0.5 * (1.0 + (1.0 - s) * (1.0 + s.conj())))
}

/// Max of |G| over a uniform eta grid covering [-pi, pi]^dims.
pub fn max_abs_amplification(
    order: u32,
    beta: f64,
    sigmas: &[f64],
    n_per_axis: usize,
) -> Result<f64> {
    let dims = sigmas.len();
    if !(1..=3).contains(&dims) {
        return Err(Error::UnsupportedDims { dims });
    }
    let cfl = CflNumbers::from_sigmas(sigmas.to_vec());
    let pi = std::f64::consts::PI;
    let coord = |j: usize| -pi + 2.0 * pi * j as f64 / (n_per_axis - 1) as f64;
    let mut max_g: f64 = 0.0;
    let mut eta = vec![0.0; dims];
    let mut idx = vec![0usize; dims];
    'outer: loop {
        for d in 0..dims {
            eta[d] = coord(idx[d]);
        }
        let g = amplification_factor(&cfl, &eta, order, beta)?.norm();
        max_g = max_g.max(g);
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < n_per_axis {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == dims {
                break 'outer;
            }
        }
    }
    Ok(max_g)
}

/// Margin of the 2/3-power stability region: 1/xi - sum sigma_i^(2/3).
/// Non-negative means the point satisfies the bound.
pub fn power_region_margin(xi: f64, sigmas: &[f64]) -> f64 {
    1.0 / xi - sigmas.iter().map(|s| s.abs().powf(2.0 / 3.0)).sum::<f64>()
}

/// Margin of the blended-operator 2D region: the (1+beta) weight multiplies
/// the larger sigma component.
pub fn md_region_margin(xi: f64, beta: f64, sx: f64, sy: f64) -> f64 {
    let bp = 1.0 + beta;
    let (hi, lo) = if sx.abs() >= sy.abs() {
        (sx.abs(), sy.abs())
    } else {
        (sy.abs(), sx.abs())
    };
    bp.powf(2.0 / 3.0) / xi - ((hi * bp).powf(2.0 / 3.0) + lo.powf(2.0 / 3.0))
}

/// Diagonal-propagation limit of the blended operator:
/// sigma <= (1+beta) / (xi^(3/2) [1 + (1+beta)^(2/3)]^(3/2)).
pub fn diagonal_limit(xi: f64, beta: f64) -> f64 {
    let bp = 1.0 + beta;
    bp / (xi.powf(1.5) * (1.0 + bp.powf(2.0 / 3.0)).powf(1.5))
}

/// Largest stable time step per unit grid spacing for the given per-axis peak
/// speeds: the 1D line limit, the 2D larger/smaller-speed restriction with the
/// beta enhancement, or the conservative per-axis 3D heuristic (beta ignored).
pub fn md_dt_per_h(xi: f64, beta: f64, speeds: &[f64]) -> Result<f64> {
    let abs: Vec<f64> = speeds.iter().map(|c| c.abs()).collect();
    let max = abs.iter().fold(0.0_f64, |m, &v| m.max(v));
    if max == 0.0 {
        return Err(Error::ZeroVelocity);
    }
    match abs.len() {
        1 => Ok(1.0 / (xi * abs[0])),
        2 => {
            let bp = 1.0 + beta;
            let (hi, lo) = if abs[0] >= abs[1] {
                (abs[0], abs[1])
            } else {
                (abs[1], abs[0])
            };
            Ok(bp / (xi.powf(1.5) * ((hi * bp).powf(2.0 / 3.0) + lo.powf(2.0 / 3.0)).powf(1.5)))
        }
        3 => {
            let sum: f64 = abs.iter().map(|c| c.powf(2.0 / 3.0)).sum();
            Ok(1.0 / (xi.powf(1.5) * sum.powf(1.5)))
        }
        dims => Err(Error::UnsupportedDims { dims }),
    }
}

/// Outcome of evaluating a closed-form stability condition at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCheck {
    pub satisfied: bool,
    pub margin: f64,
}

/// Product-form sufficient condition: sx^2 sy^2 + sx^2 + sy^2 <= 1/8.
pub fn wendroff_condition(sigma_x: f64, sigma_y: f64) -> RegionCheck {
    let lhs = sigma_x * sigma_x * sigma_y * sigma_y + sigma_x * sigma_x + sigma_y * sigma_y;
    let margin = 0.125 - lhs;
    RegionCheck {
        satisfied: margin >= 0.0,
        margin,
    }
}

/// The 2D restriction with the larger-speed axis carrying the beta weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdRestriction {
    pub primary_axis: usize,
    /// stable k <= dt_per_h * h for the given speeds
    pub dt_per_h: f64,
}

/// Stability summary; the closed-form pieces are always present, the
/// point-evaluation and measured pieces are filled by the caller that has an
/// operating time step (see the command-line tool).
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub xi_max: f64,
    /// largest sigma for 1D line advection: 1/xi
    pub limit_1d: f64,
    /// 2/3-power region evaluated at an operating sigma, when one is given
    pub limit_power: Option<RegionCheck>,
    pub limit_md: MdRestriction,
    /// diagonal-propagation sigma limit of the blended operator
    pub limit_diagonal: f64,
    pub empirical_limit: Option<f64>,
    pub max_abs_g: Option<f64>,
}

/// Closed-form limits for the given advection speeds; measurement fields are
/// left unfilled.
pub fn analytic_limits(c: &[f64], order: u32, beta: f64) -> Result<StabilityReport> {
    let dims = c.len();
    if !(1..=3).contains(&dims) {
        return Err(Error::UnsupportedDims { dims });
    }
    if c.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVelocity);
    }
    let xi = xi_max(order, beta, dims)?;
    let primary_axis = c
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(StabilityReport {
        xi_max: xi,
        limit_1d: 1.0 / xi,
        limit_power: None,
        limit_md: MdRestriction {
            primary_axis,
            dt_per_h: md_dt_per_h(xi, beta, c)?,
        },
        limit_diagonal: diagonal_limit(xi, beta),
        empirical_limit: None,
        max_abs_g: None,
    })
}

/// Knobs for the empirical bisection. A sigma counts as stable when the max
/// amplitude after `horizon` steps stays within `growth_factor` times the
/// initial amplitude. Optional white noise (relative to the initial amplitude)
/// seeds modes a smooth pulse would lack, sharpening the measured limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCflOptions {
    pub horizon: usize,
    pub growth_factor: f64,
    pub tolerance: f64,
    pub sigma_max: f64,
    pub noise_amplitude: f64,
    pub noise_seed: u64,
}

impl Default for EmpiricalCflOptions {
    fn default() -> Self {
        Self {
            horizon: 50,
            growth_factor: 10.0,
            tolerance: 1e-3,
            sigma_max: 4.0,
            noise_amplitude: 0.0,
            noise_seed: 0x5eed,
        }
    }
}

/// Largest stable Courant number (top per-axis sigma) found by bisection on
/// [0, sigma_max] with short time-marching experiments.
pub fn empirical_cfl(
    problem: &ProblemSpec,
    grid: &GridSpec,
    scheme: SpatialScheme,
    opts: &EmpiricalCflOptions,
) -> Result<f64> {
    let speeds = problem.axis_max_speeds(grid)?;
    let c_ref = speeds.iter().fold(0.0_f64, |m, &v| m.max(v));
    if c_ref == 0.0 {
        return Err(Error::ZeroVelocity);
    }
    let mut base = problem.initial_field(grid)?;
    if opts.noise_amplitude > 0.0 {
        let scale = {
            let m = base.max_abs();
            if m > 0.0 {
                m
            } else {
                1.0
            }
        };
        let mut rng = StdRng::seed_from_u64(opts.noise_seed);
        for v in base.values_mut() {
            *v += opts.noise_amplitude * scale * rng.gen_range(-1.0..1.0);
        }
    }
    let initial_max = base.max_abs();
    let h = grid.h();
    let stable = |sigma: f64| -> Result<bool> {
        if sigma <= 0.0 {
            return Ok(true);
        }
        let dt = sigma * h / c_ref;
        let mut stepper = Stepper::with_state(problem, grid, scheme, dt, base.clone())?;
        for _ in 0..opts.horizon {
            match stepper.step() {
                Ok(()) => {}
                Err(Error::BlowUp { .. }) => return Ok(false),
                Err(other) => return Err(other),
            }
        }
        Ok(stepper.state().max_abs() <= opts.growth_factor * initial_max)
    };
    if !stable(opts.tolerance)? {
        return Err(Error::AllUnstable {
            sigma_hi: opts.sigma_max,
        });
    }
    if stable(opts.sigma_max)? {
        return Ok(opts.sigma_max);
    }
    let (mut lo, mut hi) = (opts.tolerance, opts.sigma_max);
    while hi - lo > opts.tolerance {
        let mid = 0.5 * (lo + hi);
        if stable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::InitialCondition;
    use approx::assert_relative_eq;

    #[test]
    fn xi_peaks_match_closed_forms() {
        let xi4 = xi_max(4, 0.0, 1).unwrap();
        assert_relative_eq!(xi4, 3.0_f64.sqrt(), epsilon = 1e-9);
        let xi6 = xi_max(6, 0.0, 1).unwrap();
        assert_relative_eq!(xi6, 1.98944148537263, epsilon = 1e-6);
        assert!(xi_max(8, 0.0, 1).is_err());
        assert!(xi_max(4, 0.3, 1).is_err());
    }

    #[test]
    fn explicit_xi_values() {
        assert_relative_eq!(explicit_xi_max(2).unwrap(), 1.0, epsilon = 1e-10);
        assert_relative_eq!(explicit_xi_max(4).unwrap(), 1.37222198, epsilon = 1e-6);
        assert_relative_eq!(explicit_xi_max(6).unwrap(), 1.58597840, epsilon = 1e-6);
        assert!(explicit_xi_max(3).is_err());
    }

    #[test]
    fn blended_peak_equals_line_peak() {
        let xi1 = xi_max(4, 0.0, 1).unwrap();
        let xi2 = xi_max(4, 0.24, 2).unwrap();
        assert_relative_eq!(xi2, xi1, epsilon = 1e-7);
        let xi1 = xi_max(6, 0.0, 1).unwrap();
        let xi3 = xi_max(6, 0.055, 3).unwrap();
        assert_relative_eq!(xi3, xi1, epsilon = 1e-5);
    }

    #[test]
    fn amplification_identities() {
        let cfl = CflNumbers::from_sigmas(vec![0.0, 0.0]);
        let g = amplification_factor(&cfl, &[1.0, 2.0], 4, 0.0).unwrap();
        assert_relative_eq!(g.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(g.im, 0.0, epsilon = 1e-15);
        let cfl = CflNumbers::from_sigmas(vec![0.3, 0.2]);
        let g = amplification_factor(&cfl, &[0.0, 0.0], 4, 0.24).unwrap();
        assert_relative_eq!(g.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(g.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sigma_construction() {
        let cfl = CflNumbers::new(vec![2.0, -1.0], 0.1, 0.05).unwrap();
        assert_relative_eq!(cfl.sigma[0], 4.0);
        assert_relative_eq!(cfl.sigma[1], 2.0);
        assert!(CflNumbers::new(vec![1.0], 0.0, 0.1).is_err());
    }

    /// The 2/3-power region is sufficient but not necessary for the order-4
    /// operator: a diagonal point outside it can still be stable. The true
    /// diagonal boundary sits near sigma = 0.2887 = 1/(2 sqrt(3)).
    #[test]
    fn order4_diagonal_stability_extends_beyond_power_region() {
        let xi = xi_max(4, 0.0, 1).unwrap();
        assert!(power_region_margin(xi, &[0.2, 0.2]) < 0.0);
        let g = max_abs_amplification(4, 0.0, &[0.2, 0.2], 201).unwrap();
        assert!(g <= 1.0 + 1e-12, "max|G| = {g}");
        let g_in = max_abs_amplification(4, 0.0, &[0.1, 0.1], 101).unwrap();
        assert!(g_in <= 1.0 + 1e-10);
        let g_beyond = max_abs_amplification(4, 0.0, &[0.32, 0.32], 201).unwrap();
        assert!(g_beyond > 1.0 + 1e-6, "max|G| = {g_beyond}");
    }

    #[test]
    fn order4_regions_are_sufficient() {
        let xi = xi_max(4, 0.0, 1).unwrap();
        // rays at 0, 22.5, 45 degrees scaled to the region boundary minus margin
        for &w in &[0.0_f64, 0.4142, 1.0] {
            // beta = 0: boundary along (1, w)/norm via the power region
            let denom = (1.0 + w.powf(2.0 / 3.0)) * xi;
            let sx = (1.0 / denom).powf(1.5) * (1.0 - 1e-3);
            let sy = w * sx;
            let g = max_abs_amplification(4, 0.0, &[sx, sy], 201).unwrap();
            assert!(g <= 1.0 + 1e-9, "w = {w}: max|G| = {g}");
            // beta = 0.24: blended region, larger-sigma axis weighted
            let beta = 0.24_f64;
            let bp = 1.0 + beta;
            let hi =
                (bp.powf(2.0 / 3.0) / (xi * (bp.powf(2.0 / 3.0) + w.powf(2.0 / 3.0)))).powf(1.5)
                    * (1.0 - 1e-3);
            let lo = w * hi;
            let g = max_abs_amplification(4, beta, &[hi, lo], 201).unwrap();
            assert!(g <= 1.0 + 1e-9, "beta, w = {w}: max|G| = {g}");
        }
    }

    /// The same construction is NOT sufficient at order 6: just inside the
    /// axis end of the power region the step amplifies measurably.
    #[test]
    fn order6_power_region_admits_axis_instability() {
        let xi = xi_max(6, 0.0, 1).unwrap();
        let sx = (1.0 / xi).powf(1.5) * (1.0 - 1e-3);
        let g = max_abs_amplification(6, 0.0, &[sx, 0.0], 201).unwrap();
        assert!(g > 1.0 + 1e-6, "max|G| = {g}");
        // the true 1D limit is much lower: 2(e/2 - a) = 0.20601
        let g_true = max_abs_amplification(6, 0.0, &[0.2, 0.0], 201).unwrap();
        assert!(g_true <= 1.0 + 1e-12, "max|G| = {g_true}");
    }

    #[test]
    fn outside_the_true_region_amplifies() {
        // order 6 diagonal: power-region boundary + 0.05 is far beyond the
        // true limit (~0.103) and must amplify
        let xi = xi_max(6, 0.0, 1).unwrap();
        let s = (1.0 / (2.0 * xi)).powf(1.5) + 0.05;
        let g = max_abs_amplification(6, 0.0, &[s, s], 201).unwrap();
        assert!(g > 1.0, "max|G| = {g}");
        // order 4 diagonal: true boundary (~0.2887) + 0.05
        let s = 1.0 / (2.0 * 3.0_f64.sqrt()) + 0.05;
        let g = max_abs_amplification(4, 0.0, &[s, s], 201).unwrap();
        assert!(g > 1.0, "max|G| = {g}");
    }

    #[test]
    fn diagonal_limit_consistency() {
        let xi4 = xi_max(4, 0.0, 1).unwrap();
        let s1_diag = (1.0 / (2.0 * xi4)).powf(1.5);
        assert_relative_eq!(diagonal_limit(xi4, 1e-8), s1_diag, max_relative = 1e-6);
        assert_relative_eq!(
            diagonal_limit(xi4, 1e8),
            (1.0 / xi4).powf(1.5),
            max_relative = 1e-5
        );
        assert_relative_eq!(diagonal_limit(xi4, 0.0), 0.155101, epsilon = 1e-6);
        assert_relative_eq!(diagonal_limit(xi4, 0.24), 0.172049, epsilon = 1e-6);
        assert_relative_eq!(
            diagonal_limit(xi4, 0.24) / diagonal_limit(xi4, 0.0),
            1.109271,
            epsilon = 1e-5
        );
        let xi6 = xi_max(6, 0.0, 1).unwrap();
        assert_relative_eq!(diagonal_limit(xi6, 0.0), 0.125996, epsilon = 1e-6);
        assert_relative_eq!(diagonal_limit(xi6, 0.12), 0.133199, epsilon = 1e-6);
        assert_relative_eq!(
            diagonal_limit(xi6, 0.12) / diagonal_limit(xi6, 0.0),
            1.057169,
            epsilon = 1e-5
        );
    }

    #[test]
    fn wendroff_examples() {
        let c = wendroff_condition(0.0, 0.0);
        assert!(c.satisfied);
        assert_relative_eq!(c.margin, 0.125);
        assert!(!wendroff_condition(0.25, 0.25).satisfied);
        assert!(wendroff_condition(0.2, 0.2).satisfied);
    }

    #[test]
    fn analytic_report_fields() {
        let report = analytic_limits(&[2.0, 1.0], 4, 0.24).unwrap();
        assert_relative_eq!(report.xi_max, 3.0_f64.sqrt(), epsilon = 1e-6);
        assert_relative_eq!(report.limit_1d, 1.0 / 3.0_f64.sqrt(), epsilon = 1e-6);
        assert_eq!(report.limit_md.primary_axis, 0);
        assert!(report.limit_md.dt_per_h > 0.0);
        assert!(report.limit_power.is_none());
        assert!(report.empirical_limit.is_none());
        assert!(matches!(
            analytic_limits(&[0.0, 0.0], 4, 0.0),
            Err(Error::ZeroVelocity)
        ));
    }

    fn diagonal_problem(dims: usize) -> ProblemSpec {
        ProblemSpec::constant_advection(
            vec![1.0; dims],
            vec![-0.5; dims],
            vec![0.5; dims],
            InitialCondition::Gaussian {
                center: vec![0.0; dims],
                sigma: 0.15,
                amplitude: 1.0,
                offset: 0.0,
                ln2_scaled: false,
            },
            1.0,
        )
        .unwrap()
    }

    /// Order 4 amplifies strongly past its line limit 1/sqrt(3), so marching
    /// detects that boundary sharply. Order 6 has a strict spectral boundary
    /// near 0.2060 (the eta -> 0 limit of 2|Re psi|/|psi|^2) but |G| stays
    /// within 1 + 3e-4 up to sigma = 0.3, so finite-horizon marching only
    /// sees growth near sigma ~ 0.5 where |G| - 1 reaches a few percent.
    #[test]
    fn empirical_limits_order_across_schemes() {
        let problem = diagonal_problem(1);
        let grid = problem.grid(64).unwrap();
        let opts = EmpiricalCflOptions {
            horizon: 400,
            noise_amplitude: 1e-6,
            ..EmpiricalCflOptions::default()
        };
        let pc4 = empirical_cfl(&problem, &grid, SpatialScheme::Prefactored { order: 4, beta: 0.0 }, &opts)
            .unwrap();
        let pc6 = empirical_cfl(&problem, &grid, SpatialScheme::Prefactored { order: 6, beta: 0.0 }, &opts)
            .unwrap();
        assert!(
            (pc4 - 1.0 / 3.0_f64.sqrt()).abs() < 0.03,
            "order 4 line limit measured {pc4}"
        );
        assert!((0.45..0.56).contains(&pc6), "order 6 practical limit measured {pc6}");
        assert!(pc6 < pc4);
        // the strict order-6 boundary, invisible to marching, in the spectrum:
        let g = max_abs_amplification(6, 0.0, &[0.205], 2001).unwrap();
        assert!(g <= 1.0 + 1e-12, "max|G| = {g}");
        let g = max_abs_amplification(6, 0.0, &[0.21], 2001).unwrap();
        assert!(g > 1.0 + 1e-9, "max|G| = {g}");
        let g = max_abs_amplification(6, 0.0, &[0.25], 2001).unwrap();
        assert!(g > 1.0 + 1e-6, "max|G| = {g}");
    }

    #[test]
    fn empirical_beta_gain_on_diagonal() {
        let problem = diagonal_problem(2);
        let grid = problem.grid(48).unwrap();
        let opts = EmpiricalCflOptions {
            horizon: 300,
            noise_amplitude: 1e-6,
            ..EmpiricalCflOptions::default()
        };
        let plain = empirical_cfl(&problem, &grid, SpatialScheme::Prefactored { order: 4, beta: 0.0 }, &opts)
            .unwrap();
        let blended = empirical_cfl(
            &problem,
            &grid,
            SpatialScheme::Prefactored { order: 4, beta: 0.24 },
            &opts,
        )
        .unwrap();
        // analytic floor from the diagonal limit formula
        let xi = xi_max(4, 0.0, 1).unwrap();
        assert!(plain >= diagonal_limit(xi, 0.0) - 0.01, "plain = {plain}");
        assert!(
            blended / plain >= 1.10,
            "gain {:.4} (plain {plain}, blended {blended})",
            blended / plain
        );
    }

    #[test]
    fn diagnostic_when_nothing_is_stable() {
        let problem = diagonal_problem(1);
        let grid = problem.grid(32).unwrap();
        // impossible acceptance criterion: amplitude must shrink 2x in 5 steps
        let opts = EmpiricalCflOptions {
            horizon: 5,
            growth_factor: 0.5,
            ..EmpiricalCflOptions::default()
        };
        assert!(matches!(
            empirical_cfl(&problem, &grid, SpatialScheme::Prefactored { order: 4, beta: 0.0 }, &opts),
            Err(Error::AllUnstable { .. })
        ));
    }
}
