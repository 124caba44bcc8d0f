use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::md::diagonal_families;
use crate::optim::golden_min;
use crate::scheme::{SchemeCoefficients, SweepDirection};

/// Effective dimensionless wavenumber of the centered (averaged) operator on a
/// single line: the scheme resolves a mode of phase angle `eta` per cell as if
/// it had wavenumber `wavenumber_1d(order, eta)` per cell.
pub fn wavenumber_1d(order: u32, eta: f64) -> Result<f64> {
    match order {
        4 => Ok(3.0 * eta.sin() / (2.0 + eta.cos())),
        6 => Ok((28.0 * eta.sin() + (2.0 * eta).sin()) / (18.0 + 12.0 * eta.cos())),
        _ => Err(Error::UnsupportedOrder { order }),
    }
}

fn one_sided_symbol(coeffs: &SchemeCoefficients, theta: f64, eta: &[f64]) -> Result<Complex64> {
    let z = Complex64::from_polar(1.0, theta);
    let denom = coeffs.a * z + (1.0 - coeffs.a);
    if denom.norm() < 1e-14 {
        return Err(Error::SingularSymbol {
            eta: eta.to_vec(),
            magnitude: denom.norm(),
        });
    }
    let num = coeffs.b * z - coeffs.e - coeffs.f * z.conj();
    Ok(num / denom)
}

fn validate_eta_beta(eta: &[f64], axis: usize, beta: f64) -> Result<usize> {
    let dims = eta.len();
    if !(1..=3).contains(&dims) {
        return Err(Error::UnsupportedDims { dims });
    }
    if axis >= dims {
        return Err(Error::DimensionMismatch {
            expected: dims,
            actual: axis + 1,
        });
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidBeta { beta });
    }
    if beta > 0.0 && dims == 1 {
        return Err(Error::BetaRequiresMultipleDims { beta });
    }
    Ok(dims)
}

/// Complex symbol of the one-sided multidimensional derivative along `axis` at
/// dimensionless wavevector `eta` (one angle per axis): applying the operator
/// to exp(i eta . j) multiplies it by (symbol / h).
pub fn fourier_symbol(
    coeffs: &SchemeCoefficients,
    beta: f64,
    eta: &[f64],
    axis: usize,
    dir: SweepDirection,
) -> Result<Complex64> {
    let dims = validate_eta_beta(eta, axis, beta)?;
    let mut total = one_sided_symbol(coeffs, eta[axis], eta)?;
    if beta > 0.0 {
        let w = beta / if dims == 3 { 4.0 } else { 2.0 };
        for family in diagonal_families(axis, dims) {
            let theta: f64 = (0..dims).map(|d| family[d] as f64 * eta[d]).sum();
            total += w * one_sided_symbol(coeffs, theta, eta)?;
        }
        total /= 1.0 + beta;
    }
    Ok(match dir {
        SweepDirection::Forward => total,
        SweepDirection::Backward => -total.conj(),
    })
}

/// Real effective wavenumber of the centered multidimensional derivative along
/// the first axis: the blend of the axis line response with the diagonal-family
/// responses, each evaluated at its line phase angle.
pub fn md_wavenumber(order: u32, beta: f64, eta: &[f64]) -> Result<f64> {
    let dims = validate_eta_beta(eta, 0, beta)?;
    let mut k = wavenumber_1d(order, eta[0])?;
    if beta > 0.0 {
        let w = beta / if dims == 3 { 4.0 } else { 2.0 };
        for family in diagonal_families(0, dims) {
            let theta: f64 = (0..dims).map(|d| family[d] as f64 * eta[d]).sum();
            k += w * wavenumber_1d(order, theta)?;
        }
        k /= 1.0 + beta;
    }
    Ok(k)
}

fn check_ppw(ppw: f64) -> Result<()> {
    if !(ppw.is_finite() && ppw > 2.0) {
        return Err(Error::InvalidPpw { ppw });
    }
    Ok(())
}

fn wavenumber_axis(order: u32, beta: f64, eta: [f64; 2], axis: usize) -> Result<f64> {
    // the y-response is the x-response with swapped angles
    match axis {
        0 => md_wavenumber(order, beta, &eta),
        _ => md_wavenumber(order, beta, &[eta[1], eta[0]]),
    }
}

/// Normalized phase speed of a plane wave resolved with `ppw` points per
/// wavelength, propagating at angle `theta` in 2D: the projection of the
/// effective wavenumber vector onto the propagation direction over |eta|.
pub fn phase_velocity(order: u32, beta: f64, ppw: f64, theta: f64) -> Result<f64> {
    check_ppw(ppw)?;
    let eta0 = 2.0 * std::f64::consts::PI / ppw;
    let eta = [eta0 * theta.cos(), eta0 * theta.sin()];
    let kx = wavenumber_axis(order, beta, eta, 0)?;
    let ky = wavenumber_axis(order, beta, eta, 1)?;
    Ok((kx * theta.cos() + ky * theta.sin()) / eta0)
}

/// Normalized group velocity vector for the same plane-wave setup: the
/// wavevector gradient of the discrete dispersion frequency for unit-speed
/// advection along `theta`, evaluated by central differences.
pub fn group_velocity(order: u32, beta: f64, ppw: f64, theta: f64) -> Result<[f64; 2]> {
    check_ppw(ppw)?;
    let eta0 = 2.0 * std::f64::consts::PI / ppw;
    let (nx, ny) = (theta.cos(), theta.sin());
    let omega = |ex: f64, ey: f64| -> Result<f64> {
        let kx = wavenumber_axis(order, beta, [ex, ey], 0)?;
        let ky = wavenumber_axis(order, beta, [ex, ey], 1)?;
        Ok(nx * kx + ny * ky)
    };
    let (ex, ey) = (eta0 * nx, eta0 * ny);
    let step = 1e-6;
    let gx = (omega(ex + step, ey)? - omega(ex - step, ey)?) / (2.0 * step);
    let gy = (omega(ex, ey + step)? - omega(ex, ey - step)?) / (2.0 * step);
    Ok([gx, gy])
}

fn diag_phase_error(order: u32, beta: f64, eta0: f64, dims: usize) -> Result<f64> {
    match dims {
        2 => {
            let a = eta0 / std::f64::consts::SQRT_2;
            let k = (wavenumber_1d(order, a)? + 0.5 * beta * wavenumber_1d(order, 2.0 * a)?)
                / (1.0 + beta);
            Ok(k / a - 1.0)
        }
        3 => {
            let g = eta0 / 3.0_f64.sqrt();
            let k = (wavenumber_1d(order, g)?
                + 0.25 * beta * (wavenumber_1d(order, 3.0 * g)? + wavenumber_1d(order, g)?))
                / (1.0 + beta);
            Ok(k / g - 1.0)
        }
        _ => Err(Error::UnsupportedDims { dims }),
    }
}

/// Isotropy correction factor that equalizes the phase-speed error of
/// axis-aligned and grid-diagonal propagation at the given resolution.
/// Minimizes the squared mismatch over beta in [0, 2] by golden-section search.
pub fn optimize_icf(order: u32, ppw: f64, dims: usize) -> Result<f64> {
    check_ppw(ppw)?;
    if !(2..=3).contains(&dims) {
        return Err(Error::UnsupportedDims { dims });
    }
    let eta0 = 2.0 * std::f64::consts::PI / ppw;
    let e_axis = wavenumber_1d(order, eta0)? / eta0 - 1.0;
    let objective = |beta: f64| -> f64 {
        match diag_phase_error(order, beta, eta0, dims) {
            Ok(e_diag) => {
                let d = e_axis - e_diag;
                d * d
            }
            Err(_) => f64::INFINITY,
        }
    };
    let (lo, hi) = (0.0, 2.0);
    let beta = golden_min(lo, hi, 1e-8, objective);
    let (j_beta, j_lo, j_hi) = (objective(beta), objective(lo), objective(hi));
    if j_beta > j_lo.min(j_hi) {
        return Err(Error::NoInteriorMinimum {
            lo,
            hi,
            j_lo,
            j_hi,
        });
    }
    Ok(beta)
}

/// One row of a directional dispersion survey.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarSample {
    pub ppw: f64,
    pub theta: f64,
    /// effective wavenumber projected on the propagation direction, per cell
    pub kh: f64,
    pub phase_velocity: f64,
    pub group_velocity: [f64; 2],
}

/// Sweep propagation angles over the full circle for each resolution in
/// `ppw_list`, recording phase and group response.
pub fn polar_diagram(
    order: u32,
    beta: f64,
    ppw_list: &[f64],
    n_theta: usize,
) -> Result<Vec<PolarSample>> {
    let mut rows = Vec::with_capacity(ppw_list.len() * n_theta);
    for &ppw in ppw_list {
        check_ppw(ppw)?;
        let eta0 = 2.0 * std::f64::consts::PI / ppw;
        for j in 0..n_theta {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            let vp = phase_velocity(order, beta, ppw, theta)?;
            let vg = group_velocity(order, beta, ppw, theta)?;
            rows.push(PolarSample {
                ppw,
                theta,
                kh: vp * eta0,
                phase_velocity: vp,
                group_velocity: vg,
            });
        }
    }
    Ok(rows)
}

/// Spread (max minus min over direction) of the normalized phase speed.
pub fn phase_speed_spread(order: u32, beta: f64, ppw: f64, n_theta: usize) -> Result<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 0..n_theta {
        let theta = 0.5 * std::f64::consts::PI * j as f64 / (n_theta - 1) as f64;
        let v = phase_velocity(order, beta, ppw, theta)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(hi - lo)
}
