use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Coefficients of the prefactored one-sided relations.
///
/// Forward relation on a periodic line of spacing `h`:
///   a*d[i+1] + (1-a)*d[i] = (b*u[i+1] - e*u[i] - f*u[i-1]) / h
/// Backward relation is its mirror:
///   a*d[i-1] + (1-a)*d[i] = (f*u[i+1] + e*u[i] - b*u[i-1]) / h
/// with e = 2b - 1 and f = 1 - b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeCoefficients {
    pub order: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub e: f64,
    pub f: f64,
    /// (a + c - 1) / a, the recursion ratio of the implicit side.
    pub alpha: f64,
}

/// Direction of the one-sided derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDirection {
    Forward,
    Backward,
}

/// Build the coefficient set for a given formal order of the averaged operator.
pub fn make_coefficients(order: u32) -> Result<SchemeCoefficients> {
    let (a, b) = match order {
        4 => (0.5 - 0.5 / 3.0_f64.sqrt(), 1.0),
        6 => {
            let a = 0.5 - 0.5 / 5.0_f64.sqrt();
            (a, 1.0 - 1.0 / (30.0 * a))
        }
        _ => return Err(Error::UnsupportedOrder { order }),
    };
    let c = 0.0;
    Ok(SchemeCoefficients {
        order,
        a,
        b,
        c,
        e: 2.0 * b - 1.0,
        f: 1.0 - b,
        alpha: (a + c - 1.0) / a,
    })
}

fn check_line(u: &[f64], h: f64) -> Result<()> {
    if u.len() < GridSpec::MIN_POINTS {
        return Err(Error::GridTooSmall {
            axis: 0,
            len: u.len(),
            min: GridSpec::MIN_POINTS,
        });
    }
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidSpacing { h });
    }
    Ok(())
}

/// Solve the periodic one-sided relation on a line, writing into `out`.
///
/// The bidiagonal system is solved by one substitution sweep for a particular
/// solution (periodic seed taken as zero) plus the homogeneous geometric mode,
/// fixed exactly by the periodicity condition. The recursion ratio a/(1-a) is
/// below one for both supported orders, so the sweep is contractive.
pub(crate) fn one_sided_into(
    coeffs: &SchemeCoefficients,
    dir: SweepDirection,
    u: &[f64],
    h: f64,
    out: &mut [f64],
) {
    debug_assert_eq!(u.len(), out.len());
    let n = u.len();
    let q = 1.0 / (1.0 - coeffs.a);
    let r = coeffs.a / (1.0 - coeffs.a);
    let inv_h = 1.0 / h;
    let (b, e, f) = (coeffs.b, coeffs.e, coeffs.f);
    let ratio = (-r).powi(n as i32);

    match dir {
        SweepDirection::Forward => {
            let rhs = |i: usize| {
                let up = u[if i + 1 == n { 0 } else { i + 1 }];
                let um = u[if i == 0 { n - 1 } else { i - 1 }];
                (b * up - e * u[i] - f * um) * inv_h
            };
            out[n - 1] = q * rhs(n - 1);
            for i in (0..n - 1).rev() {
                out[i] = q * rhs(i) - r * out[i + 1];
            }
            let d0 = out[0] / (1.0 - ratio);
            let mut g = 1.0;
            for i in (0..n).rev() {
                g *= -r;
                out[i] += d0 * g;
            }
        }
        SweepDirection::Backward => {
            let rhs = |i: usize| {
                let up = u[if i + 1 == n { 0 } else { i + 1 }];
                let um = u[if i == 0 { n - 1 } else { i - 1 }];
                (f * up + e * u[i] - b * um) * inv_h
            };
            out[0] = q * rhs(0);
            for i in 1..n {
                out[i] = q * rhs(i) - r * out[i - 1];
            }
            let dl = out[n - 1] / (1.0 - ratio);
            let mut g = 1.0;
            for v in out.iter_mut() {
                g *= -r;
                *v += dl * g;
            }
        }
    }
}

/// Forward one-sided derivative of a periodic line.
pub fn forward_derivative_line(u: &[f64], h: f64, coeffs: &SchemeCoefficients) -> Result<Vec<f64>> {
    check_line(u, h)?;
    let mut out = vec![0.0; u.len()];
    one_sided_into(coeffs, SweepDirection::Forward, u, h, &mut out);
    Ok(out)
}

/// Backward one-sided derivative of a periodic line.
pub fn backward_derivative_line(
    u: &[f64],
    h: f64,
    coeffs: &SchemeCoefficients,
) -> Result<Vec<f64>> {
    check_line(u, h)?;
    let mut out = vec![0.0; u.len()];
    one_sided_into(coeffs, SweepDirection::Backward, u, h, &mut out);
    Ok(out)
}

/// Average of the forward and backward derivatives; this is the centered
/// operator whose wavenumber response attains the scheme's formal order.
pub fn centered_derivative_line(
    u: &[f64],
    h: f64,
    coeffs: &SchemeCoefficients,
) -> Result<Vec<f64>> {
    check_line(u, h)?;
    let mut fwd = vec![0.0; u.len()];
    let mut bwd = vec![0.0; u.len()];
    one_sided_into(coeffs, SweepDirection::Forward, u, h, &mut fwd);
    one_sided_into(coeffs, SweepDirection::Backward, u, h, &mut bwd);
    for (a, b) in fwd.iter_mut().zip(&bwd) {
        *a = 0.5 * (*a + b);
    }
    Ok(fwd)
}

fn explicit_stencil(order: u32) -> Result<(&'static [f64], f64)> {
    // Forward stencils, offsets 0..len-1, with the given denominator times h.
    const S2: [f64; 2] = [-1.0, 1.0];
    const S4: [f64; 3] = [-7.0, 8.0, -1.0];
    const S6: [f64; 4] = [-37.0, 45.0, -9.0, 1.0];
    match order {
        2 => Ok((&S2, 1.0)),
        4 => Ok((&S4, 6.0)),
        6 => Ok((&S6, 30.0)),
        _ => Err(Error::UnsupportedExplicitOrder { order }),
    }
}

pub(crate) fn explicit_one_sided_into(
    order: u32,
    dir: SweepDirection,
    u: &[f64],
    h: f64,
    out: &mut [f64],
) -> Result<()> {
    let (stencil, denom) = explicit_stencil(order)?;
    let n = u.len();
    let scale = 1.0 / (denom * h);
    match dir {
        SweepDirection::Forward => {
            for (i, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (k, w) in stencil.iter().enumerate() {
                    let j = i + k;
                    acc += w * u[if j >= n { j - n } else { j }];
                }
                *o = acc * scale;
            }
        }
        SweepDirection::Backward => {
            for (i, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (k, w) in stencil.iter().enumerate() {
                    acc -= w * u[(i + n - k) % n];
                }
                *o = acc * scale;
            }
        }
    }
    Ok(())
}

/// Explicit one-sided difference of the classical MacCormack family
/// (orders 2, 4, 6), forward bias.
pub fn explicit_forward_line(order: u32, u: &[f64], h: f64) -> Result<Vec<f64>> {
    check_line(u, h)?;
    let mut out = vec![0.0; u.len()];
    explicit_one_sided_into(order, SweepDirection::Forward, u, h, &mut out)?;
    Ok(out)
}

/// Explicit one-sided difference, backward bias (mirror of the forward one).
pub fn explicit_backward_line(order: u32, u: &[f64], h: f64) -> Result<Vec<f64>> {
    check_line(u, h)?;
    let mut out = vec![0.0; u.len()];
    explicit_one_sided_into(order, SweepDirection::Backward, u, h, &mut out)?;
    Ok(out)
}
