use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::scheme::{one_sided_into, SchemeCoefficients, SweepDirection};

/// Scratch buffers for line gather/solve/scatter, reused across calls.
#[derive(Debug, Default)]
pub(crate) struct MdWorkspace {
    line_in: Vec<f64>,
    line_out: Vec<f64>,
    idx: Vec<usize>,
}

impl MdWorkspace {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    fn resize(&mut self, n: usize) {
        self.line_in.resize(n, 0.0);
        self.line_out.resize(n, 0.0);
        self.idx.resize(n, 0);
    }
}

fn validate(field: &ScalarField, axis: usize, beta: f64) -> Result<()> {
    let grid = field.grid();
    let dims = grid.dims();
    if axis >= dims {
        return Err(Error::DimensionMismatch {
            expected: dims,
            actual: axis + 1,
        });
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidBeta { beta });
    }
    if beta > 0.0 {
        if dims == 1 {
            return Err(Error::BetaRequiresMultipleDims { beta });
        }
        if !grid.is_square() {
            return Err(Error::NonSquare {
                shape: grid.n_per_axis().to_vec(),
            });
        }
    }
    Ok(())
}

/// Diagonal line directions coupled to `axis`: the component along `axis` is +1
/// and every transverse component is +/-1. Two families in 2D, four in 3D.
pub(crate) fn diagonal_families(axis: usize, dims: usize) -> Vec<[isize; 3]> {
    let transverse: Vec<usize> = (0..dims).filter(|&d| d != axis).collect();
    let mut families = Vec::new();
    let combos = 1usize << transverse.len();
    for mask in 0..combos {
        let mut dir = [0isize; 3];
        dir[axis] = 1;
        for (bit, &t) in transverse.iter().enumerate() {
            dir[t] = if mask & (1 << bit) == 0 { 1 } else { -1 };
        }
        families.push(dir);
    }
    families
}

/// Apply the one-sided derivative along `axis`, blending the axis-aligned line
/// solve with diagonal line solves when `beta > 0`:
///
///   d = (d_axis + w * sum of diagonal-family solves) / (1 + beta)
///
/// with w = beta/2 in 2D and beta/4 in 3D. Every line (axis or diagonal) is a
/// periodic orbit of the grid and is solved with the same spacing parameter h.
pub(crate) fn apply_md_into(
    field: &ScalarField,
    axis: usize,
    coeffs: &SchemeCoefficients,
    beta: f64,
    dir: SweepDirection,
    ws: &mut MdWorkspace,
    out: &mut ScalarField,
) -> Result<()> {
    validate(field, axis, beta)?;
    if out.grid() != field.grid() {
        return Err(Error::ShapeMismatch {
            expected: field.grid().n_per_axis().to_vec(),
            actual: out.grid().n_per_axis().to_vec(),
        });
    }
    let grid = field.grid();
    let dims = grid.dims();
    let n = grid.n_per_axis();
    let h = grid.h();
    let strides = grid.strides();
    let np = [
        n[0],
        *n.get(1).unwrap_or(&1),
        *n.get(2).unwrap_or(&1),
    ];
    let len = n[axis];
    ws.resize(len);
    let vals = field.values();

    let (w_axis, w_diag) = if beta > 0.0 {
        let norm = 1.0 / (1.0 + beta);
        let per_family = beta / if dims == 3 { 4.0 } else { 2.0 };
        (norm, per_family * norm)
    } else {
        (1.0, 0.0)
    };

    for v in out.values_mut() {
        *v = 0.0;
    }

    // Axis-aligned lines: pure stride walk.
    let sa = strides[axis];
    let count = |d: usize| if d == axis { 1 } else { np[d] };
    for i2 in 0..count(2) {
        for i1 in 0..count(1) {
            for i0 in 0..count(0) {
                let base = i0 * strides[0] + i1 * strides[1] + i2 * strides[2];
                for t in 0..len {
                    ws.line_in[t] = vals[base + t * sa];
                }
                one_sided_into(coeffs, dir, &ws.line_in, h, &mut ws.line_out);
                let out_vals = out.values_mut();
                for t in 0..len {
                    out_vals[base + t * sa] += w_axis * ws.line_out[t];
                }
            }
        }
    }

    if w_diag == 0.0 {
        return Ok(());
    }

    // Diagonal families: orbits seeded on the hyperplane where the axis
    // coordinate is zero; on square grids each orbit closes after n steps and
    // the orbits of one family partition the grid.
    for family in diagonal_families(axis, dims) {
        for i2 in 0..count(2) {
            for i1 in 0..count(1) {
                for i0 in 0..count(0) {
                    let mut pos = [i0 as isize, i1 as isize, i2 as isize];
                    for t in 0..len {
                        let flat = pos[0] as usize * strides[0]
                            + pos[1] as usize * strides[1]
                            + pos[2] as usize * strides[2];
                        ws.idx[t] = flat;
                        ws.line_in[t] = vals[flat];
                        for d in 0..dims {
                            let mut c = pos[d] + family[d];
                            if c < 0 {
                                c += np[d] as isize;
                            } else if c >= np[d] as isize {
                                c -= np[d] as isize;
                            }
                            pos[d] = c;
                        }
                    }
                    one_sided_into(coeffs, dir, &ws.line_in, h, &mut ws.line_out);
                    let out_vals = out.values_mut();
                    for t in 0..len {
                        out_vals[ws.idx[t]] += w_diag * ws.line_out[t];
                    }
                }
            }
        }
    }
    Ok(())
}

/// Apply the explicit one-sided difference of the classical MacCormack family
/// along `axis` (axis-aligned lines only; no diagonal blending).
pub(crate) fn apply_explicit_into(
    field: &ScalarField,
    axis: usize,
    order: u32,
    dir: SweepDirection,
    ws: &mut MdWorkspace,
    out: &mut ScalarField,
) -> Result<()> {
    validate(field, axis, 0.0)?;
    if out.grid() != field.grid() {
        return Err(Error::ShapeMismatch {
            expected: field.grid().n_per_axis().to_vec(),
            actual: out.grid().n_per_axis().to_vec(),
        });
    }
    let grid = field.grid();
    let n = grid.n_per_axis();
    let h = grid.h();
    let strides = grid.strides();
    let np = [n[0], *n.get(1).unwrap_or(&1), *n.get(2).unwrap_or(&1)];
    let len = n[axis];
    ws.resize(len);
    let vals = field.values();
    let sa = strides[axis];
    let count = |d: usize| if d == axis { 1 } else { np[d] };
    for i2 in 0..count(2) {
        for i1 in 0..count(1) {
            for i0 in 0..count(0) {
                let base = i0 * strides[0] + i1 * strides[1] + i2 * strides[2];
                for t in 0..len {
                    ws.line_in[t] = vals[base + t * sa];
                }
                crate::scheme::explicit_one_sided_into(order, dir, &ws.line_in, h, &mut ws.line_out)?;
                let out_vals = out.values_mut();
                for t in 0..len {
                    out_vals[base + t * sa] = ws.line_out[t];
                }
            }
        }
    }
    Ok(())
}

/// Forward multidimensional derivative along `axis`.
pub fn md_forward_derivative(
    field: &ScalarField,
    axis: usize,
    coeffs: &SchemeCoefficients,
    beta: f64,
) -> Result<ScalarField> {
    let mut out = ScalarField::zeros(field.grid());
    let mut ws = MdWorkspace::new();
    apply_md_into(
        field,
        axis,
        coeffs,
        beta,
        SweepDirection::Forward,
        &mut ws,
        &mut out,
    )?;
    Ok(out)
}

/// Backward multidimensional derivative along `axis`.
pub fn md_backward_derivative(
    field: &ScalarField,
    axis: usize,
    coeffs: &SchemeCoefficients,
    beta: f64,
) -> Result<ScalarField> {
    let mut out = ScalarField::zeros(field.grid());
    let mut ws = MdWorkspace::new();
    apply_md_into(
        field,
        axis,
        coeffs,
        beta,
        SweepDirection::Backward,
        &mut ws,
        &mut out,
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::scheme::{backward_derivative_line, forward_derivative_line, make_coefficients};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand::rngs::StdRng;

    fn random_field(grid: &GridSpec, seed: u64) -> ScalarField {
        let mut rng = StdRng::seed_from_u64(seed);
        let vals = (0..grid.total_points())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        ScalarField::from_values(grid, vals).unwrap()
    }

    #[test]
    fn beta_zero_matches_plain_line_solves() {
        let coeffs = make_coefficients(4).unwrap();
        let grid = GridSpec::new(vec![12, 8], vec![1.2, 0.8]).unwrap();
        let u = random_field(&grid, 3);
        let h = grid.h();
        let dx = md_forward_derivative(&u, 0, &coeffs, 0.0).unwrap();
        // row-by-row 1D solves must agree exactly
        for j in 0..8 {
            let row: Vec<f64> = (0..12).map(|i| u.values()[i + 12 * j]).collect();
            let d = forward_derivative_line(&row, h, &coeffs).unwrap();
            for i in 0..12 {
                assert_eq!(dx.values()[i + 12 * j], d[i], "mismatch at ({i},{j})");
            }
        }
        let dy = md_backward_derivative(&u, 1, &coeffs, 0.0).unwrap();
        for i in 0..12 {
            let col: Vec<f64> = (0..8).map(|j| u.values()[i + 12 * j]).collect();
            let d = backward_derivative_line(&col, h, &coeffs).unwrap();
            for j in 0..8 {
                assert_eq!(dy.values()[i + 12 * j], d[j]);
            }
        }
    }

    /// Measure the complex response on a lattice plane wave by applying the
    /// operator to the cosine and sine parts and reading node 0.
    fn measured_symbol(
        order: u32,
        beta: f64,
        axis: usize,
        grid: &GridSpec,
        modes: &[i32],
        dir: SweepDirection,
    ) -> (f64, f64) {
        let coeffs = make_coefficients(order).unwrap();
        let n = grid.n_per_axis().to_vec();
        let phase = |idx: &[usize]| -> f64 {
            let mut p = 0.0;
            for (d, &m) in modes.iter().enumerate() {
                p += 2.0 * std::f64::consts::PI * m as f64 * idx[d] as f64 / n[d] as f64;
            }
            p
        };
        let mut cos_vals = Vec::with_capacity(grid.total_points());
        let mut sin_vals = Vec::with_capacity(grid.total_points());
        let nz = *n.get(2).unwrap_or(&1);
        let ny = *n.get(1).unwrap_or(&1);
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..n[0] {
                    let p = phase(&[i, j, k]);
                    cos_vals.push(p.cos());
                    sin_vals.push(p.sin());
                }
            }
        }
        let uc = ScalarField::from_values(grid, cos_vals).unwrap();
        let us = ScalarField::from_values(grid, sin_vals).unwrap();
        let coeffs_ref = &coeffs;
        let apply = |f: &ScalarField| -> ScalarField {
            let mut out = ScalarField::zeros(grid);
            let mut ws = MdWorkspace::new();
            apply_md_into(f, axis, coeffs_ref, beta, dir, &mut ws, &mut out).unwrap();
            out
        };
        let dc = apply(&uc);
        let ds = apply(&us);
        // D(e^{i phi}) = (Psi / h) e^{i phi}; at node 0 the phase is zero.
        let re = dc.values()[0] * grid.h();
        let im = ds.values()[0] * grid.h();
        (re, im)
    }

    #[test]
    fn centered_wavenumber_anchor_with_isotropy_correction() {
        // order 4, beta = 0.24, eta = (pi/2, pi/2):
        // K = [f4(pi/2) + 0.12*(f4(pi) + f4(0))] / 1.24 = 1.5 / 1.24
        let grid = GridSpec::square(32, 1.0).unwrap();
        let (_, im_f) = measured_symbol(4, 0.24, 0, &grid, &[8, 8], SweepDirection::Forward);
        assert_relative_eq!(im_f, 1.5 / 1.24, max_relative = 1e-12);
        let (re_f, _) = measured_symbol(4, 0.24, 0, &grid, &[8, 8], SweepDirection::Forward);
        let (re_b, im_b) = measured_symbol(4, 0.24, 0, &grid, &[8, 8], SweepDirection::Backward);
        // backward response is minus the conjugate of the forward one
        assert_relative_eq!(re_b, -re_f, max_relative = 1e-12);
        assert_relative_eq!(im_b, im_f, max_relative = 1e-12);
    }

    #[test]
    fn three_d_reduces_to_two_d_on_z_invariant_fields() {
        let coeffs = make_coefficients(6).unwrap();
        let beta = 0.12;
        let n = 10;
        let g2 = GridSpec::square(n, 1.0).unwrap();
        let g3 = GridSpec::cube(n, 1.0).unwrap();
        let u2 = random_field(&g2, 17);
        let mut vals3 = Vec::with_capacity(n * n * n);
        for _k in 0..n {
            vals3.extend_from_slice(u2.values());
        }
        let u3 = ScalarField::from_values(&g3, vals3).unwrap();
        let d2 = md_forward_derivative(&u2, 0, &coeffs, beta).unwrap();
        let d3 = md_forward_derivative(&u3, 0, &coeffs, beta).unwrap();
        for k in 0..n {
            for idx in 0..n * n {
                assert_relative_eq!(
                    d3.values()[idx + n * n * k],
                    d2.values()[idx],
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn axis_one_is_transpose_of_axis_zero() {
        let coeffs = make_coefficients(4).unwrap();
        let n = 14;
        let grid = GridSpec::square(n, 2.0).unwrap();
        let u = random_field(&grid, 23);
        let beta = 0.3;
        let dy = md_forward_derivative(&u, 1, &coeffs, beta).unwrap();
        let mut t_vals = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                t_vals[j + n * i] = u.values()[i + n * j];
            }
        }
        let ut = ScalarField::from_values(&grid, t_vals).unwrap();
        let dxt = md_forward_derivative(&ut, 0, &coeffs, beta).unwrap();
        for j in 0..n {
            for i in 0..n {
                assert_relative_eq!(
                    dy.values()[i + n * j],
                    dxt.values()[j + n * i],
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn backward_is_point_reflection_of_forward() {
        let coeffs = make_coefficients(6).unwrap();
        let n = 12;
        let grid = GridSpec::square(n, 1.0).unwrap();
        let u = random_field(&grid, 31);
        let beta = 0.12;
        let mut refl = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                refl[i + n * j] = u.values()[(n - i) % n + n * ((n - j) % n)];
            }
        }
        let ur = ScalarField::from_values(&grid, refl).unwrap();
        let db = md_backward_derivative(&u, 0, &coeffs, beta).unwrap();
        let df = md_forward_derivative(&ur, 0, &coeffs, beta).unwrap();
        for j in 0..n {
            for i in 0..n {
                assert_relative_eq!(
                    db.values()[i + n * j],
                    -df.values()[(n - i) % n + n * ((n - j) % n)],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn constant_fields_map_to_zero() {
        let coeffs = make_coefficients(4).unwrap();
        let grid = GridSpec::cube(6, 3.0).unwrap();
        let u = ScalarField::from_values(&grid, vec![2.5; 216]).unwrap();
        for axis in 0..3 {
            let d = md_forward_derivative(&u, axis, &coeffs, 0.24).unwrap();
            assert!(d.max_abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_diagonal_coupling_on_non_square_grids() {
        let coeffs = make_coefficients(4).unwrap();
        let grid = GridSpec::new(vec![10, 20], vec![1.0, 2.0]).unwrap();
        let u = random_field(&grid, 1);
        assert!(matches!(
            md_forward_derivative(&u, 0, &coeffs, 0.1),
            Err(Error::NonSquare { .. })
        ));
        assert!(md_forward_derivative(&u, 0, &coeffs, 0.0).is_ok());
        let g1 = GridSpec::line(16, 1.0).unwrap();
        let u1 = random_field(&g1, 2);
        assert!(matches!(
            md_forward_derivative(&u1, 0, &coeffs, 0.2),
            Err(Error::BetaRequiresMultipleDims { .. })
        ));
        assert!(matches!(
            md_forward_derivative(&u1, 0, &coeffs, -0.5),
            Err(Error::InvalidBeta { .. })
        ));
    }

    #[test]
    fn linearity() {
        let coeffs = make_coefficients(4).unwrap();
        let grid = GridSpec::square(9, 1.0).unwrap();
        let u = random_field(&grid, 5);
        let v = random_field(&grid, 6);
        let combo_vals: Vec<f64> = u
            .values()
            .iter()
            .zip(v.values())
            .map(|(a, b)| 2.0 * a - 0.5 * b)
            .collect();
        let combo = ScalarField::from_values(&grid, combo_vals).unwrap();
        let du = md_forward_derivative(&u, 1, &coeffs, 0.4).unwrap();
        let dv = md_forward_derivative(&v, 1, &coeffs, 0.4).unwrap();
        let dc = md_forward_derivative(&combo, 1, &coeffs, 0.4).unwrap();
        for i in 0..81 {
            assert_relative_eq!(
                dc.values()[i],
                2.0 * du.values()[i] - 0.5 * dv.values()[i],
                epsilon = 1e-12
            );
        }
    }
}
