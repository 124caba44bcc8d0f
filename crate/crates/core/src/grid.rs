use crate::error::{Error, Result};

/// Uniform periodic grid. On each axis `i` there are `n_per_axis[i]` points
/// covering a period `lengths[i]`, so the spacing is `lengths[i] / n_per_axis[i]`
/// and must agree across axes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    dims: usize,
    n_per_axis: Vec<usize>,
    lengths: Vec<f64>,
    h: f64,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 4;

    pub fn new(n_per_axis: Vec<usize>, lengths: Vec<f64>) -> Result<Self> {
        let dims = n_per_axis.len();
        if !(1..=3).contains(&dims) {
            return Err(Error::UnsupportedDims { dims });
        }
        if lengths.len() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                actual: lengths.len(),
            });
        }
        for (axis, &n) in n_per_axis.iter().enumerate() {
            if n < Self::MIN_POINTS {
                return Err(Error::GridTooSmall {
                    axis,
                    len: n,
                    min: Self::MIN_POINTS,
                });
            }
        }
        let h = lengths[0] / n_per_axis[0] as f64;
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::InvalidSpacing { h });
        }
        for axis in 1..dims {
            let hi = lengths[axis] / n_per_axis[axis] as f64;
            if (hi - h).abs() > 1e-12 * h.abs() {
                return Err(Error::AnisotropicSpacing { axis, h0: h, h1: hi });
            }
        }
        Ok(Self {
            dims,
            n_per_axis,
            lengths,
            h,
        })
    }

    /// Square 2D grid with `n` points per axis.
    pub fn square(n: usize, length: f64) -> Result<Self> {
        Self::new(vec![n, n], vec![length, length])
    }

    /// Cubic 3D grid with `n` points per axis.
    pub fn cube(n: usize, length: f64) -> Result<Self> {
        Self::new(vec![n, n, n], vec![length, length, length])
    }

    /// 1D grid with `n` points.
    pub fn line(n: usize, length: f64) -> Result<Self> {
        Self::new(vec![n], vec![length])
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn n_per_axis(&self) -> &[usize] {
        &self.n_per_axis
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn total_points(&self) -> usize {
        self.n_per_axis.iter().product()
    }

    /// Strides for flat indexing; axis 0 is fastest.
    pub fn strides(&self) -> [usize; 3] {
        let nx = self.n_per_axis[0];
        let ny = *self.n_per_axis.get(1).unwrap_or(&1);
        [1, nx, nx * ny]
    }

    pub fn is_square(&self) -> bool {
        self.n_per_axis.iter().all(|&n| n == self.n_per_axis[0])
    }
}

/// Scalar values on a [`GridSpec`], stored flat with axis 0 fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.total_points()],
        }
    }

    pub fn from_values(grid: &GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.total_points() {
            return Err(Error::ShapeMismatch {
                expected: grid.n_per_axis().to_vec(),
                actual: vec![values.len()],
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    /// Sample `f` at the grid nodes; `origin` gives the coordinate of index 0 on each axis.
    pub fn from_fn(grid: &GridSpec, origin: &[f64], f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        if origin.len() != grid.dims() {
            return Err(Error::DimensionMismatch {
                expected: grid.dims(),
                actual: origin.len(),
            });
        }
        let h = grid.h();
        let n = grid.n_per_axis();
        let mut values = Vec::with_capacity(grid.total_points());
        let mut coord = vec![0.0_f64; grid.dims()];
        let nz = *n.get(2).unwrap_or(&1);
        let ny = *n.get(1).unwrap_or(&1);
        for k in 0..nz {
            if grid.dims() > 2 {
                coord[2] = origin[2] + k as f64 * h;
            }
            for j in 0..ny {
                if grid.dims() > 1 {
                    coord[1] = origin[1] + j as f64 * h;
                }
                for i in 0..n[0] {
                    coord[0] = origin[0] + i as f64 * h;
                    values.push(f(&coord));
                }
            }
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Discrete L2 norm (root of spacing-weighted sum of squares) and max norm
/// of the pointwise difference between two fields on the same grid.
pub fn error_norms(a: &ScalarField, b: &ScalarField) -> Result<(f64, f64)> {
    if a.grid != b.grid {
        return Err(Error::ShapeMismatch {
            expected: a.grid.n_per_axis().to_vec(),
            actual: b.grid.n_per_axis().to_vec(),
        });
    }
    let mut sq = 0.0;
    let mut linf = 0.0_f64;
    for (x, y) in a.values.iter().zip(&b.values) {
        let d = x - y;
        sq += d * d;
        linf = linf.max(d.abs());
    }
    let l2 = (a.grid.h().powi(a.grid.dims() as i32) * sq).sqrt();
    Ok((l2, linf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spacing_must_match_across_axes() {
        let err = GridSpec::new(vec![10, 20], vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::AnisotropicSpacing { .. }));
        let ok = GridSpec::new(vec![10, 20], vec![1.0, 2.0]).unwrap();
        assert_relative_eq!(ok.h(), 0.1);
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(matches!(
            GridSpec::line(3, 1.0).unwrap_err(),
            Error::GridTooSmall { .. }
        ));
    }

    #[test]
    fn flat_layout_is_x_fastest() {
        let grid = GridSpec::new(vec![4, 5], vec![4.0, 5.0]).unwrap();
        let f = ScalarField::from_fn(&grid, &[0.0, 0.0], |p| p[0] + 10.0 * p[1]).unwrap();
        // value at (i=2, j=3) lives at flat index 2 + 4*3
        assert_relative_eq!(f.values()[2 + 4 * 3], 2.0 + 30.0);
    }

    #[test]
    fn norms_scale_with_spacing() {
        let grid = GridSpec::square(8, 2.0).unwrap();
        let a = ScalarField::from_values(&grid, vec![1.0; 64]).unwrap();
        let b = ScalarField::from_values(&grid, vec![0.0; 64]).unwrap();
        let (l2, linf) = error_norms(&a, &b).unwrap();
        // h = 0.25, so l2 = sqrt(0.0625 * 64) = 2
        assert_relative_eq!(l2, 2.0, max_relative = 1e-14);
        assert_relative_eq!(linf, 1.0);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let g1 = GridSpec::square(8, 1.0).unwrap();
        let g2 = GridSpec::square(16, 1.0).unwrap();
        let a = ScalarField::zeros(&g1);
        let b = ScalarField::zeros(&g2);
        assert!(error_norms(&a, &b).is_err());
    }
}
