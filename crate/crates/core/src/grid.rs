//! Periodic Cartesian grid on the unit torus and cell-averaged densities.

use crate::error::{Error, Result};
use crate::kernels::Vec2;

/// Tolerance on the unit-mass invariant of [`DensityField`].
pub const MASS_TOL: f64 = 1e-12;

/// Signed minimum-image representative of a periodic difference on the unit
/// circle, in `[-0.5, 0.5]`.
#[inline]
pub fn min_image(d: f64) -> f64 {
    d - d.round()
}

/// Wraps a coordinate into the fundamental domain `[-0.5, 0.5)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let w = x - (x + 0.5).floor();
    if w >= 0.5 {
        w - 1.0
    } else {
        w
    }
}

/// `nx × ny` cells covering `[-0.5, 0.5)²`; cell `(i, j)` is
/// `[-0.5 + i dx, -0.5 + (i+1) dx) × [-0.5 + j dy, -0.5 + (j+1) dy)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter(format!("grid dimensions must be positive, got {nx}x{ny}")));
        }
        Ok(Self { nx, ny })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        1.0 / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn x_center(&self, i: usize) -> f64 {
        -0.5 + (i as f64 + 0.5) * self.dx()
    }

    pub fn y_center(&self, j: usize) -> f64 {
        -0.5 + (j as f64 + 0.5) * self.dy()
    }

    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(self.x_center(i), self.y_center(j))
    }

    /// Cell containing a point of the fundamental domain.
    pub fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let i = (((wrap(p.x) + 0.5) * self.nx as f64).floor() as usize).min(self.nx - 1);
        let j = (((wrap(p.y) + 0.5) * self.ny as f64).floor() as usize).min(self.ny - 1);
        (i, j)
    }
}

/// Nonnegative cell averages of unit total mass.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl DensityField {
    /// Checks length, finiteness, nonnegativity and unit mass.
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        let field = Self::from_raw(grid, values)?;
        let m = field.mass();
        if (m - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidParameter(format!("density must have unit mass, got {m}")));
        }
        Ok(field)
    }

    /// Rescales nonnegative values to unit mass.
    pub fn normalized(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        let mut field = Self::from_raw(grid, values)?;
        let m = field.mass();
        if !(m > 0.0) {
            return Err(Error::InvalidParameter(format!("density has nonpositive mass {m}")));
        }
        field.values.iter_mut().for_each(|v| *v /= m);
        Ok(field)
    }

    fn from_raw(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} cells", grid.len()),
                found: values.len().to_string(),
            });
        }
        if let Some(k) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "density value {} at cell ({}, {}) is negative or non-finite",
                values[k],
                k % grid.nx,
                k / grid.nx
            )));
        }
        Ok(Self { grid, values })
    }


    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut Vec<f64> {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Row `j` as a vector of length `nx`.
    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.grid.nx;
        &self.values[j * nx..(j + 1) * nx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_image_range() {
        assert_eq!(min_image(0.7), 0.7 - 1.0);
        assert_eq!(min_image(-0.7), 1.0 - 0.7);
        assert_eq!(min_image(0.2), 0.2);
    }

    #[test]
    fn wrap_into_domain() {
        assert_eq!(wrap(0.5), -0.5);
        assert_eq!(wrap(-0.5), -0.5);
        assert!((wrap(0.75) + 0.25).abs() < 1e-15);
        assert!((wrap(-1.6) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn cell_geometry() {
        let g = Grid2D::new(4, 2).unwrap();
        assert_eq!(g.dx(), 0.25);
        assert_eq!(g.x_center(0), -0.375);
        assert_eq!(g.y_center(1), 0.25);
        assert_eq!(g.cell_of(Vec2::new(-0.5, 0.49)), (0, 1));
        assert_eq!(g.cell_of(Vec2::new(0.01, -0.01)), (2, 0));
    }

    #[test]
    fn density_validation() {
        let g = Grid2D::new(2, 2).unwrap();
        assert!(DensityField::new(g, vec![1.0; 4]).is_ok());
        assert!(DensityField::new(g, vec![2.0; 4]).is_err());
        assert!(DensityField::new(g, vec![2.0, 2.0, -0.0, -1.0]).is_err());
        assert!(DensityField::normalized(g, vec![0.0; 4]).is_err());
        let d = DensityField::normalized(g, vec![3.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-15);
    }
}
