//! Initial data and its cell-average discretization.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{min_image, DensityField, Grid2D};
use crate::kernels::Vec2;

/// Subsamples per cell and dimension (4 × 4 = 16 midpoints).
const SUB: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    Uniform,
    /// Indicator of a periodic disc.
    Disc { center: Vec2, radius: f64 },
    /// Periodic (minimum-image) Gaussian `exp(-|x - c|²/(2σ²))`.
    Gaussian { center: Vec2, sigma: f64 },
    /// `1 + amplitude·U(-1, 1)` per cell from a seeded generator.
    Noisy { amplitude: f64, seed: u64 },
    /// Cell values from a snapshot CSV (`i,j,x_center,y_center,rho`).
    File(PathBuf),
}

/// Cell averages by 4 × 4 midpoint subsampling, normalized to unit mass.
pub fn discretize_initial(init: &InitialData, grid: Grid2D) -> Result<DensityField> {
    let values = match init {
        InitialData::Uniform => vec![1.0; grid.len()],
        InitialData::Disc { center, radius } => {
            if !(*radius > 0.0) {
                return Err(Error::InvalidParameter(format!("disc radius must be positive, got {radius}")));
            }
            let (c, r2) = (*center, radius * radius);
            subsample(grid, |p| {
                let d = Vec2::new(min_image(p.x - c.x), min_image(p.y - c.y));
                if d.dot(d) <= r2 {
                    1.0
                } else {
                    0.0
                }
            })
        }
        InitialData::Gaussian { center, sigma } => {
            if !(*sigma > 0.0) {
                return Err(Error::InvalidParameter(format!("gaussian width must be positive, got {sigma}")));
            }
            let (c, s2) = (*center, 2.0 * sigma * sigma);
            subsample(grid, |p| {
                let d = Vec2::new(min_image(p.x - c.x), min_image(p.y - c.y));
                (-d.dot(d) / s2).exp()
            })
        }
        InitialData::Noisy { amplitude, seed } => {
            if !(0.0..1.0).contains(amplitude) {
                return Err(Error::InvalidParameter(format!("noise amplitude must lie in [0, 1), got {amplitude}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..grid.len()).map(|_| 1.0 + amplitude * rng.gen_range(-1.0..1.0)).collect()
        }
        InitialData::File(path) => {
            let text = std::fs::read_to_string(path)?;
            let v = crate::io::parse_snapshot_csv(&text, grid)?;
            if v.iter().any(|x| *x < 0.0) {
                return Err(Error::InvalidParameter(format!("{} contains negative densities", path.display())));
            }
            v
        }
    };
    let mass: f64 = values.iter().sum::<f64>() * grid.cell_area();
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter(format!("initial data has empty support (mass {mass})")));
    }
    DensityField::normalized(grid, values)
}

fn subsample(grid: Grid2D, g: impl Fn(Vec2) -> f64) -> Vec<f64> {
    let (dx, dy) = (grid.dx(), grid.dy());
    let mut out = vec![0.0; grid.len()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x0, y0) = (-0.5 + i as f64 * dx, -0.5 + j as f64 * dy);
            let mut acc = 0.0;
            for b in 0..SUB {
                for a in 0..SUB {
                    let p = Vec2::new(x0 + (a as f64 + 0.5) * dx / SUB as f64, y0 + (b as f64 + 0.5) * dy / SUB as f64);
                    acc += g(p);
                }
            }
            out[grid.idx(i, j)] = acc / (SUB * SUB) as f64;
        }
    }
    out
}
