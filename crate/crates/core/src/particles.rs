//! Interacting particles `dx_j/dt = (1/N) Σ_{k≠j} F(x_j - x_k, T(x_j))` on the
//! unit torus, integrated with explicit Euler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convolution::force_bound;
use crate::error::{Error, Result};
use crate::grid::{min_image, wrap, DensityField, Grid2D};
use crate::kernels::{ForceParams, TensorField, Vec2};

/// Default step as a fraction of `1/f`.
pub const DEFAULT_DT_FACTOR: f64 = 0.2;

#[derive(Clone, Debug)]
pub struct ParticleEnsemble {
    positions: Vec<Vec2>,
    /// Positions without periodic wrapping; their mean is conserved for
    /// homogeneous tensor fields.
    unwrapped: Vec<Vec2>,
    tensor: TensorField,
    grid: Grid2D,
    params: ForceParams,
    forces: Vec<Vec2>,
}

impl ParticleEnsemble {
    /// Particles at the given positions (wrapped into the fundamental
    /// domain). The tensor field is piecewise constant on its own grid.
    pub fn new(positions: Vec<Vec2>, tensor: TensorField, params: ForceParams) -> Result<Self> {
        params.validate()?;
        if positions.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::InvalidParameter("particle positions must be finite".into()));
        }
        let positions: Vec<Vec2> = positions.into_iter().map(|p| Vec2::new(wrap(p.x), wrap(p.y))).collect();
        let grid = Grid2D::new(tensor.nx(), tensor.ny())?;
        let n = positions.len();
        Ok(Self { unwrapped: positions.clone(), positions, tensor, grid, params, forces: vec![Vec2::ZERO; n] })
    }

    /// `n` particles drawn uniformly on the torus from a seeded generator.
    pub fn random(n: usize, seed: u64, tensor: TensorField, params: ForceParams) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pos = (0..n).map(|_| Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).collect();
        Self::new(pos, tensor, params)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    /// Mean of the unwrapped trajectories.
    pub fn center_of_mass(&self) -> Vec2 {
        let n = self.unwrapped.len().max(1) as f64;
        self.unwrapped.iter().fold(Vec2::ZERO, |a, &p| a + p) * (1.0 / n)
    }

    /// The step `0.2/f` with `f` the force bound.
    pub fn default_dt(&self) -> f64 {
        DEFAULT_DT_FACTOR / force_bound(&self.params)
    }

    /// One explicit Euler step with minimum-image differences, then wrap.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let n = self.positions.len();
        let p = self.params;
        let reach = p.cutoff / p.eta;
        let dirs: Vec<(Vec2, Vec2)> = self
            .positions
            .iter()
            .map(|&x| {
                let (i, j) = self.grid.cell_of(x);
                (self.tensor.s(i, j), self.tensor.l(i, j))
            })
            .collect();
        self.forces.iter_mut().for_each(|f| *f = Vec2::ZERO);
        for a in 0..n {
            let xa = self.positions[a];
            let (sa, la) = dirs[a];
            for b in a + 1..n {
                let xb = self.positions[b];
                let d = Vec2::new(min_image(xa.x - xb.x), min_image(xa.y - xb.y));
                let r = d.norm();
                if r >= reach {
                    continue;
                }
                let de = d * p.eta;
                let (fs, fl) = p.radial(r * p.eta);
                let (sb, lb) = dirs[b];
                self.forces[a] += sa * (fs * sa.dot(de)) + la * (fl * la.dot(de));
                // F(-d, T_b) = -F(d, T_b).
                self.forces[b] += -(sb * (fs * sb.dot(de)) + lb * (fl * lb.dot(de)));
            }
        }
        let scale = dt / n as f64;
        for ((x, u), f) in self.positions.iter_mut().zip(&mut self.unwrapped).zip(&self.forces) {
            let v = *f * scale;
            *u += v;
            *x = Vec2::new(wrap(x.x + v.x), wrap(x.y + v.y));
        }
        Ok(())
    }

    /// Cell counts normalized to unit mass.
    pub fn histogram(&self, grid: Grid2D) -> Result<DensityField> {
        let mut counts = vec![0.0; grid.len()];
        for &x in &self.positions {
            let (i, j) = grid.cell_of(x);
            counts[grid.idx(i, j)] += 1.0;
        }
        DensityField::normalized(grid, counts)
    }

    /// Position dump `j,x,y`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,x,y\n");
        for (j, p) in self.positions.iter().enumerate() {
            out.push_str(&format!("{j},{},{}\n", crate::io::fmt_f64(p.x), crate::io::fmt_f64(p.y)));
        }
        out
    }
}
