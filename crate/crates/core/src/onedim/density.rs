//! One-dimensional grids, densities and convolution with `W`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::min_image;

use super::potential::Potential1D;

/// Above this many points convolutions switch from direct sums to FFT.
const DIRECT_LIMIT: usize = 4096;

/// `m` equispaced points `x_i = x0 + i h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub x0: f64,
    pub h: f64,
    pub m: usize,
}

impl Grid1D {
    /// `m` points including both ends of `[-a, a]`.
    pub fn symmetric(half_width: f64, m: usize) -> Result<Self> {
        if m < 3 || !(half_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "symmetric grid needs m ≥ 3 and positive half-width, got m = {m}, a = {half_width}"
            )));
        }
        Ok(Self { x0: -half_width, h: 2.0 * half_width / (m - 1) as f64, m })
    }

    /// `m` cells of the period `[-0.5, 0.5)`, `x_i = -0.5 + i/m`.
    pub fn periodic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("periodic grid needs at least one point".into()));
        }
        Ok(Self { x0: -0.5, h: 1.0 / m as f64, m })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.x(i)).collect()
    }
}

/// How `W ∗ ρ` treats the ends of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvolutionMode {
    /// Density extended by zero on ℝ.
    FreeSpace,
    /// Grid is one period; differences use the minimum image.
    Periodic,
}

/// Nonnegative grid density of unit mass `Σ ρ_i h = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Density1D {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Density1D {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        let d = Self::checked(grid, values)?;
        let mass = d.mass();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("density must have unit mass, got {mass}")));
        }
        Ok(d)
    }

    pub fn normalized(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        let mut d = Self::checked(grid, values)?;
        let mass = d.mass();
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(format!("density has nonpositive mass {mass}")));
        }
        d.values.iter_mut().for_each(|v| *v /= mass);
        Ok(d)
    }

    fn checked(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.m {
            return Err(Error::DimensionMismatch { expected: format!("{} values", grid.m), found: values.len().to_string() });
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter("density values must be finite and nonnegative".into()));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Grid1D, values: Vec<f64>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.h
    }

    /// `Σ ρ_i² h`.
    pub fn square_integral(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.h
    }

    /// `∫|ρ - σ|` on a shared grid.
    pub fn l1_distance(&self, other: &Density1D) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).sum::<f64>() * self.grid.h
    }

    /// Indices of the first and last value above `eps`.
    pub fn support(&self, eps: f64) -> Option<(usize, usize)> {
        let first = self.values.iter().position(|&v| v > eps)?;
        let last = self.values.iter().rposition(|&v| v > eps)?;
        Some((first, last))
    }

    /// Width `x_last - x_first` of the support.
    pub fn support_width(&self, eps: f64) -> f64 {
        self.support(eps).map_or(0.0, |(a, b)| (b - a) as f64 * self.grid.h)
    }

    /// CSV `x,rho`.
    pub fn to_csv(&self) -> String {
        crate::io::two_column_csv("x,rho", &self.grid.xs(), &self.values)
    }
}

/// Convolution `(W ∗ ρ)_i = Σ_j W(x_i - x_j) ρ_j h` on a fixed grid.
pub struct Convolver {
    grid: Grid1D,
    mode: ConvolutionMode,
    /// `W(k h)` for `k = 0..m` (free space) or the circulant row (periodic).
    kernel: Vec<f64>,
    spectral: Option<Spectral>,
}

struct Spectral {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex64>,
}

impl Convolver {
    pub fn new(pot: &Potential1D, grid: Grid1D, mode: ConvolutionMode) -> Self {
        let m = grid.m;
        let kernel: Vec<f64> = match mode {
            ConvolutionMode::FreeSpace => (0..m).map(|k| pot.w(k as f64 * grid.h)).collect(),
            ConvolutionMode::Periodic => (0..m).map(|k| pot.w(min_image(k as f64 * grid.h))).collect(),
        };
        let spectral = (m > DIRECT_LIMIT).then(|| {
            let n = match mode {
                ConvolutionMode::FreeSpace => (2 * m).next_power_of_two(),
                ConvolutionMode::Periodic => m,
            };
            let mut planner = FftPlanner::new();
            let fwd = planner.plan_fft_forward(n);
            let inv = planner.plan_fft_inverse(n);
            let mut kernel_hat = vec![Complex64::default(); n];
            match mode {
                ConvolutionMode::FreeSpace => {
                    for k in 0..m {
                        kernel_hat[k] = kernel[k].into();
                        if k > 0 {
                            kernel_hat[n - k] = kernel[k].into();
                        }
                    }
                }
                ConvolutionMode::Periodic => {
                    for k in 0..m {
                        kernel_hat[k] = kernel[k].into();
                    }
                }
            }
            fwd.process(&mut kernel_hat);
            Spectral { n, fwd, inv, kernel_hat }
        });
        Self { grid, mode, kernel, spectral }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn apply(&self, rho: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.m];
        self.apply_into(rho, &mut out);
        out
    }

    pub fn apply_into(&self, rho: &[f64], out: &mut [f64]) {
        let m = self.grid.m;
        let h = self.grid.h;
        assert_eq!(rho.len(), m);
        if let Some(sp) = &self.spectral {
            let mut buf = vec![Complex64::default(); sp.n];
            for (b, r) in buf.iter_mut().zip(rho) {
                *b = (*r).into();
            }
            sp.fwd.process(&mut buf);
            for (b, k) in buf.iter_mut().zip(&sp.kernel_hat) {
                *b *= k;
            }
            sp.inv.process(&mut buf);
            let scale = h / sp.n as f64;
            for (o, b) in out.iter_mut().zip(&buf) {
                *o = b.re * scale;
            }
            return;
        }
        match self.mode {
            ConvolutionMode::FreeSpace => {
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, r) in rho.iter().enumerate() {
                        if *r != 0.0 {
                            acc += self.kernel[i.abs_diff(j)] * r;
                        }
                    }
                    *o = acc * h;
                }
            }
            ConvolutionMode::Periodic => {
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, r) in rho.iter().enumerate() {
                        acc += self.kernel[(i + m - j) % m] * r;
                    }
                    *o = acc * h;
                }
            }
        }
    }
}
