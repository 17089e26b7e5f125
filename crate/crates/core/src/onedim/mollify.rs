//! Heat-kernel mollification `ρ_δ = φ_δ ∗ ρ` with
//! `φ(x) = (4π)^{-1/2} exp(-x²/4)` and `φ_δ(x) = φ(x/√δ)/√δ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::density::Density1D;

/// `C_φ = (4π)^{-1/2}`, the constant in `δ ∫ ρ_δ² ≤ C_φ √δ`.
pub const C_PHI: f64 = 0.282_094_791_773_878_14;

pub fn heat_kernel(x: f64, delta: f64) -> f64 {
    let s = delta.sqrt();
    (4.0 * PI).powf(-0.5) * (-(x / s).powi(2) / 4.0).exp() / s
}

/// Discrete convolution with `φ_δ` on the density's grid, renormalized to
/// unit mass on that grid.
pub fn mollify(rho: &Density1D, delta: f64) -> Result<Density1D> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("mollification parameter must be positive, got {delta}")));
    }
    let g = rho.grid();
    let kernel: Vec<f64> = (0..g.m).map(|k| heat_kernel(k as f64 * g.h, delta)).collect();
    let src = rho.values();
    let support: Vec<usize> = (0..g.m).filter(|&j| src[j] != 0.0).collect();
    let out: Vec<f64> = (0..g.m)
        .map(|i| support.iter().map(|&j| kernel[i.abs_diff(j)] * src[j]).sum::<f64>() * g.h)
        .collect();
    Density1D::normalized(g, out)
}
