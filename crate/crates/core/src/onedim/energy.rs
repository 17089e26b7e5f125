//! Interaction energy `E(ρ) = ½ ∫ ρ (W ∗ ρ)` and its regularization
//! `E_δ(ρ) = E(ρ) + δ/2 ∫ ρ²`.

use super::density::{ConvolutionMode, Convolver, Density1D};
use super::potential::Potential1D;

/// `½ Σ ρ_i (W ∗ ρ)_i h` with a prepared convolver.
pub fn energy_with(rho: &Density1D, conv: &Convolver) -> f64 {
    let v = conv.apply(rho.values());
    0.5 * rho.values().iter().zip(&v).map(|(r, w)| r * w).sum::<f64>() * rho.grid().h
}

/// Free-space interaction energy.
pub fn energy(rho: &Density1D, pot: &Potential1D) -> f64 {
    energy_with(rho, &Convolver::new(pot, rho.grid(), ConvolutionMode::FreeSpace))
}

/// `E(ρ) + δ/2 Σ ρ_i² h`.
pub fn energy_delta(rho: &Density1D, pot: &Potential1D, delta: f64) -> f64 {
    energy(rho, pot) + 0.5 * delta * rho.square_integral()
}

/// `E_δ` with a prepared convolver.
pub fn energy_delta_with(rho: &Density1D, conv: &Convolver, delta: f64) -> f64 {
    energy_with(rho, conv) + 0.5 * delta * rho.square_integral()
}
