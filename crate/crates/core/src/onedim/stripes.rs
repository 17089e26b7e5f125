//! Stripe states `ρ = (1/n) Σ δ_{x_k}` on the period and their equilibrium
//! condition `Σ_{j≠k} W'(x_k - x_j) = 0`.

use crate::error::{Error, Result};
use crate::grid::min_image;
use crate::kernels::ForceParams;

use super::potential::scalar_force_g;

/// Stripe positions, strictly increasing inside `(-0.5, 0.5)`, weight `1/n` each.
#[derive(Clone, Debug, PartialEq)]
pub struct StripeConfig {
    positions: Vec<f64>,
}

impl StripeConfig {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidParameter("a stripe configuration needs at least one position".into()));
        }
        if positions.iter().any(|&x| !(x > -0.5 && x < 0.5)) {
            return Err(Error::InvalidParameter("stripe positions must lie in (-0.5, 0.5)".into()));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("stripe positions must be strictly increasing".into()));
        }
        Ok(Self { positions })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }
}

/// `x_k = k/n - (n+1)/(2n)` for `k = 1..=n`.
pub fn equidistant_positions(n: usize) -> Result<StripeConfig> {
    if n == 0 {
        return Err(Error::InvalidParameter("stripe count must be positive".into()));
    }
    let nf = n as f64;
    StripeConfig::new((1..=n).map(|k| (2 * k) as f64 / (2.0 * nf) - (nf + 1.0) / (2.0 * nf)).collect())
}

/// `Σ_{j≠k} W'(d_per(x_k, x_j))` with `W' = -G`.
pub fn stripe_residual(config: &StripeConfig, p: &ForceParams) -> Vec<f64> {
    let x = config.positions();
    x.iter()
        .enumerate()
        .map(|(k, &xk)| {
            x.iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, &xj)| -scalar_force_g(min_image(xk - xj), p))
                .sum()
        })
        .collect()
}

/// Report rows `k,x_k,residual` with `k` starting at 1.
pub fn stripes_csv(config: &StripeConfig, residual: &[f64]) -> String {
    let mut out = String::from("k,x_k,residual\n");
    for (k, (x, r)) in config.positions().iter().zip(residual).enumerate() {
        out.push_str(&format!("{},{},{}\n", k + 1, crate::io::fmt_f64(*x), crate::io::fmt_f64(*r)));
    }
    out
}
