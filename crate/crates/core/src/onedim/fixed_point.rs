//! Stationary states on ℝ from the fixed-point form `ρ = (C - W ∗ ρ)₊ / δ`.

use crate::error::{Error, Result};

use super::density::{ConvolutionMode, Convolver, Density1D, Grid1D};
use super::potential::Potential1D;

/// Values below this count as outside the support.
pub const SUPPORT_EPS: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointOptions {
    /// Grid points on the working interval.
    pub m: usize,
    /// The working interval is `[-half_width, half_width]`.
    pub half_width: f64,
    /// Relaxation `ω` in `ρ ← (1 - ω) ρ + ω ρ̃`.
    pub damping: f64,
    /// Stop when `∫|ρ_{k+1} - ρ_k| < tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self { m: 1024, half_width: 2.0, damping: 0.5, tol: 1e-10, max_iter: 200_000 }
    }
}

impl FixedPointOptions {
    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::symmetric(self.half_width, self.m)
    }
}

#[derive(Clone, Debug)]
pub struct FixedPointSolution {
    pub rho: Density1D,
    /// Level `C` of the Euler–Lagrange condition `W ∗ ρ + δρ = C` on the support.
    pub level: f64,
    pub iterations: usize,
    /// `max |W ∗ ρ + δρ - C|` over `{ρ > SUPPORT_EPS}`.
    pub residual: f64,
}

/// Mass `Σ (C - v_i)₊ h / δ` of the candidate for level `c`.
pub fn mass_for_level(v: &[f64], c: f64, delta: f64, h: f64) -> f64 {
    v.iter().map(|&x| (c - x).max(0.0)).sum::<f64>() * h / delta
}

/// Level `C` with unit candidate mass, by bisection on the bracket
/// `[min v, max v + δ·max ρ + 1]`.
pub fn level_by_bisection(v: &[f64], delta: f64, h: f64, rho_max: f64) -> f64 {
    let mut lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max) + delta * rho_max + 1.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass_for_level(v, mid, delta, h) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Damped fixed-point iteration from a symmetric triangular bump.
///
/// Iterates are symmetrized after every update; every operator involved
/// commutes with `x ↦ -x`, so this only removes roundoff drift along the
/// neutral translation mode.
pub fn stationary_fixed_point(delta: f64, pot: &Potential1D, opts: &FixedPointOptions) -> Result<FixedPointSolution> {
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!("delta must be positive, got {delta}")));
    }
    if delta >= pot.w_l1() {
        return Err(Error::Precondition(format!(
            "no stationary state exists for delta = {delta:e} ≥ ‖W‖_L1 = {:e}",
            pot.w_l1()
        )));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidParameter(format!("damping must lie in (0, 1], got {}", opts.damping)));
    }
    let grid = opts.grid()?;
    let conv = Convolver::new(pot, grid, ConvolutionMode::FreeSpace);
    let m = grid.m;
    let h = grid.h;
    let start: Vec<f64> = grid.xs().iter().map(|&x| (0.25 - x.abs()).max(0.0)).collect();
    let mut rho = Density1D::normalized(grid, start)?.values().to_vec();
    let mut v = vec![0.0; m];
    let mut next = vec![0.0; m];
    let omega = opts.damping;

    for it in 1..=opts.max_iter {
        conv.apply_into(&rho, &mut v);
        let rmax = rho.iter().copied().fold(0.0, f64::max);
        let c = level_by_bisection(&v, delta, h, rmax);
        for i in 0..m {
            let cand = (c - v[i]).max(0.0) / delta;
            next[i] = (1.0 - omega) * rho[i] + omega * cand;
        }
        if (c - v[0]) > 0.0 || (c - v[m - 1]) > 0.0 {
            return Err(Error::SupportAtBoundary { lo: grid.x0, hi: grid.x(m - 1) });
        }
        for i in 0..m / 2 {
            let s = 0.5 * (next[i] + next[m - 1 - i]);
            next[i] = s;
            next[m - 1 - i] = s;
        }
        let mass: f64 = next.iter().sum::<f64>() * h;
        next.iter_mut().for_each(|x| *x /= mass);
        let change: f64 = rho.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum::<f64>() * h;
        std::mem::swap(&mut rho, &mut next);
        if change < opts.tol {
            return Ok(finish(Density1D::from_parts(grid, rho), &conv, delta, it));
        }
        if !change.is_finite() {
            return Err(Error::NoConvergence { iterations: it, change });
        }
        if it == opts.max_iter {
            return Err(Error::NoConvergence { iterations: it, change });
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, change: f64::NAN })
}

fn finish(rho: Density1D, conv: &Convolver, delta: f64, iterations: usize) -> FixedPointSolution {
    let (level, residual) = level_and_residual(&rho, conv, delta);
    FixedPointSolution { rho, level, iterations, residual }
}

/// Level `C` (mean of `W ∗ ρ + δρ` over the support) and the sup deviation
/// from it on the support.
pub fn level_and_residual(rho: &Density1D, conv: &Convolver, delta: f64) -> (f64, f64) {
    let v = conv.apply(rho.values());
    let on: Vec<f64> = rho
        .values()
        .iter()
        .zip(&v)
        .filter(|(r, _)| **r > SUPPORT_EPS)
        .map(|(r, w)| w + delta * r)
        .collect();
    if on.is_empty() {
        return (0.0, 0.0);
    }
    let (lo, hi) = on.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let level = 0.5 * (lo + hi);
    (level, 0.5 * (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_monotone_in_level() {
        let v: Vec<f64> = (0..50).map(|i| ((i * 31) % 17) as f64 * 1e-8).collect();
        let mut prev = 0.0;
        for k in 0..200 {
            let m = mass_for_level(&v, k as f64 * 1e-9, 1e-8, 0.01);
            assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn bisection_hits_unit_mass() {
        let v: Vec<f64> = (0..101).map(|i| ((i as f64 - 50.0) * 0.01).powi(2) * 1e-6).collect();
        let c = level_by_bisection(&v, 1e-7, 0.01, 3.0);
        assert!((mass_for_level(&v, c, 1e-7, 0.01) - 1.0).abs() < 1e-12);
    }
}
