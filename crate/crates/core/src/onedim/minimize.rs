//! Minimization of `E_δ` over discrete probability densities.

use crate::error::{Error, Result};

use super::density::{ConvolutionMode, Convolver, Density1D, Grid1D};
use super::potential::Potential1D;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimizeOptions {
    pub m: usize,
    pub half_width: f64,
    /// Stop when `∫|ρ_{k+1} - ρ_k| < tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Half-width of the symmetric triangular starting density.
    pub start_half_width: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { m: 1024, half_width: 2.0, tol: 1e-12, max_iter: 500_000, start_half_width: 0.5 }
    }
}

#[derive(Clone, Debug)]
pub struct Minimizer {
    pub rho: Density1D,
    pub energy: f64,
    pub iterations: usize,
    /// `E_δ` after every accepted step, starting with the initial density.
    pub energy_trace: Vec<f64>,
}

/// Euclidean projection (weighted by `h`) onto `{ρ ≥ 0, Σ ρ_i h = 1}`:
/// `ρ_i = (y_i - θ)₊` with `θ` fixed by the mass.
pub fn project_simplex(y: &[f64], h: f64) -> Vec<f64> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let target = 1.0 / h;
    let mut acc = 0.0;
    let mut theta = sorted[0] - target;
    for (k, &v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - target) / (k + 1) as f64;
        if k + 1 == sorted.len() || sorted[k + 1] <= t {
            theta = t;
            break;
        }
    }
    y.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Projected gradient descent with backtracking on the sufficient-decrease
/// condition `E(ρ⁺) ≤ E(ρ) + ⟨∇E, ρ⁺ - ρ⟩ + |ρ⁺ - ρ|²/(2τ)`.
pub fn minimize_energy(delta: f64, pot: &Potential1D, opts: &MinimizeOptions) -> Result<Minimizer> {
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!("delta must be positive, got {delta}")));
    }
    if delta >= pot.w_l1() {
        return Err(Error::Precondition(format!("no minimizer exists for delta = {delta:e} ≥ ‖W‖_L1 = {:e}", pot.w_l1())));
    }
    let grid = Grid1D::symmetric(opts.half_width, opts.m)?;
    let conv = Convolver::new(pot, grid, ConvolutionMode::FreeSpace);
    let h = grid.h;
    let m = grid.m;
    let start: Vec<f64> = grid.xs().iter().map(|&x| (opts.start_half_width - x.abs()).max(0.0)).collect();
    let mut rho = Density1D::normalized(grid, start)?.values().to_vec();
    let mut v = conv.apply(&rho);
    let energy_of = |r: &[f64], v: &[f64]| -> f64 {
        r.iter().zip(v).map(|(a, w)| 0.5 * a * w + 0.5 * delta * a * a).sum::<f64>() * h
    };
    let mut e = energy_of(&rho, &v);
    let mut trace = vec![e];
    let mut tau = 1.0 / (delta + pot.w_l1());

    for it in 1..=opts.max_iter {
        let grad: Vec<f64> = rho.iter().zip(&v).map(|(r, w)| w + delta * r).collect();
        tau *= 2.0;
        let (cand, cv, ce) = loop {
            let y: Vec<f64> = rho.iter().zip(&grad).map(|(r, g)| r - tau * g).collect();
            let mut c = project_simplex(&y, h);
            for i in 0..m / 2 {
                let s = 0.5 * (c[i] + c[m - 1 - i]);
                c[i] = s;
                c[m - 1 - i] = s;
            }
            let cv = conv.apply(&c);
            let ce = energy_of(&c, &cv);
            let (mut lin, mut sq) = (0.0, 0.0);
            for i in 0..m {
                let d = c[i] - rho[i];
                lin += grad[i] * d;
                sq += d * d;
            }
            if ce <= e + (lin + sq / (2.0 * tau)) * h || tau < 1e-300 {
                break (c, cv, ce);
            }
            tau *= 0.5;
        };
        let change: f64 = rho.iter().zip(&cand).map(|(a, b)| (a - b).abs()).sum::<f64>() * h;
        if cand[0] > 0.0 || cand[m - 1] > 0.0 {
            return Err(Error::SupportAtBoundary { lo: grid.x0, hi: grid.x(m - 1) });
        }
        // Roundoff in E can exceed the true decrease once converged.
        if ce <= e {
            rho = cand;
            v = cv;
            e = ce;
            trace.push(e);
        }
        if change < opts.tol || ce > e {
            return Ok(Minimizer { rho: Density1D::from_parts(grid, rho), energy: e, iterations: it, energy_trace: trace });
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, change: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_is_feasible() {
        let h = 0.1;
        let y = vec![3.0, -1.0, 0.5, 2.0, 10.0];
        let p = project_simplex(&y, h);
        assert!((p.iter().sum::<f64>() * h - 1.0).abs() < 1e-14);
        assert!(p.iter().all(|&v| v >= 0.0));
        let q = project_simplex(&p, h);
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
