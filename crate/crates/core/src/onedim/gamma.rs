//! Empirical Γ-convergence probe: minimizers of `E_δ` along a decreasing
//! sequence of `δ`, their energies, and distances between successive
//! minimizers.

use crate::error::{Error, Result};

use super::density::Density1D;
use super::minimize::{minimize_energy, MinimizeOptions};
use super::potential::Potential1D;

#[derive(Clone, Debug)]
pub struct GammaEntry {
    pub delta: f64,
    /// `E_δ(ρ_δ)` at the computed minimizer.
    pub energy_delta: f64,
    pub minimizer: Density1D,
    /// Bounded-Lipschitz distance to the previous minimizer.
    pub bl_to_previous: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct GammaReport {
    pub entries: Vec<GammaEntry>,
    /// `E_{δ_k}(ρ_{δ_k})` nonincreasing along the sequence (up to `energy_tol`).
    pub energies_nonincreasing: bool,
    /// Successive bounded-Lipschitz distances strictly decreasing.
    pub distances_decreasing: bool,
}

/// Runs the minimizer for each `δ` of a strictly decreasing sequence in
/// `(0, ‖W‖_L1)`.
pub fn gamma_probe(pot: &Potential1D, deltas: &[f64], opts: &MinimizeOptions, energy_tol: f64) -> Result<GammaReport> {
    if deltas.is_empty() {
        return Err(Error::InvalidParameter("empty delta sequence".into()));
    }
    for (k, &d) in deltas.iter().enumerate() {
        if !(d > 0.0 && d < pot.w_l1()) {
            return Err(Error::Precondition(format!("delta {d:e} outside (0, ‖W‖_L1 = {:e})", pot.w_l1())));
        }
        if k > 0 && d >= deltas[k - 1] {
            return Err(Error::Precondition("delta sequence must be strictly decreasing".into()));
        }
    }
    let mut entries: Vec<GammaEntry> = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let min = minimize_energy(delta, pot, opts)?;
        let bl = entries.last().map(|prev| bounded_lipschitz(&prev.minimizer, &min.rho));
        entries.push(GammaEntry { delta, energy_delta: min.energy, minimizer: min.rho, bl_to_previous: bl });
    }
    let energies_nonincreasing = entries.windows(2).all(|w| w[1].energy_delta <= w[0].energy_delta + energy_tol);
    let dists: Vec<f64> = entries.iter().filter_map(|e| e.bl_to_previous).collect();
    let distances_decreasing = dists.windows(2).all(|w| w[1] < w[0]);
    Ok(GammaReport { entries, energies_nonincreasing, distances_decreasing })
}

/// Bounded-Lipschitz distance `sup { ∫ φ d(μ - ν) : |φ| ≤ 1, Lip φ ≤ 1 }`
/// between two densities on the same grid, with `φ` restricted to the grid.
///
/// Solved exactly by dynamic programming over the test-function value:
/// `V_i(φ) = φ c_i + max_{|ψ - φ| ≤ h} V_{i-1}(ψ)` with `c_i = (μ_i - ν_i) h`.
/// Each `V_i` is concave and piecewise linear on `[-1, 1]`, and the windowed
/// maximum of a concave function shifts its rising part left and its
/// falling part right by `h`.
pub fn bounded_lipschitz(mu: &Density1D, nu: &Density1D) -> f64 {
    let h = mu.grid().h;
    let c: Vec<f64> = mu.values().iter().zip(nu.values()).map(|(a, b)| (a - b) * h).collect();
    let mut pts: Vec<(f64, f64)> = vec![(-1.0, -c[0]), (1.0, c[0])];
    for &ci in &c[1..] {
        let k = pts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(k, _)| k)
            .expect("nonempty");
        let mut next: Vec<(f64, f64)> = Vec::with_capacity(pts.len() + 2);
        next.extend(pts[..k].iter().map(|&(x, y)| (x - h, y)));
        next.push((pts[k].0 - h, pts[k].1));
        next.push((pts[k].0 + h, pts[k].1));
        next.extend(pts[k + 1..].iter().map(|&(x, y)| (x + h, y)));
        pts = clip(&next);
        for p in &mut pts {
            p.1 += p.0 * ci;
        }
        prune(&mut pts);
    }
    pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
}

/// Restricts a piecewise-linear graph with sorted abscissae to `[-1, 1]`.
fn clip(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let interp = |x: f64| -> f64 {
        let k = pts.partition_point(|p| p.0 < x).clamp(1, pts.len() - 1);
        let (a, b) = (pts[k - 1], pts[k]);
        if b.0 == a.0 {
            return a.1.max(b.1);
        }
        a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
    };
    let mut out = vec![(-1.0, interp(-1.0))];
    out.extend(pts.iter().copied().filter(|p| p.0 > -1.0 && p.0 < 1.0));
    out.push((1.0, interp(1.0)));
    out
}

/// Drops duplicate and collinear interior points.
fn prune(pts: &mut Vec<(f64, f64)>) {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in pts.iter() {
        if let Some(last) = out.last() {
            if p.0 - last.0 <= 1e-15 {
                let keep = if p.1 > last.1 { p } else { *last };
                *out.last_mut().unwrap() = (last.0, keep.1);
                continue;
            }
        }
        while out.len() >= 2 {
            let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
            let s1 = (b.1 - a.1) / (b.0 - a.0);
            let s2 = (p.1 - b.1) / (p.0 - b.0);
            if (s1 - s2).abs() <= 1e-14 * (1.0 + s1.abs().max(s2.abs())) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    *pts = out;
}
