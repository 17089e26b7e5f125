//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use anisoagg::convolution::Grid2D;
use anisoagg::kernels::ForceParams;

/// Four-point Gauss–Legendre rule on [-1, 1].
pub const GL4_NODES: [f64; 4] = [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526];
pub const GL4_WEIGHTS: [f64; 4] = [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538];

fn periodic(d: f64) -> f64 {
    d - d.round()
}

/// The force at offset `(dx, dy)` written out from the coefficient laws.
pub fn force(p: &ForceParams, dx: f64, dy: f64, s: (f64, f64)) -> (f64, f64) {
    let (dx, dy) = (p.eta * dx, p.eta * dy);
    let tau = (dx * dx + dy * dy).sqrt();
    if tau >= p.cutoff {
        return (0.0, 0.0);
    }
    let f_r = (p.alpha * tau * tau + p.beta) * (-p.e_r * tau).exp();
    let f_a = -p.gamma * tau * (-p.e_a * tau).exp();
    let (fs, fl) = (f_r + p.chi * f_a, f_r + f_a);
    let l = (s.1, -s.0);
    let ps = fs * (s.0 * dx + s.1 * dy);
    let pl = fl * (l.0 * dx + l.1 * dy);
    (ps * s.0 + pl * l.0, ps * s.1 + pl * l.1)
}

/// Cell-averaged velocity `(1/|C_t|) ∫_{C_t} ∫ F(x - y, T_t) ρ(y) dy dx` by a
/// direct double sum over target and source cells, four Gauss points per
/// direction in each cell. `dirs[t]` is the `s` direction of target cell `t`.
pub fn direct_velocity(grid: Grid2D, rho: &[f64], dirs: &[(f64, f64)], p: &ForceParams) -> (Vec<f64>, Vec<f64>) {
    let (nx, ny) = (grid.nx, grid.ny);
    let (hx, hy) = (1.0 / nx as f64, 1.0 / ny as f64);
    let pts = |n: usize, h: f64| -> Vec<Vec<(f64, f64)>> {
        (0..n)
            .map(|i| {
                let c = -0.5 + (i as f64 + 0.5) * h;
                GL4_NODES.iter().zip(GL4_WEIGHTS).map(|(x, w)| (c + 0.5 * h * x, 0.5 * w)).collect()
            })
            .collect()
    };
    let (px, py) = (pts(nx, hx), pts(ny, hy));
    let mut ux = vec![0.0; nx * ny];
    let mut uy = vec![0.0; nx * ny];
    for tj in 0..ny {
        for ti in 0..nx {
            let t = tj * nx + ti;
            let s = dirs[t];
            let (mut ax, mut ay) = (0.0, 0.0);
            for sj in 0..ny {
                for si in 0..nx {
                    let r = rho[sj * nx + si];
                    if r == 0.0 {
                        continue;
                    }
                    // Mean of F over the pair of cells, times the source cell area.
                    let (mut bx, mut by) = (0.0, 0.0);
                    for &(xa, wa) in &px[ti] {
                        for &(ya, wb) in &py[tj] {
                            for &(xb, wc) in &px[si] {
                                for &(yb, wd) in &py[sj] {
                                    let (fx, fy) = force(p, periodic(xa - xb), periodic(ya - yb), s);
                                    let w = wa * wb * wc * wd;
                                    bx += w * fx;
                                    by += w * fy;
                                }
                            }
                        }
                    }
                    ax += r * hx * hy * bx;
                    ay += r * hx * hy * by;
                }
            }
            ux[t] = ax;
            uy[t] = ay;
        }
    }
    (ux, uy)
}

/// One step of the scheme written as the flux form of the update: transport
/// through each face with the chosen numerical flux, plus the discrete
/// Laplacian of `ρ²/2`.
pub fn transcribed_step(
    grid: Grid2D,
    rho: &[f64],
    ux: &[f64],
    uy: &[f64],
    f: f64,
    delta: f64,
    dt: f64,
    upwind: bool,
) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let (dx, dy) = (1.0 / nx as f64, 1.0 / ny as f64);
    let at = |i: isize, j: isize| -> usize {
        let i = i.rem_euclid(nx as isize) as usize;
        let j = j.rem_euclid(ny as isize) as usize;
        j * nx + i
    };
    // Numerical flux through a face with velocity u between left value a and right value b.
    let flux = |u: f64, a: f64, b: f64| -> f64 {
        if upwind {
            u.max(0.0) * a + u.min(0.0) * b
        } else {
            0.5 * u * (a + b) - 0.5 * f * (b - a)
        }
    };
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny as isize {
        for i in 0..nx as isize {
            let c = at(i, j);
            let ue = 0.5 * (ux[c] + ux[at(i + 1, j)]);
            let uw = 0.5 * (ux[at(i - 1, j)] + ux[c]);
            let un = 0.5 * (uy[c] + uy[at(i, j + 1)]);
            let us = 0.5 * (uy[at(i, j - 1)] + uy[c]);
            let fe = flux(ue, rho[c], rho[at(i + 1, j)]);
            let fw = flux(uw, rho[at(i - 1, j)], rho[c]);
            let fn_ = flux(un, rho[c], rho[at(i, j + 1)]);
            let fs = flux(us, rho[at(i, j - 1)], rho[c]);
            let sq = |k: usize| rho[k] * rho[k];
            let lap_x = (sq(at(i + 1, j)) - 2.0 * sq(c) + sq(at(i - 1, j))) / (2.0 * dx * dx);
            let lap_y = (sq(at(i, j + 1)) - 2.0 * sq(c) + sq(at(i, j - 1))) / (2.0 * dy * dy);
            out[c] = rho[c] - dt / dx * (fe - fw) - dt / dy * (fn_ - fs) + delta * dt * (lap_x + lap_y);
        }
    }
    out
}

/// Column means of a row-major field.
pub fn column_means(nx: usize, ny: usize, v: &[f64]) -> Vec<f64> {
    (0..nx).map(|i| (0..ny).map(|j| v[j * nx + i]).sum::<f64>() / ny as f64).collect()
}

/// `max_i (max_j ρ_ij - min_j ρ_ij)`.
pub fn column_variation(nx: usize, ny: usize, v: &[f64]) -> f64 {
    (0..nx)
        .map(|i| {
            let col = (0..ny).map(|j| v[j * nx + i]);
            let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Maximal runs of `true` on a cycle, as (start, length).
pub fn cyclic_runs(mask: &[bool]) -> Vec<(usize, usize)> {
    let n = mask.len();
    if mask.iter().all(|&b| b) {
        return vec![(0, n)];
    }
    let Some(first_gap) = mask.iter().position(|&b| !b) else { return Vec::new() };
    let mut runs = Vec::new();
    let mut k = 0;
    while k < n {
        let i = (first_gap + k) % n;
        if mask[i] {
            let start = i;
            let mut len = 0;
            while k < n && mask[(first_gap + k) % n] {
                len += 1;
                k += 1;
            }
            runs.push((start, len));
        } else {
            k += 1;
        }
    }
    runs
}

/// Mass-weighted centers (in cell units, on the cycle) of the runs.
pub fn run_centers(weights: &[f64], runs: &[(usize, usize)]) -> Vec<f64> {
    let n = weights.len();
    runs.iter()
        .map(|&(start, len)| {
            let (mut m, mut mx) = (0.0, 0.0);
            for k in 0..len {
                let w = weights[(start + k) % n];
                m += w;
                mx += w * (start + k) as f64;
            }
            (mx / m).rem_euclid(n as f64)
        })
        .collect()
}
