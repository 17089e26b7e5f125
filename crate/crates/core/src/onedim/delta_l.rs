//! `δ(L)`: the largest eigenvalue of
//!
//! ```text
//! (K ρ)(x) = ∫_0^L [W(L - w) + W(L + w) - W(x - w) - W(x + w)] ρ(w) dw
//! ```
//!
//! the linearization at the support edge `L` of a symmetric stationary
//! state. Written this way `K` is invariant under constant shifts of `W`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

use super::potential::Potential1D;

/// Relative change of successive eigenvalue estimates at which the power
/// iteration stops.
pub const POWER_TOL: f64 = 1e-10;

/// Iteration cap before reporting stagnation.
pub const POWER_MAX_ITER: usize = 2_000_000;

/// Default node count: spacing at most 0.002 and at least 201 nodes.
pub fn default_nodes(l: f64) -> usize {
    ((l / 0.002).ceil() as usize + 1).max(201)
}

/// The discretized operator with trapezoid weights on `m` nodes of `[0, L]`.
pub struct EdgeOperator {
    n: usize,
    weights: Vec<f64>,
    /// `W(L - w_j) + W(L + w_j)`.
    edge: Vec<f64>,
    size: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Spectrum of `W(k h)` for `k = -(n-1) ..= 2n-2`.
    kernel_hat: Vec<Complex64>,
}

impl EdgeOperator {
    pub fn new(l: f64, pot: &Potential1D, m: usize) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidParameter(format!("L must be positive, got {l}")));
        }
        if m < 3 {
            return Err(Error::InvalidParameter(format!("need at least 3 nodes, got {m}")));
        }
        let n = m;
        let h = l / (n - 1) as f64;
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        let edge: Vec<f64> = (0..n).map(|j| pot.w((n - 1 - j) as f64 * h) + pot.w((n - 1 + j) as f64 * h)).collect();
        let klen = 3 * n - 2;
        let size = (klen + n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let mut kernel_hat = vec![Complex64::default(); size];
        for (idx, k) in (-(n as i64 - 1)..=(2 * n as i64 - 2)).enumerate() {
            kernel_hat[idx] = pot.w(k as f64 * h).into();
        }
        fwd.process(&mut kernel_hat);
        Ok(Self { n, weights, edge, size, fwd, inv, kernel_hat })
    }

    /// Full linear convolution of `y` with the kernel array.
    fn convolve(&self, y: &[f64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::default(); self.size];
        for (b, v) in buf.iter_mut().zip(y) {
            *b = (*v).into();
        }
        self.fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inv.process(&mut buf);
        let s = 1.0 / self.size as f64;
        buf.iter_mut().for_each(|b| *b *= s);
        buf
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let y: Vec<f64> = v.iter().zip(&self.weights).map(|(a, w)| a * w).collect();
        let edge: f64 = y.iter().zip(&self.edge).map(|(a, e)| a * e).sum();
        // Σ_j W((i - j) h) y_j sits at index i + (n - 1) of y ∗ K.
        let toeplitz = self.convolve(&y);
        // Σ_j W((i + j) h) y_j = Σ_j W((i + n - 1 - j) h) y_{n-1-j}, at index i + 2(n - 1).
        let rev: Vec<f64> = y.iter().rev().copied().collect();
        let hankel = self.convolve(&rev);
        (0..n).map(|i| edge - toeplitz[i + n - 1].re - hankel[i + 2 * (n - 1)].re).collect()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Power iteration on `A + shift·I`; returns the eigenvalue of `A`.
pub fn power_iteration(apply: impl Fn(&[f64]) -> Vec<f64>, start: Vec<f64>, shift: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut v = start;
    let n0 = norm(&v);
    if !(n0 > 0.0) {
        return Err(Error::InvalidParameter("power iteration needs a nonzero start vector".into()));
    }
    v.iter_mut().for_each(|x| *x /= n0);
    let mut prev = f64::NAN;
    for _ in 0..max_iter {
        let mut w = apply(&v);
        for (a, b) in w.iter_mut().zip(&v) {
            *a += shift * b;
        }
        let lambda: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        let nw = norm(&w);
        if !(nw > 0.0 && nw.is_finite()) {
            return Ok(lambda - shift);
        }
        w.iter_mut().for_each(|x| *x /= nw);
        v = w;
        if (lambda - prev).abs() <= tol * lambda.abs() {
            return Ok(lambda - shift);
        }
        prev = lambda;
    }
    Err(Error::Stagnation { iterations: max_iter })
}

/// Largest eigenvalue of the edge operator on `[0, L]` with `m` nodes.
///
/// If the eigenvalue of largest magnitude is negative, the iteration is
/// repeated on `K + |λ|·I` so that the largest algebraic eigenvalue dominates.
pub fn delta_of_l(l: f64, pot: &Potential1D, m: usize) -> Result<f64> {
    let op = EdgeOperator::new(l, pot, m)?;
    let start: Vec<f64> = (0..m).map(|j| 1.0 - j as f64 / (m - 1) as f64).collect();
    let dominant = power_iteration(|v| op.apply(v), start.clone(), 0.0, POWER_TOL, POWER_MAX_ITER)?;
    if dominant >= 0.0 {
        return Ok(dominant);
    }
    power_iteration(|v| op.apply(v), start, -dominant, POWER_TOL, POWER_MAX_ITER)
}
