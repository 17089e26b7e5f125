//! Gauss–Legendre rules and an adaptive integrator.

use std::f64::consts::PI;

/// Nodes and weights of the `q`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Nodes are returned in increasing order and are exactly symmetric
/// (`x[k] == -x[q-1-k]`), so tensor-product rules built from them preserve
/// odd symmetry of integrands bit for bit.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1, "quadrature order must be positive");
    let mut x = vec![0.0; q];
    let mut w = vec![0.0; q];
    for k in 0..q.div_ceil(2) {
        // Initial guess for the k-th largest root, refined by Newton.
        let mut z = (PI * (k as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(q, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(q, z);
        dp = if d != 0.0 { d } else { dp };
        let wk = 2.0 / ((1.0 - z * z) * dp * dp);
        x[q - 1 - k] = z;
        x[k] = -z;
        w[q - 1 - k] = wk;
        w[k] = wk;
    }
    if q % 2 == 1 {
        x[q / 2] = 0.0;
    }
    (x, w)
}

/// `(P_q(z), P_q'(z))` by the three-term recurrence.
fn legendre(q: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if q == 0 {
        return (1.0, 0.0);
    }
    for n in 2..=q {
        let p2 = ((2 * n - 1) as f64 * z * p1 - (n - 1) as f64 * p0) / n as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, q as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Fixed Gauss–Legendre rule mapped to `[a, b]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(q: usize) -> Self {
        let (nodes, weights) = gauss_legendre(q);
        Self { nodes, weights }
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let s: f64 = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(c + h * x)).sum();
        s * h
    }
}

/// Adaptive bisection integrator: a panel is accepted when the 10-point
/// Gauss rule on it agrees with the sum over its two halves to within the
/// panel's share of `tol`.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let rule = GaussRule::new(10);
    let whole = rule.integrate(a, b, f);
    recurse(f, &rule, a, b, whole, tol, 0)
}

fn recurse(f: &impl Fn(f64) -> f64, rule: &GaussRule, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, f);
    let right = rule.integrate(m, b, f);
    if (left + right - whole).abs() <= tol || depth >= 40 {
        return left + right;
    }
    recurse(f, rule, a, m, left, 0.5 * tol, depth + 1) + recurse(f, rule, m, b, right, 0.5 * tol, depth + 1)
}
