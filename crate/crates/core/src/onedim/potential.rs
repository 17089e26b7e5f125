//! Scalar force `G(x) = x ∫_{-1/2}^{1/2} f_l(√(x² + z²)) dz` and the potential
//! `W` with `G = -W'`, normalized so that `sup W = 0`.

use crate::error::{Error, Result};
use crate::kernels::ForceParams;
use crate::quadrature::{adaptive, GaussRule};

/// Absolute tolerance of the `z`-integral in [`scalar_force_g`].
pub const G_TOL: f64 = 1e-12;

/// Half-period of the reduced problem; `G` vanishes beyond it.
const HALF: f64 = 0.5;

/// The reduced force, exactly odd and zero for `|x| ≥ 0.5`.
pub fn scalar_force_g(x: f64, p: &ForceParams) -> f64 {
    let a = x.abs();
    if a == 0.0 || a >= HALF {
        return 0.0;
    }
    let reach = p.cutoff / p.eta;
    if a >= reach {
        return 0.0;
    }
    let zmax = HALF.min((reach * reach - a * a).sqrt());
    let integrand = |z: f64| {
        let d = a.hypot(z) * p.eta;
        p.radial(d).1 * p.eta
    };
    // The integrand is even in z with a peak of width ~|x| at the origin.
    let tol = G_TOL / (2.0 * a.max(1e-300));
    let mut acc = 0.0;
    let mut lo = 0.0;
    for hi in [a.min(zmax), (8.0 * a).min(zmax), zmax] {
        if hi > lo {
            acc += adaptive(&integrand, lo, hi, tol / 3.0);
            lo = hi;
        }
    }
    x.signum() * 2.0 * a * acc
}

/// `G` and `W` sampled on `m` equispaced points of `[-0.5, 0.5]`.
#[derive(Clone, Debug)]
pub struct Potential1D {
    params: ForceParams,
    h: f64,
    xs: Vec<f64>,
    g: Vec<f64>,
    w: Vec<f64>,
    tail: f64,
    w_l1: f64,
}

impl Potential1D {
    /// Integrates `W(x) = ∫_x^{1/2} G + c` panel by panel with a Gauss rule,
    /// extends it evenly and fixes `c` so that `sup W = 0`.
    pub fn build(p: &ForceParams, m: usize) -> Result<Self> {
        p.validate()?;
        if m < 64 {
            return Err(Error::InvalidParameter(format!("potential grid needs at least 64 points, got {m}")));
        }
        let h = 1.0 / (m - 1) as f64;
        let xs: Vec<f64> = (0..m).map(|i| -HALF + i as f64 * h).collect();
        // Exact mirror symmetry of the abscissae.
        let xs: Vec<f64> = (0..m).map(|i| if i < m / 2 { -xs[m - 1 - i] } else { xs[i] }).collect();
        let g: Vec<f64> = xs.iter().map(|&x| scalar_force_g(x, p)).collect();

        let rule = GaussRule::new(8);
        let integral = |a: f64, b: f64| rule.integrate(a, b, |t| scalar_force_g(t, p));

        // Nonnegative abscissae in increasing order, starting at 0.
        let mut knots: Vec<f64> = xs.iter().copied().filter(|&x| x > 0.0).collect();
        knots.insert(0, 0.0);
        // W̃(x) = ∫_x^{1/2} G, accumulated from the right.
        let mut wt = vec![0.0; knots.len()];
        let mut acc = 0.0;
        for k in (0..knots.len()).rev() {
            let right = if k + 1 < knots.len() { knots[k + 1] } else { HALF };
            acc += integral(knots[k], right);
            wt[k] = acc;
        }
        // Interior maxima of W̃ sit where G changes sign from - to +.
        let mut sup = wt.iter().copied().fold(0.0f64, f64::max);
        for k in 0..knots.len() - 1 {
            let (ga, gb) = (scalar_force_g(knots[k], p), scalar_force_g(knots[k + 1], p));
            if ga < 0.0 && gb > 0.0 {
                let (mut lo, mut hi) = (knots[k], knots[k + 1]);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if scalar_force_g(mid, p) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                sup = sup.max(wt[k] - integral(knots[k], lo));
            }
        }
        let lookup = |x: f64| -> f64 {
            let a = x.abs();
            let k = knots.partition_point(|&t| t < a);
            wt[k.min(knots.len() - 1)]
        };
        let w: Vec<f64> = xs.iter().map(|&x| lookup(x) - sup).collect();
        let tail = -sup;

        // ∫|W| over [-1/2, 1/2]; W ≤ 0, and the Hermite-corrected trapezoid
        // rule uses W' = -G at the panel ends.
        let mut l1 = 0.0;
        for i in 0..m - 1 {
            l1 += 0.5 * h * (w[i] + w[i + 1]) + h * h / 12.0 * (-g[i] + g[i + 1]);
        }
        let w_l1 = -l1;
        Ok(Self { params: *p, h, xs, g, w, tail, w_l1 })
    }

    pub fn params(&self) -> &ForceParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn g_samples(&self) -> &[f64] {
        &self.g
    }

    pub fn w_samples(&self) -> &[f64] {
        &self.w
    }

    /// `‖W‖_{L¹}` over `[-0.5, 0.5]`.
    pub fn w_l1(&self) -> f64 {
        self.w_l1
    }

    /// The constant value of `W` for `|x| ≥ 0.5`.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// `W(x)` by cubic Hermite interpolation with slopes `-G`.
    pub fn w(&self, x: f64) -> f64 {
        let a = x.abs();
        if a >= HALF {
            return self.tail;
        }
        let m = self.xs.len();
        let t = (a + HALF) / self.h;
        let k = (t.floor() as usize).min(m - 2);
        let s = t - k as f64;
        let (w0, w1) = (self.w[k], self.w[k + 1]);
        let (d0, d1) = (-self.g[k] * self.h, -self.g[k + 1] * self.h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * w0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * w1 + (s3 - s2) * d1
    }

    /// CSV `x,G,W`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,G,W\n");
        for ((x, g), w) in self.xs.iter().zip(&self.g).zip(&self.w) {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::io::fmt_f64(*x),
                crate::io::fmt_f64(*g),
                crate::io::fmt_f64(*w)
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_odd_and_cut_off() {
        let p = ForceParams::default();
        assert_eq!(scalar_force_g(0.0, &p), 0.0);
        assert_eq!(scalar_force_g(0.5, &p), 0.0);
        assert_eq!(scalar_force_g(-0.7, &p), 0.0);
        for x in [1e-4, 0.003, 0.02, 0.1, 0.33] {
            assert_eq!(scalar_force_g(-x, &p), -scalar_force_g(x, &p));
        }
    }

    #[test]
    fn potential_shape() {
        let pot = Potential1D::build(&ForceParams::default(), 257).unwrap();
        let w = pot.w_samples();
        let m = w.len();
        for i in 0..m {
            assert_eq!(w[i], w[m - 1 - i]);
            assert!(w[i] <= 1e-20);
        }
        assert_eq!(pot.w(0.7), pot.tail());
        assert!(pot.w_l1() > 0.0);
    }

    #[test]
    fn pure_repulsion_peaks_at_origin() {
        let p = ForceParams { gamma: 0.0, ..Default::default() };
        let pot = Potential1D::build(&p, 129).unwrap();
        let w = pot.w_samples();
        assert_eq!(w[64], 0.0);
        for i in 64..128 {
            assert!(w[i + 1] <= w[i]);
        }
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(Potential1D::build(&ForceParams::default(), 63).is_err());
    }
}
