//! Force law and tensor fields.
//!
//! The pairwise force between particles at offset `d` is
//!
//! ```text
//! F(d, T) = f_s(|d|) (s·d) s + f_l(|d|) (l·d) l
//! f_s = f_R + χ f_A,   f_l = f_R + f_A
//! f_R(τ) = (α τ² + β) exp(-e_R τ),   f_A(τ) = -γ τ exp(-e_A τ)
//! ```
//!
//! with both coefficients set to exactly zero for `τ ≥ cutoff`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::path::Path;

use crate::error::{Error, Result};

/// Tolerance on `|s| = 1` accepted by [`total_force`].
const UNIT_TOL: f64 = 1e-12;

/// A vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Clockwise rotation by 90°, `(x, y) -> (y, -x)`.
    pub fn rotate_cw(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, a: f64) -> Vec2 {
        Vec2::new(self.x * a, self.y * a)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Constants of the force law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForceParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub e_a: f64,
    pub e_r: f64,
    pub chi: f64,
    pub cutoff: f64,
    /// Spatial rescaling: the force at offset `d` is evaluated as `F(η d)`.
    pub eta: f64,
}

impl Default for ForceParams {
    fn default() -> Self {
        Self {
            alpha: 270.0,
            beta: 0.1,
            gamma: 10.5,
            e_a: 95.0,
            e_r: 100.0,
            chi: 0.2,
            cutoff: 0.5,
            eta: 1.0,
        }
    }
}

impl ForceParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("e_A", self.e_a),
            ("e_R", self.e_r),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.chi) {
            return Err(Error::InvalidParameter(format!("chi must lie in [0, 1], got {}", self.chi)));
        }
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            return Err(Error::InvalidParameter(format!("cutoff must be positive, got {}", self.cutoff)));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {}", self.eta)));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn f_r(&self, tau: f64) -> f64 {
        if tau >= self.cutoff {
            0.0
        } else {
            (self.alpha * tau * tau + self.beta) * (-self.e_r * tau).exp()
        }
    }

    #[inline]
    pub(crate) fn f_a(&self, tau: f64) -> f64 {
        if tau >= self.cutoff {
            0.0
        } else {
            -self.gamma * tau * (-self.e_a * tau).exp()
        }
    }

    /// `(f_s(r), f_l(r))` for `r ≥ 0`, sharing the exponentials.
    #[inline]
    pub fn radial(&self, r: f64) -> (f64, f64) {
        let fr = self.f_r(r);
        let fa = self.f_a(r);
        (fr + self.chi * fa, fr + fa)
    }

    /// The force at offset `d` for a given direction pair, without the unit
    /// checks of [`total_force`]. Applies the `eta` rescaling.
    #[inline]
    pub fn force(&self, d: Vec2, s: Vec2, l: Vec2) -> Vec2 {
        let d = d * self.eta;
        let (fs, fl) = self.radial(d.norm());
        s * (fs * s.dot(d)) + l * (fl * l.dot(d))
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("distance must be nonnegative, got {tau}")))
    }
}

/// Repulsion coefficient `f_R(τ)`.
pub fn repulsion_coeff(tau: f64, p: &ForceParams) -> Result<f64> {
    check_tau(tau)?;
    Ok(p.f_r(tau))
}

/// Attraction coefficient `f_A(τ) ≤ 0`.
pub fn attraction_coeff(tau: f64, p: &ForceParams) -> Result<f64> {
    check_tau(tau)?;
    Ok(p.f_a(tau))
}

/// Coefficient along `s`: `f_R + χ f_A`.
pub fn coeff_s(tau: f64, p: &ForceParams) -> Result<f64> {
    check_tau(tau)?;
    Ok(p.radial(tau).0)
}

/// Coefficient along `l`: `f_R + f_A`.
pub fn coeff_l(tau: f64, p: &ForceParams) -> Result<f64> {
    check_tau(tau)?;
    Ok(p.radial(tau).1)
}

/// Total force `f_s(|d|)(s·d)s + f_l(|d|)(l·d)l` at the rescaled offset `η d`.
pub fn total_force(d: Vec2, s: Vec2, l: Vec2, p: &ForceParams) -> Result<Vec2> {
    for (name, v) in [("s", s), ("l", l)] {
        if (v.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidParameter(format!("{name} = {v} is not a unit vector")));
        }
    }
    if s.dot(l).abs() > UNIT_TOL {
        return Err(Error::InvalidParameter(format!("s = {s} and l = {l} are not orthogonal")));
    }
    Ok(p.force(d, s, l))
}

/// Per-cell orthonormal direction pairs on an `nx × ny` grid.
///
/// Cells are stored row by row: index `j * nx + i`, with `i` along x.
/// Only `s` is stored; `l = (s_y, -s_x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    nx: usize,
    ny: usize,
    s: Vec<Vec2>,
}

impl TensorField {
    /// The same normalized direction `s` in every cell.
    pub fn homogeneous(s: Vec2, nx: usize, ny: usize) -> Result<Self> {
        Self::from_directions(nx, ny, vec![s; nx * ny])
    }

    /// Normalizes each direction; rejects zero vectors.
    pub fn from_directions(nx: usize, ny: usize, dirs: Vec<Vec2>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter(format!("grid dimensions must be positive, got {nx}x{ny}")));
        }
        if dirs.len() != nx * ny {
            return Err(Error::DimensionMismatch {
                expected: format!("{} directions", nx * ny),
                found: dirs.len().to_string(),
            });
        }
        let mut s = Vec::with_capacity(dirs.len());
        for (k, v) in dirs.into_iter().enumerate() {
            let n = v.norm();
            if !(n.is_finite() && n > 0.0) {
                return Err(Error::ZeroVector { i: k % nx, j: k / nx });
            }
            s.push(v * (1.0 / n));
        }
        Ok(Self { nx, ny, s })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn s(&self, i: usize, j: usize) -> Vec2 {
        self.s[j * self.nx + i]
    }

    pub fn l(&self, i: usize, j: usize) -> Vec2 {
        self.s(i, j).rotate_cw()
    }

    pub fn directions(&self) -> &[Vec2] {
        &self.s
    }

    pub fn is_homogeneous(&self) -> bool {
        self.s.iter().all(|&v| v == self.s[0])
    }

    /// FNV-1a hash over dimensions and direction bits, stable across runs.
    pub fn content_hash(&self) -> u64 {
        let mut h = crate::io::Fnv1a::new();
        h.write_u64(self.nx as u64);
        h.write_u64(self.ny as u64);
        for v in &self.s {
            h.write_u64(v.x.to_bits());
            h.write_u64(v.y.to_bits());
        }
        h.finish()
    }

    /// Parses the text format: header `nx ny`, then `nx·ny` lines `i j s_x s_y`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: hline, msg: format!("header: {e}") })?;
        let [nx, ny] = dims[..] else {
            return Err(Error::Parse { line: hline, msg: "header must be `nx ny`".into() });
        };
        if nx == 0 || ny == 0 {
            return Err(Error::Parse { line: hline, msg: "dimensions must be positive".into() });
        }
        let mut dirs = vec![None; nx * ny];
        for (line, row) in lines {
            let toks: Vec<&str> = row.split_whitespace().collect();
            if toks.len() != 4 {
                return Err(Error::Parse { line, msg: format!("expected `i j s_x s_y`, got {} fields", toks.len()) });
            }
            let idx = |t: &str| t.parse::<usize>().map_err(|e| Error::Parse { line, msg: e.to_string() });
            let num = |t: &str| t.parse::<f64>().map_err(|e| Error::Parse { line, msg: e.to_string() });
            let (i, j) = (idx(toks[0])?, idx(toks[1])?);
            if i >= nx || j >= ny {
                return Err(Error::Parse { line, msg: format!("cell ({i}, {j}) outside {nx}x{ny}") });
            }
            let v = Vec2::new(num(toks[2])?, num(toks[3])?);
            if v.norm() == 0.0 {
                return Err(Error::ZeroVector { i, j });
            }
            if dirs[j * nx + i].replace(v).is_some() {
                return Err(Error::Parse { line, msg: format!("cell ({i}, {j}) listed twice") });
            }
        }
        let found = dirs.iter().filter(|d| d.is_some()).count();
        if found != nx * ny {
            return Err(Error::DimensionMismatch { expected: format!("{} cells", nx * ny), found: found.to_string() });
        }
        Self::from_directions(nx, ny, dirs.into_iter().map(Option::unwrap).collect())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Loads a file and checks that it matches the simulation grid.
    pub fn load_for_grid(path: impl AsRef<Path>, nx: usize, ny: usize) -> Result<Self> {
        let t = Self::load(path)?;
        if (t.nx, t.ny) != (nx, ny) {
            return Err(Error::DimensionMismatch {
                expected: format!("{nx}x{ny}"),
                found: format!("{}x{}", t.nx, t.ny),
            });
        }
        Ok(t)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.nx, self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let v = self.s(i, j);
                out.push_str(&format!("{i} {j} {:e} {:e}\n", v.x, v.y));
            }
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}
