//! Cell-pair force integrals and the discrete nonlocal velocity.
//!
//! The velocity of cell `(i, j)` is
//!
//! ```text
//! u_ij = 1/(dx dy) Σ_kl ρ_kl F_ij^kl,   F_ij^kl = ∬_{C_kl} ∬_{C_ij} F(x - x', T(x)) dx dx'
//! ```
//!
//! Because `F(d, T) = s sᵀ K_s(d) + l lᵀ K_l(d)` with `K_f(d) = f(|d|) d`,
//! the sum is a periodic convolution in the offset `(i - k, j - l)` followed
//! by a per-cell projection. [`ConvolutionEngine`] evaluates it by FFT;
//! [`velocity_direct`] sums the table entries explicitly.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::min_image;
pub use crate::grid::{DensityField, Grid2D};
use crate::kernels::{ForceParams, TensorField, Vec2};
use crate::quadrature::gauss_legendre;

/// Default Gauss–Legendre order per cell and per dimension.
pub const DEFAULT_ORDER: usize = 4;

/// Number of radial samples used by [`force_bound`].
const BOUND_SAMPLES: usize = 20_000;

/// Storage layout of a [`ForceTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableMode {
    /// One pair of offset arrays `(F_x, F_y)`; valid when the tensor field is
    /// the same in every cell.
    Homogeneous,
    /// Offset arrays for `K_s` and `K_l` plus the tensor field, projected
    /// per target cell.
    Factored,
}

#[derive(Clone, Debug)]
enum Kernels {
    Homogeneous { fx: Vec<f64>, fy: Vec<f64> },
    Factored { ks: [Vec<f64>; 2], kl: [Vec<f64>; 2] },
}

/// Precomputed cell-pair integrals, indexed by periodic offset
/// `(Δi mod nx, Δj mod ny)` at position `Δj * nx + Δi`.
#[derive(Clone, Debug)]
pub struct ForceTable {
    grid: Grid2D,
    q: usize,
    params: ForceParams,
    tensor: TensorField,
    kernels: Kernels,
}

impl ForceTable {
    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn params(&self) -> &ForceParams {
        &self.params
    }

    pub fn tensor(&self) -> &TensorField {
        &self.tensor
    }

    pub fn mode(&self) -> TableMode {
        match self.kernels {
            Kernels::Homogeneous { .. } => TableMode::Homogeneous,
            Kernels::Factored { .. } => TableMode::Factored,
        }
    }

    /// The integral `(F_x, F_y)_ij^kl` for target `(i, j)` and source `(k, l)`.
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> Vec2 {
        let g = self.grid;
        let o = g.idx((i + g.nx - k) % g.nx, (j + g.ny - l) % g.ny);
        match &self.kernels {
            Kernels::Homogeneous { fx, fy } => Vec2::new(fx[o], fy[o]),
            Kernels::Factored { ks, kl } => {
                let (s, ll) = (self.tensor.s(i, j), self.tensor.l(i, j));
                let a = Vec2::new(ks[0][o], ks[1][o]);
                let b = Vec2::new(kl[0][o], kl[1][o]);
                s * s.dot(a) + ll * ll.dot(b)
            }
        }
    }

    /// Raw offset arrays: `[F_x, F_y]` in homogeneous mode, `[K_s,x, K_s,y, K_l,x, K_l,y]` when factored.
    pub fn offset_arrays(&self) -> Vec<&[f64]> {
        match &self.kernels {
            Kernels::Homogeneous { fx, fy } => vec![fx, fy],
            Kernels::Factored { ks, kl } => vec![&ks[0], &ks[1], &kl[0], &kl[1]],
        }
    }

    fn cache_header(&self) -> String {
        let p = &self.params;
        format!(
            "anisoagg-force-table v1 mode={} nx={} ny={} q={} alpha={:e} beta={:e} gamma={:e} e_a={:e} e_r={:e} chi={:e} cutoff={:e} eta={:e} tensor={:016x}\n",
            match self.mode() {
                TableMode::Homogeneous => "homogeneous",
                TableMode::Factored => "factored",
            },
            self.grid.nx,
            self.grid.ny,
            self.q,
            p.alpha,
            p.beta,
            p.gamma,
            p.e_a,
            p.e_r,
            p.chi,
            p.cutoff,
            p.eta,
            self.tensor.content_hash()
        )
    }

    /// Writes the binary cache: one text header line holding every key field,
    /// then the offset arrays as little-endian doubles, row-major.
    pub fn save_cache(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        out.write_all(self.cache_header().as_bytes())?;
        for arr in self.offset_arrays() {
            for v in arr {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Loads a cached table, or returns `Ok(None)` if the file was written for
    /// a different key.
    pub fn load_cache(
        path: impl AsRef<Path>,
        grid: Grid2D,
        tensor: &TensorField,
        params: &ForceParams,
        q: usize,
        mode: TableMode,
    ) -> Result<Option<Self>> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let nl = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or(Error::Parse { line: 1, msg: "missing cache header".into() })?;
        let n = grid.len();
        let narr = match mode {
            TableMode::Homogeneous => 2,
            TableMode::Factored => 4,
        };
        let empty = |n: usize| vec![vec![0.0; n]; narr];
        let mut probe = Self {
            grid,
            q,
            params: *params,
            tensor: tensor.clone(),
            kernels: match mode {
                TableMode::Homogeneous => Kernels::Homogeneous { fx: Vec::new(), fy: Vec::new() },
                TableMode::Factored => Kernels::Factored { ks: [Vec::new(), Vec::new()], kl: [Vec::new(), Vec::new()] },
            },
        };
        if bytes[..=nl] != *probe.cache_header().as_bytes() {
            return Ok(None);
        }
        let body = &bytes[nl + 1..];
        if body.len() != narr * n * 8 {
            return Err(Error::DimensionMismatch {
                expected: format!("{} bytes of table data", narr * n * 8),
                found: body.len().to_string(),
            });
        }
        let mut arrays = empty(n);
        for (a, arr) in arrays.iter_mut().enumerate() {
            for (k, v) in arr.iter_mut().enumerate() {
                let off = (a * n + k) * 8;
                *v = f64::from_le_bytes(body[off..off + 8].try_into().expect("8-byte slice"));
            }
        }
        let mut it = arrays.into_iter();
        let mut next = || it.next().expect("array count matches mode");
        probe.kernels = match mode {
            TableMode::Homogeneous => Kernels::Homogeneous { fx: next(), fy: next() },
            TableMode::Factored => Kernels::Factored { ks: [next(), next()], kl: [next(), next()] },
        };
        Ok(Some(probe))
    }
}

/// Builds the table, choosing the offset mode for homogeneous tensor fields
/// and the factored mode otherwise.
pub fn precompute_force_table(grid: Grid2D, tensor: &TensorField, p: &ForceParams, q: usize) -> Result<ForceTable> {
    let mode = if tensor.is_homogeneous() { TableMode::Homogeneous } else { TableMode::Factored };
    precompute_force_table_with_mode(grid, tensor, p, q, mode)
}

/// Builds the table in an explicit mode.
pub fn precompute_force_table_with_mode(
    grid: Grid2D,
    tensor: &TensorField,
    p: &ForceParams,
    q: usize,
    mode: TableMode,
) -> Result<ForceTable> {
    p.validate()?;
    if q == 0 {
        return Err(Error::InvalidParameter("quadrature order must be at least 1".into()));
    }
    if (tensor.nx(), tensor.ny()) != (grid.nx, grid.ny) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{} tensor field", grid.nx, grid.ny),
            found: format!("{}x{}", tensor.nx(), tensor.ny()),
        });
    }
    if mode == TableMode::Homogeneous && !tensor.is_homogeneous() {
        return Err(Error::InvalidParameter("homogeneous table requested for a varying tensor field".into()));
    }

    let pairs = PairRule::new(grid, q);
    let reach = p.cutoff / p.eta + grid.dx().hypot(grid.dy());
    let kernels = match mode {
        TableMode::Homogeneous => {
            let (s, l) = (tensor.s(0, 0), tensor.l(0, 0));
            let [f] = antisymmetrize(grid, &pairs.integrate(reach, |d| [p.force(d, s, l)]));
            Kernels::Homogeneous { fx: f.iter().map(|v| v.x).collect(), fy: f.iter().map(|v| v.y).collect() }
        }
        TableMode::Factored => {
            let raw = pairs.integrate(reach, |d| {
                let d = d * p.eta;
                let (fs, fl) = p.radial(d.norm());
                [d * fs, d * fl]
            });
            let [s, l] = antisymmetrize(grid, &raw);
            Kernels::Factored {
                ks: [s.iter().map(|v| v.x).collect(), s.iter().map(|v| v.y).collect()],
                kl: [l.iter().map(|v| v.x).collect(), l.iter().map(|v| v.y).collect()],
            }
        }
    };
    Ok(ForceTable { grid, q, params: *p, tensor: tensor.clone(), kernels })
}

/// Tensor-product Gauss rule over a pair of cells, expressed through the
/// per-dimension differences `x - x'` of quadrature points.
struct PairRule {
    grid: Grid2D,
    /// `(offset within the pair, combined weight)` along x.
    ddx: Vec<(f64, f64)>,
    ddy: Vec<(f64, f64)>,
}

impl PairRule {
    fn new(grid: Grid2D, q: usize) -> Self {
        let (nodes, weights) = gauss_legendre(q);
        let diffs = |h: f64| {
            let mut v = Vec::with_capacity(q * q);
            for (a, wa) in nodes.iter().zip(&weights) {
                for (b, wb) in nodes.iter().zip(&weights) {
                    v.push(((a - b) * 0.5 * h, wa * wb * 0.25));
                }
            }
            v
        };
        Self { grid, ddx: diffs(grid.dx()), ddy: diffs(grid.dy()) }
    }

    /// Cell-pair integral of `g(x - x')` for every periodic offset; offsets
    /// whose centres are at least `reach` apart are left at zero.
    fn integrate<const K: usize>(&self, reach: f64, g: impl Fn(Vec2) -> [Vec2; K]) -> Vec<[Vec2; K]> {
        let grid = self.grid;
        let (dx, dy) = (grid.dx(), grid.dy());
        let area2 = grid.cell_area() * grid.cell_area();
        let mut out = vec![[Vec2::ZERO; K]; grid.len()];
        for oj in 0..grid.ny {
            let cy = min_image(oj as f64 * dy);
            for oi in 0..grid.nx {
                let cx = min_image(oi as f64 * dx);
                if cx.hypot(cy) >= reach {
                    continue;
                }
                let mut acc = [Vec2::ZERO; K];
                for &(ey, wy) in &self.ddy {
                    let y = min_image(oj as f64 * dy + ey);
                    for &(ex, wx) in &self.ddx {
                        let x = min_image(oi as f64 * dx + ex);
                        for (a, v) in acc.iter_mut().zip(g(Vec2::new(x, y))) {
                            *a += v * (wx * wy);
                        }
                    }
                }
                out[grid.idx(oi, oj)] = acc.map(|a| a * area2);
            }
        }
        out
    }
}

/// Replaces each entry by `(v(Δ) - v(-Δ)) / 2`, making the tables exactly odd.
fn antisymmetrize<const K: usize>(grid: Grid2D, raw: &[[Vec2; K]]) -> [Vec<Vec2>; K] {
    std::array::from_fn(|c| {
        let mut out = vec![Vec2::ZERO; raw.len()];
        for oj in 0..grid.ny {
            for oi in 0..grid.nx {
                let neg = grid.idx((grid.nx - oi) % grid.nx, (grid.ny - oj) % grid.ny);
                out[grid.idx(oi, oj)] = (raw[grid.idx(oi, oj)][c] - raw[neg][c]) * 0.5;
            }
        }
        out
    })
}

/// Certified bound on `|F|`: the maximum of `τ·max(|f_s(τ)|, |f_l(τ)|)` over
/// a uniform radial sampling of `[0, cutoff]`, inflated by 1%.
///
/// The rescaling `η` does not change the bound since `|F(ηd)|` ranges over
/// the same values.
pub fn force_bound(p: &ForceParams) -> f64 {
    force_bound_sampled(p, BOUND_SAMPLES)
}

/// [`force_bound`] with an explicit sample count.
pub fn force_bound_sampled(p: &ForceParams, samples: usize) -> f64 {
    let samples = samples.max(2);
    let mut m = 0.0f64;
    for k in 0..samples {
        let r = p.cutoff * k as f64 / (samples - 1) as f64;
        let (fs, fl) = p.radial(r);
        m = m.max(r * fs.abs().max(fl.abs()));
    }
    1.01 * m
}

/// Per-cell velocity components.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
}

impl VelocityField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self { ux: vec![0.0; grid.len()], uy: vec![0.0; grid.len()] }
    }

    /// `max(|u_x|, |u_y|)` over all cells.
    pub fn max_abs(&self) -> f64 {
        self.ux.iter().chain(&self.uy).fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Two-dimensional complex FFT on a row-major `nx × ny` buffer.
struct Fft2 {
    nx: usize,
    ny: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    columns: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Fft2 {
    fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(nx);
        let row_inv = planner.plan_fft_inverse(nx);
        let col_fwd = planner.plan_fft_forward(ny);
        let col_inv = planner.plan_fft_inverse(ny);
        let scratch_len = [&row_fwd, &row_inv, &col_fwd, &col_inv]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            nx,
            ny,
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
            columns: vec![Complex64::default(); nx * ny],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    fn forward(&mut self, buf: &mut [Complex64]) {
        self.run(buf, true);
    }

    /// Unnormalized inverse transform.
    fn inverse(&mut self, buf: &mut [Complex64]) {
        self.run(buf, false);
    }

    fn run(&mut self, buf: &mut [Complex64], forward: bool) {
        let (row, col) = if forward { (&self.row_fwd, &self.col_fwd) } else { (&self.row_inv, &self.col_inv) };
        let (nx, ny) = (self.nx, self.ny);
        // All rows, then all columns through a transposed copy.
        row.process_with_scratch(buf, &mut self.scratch);
        for j in 0..ny {
            for i in 0..nx {
                self.columns[i * ny + j] = buf[j * nx + i];
            }
        }
        col.process_with_scratch(&mut self.columns, &mut self.scratch);
        for i in 0..nx {
            for j in 0..ny {
                buf[j * nx + i] = self.columns[i * ny + j];
            }
        }
    }
}

/// Spectral evaluator of the velocity field for one table.
///
/// Each kernel `K = K_x + i K_y` is transformed once. Since `ρ` is real,
/// `ρ ∗ K = (ρ ∗ K_x) + i (ρ ∗ K_y)`, so a single inverse transform yields
/// both velocity components of one kernel.
pub struct ConvolutionEngine {
    grid: Grid2D,
    fft: Fft2,
    tensor: Option<TensorField>,
    spectra: Vec<Vec<Complex64>>,
    rho_hat: Vec<Complex64>,
    work: Vec<Complex64>,
}

impl ConvolutionEngine {
    pub fn new(table: &ForceTable) -> Self {
        let grid = table.grid;
        let mut fft = Fft2::new(grid.nx, grid.ny);
        // u = (1/(dx dy)) Σ ρ K and the inverse transform carries a factor
        // N = nx ny; on the unit torus N dx dy = 1, so both cancel.
        let to_spectrum = |fft: &mut Fft2, kx: &[f64], ky: &[f64]| {
            let mut buf: Vec<Complex64> = kx.iter().zip(ky).map(|(&a, &b)| Complex64::new(a, b)).collect();
            fft.forward(&mut buf);
            buf
        };
        let (tensor, spectra) = match &table.kernels {
            Kernels::Homogeneous { fx, fy } => (None, vec![to_spectrum(&mut fft, fx, fy)]),
            Kernels::Factored { ks, kl } => (
                Some(table.tensor.clone()),
                vec![to_spectrum(&mut fft, &ks[0], &ks[1]), to_spectrum(&mut fft, &kl[0], &kl[1])],
            ),
        };
        let n = grid.len();
        Self {
            grid,
            fft,
            tensor,
            spectra,
            rho_hat: vec![Complex64::default(); n],
            work: vec![Complex64::default(); n],
        }
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    /// Velocity of the cell values `rho` (length `nx·ny`), written into `out`.
    pub fn velocity_into(&mut self, rho: &[f64], out: &mut VelocityField) {
        let n = self.grid.len();
        assert_eq!(rho.len(), n, "density length does not match the engine grid");
        for (c, &r) in self.rho_hat.iter_mut().zip(rho) {
            *c = Complex64::new(r, 0.0);
        }
        self.fft.forward(&mut self.rho_hat);
        // Circular convolution is IFFT(ρ̂ K̂)/N; the velocity adds 1/(dx dy).
        let scale = 1.0 / (n as f64 * self.grid.cell_area());
        for (k, spectrum) in self.spectra.iter().enumerate() {
            for ((w, r), s) in self.work.iter_mut().zip(&self.rho_hat).zip(spectrum) {
                *w = r * s * scale;
            }
            self.fft.inverse(&mut self.work);
            match &self.tensor {
                None => {
                    for (c, w) in self.work.iter().enumerate() {
                        out.ux[c] = w.re;
                        out.uy[c] = w.im;
                    }
                }
                Some(t) => {
                    for (c, w) in self.work.iter().enumerate() {
                        let s = t.directions()[c];
                        let e = if k == 0 { s } else { s.rotate_cw() };
                        let a = e.x * w.re + e.y * w.im;
                        if k == 0 {
                            out.ux[c] = e.x * a;
                            out.uy[c] = e.y * a;
                        } else {
                            out.ux[c] += e.x * a;
                            out.uy[c] += e.y * a;
                        }
                    }
                }
            }
        }
    }

    pub fn velocity(&mut self, rho: &DensityField) -> Result<VelocityField> {
        check_grid(self.grid, rho.grid())?;
        let mut out = VelocityField::zeros(self.grid);
        self.velocity_into(rho.values(), &mut out);
        Ok(out)
    }
}

fn check_grid(expected: Grid2D, found: Grid2D) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{} grid", expected.nx, expected.ny),
            found: format!("{}x{}", found.nx, found.ny),
        });
    }
    Ok(())
}

/// Velocity field by the fast spectral path.
pub fn velocity_field(rho: &DensityField, table: &ForceTable) -> Result<VelocityField> {
    ConvolutionEngine::new(table).velocity(rho)
}

/// Velocity field by explicit summation of table entries over all source
/// cells, `O(N²)`. Reference path for the spectral evaluator.
pub fn velocity_direct(rho: &DensityField, table: &ForceTable) -> Result<VelocityField> {
    let g = table.grid;
    check_grid(g, rho.grid())?;
    let mut out = VelocityField::zeros(g);
    let inv_area = 1.0 / g.cell_area();
    for j in 0..g.ny {
        for i in 0..g.nx {
            let mut acc = Vec2::ZERO;
            for l in 0..g.ny {
                for k in 0..g.nx {
                    let r = rho.at(k, l);
                    if r != 0.0 {
                        acc += table.entry(i, j, k, l) * r;
                    }
                }
            }
            let c = g.idx(i, j);
            out.ux[c] = acc.x * inv_area;
            out.uy[c] = acc.y * inv_area;
        }
    }
    Ok(out)
}
