//! Explicit finite-volume stepper and the simulation driver.
//!
//! Every flux variant is written in the nonnegative-coefficient form
//!
//! ```text
//! ρ_ij⁺ = a₀ ρ_ij + Σ_neighbours a_nb ρ_nb + δΔt/(2Δx²)(ρ_{i+1,j}² + ρ_{i-1,j}²) + δΔt/(2Δy²)(ρ_{i,j+1}² + ρ_{i,j-1}²)
//! a₀ = 1 - (outflow rates through the four faces) - δΔt ρ_ij (1/Δx² + 1/Δy²)
//! ```
//!
//! where each face with averaged velocity `u` moves mass forward at rate
//! `Δt/Δx·g₊(u)` and backward at rate `Δt/Δx·g₋(u)`. A step is rejected
//! if any coefficient is negative, so positivity is structural.

use crate::convolution::{force_bound, precompute_force_table, ConvolutionEngine, ForceTable, VelocityField};
use crate::diagnostics::{diagnostics, Diagnostics};
use crate::error::{Error, Result};
use crate::grid::{DensityField, Grid2D};
use crate::initial::{discretize_initial, InitialData};
use crate::kernels::{ForceParams, TensorField};

/// Face flux of the transport term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flux {
    /// Central transport `u_{i+1/2} ρ_{i+1/2}` plus the stabilization
    /// `f/2 (ρ_{i+1} - 2ρ_i + ρ_{i-1})`: `g₊ = (f + u)/2`, `g₋ = (f - u)/2`.
    LaxFriedrichs,
    /// Donor-cell transport with the face velocity: `g₊ = max(u, 0)`,
    /// `g₋ = max(-u, 0)`.
    Upwind,
}

impl Flux {
    #[inline]
    fn rates(self, u: f64, f: f64) -> (f64, f64) {
        match self {
            Flux::LaxFriedrichs => (0.5 * (f + u), 0.5 * (f - u)),
            Flux::Upwind => (u.max(0.0), (-u).max(0.0)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Flux::LaxFriedrichs => "lax-friedrichs",
            Flux::Upwind => "upwind",
        }
    }
}

impl std::str::FromStr for Flux {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lax-friedrichs" | "lf" => Ok(Flux::LaxFriedrichs),
            "upwind" => Ok(Flux::Upwind),
            other => Err(Error::InvalidParameter(format!("unknown flux `{other}`"))),
        }
    }
}

/// Largest step allowed by the positivity condition, scaled by `safety`:
/// `Δt = safety / (2f(1/Δx + 1/Δy) + δ r_n (1/Δx² + 1/Δy²))`.
pub fn cfl_dt(grid: Grid2D, f: f64, r_n: f64, delta: f64, safety: f64) -> Result<f64> {
    if !(safety > 0.0 && safety.is_finite()) {
        return Err(Error::InvalidParameter(format!("CFL safety factor must be positive, got {safety}")));
    }
    if f < 0.0 || delta < 0.0 || r_n < 0.0 {
        return Err(Error::InvalidParameter("f, delta and r_n must be nonnegative".into()));
    }
    let (ix, iy) = (1.0 / grid.dx(), 1.0 / grid.dy());
    let denom = 2.0 * f * (ix + iy) + delta * r_n * (ix * ix + iy * iy);
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter("degenerate CFL bound: f = 0 and delta·r_n = 0".into()));
    }
    Ok(safety / denom)
}

/// Density and clock of a running simulation.
#[derive(Clone, Debug)]
pub struct SchemeState {
    pub rho: DensityField,
    pub t: f64,
    pub n: usize,
    pub delta: f64,
    /// Force bound used in the CFL condition and the Lax–Friedrichs rates.
    pub f: f64,
}

impl SchemeState {
    pub fn new(rho: DensityField, delta: f64, f: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta must be nonnegative, got {delta}")));
        }
        if !(f >= 0.0 && f.is_finite()) {
            return Err(Error::InvalidParameter(format!("force bound must be nonnegative, got {f}")));
        }
        Ok(Self { rho, t: 0.0, n: 0, delta, f })
    }
}

/// Reusable stepping workspace for one force table.
pub struct Stepper {
    engine: ConvolutionEngine,
    flux: Flux,
    u: VelocityField,
    next: Vec<f64>,
    last_change: f64,
}

impl Stepper {
    pub fn new(table: &ForceTable, flux: Flux) -> Self {
        let grid = table.grid();
        Self {
            engine: ConvolutionEngine::new(table),
            flux,
            u: VelocityField::zeros(grid),
            next: vec![0.0; grid.len()],
            last_change: 0.0,
        }
    }

    pub fn flux(&self) -> Flux {
        self.flux
    }

    /// Velocity of the density at the start of the last step.
    pub fn velocity(&self) -> &VelocityField {
        &self.u
    }

    /// `‖ρⁿ⁺¹ - ρⁿ‖_∞` of the last accepted step.
    pub fn last_change(&self) -> f64 {
        self.last_change
    }

    /// Recomputes the velocity of `rho` without stepping.
    pub fn refresh_velocity(&mut self, rho: &DensityField) {
        self.engine.velocity_into(rho.values(), &mut self.u);
    }

    /// Advances `state` by `dt` in place. On a negative coefficient the state
    /// is left untouched and [`Error::CflViolation`] is returned.
    pub fn advance(&mut self, state: &mut SchemeState, dt: f64) -> Result<()> {
        let grid = state.rho.grid();
        if grid != self.engine.grid() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{} grid", self.engine.grid().nx, self.engine.grid().ny),
                found: format!("{}x{}", grid.nx, grid.ny),
            });
        }
        self.engine.velocity_into(state.rho.values(), &mut self.u);
        let change = update(grid, self.flux, state.rho.values(), &self.u, state.f, state.delta, dt, &mut self.next)?;
        std::mem::swap(state.rho.values_mut(), &mut self.next);
        state.t += dt;
        state.n += 1;
        self.last_change = change;
        Ok(())
    }
}

/// Writes the updated density into `out` and returns `‖out - rho‖_∞`.
#[allow(clippy::too_many_arguments)]
fn update(
    grid: Grid2D,
    flux: Flux,
    rho: &[f64],
    u: &VelocityField,
    f: f64,
    delta: f64,
    dt: f64,
    out: &mut [f64],
) -> Result<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let (lx, ly) = (dt / grid.dx(), dt / grid.dy());
    let (dxx, dyy) = (delta * dt / (grid.dx() * grid.dx()), delta * dt / (grid.dy() * grid.dy()));
    let mut change = 0.0f64;
    for j in 0..ny {
        let jn = if j + 1 == ny { 0 } else { j + 1 };
        let js = if j == 0 { ny - 1 } else { j - 1 };
        for i in 0..nx {
            let ie = if i + 1 == nx { 0 } else { i + 1 };
            let iw = if i == 0 { nx - 1 } else { i - 1 };
            let c = j * nx + i;
            let (e, w, n, s) = (j * nx + ie, j * nx + iw, jn * nx + i, js * nx + i);

            let (e_out, e_in) = flux.rates(0.5 * (u.ux[c] + u.ux[e]), f);
            let (w_in, w_out) = flux.rates(0.5 * (u.ux[w] + u.ux[c]), f);
            let (n_out, n_in) = flux.rates(0.5 * (u.uy[c] + u.uy[n]), f);
            let (s_in, s_out) = flux.rates(0.5 * (u.uy[s] + u.uy[c]), f);

            let r = rho[c];
            let a0 = 1.0 - lx * (e_out + w_out) - ly * (n_out + s_out) - (dxx + dyy) * r;
            if a0 < 0.0 || e_in < 0.0 || w_in < 0.0 || n_in < 0.0 || s_in < 0.0 {
                let value = a0.min(e_in).min(w_in).min(n_in).min(s_in);
                return Err(Error::CflViolation { i, j, value });
            }
            let (re, rw, rn, rs) = (rho[e], rho[w], rho[n], rho[s]);
            let v = a0 * r
                + lx * (e_in * re + w_in * rw)
                + ly * (n_in * rn + s_in * rs)
                + 0.5 * dxx * (re * re + rw * rw)
                + 0.5 * dyy * (rn * rn + rs * rs);
            change = change.max((v - r).abs());
            out[c] = v;
        }
    }
    Ok(change)
}

/// One step of `state` with a fresh workspace; see [`Stepper::advance`].
pub fn step(state: &SchemeState, table: &ForceTable, dt: f64, flux: Flux) -> Result<SchemeState> {
    let mut next = state.clone();
    Stepper::new(table, flux).advance(&mut next, dt)?;
    Ok(next)
}

/// Everything needed to run the scheme from initial data.
#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub grid: Grid2D,
    pub params: ForceParams,
    pub tensor: TensorField,
    pub initial: InitialData,
    pub delta: f64,
    pub flux: Flux,
    pub quadrature_order: usize,
    pub safety: f64,
    pub tol_stat: f64,
    pub max_steps: usize,
}

impl SimulationConfig {
    /// Defaults for everything but the grid, initial data and `δ`.
    pub fn new(grid: Grid2D, initial: InitialData, delta: f64) -> Result<Self> {
        let cfg = Self {
            grid,
            params: ForceParams::default(),
            tensor: TensorField::homogeneous(crate::kernels::Vec2::new(0.0, 1.0), grid.nx, grid.ny)?,
            initial,
            delta,
            flux: Flux::Upwind,
            quadrature_order: crate::convolution::DEFAULT_ORDER,
            safety: 0.9,
            tol_stat: 1e-8,
            max_steps: 100_000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if (self.tensor.nx(), self.tensor.ny()) != (self.grid.nx, self.grid.ny) {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{} tensor field", self.grid.nx, self.grid.ny),
                found: format!("{}x{}", self.tensor.nx(), self.tensor.ny()),
            });
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta must be nonnegative, got {}", self.delta)));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::InvalidParameter(format!("safety must lie in (0, 1], got {}", self.safety)));
        }
        if !(self.tol_stat >= 0.0) {
            return Err(Error::InvalidParameter(format!("tol_stat must be nonnegative, got {}", self.tol_stat)));
        }
        if self.quadrature_order == 0 {
            return Err(Error::InvalidParameter("quadrature order must be at least 1".into()));
        }
        Ok(())
    }
}

/// Why the driver stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Stationary,
    MaxSteps,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Stationary => "stationary",
            Termination::MaxSteps => "max-steps",
        }
    }
}

/// Diagnostics after step `n` (step 0 is the initial datum).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    pub t: f64,
    pub dt: f64,
    pub diag: Diagnostics,
}

#[derive(Clone, Debug)]
pub struct SimulationOutcome {
    pub state: SchemeState,
    pub termination: Termination,
    pub records: Vec<StepRecord>,
}

/// Runs the scheme, building the force table from the configuration.
pub fn simulate(config: &SimulationConfig, observer: impl FnMut(&SchemeState, &StepRecord)) -> Result<SimulationOutcome> {
    config.validate()?;
    let table = precompute_force_table(config.grid, &config.tensor, &config.params, config.quadrature_order)?;
    simulate_with_table(config, &table, observer)
}

/// Runs the scheme until `‖ρⁿ⁺¹ - ρⁿ‖_∞ / Δtⁿ < tol_stat` or `max_steps`.
///
/// `observer` sees the initial state and every accepted step. The step
/// records carry the diagnostics of `ρⁿ` with the velocity of `ρⁿ⁻¹`
/// (the one that produced it); the initial record uses the velocity of `ρ⁰`.
pub fn simulate_with_table(
    config: &SimulationConfig,
    table: &ForceTable,
    mut observer: impl FnMut(&SchemeState, &StepRecord),
) -> Result<SimulationOutcome> {
    config.validate()?;
    let rho = discretize_initial(&config.initial, config.grid)?;
    let f = force_bound(&config.params);
    let mut state = SchemeState::new(rho, config.delta, f)?;
    let mut stepper = Stepper::new(table, config.flux);

    stepper.refresh_velocity(&state.rho);
    let first = StepRecord { n: 0, t: 0.0, dt: 0.0, diag: diagnostics(&state.rho, stepper.velocity()) };
    observer(&state, &first);
    let mut records = vec![first];

    let mut termination = Termination::MaxSteps;
    while state.n < config.max_steps {
        let dt = cfl_dt(config.grid, f, state.rho.max(), state.delta, config.safety)?;
        stepper.advance(&mut state, dt)?;
        let diag = diagnostics(&state.rho, stepper.velocity());
        if !(diag.mass.is_finite() && diag.max.is_finite() && diag.min.is_finite() && diag.umax.is_finite()) {
            return Err(Error::NonFinite {
                step: state.n,
                t: state.t,
                detail: format!("{diag:?}"),
            });
        }
        let rec = StepRecord { n: state.n, t: state.t, dt, diag };
        observer(&state, &rec);
        records.push(rec);
        if stepper.last_change() / dt < config.tol_stat {
            termination = Termination::Stationary;
            break;
        }
    }
    Ok(SimulationOutcome { state, termination, records })
}
