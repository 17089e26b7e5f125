use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};

use anisoagg::convolution::{force_bound, precompute_force_table, ForceTable, TableMode};
use anisoagg::grid::Grid2D;
use anisoagg::initial::InitialData;
use anisoagg::io;
use anisoagg::kernels::{ForceParams, TensorField, Vec2};
use anisoagg::onedim::{
    default_nodes, delta_of_l, energy_delta, equidistant_positions, gamma_probe, minimize_energy,
    stationary_fixed_point, stripe_residual, stripes_csv, FixedPointOptions, MinimizeOptions, Potential1D,
    StripeConfig, SUPPORT_EPS,
};
use anisoagg::particles::ParticleEnsemble;
use anisoagg::scheme::{simulate_with_table, Flux, SimulationConfig};

use crate::config::{Config, Manifest};

fn out_dir(cfg: &Config, m: &mut Manifest) -> Result<PathBuf> {
    let dir = cfg.path("out").unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let dir = dir.canonicalize()?;
    m.put("out", dir.display());
    Ok(dir)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn params(cfg: &Config, m: &mut Manifest) -> Result<ForceParams> {
    let d = ForceParams::default();
    let p = ForceParams {
        alpha: cfg.get("alpha", d.alpha)?,
        beta: cfg.get("beta", d.beta)?,
        gamma: cfg.get("gamma", d.gamma)?,
        e_a: cfg.get("e_a", d.e_a)?,
        e_r: cfg.get("e_r", d.e_r)?,
        chi: cfg.get("chi", d.chi)?,
        cutoff: cfg.get("cutoff", d.cutoff)?,
        eta: cfg.get("eta", d.eta)?,
    };
    p.validate()?;
    for (k, v) in [
        ("alpha", p.alpha),
        ("beta", p.beta),
        ("gamma", p.gamma),
        ("e_a", p.e_a),
        ("e_r", p.e_r),
        ("chi", p.chi),
        ("cutoff", p.cutoff),
        ("eta", p.eta),
    ] {
        m.put(k, io::fmt_f64(v));
    }
    Ok(p)
}

fn grid(cfg: &Config, default: usize, m: &mut Manifest) -> Result<Grid2D> {
    let n: usize = cfg.get("grid", default)?;
    let nx = cfg.get("nx", n)?;
    let ny = cfg.get("ny", n)?;
    m.put("nx", nx);
    m.put("ny", ny);
    Ok(Grid2D::new(nx, ny)?)
}

/// `tensor_file` if given, else the homogeneous direction `(s_x, s_y)`.
fn tensor(cfg: &Config, g: Grid2D, m: &mut Manifest) -> Result<TensorField> {
    if let Some(path) = cfg.path("tensor_file") {
        let t = TensorField::load_for_grid(&path, g.nx, g.ny)
            .with_context(|| format!("loading tensor field {}", path.display()))?;
        m.put("tensor_file", path.canonicalize()?.display());
        return Ok(t);
    }
    let s = Vec2::new(cfg.get("s_x", 0.0)?, cfg.get("s_y", 1.0)?);
    let t = TensorField::homogeneous(s, g.nx, g.ny)?;
    let s = t.s(0, 0);
    m.put("s_x", io::fmt_f64(s.x));
    m.put("s_y", io::fmt_f64(s.y));
    Ok(t)
}

fn initial(cfg: &Config, m: &mut Manifest) -> Result<InitialData> {
    let kind = cfg.string("initial", "disc");
    m.put("initial", &kind);
    let center = |m: &mut Manifest| -> Result<Vec2> {
        let c = Vec2::new(cfg.get("init_cx", 0.0)?, cfg.get("init_cy", 0.0)?);
        m.put("init_cx", io::fmt_f64(c.x));
        m.put("init_cy", io::fmt_f64(c.y));
        Ok(c)
    };
    Ok(match kind.as_str() {
        "uniform" => InitialData::Uniform,
        "disc" => {
            let center = center(m)?;
            let radius = cfg.get("init_radius", 0.05)?;
            m.put("init_radius", io::fmt_f64(radius));
            InitialData::Disc { center, radius }
        }
        "gaussian" => {
            let center = center(m)?;
            let sigma = cfg.get("init_sigma", 0.05)?;
            m.put("init_sigma", io::fmt_f64(sigma));
            InitialData::Gaussian { center, sigma }
        }
        "noisy" => {
            let amplitude = cfg.get("init_amplitude", 1e-3)?;
            let seed = cfg.get("seed", 0u64)?;
            m.put("init_amplitude", io::fmt_f64(amplitude));
            m.put("seed", seed);
            InitialData::Noisy { amplitude, seed }
        }
        "file" => {
            let path = cfg.path("init_file").context("initial = file needs init_file")?;
            let path = path.canonicalize().with_context(|| format!("initial data file {}", path.display()))?;
            m.put("init_file", path.display());
            InitialData::File(path)
        }
        other => bail!("unknown initial data `{other}` (uniform, disc, gaussian, noisy, file)"),
    })
}

/// Loads the table from `table_cache` when its key matches, otherwise
/// computes it and refreshes the cache.
fn table(cache: Option<PathBuf>, g: Grid2D, t: &TensorField, p: &ForceParams, q: usize, m: &mut Manifest) -> Result<ForceTable> {
    if let Some(path) = &cache {
        m.put("table_cache", path.display());
        if path.exists() {
            let mode = if t.is_homogeneous() { TableMode::Homogeneous } else { TableMode::Factored };
            if let Some(table) = ForceTable::load_cache(path, g, t, p, q, mode)? {
                m.note("table", "loaded from cache");
                return Ok(table);
            }
        }
    }
    let table = precompute_force_table(g, t, p, q)?;
    if let Some(path) = &cache {
        table.save_cache(path)?;
        m.note("table", "computed and cached");
    }
    Ok(table)
}

pub fn simulate(cfg: &Config) -> Result<()> {
    let start = Instant::now();
    let mut m = Manifest::default();
    let out = out_dir(cfg, &mut m)?;
    let g = grid(cfg, 50, &mut m)?;
    let delta: f64 = cfg.get("delta", 1e-10)?;
    m.put("delta", io::fmt_f64(delta));
    let p = params(cfg, &mut m)?;
    let t = tensor(cfg, g, &mut m)?;
    let init = initial(cfg, &mut m)?;
    let mut sc = SimulationConfig::new(g, init, delta)?;
    sc.params = p;
    sc.tensor = t;
    sc.flux = cfg.get("flux", Flux::Upwind)?;
    sc.quadrature_order = cfg.get("quadrature", sc.quadrature_order)?;
    sc.safety = cfg.get("safety", sc.safety)?;
    sc.tol_stat = cfg.get("tol_stat", sc.tol_stat)?;
    sc.max_steps = cfg.get("max_steps", sc.max_steps)?;
    let snapshot_every: usize = cfg.get("snapshot_every", 0)?;
    let diagnostics_every: usize = cfg.get("diagnostics_every", 1)?;
    let cross_section: bool = cfg.get("cross_section", true)?;
    m.put("flux", sc.flux.name());
    m.put("quadrature", sc.quadrature_order);
    m.put("safety", io::fmt_f64(sc.safety));
    m.put("tol_stat", io::fmt_f64(sc.tol_stat));
    m.put("max_steps", sc.max_steps);
    m.put("snapshot_every", snapshot_every);
    m.put("diagnostics_every", diagnostics_every.max(1));
    m.put("cross_section", cross_section);
    let cache = cfg.path("table_cache");
    cfg.finish()?;
    sc.validate()?;
    let table = table(cache, g, &sc.tensor, &p, sc.quadrature_order, &mut m)?;

    let mut diag = BufWriter::new(File::create(out.join("diagnostics.csv"))?);
    writeln!(diag, "{}", io::DIAGNOSTICS_HEADER)?;
    let mut failure: Option<anyhow::Error> = None;
    let result = simulate_with_table(&sc, &table, |state, rec| {
        if failure.is_some() {
            return;
        }
        let mut go = || -> Result<()> {
            if rec.n % diagnostics_every.max(1) == 0 {
                writeln!(diag, "{}", io::diagnostics_row(rec.n, rec.t, rec.dt, &rec.diag))?;
            }
            if snapshot_every > 0 && rec.n % snapshot_every == 0 {
                write(&out, &format!("snapshot_{:08}.csv", rec.n), &io::snapshot_csv(&state.rho))?;
                write(&out, &format!("snapshot_{:08}.pgm", rec.n), &io::pgm(&state.rho))?;
            }
            Ok(())
        };
        failure = go().err();
    });
    diag.flush()?;
    if let Some(e) = failure {
        return Err(e);
    }
    let outcome = result?;
    let last = outcome.records.last().expect("initial record");
    if diagnostics_every > 1 && last.n % diagnostics_every != 0 {
        writeln!(diag, "{}", io::diagnostics_row(last.n, last.t, last.dt, &last.diag))?;
        diag.flush()?;
    }
    let rho = &outcome.state.rho;
    write(&out, "final.csv", &io::snapshot_csv(rho))?;
    write(&out, "final.pgm", &io::pgm(rho))?;
    if cross_section {
        write(&out, "cross_section.csv", &io::cross_section_csv(rho, g.ny / 2))?;
    }
    m.note("force_bound", io::fmt_f64(force_bound(&p)));
    m.note("termination", outcome.termination.name());
    m.note("steps", outcome.state.n);
    m.note("final_time", io::fmt_f64(outcome.state.t));
    m.note("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    write(&out, "manifest.txt", &m.render("simulate"))?;
    println!(
        "{} after {} steps (t = {:e}); output in {}",
        outcome.termination.name(),
        outcome.state.n,
        outcome.state.t,
        out.display()
    );
    Ok(())
}

pub fn precompute(cfg: &Config) -> Result<()> {
    let start = Instant::now();
    let mut m = Manifest::default();
    let out = out_dir(cfg, &mut m)?;
    let g = grid(cfg, 50, &mut m)?;
    let p = params(cfg, &mut m)?;
    let t = tensor(cfg, g, &mut m)?;
    let q: usize = cfg.get("quadrature", anisoagg::convolution::DEFAULT_ORDER)?;
    m.put("quadrature", q);
    let path = cfg.path("table_cache").unwrap_or_else(|| out.join("table.bin"));
    cfg.finish()?;
    let table = precompute_force_table(g, &t, &p, q)?;
    table.save_cache(&path)?;
    m.put("table_cache", path.display());
    m.note("force_bound", io::fmt_f64(force_bound(&p)));
    m.note("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    write(&out, "manifest.txt", &m.render("precompute"))?;
    println!("table written to {} (f = {:e})", path.display(), force_bound(&p));
    Ok(())
}

pub fn particles(cfg: &Config) -> Result<()> {
    let start = Instant::now();
    let mut m = Manifest::default();
    let out = out_dir(cfg, &mut m)?;
    let g = grid(cfg, 50, &mut m)?;
    let p = params(cfg, &mut m)?;
    let t = tensor(cfg, g, &mut m)?;
    let n: usize = cfg.get("particles", 400)?;
    let steps: usize = cfg.get("steps", 100_000)?;
    let seed: u64 = cfg.get("seed", 0)?;
    let snapshot_every: usize = cfg.get("snapshot_every", 0)?;
    let mut ens = ParticleEnsemble::random(n, seed, t, p)?;
    let dt: f64 = cfg.get("dt", ens.default_dt())?;
    for (k, v) in [("particles", n as u64), ("steps", steps as u64), ("seed", seed), ("snapshot_every", snapshot_every as u64)] {
        m.put(k, v);
    }
    m.put("dt", io::fmt_f64(dt));
    cfg.finish()?;
    if !(dt > 0.0 && dt.is_finite()) {
        bail!("dt must be positive, got {dt}");
    }
    for k in 0..steps {
        if snapshot_every > 0 && k % snapshot_every == 0 {
            write(&out, &format!("positions_{k:08}.csv"), &ens.to_csv())?;
        }
        ens.step(dt)?;
    }
    write(&out, "positions_final.csv", &ens.to_csv())?;
    let hist = ens.histogram(g)?;
    write(&out, "histogram.csv", &io::snapshot_csv(&hist))?;
    write(&out, "histogram.pgm", &io::pgm(&hist))?;
    let c = ens.center_of_mass();
    m.note("force_bound", io::fmt_f64(force_bound(&p)));
    m.note("center_of_mass", format!("{} {}", io::fmt_f64(c.x), io::fmt_f64(c.y)));
    m.note("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    write(&out, "manifest.txt", &m.render("particles"))?;
    println!("{steps} steps of {n} particles; output in {}", out.display());
    Ok(())
}

fn potential(cfg: &Config, p: &ForceParams, m: &mut Manifest) -> Result<Potential1D> {
    let points: usize = cfg.get("potential_points", 4097)?;
    m.put("potential_points", points);
    Ok(Potential1D::build(p, points)?)
}

/// `delta` if given, else `delta_fraction · ‖W‖_L1`.
fn delta_1d(cfg: &Config, pot: &Potential1D, m: &mut Manifest) -> Result<f64> {
    let delta = match cfg.get_opt::<f64>("delta")? {
        Some(d) => d,
        None => cfg.get("delta_fraction", 0.5)? * pot.w_l1(),
    };
    m.put("delta", io::fmt_f64(delta));
    Ok(delta)
}

fn fixed_point_options(cfg: &Config, m: &mut Manifest) -> Result<FixedPointOptions> {
    let d = FixedPointOptions::default();
    let o = FixedPointOptions {
        m: cfg.get("m", d.m)?,
        half_width: cfg.get("half_width", d.half_width)?,
        damping: cfg.get("damping", d.damping)?,
        tol: cfg.get("tol", d.tol)?,
        max_iter: cfg.get("max_iter", d.max_iter)?,
    };
    m.put("m", o.m);
    m.put("half_width", io::fmt_f64(o.half_width));
    m.put("damping", io::fmt_f64(o.damping));
    m.put("tol", io::fmt_f64(o.tol));
    m.put("max_iter", o.max_iter);
    Ok(o)
}

fn minimize_options(cfg: &Config, m: &mut Manifest) -> Result<MinimizeOptions> {
    let d = MinimizeOptions::default();
    let o = MinimizeOptions {
        m: cfg.get("m", d.m)?,
        half_width: cfg.get("half_width", d.half_width)?,
        tol: cfg.get("min_tol", d.tol)?,
        max_iter: cfg.get("min_max_iter", d.max_iter)?,
        start_half_width: cfg.get("start_half_width", d.start_half_width)?,
    };
    m.put("min_tol", io::fmt_f64(o.tol));
    m.put("min_max_iter", o.max_iter);
    m.put("start_half_width", io::fmt_f64(o.start_half_width));
    Ok(o)
}

pub fn stationary1d(cfg: &Config) -> Result<()> {
    let start = Instant::now();
    let mut m = Manifest::default();
    let out = out_dir(cfg, &mut m)?;
    let p = params(cfg, &mut m)?;
    let pot = potential(cfg, &p, &mut m)?;
    let delta = delta_1d(cfg, &pot, &mut m)?;
    let method = cfg.string("method", "both");
    m.put("method", &method);
    let fp_opts = fixed_point_options(cfg, &mut m)?;
    let min_opts = minimize_options(cfg, &mut m)?;
    cfg.finish()?;
    let (run_fp, run_min) = match method.as_str() {
        "fixed-point" => (true, false),
        "minimize" => (false, true),
        "both" => (true, true),
        other => bail!("unknown method `{other}` (fixed-point, minimize, both)"),
    };
    write(&out, "potential.csv", &pot.to_csv())?;
    m.note("w_l1", io::fmt_f64(pot.w_l1()));
    let fp = if run_fp {
        let s = stationary_fixed_point(delta, &pot, &fp_opts).context("fixed-point solver")?;
        write(&out, "fixed_point.csv", &s.rho.to_csv())?;
        m.note("fixed_point_iterations", s.iterations);
        m.note("fixed_point_level", io::fmt_f64(s.level));
        m.note("fixed_point_residual", io::fmt_f64(s.residual));
        m.note("fixed_point_support_width", io::fmt_f64(s.rho.support_width(SUPPORT_EPS)));
        m.note("fixed_point_energy_delta", io::fmt_f64(energy_delta(&s.rho, &pot, delta)));
        Some(s)
    } else {
        None
    };
    if run_min {
        let s = minimize_energy(delta, &pot, &min_opts).context("energy minimizer")?;
        write(&out, "minimizer.csv", &s.rho.to_csv())?;
        m.note("minimizer_iterations", s.iterations);
        m.note("minimizer_energy_delta", io::fmt_f64(s.energy));
        if let Some(fp) = &fp {
            if fp.rho.grid() == s.rho.grid() {
                m.note("l1_distance", io::fmt_f64(fp.rho.l1_distance(&s.rho)));
            }
        }
    }
    m.note("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    write(&out, "manifest.txt", &m.render("stationary1d"))?;
    println!("delta = {delta:e} (‖W‖_L1 = {:e}); output in {}", pot.w_l1(), out.display());
    Ok(())
}

pub fn delta_l(cfg: &Config) -> Result<()> {
    let start = Instant::now();
    let mut m = Manifest::default();
    let out = out_dir(cfg, &mut m)?;
    let p = params(cfg, &mut m)?;
    let pot = potential(cfg, &p, &mut m)?;
    let ls: Vec<f64> = cfg.list("l_values", &[0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2])?;
    let nodes: usize = cfg.get("nodes", 0)?;
    m.put("l_values", ls.iter().map(|v| io::fmt_f64(*v)).collect::<Vec<_>>().join(","));
    m.put("nodes", nodes);
    cfg.finish()?;
    let mut values = Vec::with_capacity(ls.len());
    for &l in &ls {
        let n = if nodes == 0 { default_nodes(l) } else { nodes };
        values.push(delta_of_l(l, &pot, n).with_context(|| format!("delta(L) at L = {l}"))?);
    }
    write(&out, "delta_of_L.csv", &io::two_column_csv("L,delta_of_L", &ls, &values))?;
    m.note("w_l1", io::fmt_f64(pot.w_l1()));
    m.note("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    write(&out, "manifest.txt", &m.render("deltaL"))?;
    for (l, d) in ls.iter().zip(&values) {
        println!("L = {l}: delta = {d:e} ({:.4} ‖W‖_L1)", d / pot.w_l1());
    }
    Ok(())
}

pub fn stripes(cfg: &Config) -> Result<()> {
    let mut m = Manifest::default();
    let out = out_dir(cfg, &mut m)?;
    let p = params(cfg, &mut m)?;
    let explicit: Vec<f64> = cfg.list("positions", &[])?;
    let counts: Vec<usize> = cfg.list("counts", &[1, 2, 3, 4, 5, 6])?;
    cfg.finish()?;
    let mut configs: Vec<(String, StripeConfig)> = Vec::new();
    if explicit.is_empty() {
        m.put("counts", counts.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
        for &n in &counts {
            configs.push((format!("stripes_n{n}.csv"), equidistant_positions(n)?));
        }
    } else {
        m.put("positions", explicit.iter().map(|v| io::fmt_f64(*v)).collect::<Vec<_>>().join(","));
        configs.push(("stripes_custom.csv".into(), StripeConfig::new(explicit)?));
    }
    for (name, c) in &configs {
        let r = stripe_residual(c, &p);
        write(&out, name, &stripes_csv(c, &r))?;
        let worst = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        println!("{name}: n = {}, max |residual| = {worst:e}", c.n());
    }
    write(&out, "manifest.txt", &m.render("stripes"))?;
    Ok(())
}

pub fn gamma(cfg: &Config) -> Result<()> {
    let start = Instant::now();
    let mut m = Manifest::default();
    let out = out_dir(cfg, &mut m)?;
    let p = params(cfg, &mut m)?;
    let pot = potential(cfg, &p, &mut m)?;
    let deltas: Vec<f64> = match cfg.get_opt::<String>("deltas")? {
        Some(_) => cfg.list("deltas", &[])?,
        None => cfg.list("delta_fractions", &[0.8, 0.4, 0.2, 0.1])?.into_iter().map(|f: f64| f * pot.w_l1()).collect(),
    };
    m.put("deltas", deltas.iter().map(|v| io::fmt_f64(*v)).collect::<Vec<_>>().join(","));
    let opts = minimize_options(cfg, &mut m)?;
    let energy_tol: f64 = cfg.get("energy_tol", 1e-15)?;
    m.put("m", opts.m);
    m.put("half_width", io::fmt_f64(opts.half_width));
    m.put("energy_tol", io::fmt_f64(energy_tol));
    cfg.finish()?;
    let report = gamma_probe(&pot, &deltas, &opts, energy_tol)?;
    let mut csv = String::from("delta,energy_delta,bl_to_previous\n");
    for (k, e) in report.entries.iter().enumerate() {
        let bl = e.bl_to_previous.map_or_else(String::new, io::fmt_f64);
        csv.push_str(&format!("{},{},{}\n", io::fmt_f64(e.delta), io::fmt_f64(e.energy_delta), bl));
        write(&out, &format!("minimizer_{k}.csv"), &e.minimizer.to_csv())?;
    }
    write(&out, "gamma.csv", &csv)?;
    m.note("energies_nonincreasing", report.energies_nonincreasing);
    m.note("distances_decreasing", report.distances_decreasing);
    m.note("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    write(&out, "manifest.txt", &m.render("gamma"))?;
    println!(
        "energies nonincreasing: {}, distances decreasing: {}; output in {}",
        report.energies_nonincreasing,
        report.distances_decreasing,
        out.display()
    );
    Ok(())
}
