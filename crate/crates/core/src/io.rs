//! Text and image formats shared by the solver and the CLI.

use std::fmt::Write as _;
use std::path::Path;

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::grid::{DensityField, Grid2D};

/// 64-bit FNV-1a, used for stable content keys.
pub struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

impl Default for Fnv1a {
    fn default() -> Self {
        Self::new()
    }
}

/// Formats a float so that parsing it back yields the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

/// Snapshot CSV: header `i,j,x_center,y_center,rho`, one row per cell.
pub fn snapshot_csv(rho: &DensityField) -> String {
    let g = rho.grid();
    let mut out = String::from("i,j,x_center,y_center,rho\n");
    for j in 0..g.ny {
        for i in 0..g.nx {
            let _ = writeln!(
                out,
                "{i},{j},{},{},{}",
                fmt_f64(g.x_center(i)),
                fmt_f64(g.y_center(j)),
                fmt_f64(rho.at(i, j))
            );
        }
    }
    out
}

/// Reads a snapshot CSV back into raw cell values on `grid` (not normalized).
pub fn parse_snapshot_csv(text: &str, grid: Grid2D) -> Result<Vec<f64>> {
    let mut values = vec![f64::NAN; grid.len()];
    for (k, line) in text.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: k + 1, msg };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(parse_err(format!("expected 5 fields, got {}", f.len())));
        }
        let i: usize = f[0].trim().parse().map_err(|e| parse_err(format!("{e}")))?;
        let j: usize = f[1].trim().parse().map_err(|e| parse_err(format!("{e}")))?;
        let r: f64 = f[4].trim().parse().map_err(|e| parse_err(format!("{e}")))?;
        if i >= grid.nx || j >= grid.ny {
            return Err(parse_err(format!("cell ({i}, {j}) outside {}x{}", grid.nx, grid.ny)));
        }
        values[grid.idx(i, j)] = r;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{} cells", grid.len()),
            found: values.iter().filter(|v| !v.is_nan()).count().to_string(),
        });
    }
    Ok(values)
}

pub const DIAGNOSTICS_HEADER: &str = "n,t,dt,mass,comx,comy,min,max,l2,umax";

/// One diagnostics CSV row (no trailing newline).
pub fn diagnostics_row(n: usize, t: f64, dt: f64, d: &Diagnostics) -> String {
    [t, dt, d.mass, d.center_of_mass.0, d.center_of_mass.1, d.min, d.max, d.l2, d.umax]
        .iter()
        .fold(n.to_string(), |mut acc, v| {
            acc.push(',');
            acc.push_str(&fmt_f64(*v));
            acc
        })
}

/// Grayscale PGM (P2) with 255 levels, `ρ` mapped linearly from `[0, max ρ]`.
/// The top image row is the largest `y`.
pub fn pgm(rho: &DensityField) -> String {
    let g = rho.grid();
    let max = rho.max();
    let mut out = format!("P2\n{} {}\n255\n", g.nx, g.ny);
    for j in (0..g.ny).rev() {
        let row: Vec<String> = (0..g.nx)
            .map(|i| {
                let v = if max > 0.0 { rho.at(i, j) / max } else { 0.0 };
                ((v * 255.0).round() as u8).to_string()
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Two-column CSV from parallel slices.
pub fn two_column_csv(header: &str, a: &[f64], b: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for (x, y) in a.iter().zip(b) {
        let _ = writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*y));
    }
    out
}

/// Cross-section of row `j` as `x,rho`.
pub fn cross_section_csv(rho: &DensityField, j: usize) -> String {
    let g = rho.grid();
    let xs: Vec<f64> = (0..g.nx).map(|i| g.x_center(i)).collect();
    two_column_csv("x,rho", &xs, rho.row(j))
}

pub fn write(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}
