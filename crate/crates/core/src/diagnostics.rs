//! Scalar summaries of a density and its velocity.

use crate::convolution::VelocityField;
use crate::grid::DensityField;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    /// `Σ ρ dx dy`.
    pub mass: f64,
    /// `(Σ x_i ρ_ij dx dy, Σ y_j ρ_ij dx dy)` with cell-centre coordinates.
    pub center_of_mass: (f64, f64),
    pub min: f64,
    /// Also the `r_n` of the CFL bound.
    pub max: f64,
    /// `(Σ ρ² dx dy)^{1/2}`.
    pub l2: f64,
    /// `max(|u_x|, |u_y|)`.
    pub umax: f64,
}

pub fn diagnostics(rho: &DensityField, u: &VelocityField) -> Diagnostics {
    let g = rho.grid();
    let area = g.cell_area();
    let (mut mass, mut mx, mut my, mut sq) = (0.0, 0.0, 0.0, 0.0);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..g.ny {
        let y = g.y_center(j);
        for i in 0..g.nx {
            let r = rho.at(i, j);
            mass += r;
            mx += g.x_center(i) * r;
            my += y * r;
            sq += r * r;
            min = min.min(r);
            max = max.max(r);
        }
    }
    Diagnostics {
        mass: mass * area,
        center_of_mass: (mx * area, my * area),
        min,
        max,
        l2: (sq * area).sqrt(),
        umax: u.max_abs(),
    }
}
