//! Reduced theory for densities constant in `y`: the scalar force `G`, the
//! potential `W`, regularized energies, stationary states on ℝ, the
//! Γ-convergence probe, `δ(L)`, and stripe states on the period.

mod delta_l;
mod density;
mod energy;
mod fixed_point;
mod gamma;
mod minimize;
mod mollify;
mod potential;
mod stripes;

pub use delta_l::{default_nodes, delta_of_l, power_iteration, EdgeOperator, POWER_TOL};
pub use density::{ConvolutionMode, Convolver, Density1D, Grid1D};
pub use energy::{energy, energy_delta, energy_delta_with, energy_with};
pub use fixed_point::{
    level_and_residual, level_by_bisection, mass_for_level, stationary_fixed_point, FixedPointOptions,
    FixedPointSolution, SUPPORT_EPS,
};
pub use gamma::{bounded_lipschitz, gamma_probe, GammaEntry, GammaReport};
pub use minimize::{minimize_energy, project_simplex, MinimizeOptions, Minimizer};
pub use mollify::{heat_kernel, mollify, C_PHI};
pub use potential::{scalar_force_g, Potential1D, G_TOL};
pub use stripes::{equidistant_positions, stripe_residual, stripes_csv, StripeConfig};
