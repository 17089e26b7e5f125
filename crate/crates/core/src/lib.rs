//! Solver for the anisotropic aggregation equation with nonlinear diffusion
//!
//! ```text
//! ∂ρ/∂t + ∇·(ρ (F ∗ ρ)) = δ ∇·(ρ ∇ρ)
//! ```
//!
//! on the periodic unit square `[-0.5, 0.5)²`, together with the reduced
//! one-dimensional equilibrium theory and an interacting-particle model.

pub mod convolution;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod initial;
pub mod io;
pub mod kernels;
pub mod onedim;
pub mod particles;
pub mod quadrature;
pub mod scheme;

pub use error::{Error, Result};
