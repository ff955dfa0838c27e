//! Numerical laboratory for finite-time blow-up of the semilinear heat equation
//!
//! ```text
//! u_t = Δu + |u|^{p-1} u
//! ```
//!
//! The crate is organised around the objects used to study blow-up:
//!
//! - [`core`]: exponent arithmetic, problem description, radial grids and the discrete Laplacian.
//! - [`physical`]: explicit RK4 integration up to numerical blow-up and blow-up time extrapolation.
//! - [`similarity`]: backward similarity variables, Gaussian-weighted norms, the rescaled PDE and
//!   the Ornstein-Uhlenbeck (Mehler) semigroup.
//! - [`special`]: self-similar profiles by shooting and the Aubin-Talenti bubble.
//! - [`diagnostics`]: type-I/II classification, critical Lebesgue integrals, concentration and
//!   decay checks computed from solver output.
//!
//! Everything is radial (or even in one dimension); values live on uniform grids.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod core;
pub mod diagnostics;
mod error;
pub mod numerics;
pub mod physical;
pub mod similarity;
pub mod special;

pub use crate::core::{
    apply_laplacian, build_grid, derive_exponents, Boundary, DerivedExponents, Geometry, Grid, GridKind, InitialData,
    ProblemSpec, Snapshot,
};
pub use error::{Error, Result};
