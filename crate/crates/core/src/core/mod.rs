//! Shared vocabulary: exponents, problem instances, grids, snapshots and the radial Laplacian.

mod exponents;
mod grid;
mod laplacian;
mod problem;
mod snapshot;

pub use exponents::{derive_exponents, DerivedExponents};
pub use grid::{build_grid, Grid, GridKind};
pub use laplacian::{apply_laplacian, radial_laplacian};
pub use problem::{Boundary, Geometry, InitialData, ProblemSpec};
pub use snapshot::Snapshot;
