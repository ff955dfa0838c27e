use std::sync::Arc;

use super::grid::Grid;
use super::problem::{Boundary, ProblemSpec};
use crate::error::{Error, Result};
use crate::numerics::{integrate_cells, sphere_area, Sampler};

/// Solution values on a grid at one physical time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub time: f64,
    pub spec: Arc<ProblemSpec>,
    pub step_index: u64,
}

impl Snapshot {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64, spec: Arc<ProblemSpec>, step_index: u64) -> Result<Self> {
        let snap = Self { grid, values, time, spec, step_index };
        snap.validate()?;
        Ok(snap)
    }

    /// Samples the initial data on `grid`, pinning the boundary node for Dirichlet problems.
    pub fn initial(spec: Arc<ProblemSpec>, grid: Grid) -> Result<Self> {
        let mut values: Vec<f64> = grid.nodes().iter().map(|&r| spec.initial.eval(r, spec.dim, spec.p)).collect();
        if spec.boundary == Boundary::DirichletZero {
            *values.last_mut().unwrap() = 0.0;
        }
        Self::new(grid, values, 0.0, spec, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.grid.len() {
            return Err(Error::Domain(format!(
                "snapshot has {} values for {} nodes",
                self.values.len(),
                self.grid.len()
            )));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at node {i}")));
        }
        if !(self.time >= 0.0) {
            return Err(Error::Domain(format!("negative snapshot time {}", self.time)));
        }
        if self.spec.boundary == Boundary::DirichletZero && *self.values.last().unwrap() != 0.0 {
            return Err(Error::Domain("dirichlet snapshot must vanish at r = R".into()));
        }
        Ok(())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sampler(&self) -> Sampler<'_> {
        self.grid.sampler(&self.values)
    }

    /// `∫_Ω u dx` over the full (symmetric) domain.
    pub fn mass(&self) -> f64 {
        let dim = self.spec.dim;
        let s = self.sampler();
        sphere_area(dim)
            * integrate_cells(0.0, self.grid.radius, 0.0, self.grid.h, |r| s.eval(r) * r.powi(dim as i32 - 1))
    }

    /// Applies `u ↦ λ^{2β} u(λ² t, λ x)`: the returned snapshot lives on the grid scaled by `1/λ`
    /// at time `t/λ²`.
    pub fn rescaled(&self, lambda: f64) -> Result<Snapshot> {
        let beta = 1.0 / (self.spec.p - 1.0);
        let amp = lambda.powf(2.0 * beta);
        let mut spec = (*self.spec).clone();
        let r = self.spec.radius() / lambda;
        spec.geometry = crate::core::Geometry::from_code(spec.geometry.code(), r).unwrap();
        Snapshot::new(
            self.grid.scaled(1.0 / lambda),
            self.values.iter().map(|v| amp * v).collect(),
            self.time / (lambda * lambda),
            Arc::new(spec),
            self.step_index,
        )
    }
}
