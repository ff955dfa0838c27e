use serde::Serialize;

use super::problem::{Geometry, ProblemSpec};
use crate::error::{Error, Result};
use crate::numerics::{Extension, Sampler};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    /// Radial nodes on `[0, R]` in `R^N`.
    UniformRadial,
    /// Half of a symmetric interval `(-R, R)`, nodes on `[0, R]`.
    UniformInterval,
    /// Full line `[-R, R]`; used for one-dimensional similarity frames off the symmetry axis.
    Line,
}

/// Uniform grid. Radial and interval grids start at the origin; line grids at `-R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub kind: GridKind,
    pub h: f64,
    pub radius: f64,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(kind: GridKind, radius: f64, node_count: usize) -> Result<Self> {
        if node_count < 3 {
            return Err(Error::Config(format!("grid needs at least 3 nodes (got {node_count})")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Config(format!("grid radius must be positive (got {radius})")));
        }
        let (start, span) = match kind {
            GridKind::Line => (-radius, 2.0 * radius),
            _ => (0.0, radius),
        };
        let h = span / (node_count - 1) as f64;
        let mut nodes: Vec<f64> = (0..node_count).map(|i| start + h * i as f64).collect();
        nodes[node_count - 1] = radius;
        Ok(Self { kind, h, radius, nodes })
    }

    pub fn radial(radius: f64, node_count: usize) -> Result<Self> {
        Self::new(GridKind::UniformRadial, radius, node_count)
    }

    pub fn line(radius: f64, node_count: usize) -> Result<Self> {
        Self::new(GridKind::Line, radius, node_count)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    /// Whether the grid stores one half of an even field.
    pub fn is_symmetric(&self) -> bool {
        self.kind != GridKind::Line
    }

    /// Cubic interpolant of `values` on this grid, zero outside the covered domain.
    pub fn sampler<'a>(&self, values: &'a [f64]) -> Sampler<'a> {
        let ext = if self.is_symmetric() { Extension::Even } else { Extension::Zero };
        Sampler::new(self.start(), self.h, values, ext)
    }

    /// The same grid with every coordinate multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Grid {
        Grid {
            kind: self.kind,
            h: self.h * factor,
            radius: self.radius * factor,
            nodes: self.nodes.iter().map(|x| x * factor).collect(),
        }
    }
}

pub fn build_grid(spec: &ProblemSpec, node_count: usize) -> Result<Grid> {
    let kind = match spec.geometry {
        Geometry::Interval { .. } => GridKind::UniformInterval,
        _ => GridKind::UniformRadial,
    };
    Grid::new(kind, spec.radius(), node_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{Boundary, InitialData};

    fn spec(radius: f64) -> ProblemSpec {
        ProblemSpec::new(
            3,
            2.0,
            Geometry::Ball { radius },
            Boundary::DirichletZero,
            InitialData::Constant { value: 0.0 },
        )
        .unwrap()
    }

    #[test]
    fn unit_ball_eleven_nodes() {
        let g = build_grid(&spec(1.0), 11).unwrap();
        assert!((g.h - 0.1).abs() < 1e-16);
        assert!((g.nodes()[5] - 0.5).abs() < 1e-16);
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(*g.nodes().last().unwrap(), 1.0);
    }

    #[test]
    fn three_nodes() {
        let g = build_grid(&spec(2.0), 3).unwrap();
        assert_eq!(g.nodes(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn too_few_nodes() {
        assert!(matches!(build_grid(&spec(1.0), 2), Err(Error::Config(_))));
    }

    #[test]
    fn nodes_strictly_increasing_and_span_radius() {
        for n in [3, 7, 100, 1001] {
            let g = build_grid(&spec(4.7), n).unwrap();
            assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
            let span = g.h * (n - 1) as f64;
            assert!((span - 4.7).abs() <= 4.0 * f64::EPSILON * 4.7);
        }
    }

    #[test]
    fn line_grid_is_symmetric() {
        let g = Grid::line(12.0, 7).unwrap();
        assert_eq!(g.nodes(), &[-12.0, -8.0, -4.0, 0.0, 4.0, 8.0, 12.0]);
    }
}
