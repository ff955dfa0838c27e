use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussHermite, GaussLaguerre};
use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RhoRule {
    /// Composite rule on the frame's own grid: per-cell Gauss-Legendre on the cubic interpolant
    /// for norms (cells split where the field changes sign), nodal trapezoid sums for smooth
    /// integrands and the Mehler kernel.
    Grid,
    /// Gauss-Hermite in one dimension, generalized Gauss-Laguerre in `r²/4` for radial frames
    /// with `N >= 2`; the field is interpolated at the quadrature nodes.
    GaussHermite { nodes: usize },
}

/// Quadrature for integrals against `ρ(y) = exp(-|y|²/4)` truncated at `|y| = y_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoQuadrature {
    pub rule: RhoRule,
    pub y_max: f64,
}

impl Default for RhoQuadrature {
    fn default() -> Self {
        Self { rule: RhoRule::Grid, y_max: 12.0 }
    }
}

impl RhoQuadrature {
    pub fn rho(y: f64) -> f64 {
        (-0.25 * y * y).exp()
    }

    /// `∫_{R^N} ρ = (4π)^{N/2}`.
    pub fn total_mass(dim: usize) -> f64 {
        (4.0 * PI).powf(dim as f64 / 2.0)
    }

    /// `∫_{|y| > y_max} ρ dy = (4π)^{N/2} Q(N/2, y_max²/4)`.
    pub fn tail_mass(&self, dim: usize) -> f64 {
        let a = dim as f64 / 2.0;
        Self::total_mass(dim) * gamma_ur(a, 0.25 * self.y_max * self.y_max)
    }

    /// Nodes `(y, weight)` such that `∫ f ρ dμ ≈ Σ weight f(y)`, with `dμ` the radial measure
    /// `ω_{N-1} r^{N-1} dr` (or `dy` on the full line when `dim == 1`).
    pub(crate) fn mapped_nodes(dim: usize, nodes: usize) -> Result<Vec<(f64, f64)>> {
        let n = NonZeroUsize::new(nodes).ok_or_else(|| Error::Config("quadrature needs nodes".into()))?;
        if dim == 1 {
            let gh = GaussHermite::new(n);
            // ∫ f(y) e^{-y²/4} dy = 2 ∫ f(2x) e^{-x²} dx
            return Ok(gh.as_node_weight_pairs().iter().map(|&(x, w)| (2.0 * x, 2.0 * w)).collect());
        }
        // ω ∫ r^{N-1} e^{-r²/4} g(r) dr = ω 2^{N-1} ∫ t^{(N-2)/2} e^{-t} g(2 sqrt t) dt
        let alpha = (dim as f64 - 2.0) / 2.0;
        let alpha = FiniteAboveNegOneF64::new(alpha)
            .ok_or_else(|| Error::Config(format!("gauss-laguerre exponent {alpha}")))?;
        let gl = GaussLaguerre::new(n, alpha);
        let scale = crate::numerics::sphere_area(dim) * 2f64.powi(dim as i32 - 1);
        Ok(gl.as_node_weight_pairs().iter().map(|&(t, w)| (2.0 * t.sqrt(), scale * w)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_mass_matches_closed_form_in_one_dimension() {
        let q = RhoQuadrature { y_max: 3.0, ..Default::default() };
        // ∫_{|y|>3} e^{-y²/4} dy = 2 sqrt(π) erfc(3/2), evaluated in 30-digit arithmetic
        let expect = 0.120_154_127_311_427_81;
        assert!((q.tail_mass(1) / expect - 1.0).abs() < 1e-12, "{}", q.tail_mass(1));
    }

    #[test]
    fn mapped_rules_integrate_rho() {
        for dim in 1..=5 {
            let nodes = RhoQuadrature::mapped_nodes(dim, 40).unwrap();
            let mass: f64 = nodes.iter().map(|&(_, w)| w).sum();
            let expect = RhoQuadrature::total_mass(dim);
            assert!(((mass - expect) / expect).abs() < 1e-12, "N = {dim}");
        }
    }
}
