use serde::Serialize;

use super::frame::SimilarityFrame;
use super::quadrature::{RhoQuadrature, RhoRule};
use crate::core::GridKind;
use crate::error::{Error, Result};
use crate::numerics::{abs_pow, gauss_legendre, integrate_cells, sphere_area};

/// `‖w‖_{L^q_ρ}` together with the truncation bound `sup|w|^q ∫_{|y|>Y} ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedNorm {
    pub q: f64,
    pub norm: f64,
    /// `∫ |w|^q ρ` over `|y| <= Y`.
    pub integral: f64,
    pub tail_bound: f64,
    /// `(integral + tail_bound)^{1/q}`.
    pub norm_upper: f64,
    /// `q < 1`: the value is only a quasi-norm.
    pub quasi: bool,
}

fn measure_factor(frame: &SimilarityFrame, y: f64) -> f64 {
    match frame.grid.kind {
        GridKind::Line => 1.0,
        _ => sphere_area(frame.dim) * y.abs().powi(frame.dim as i32 - 1),
    }
}

/// `∫ |w|^q ρ dμ` cell by cell on the cubic interpolant. Cells where the nodal values change sign
/// are split at the interpolant's root so that the kink of `|w|^q` falls on a cell boundary.
fn grid_abs(frame: &SimilarityFrame, q: f64, y_max: f64) -> f64 {
    let nodes = frame.grid.nodes();
    let s = frame.sampler();
    let g = |y: f64| abs_pow(s.eval(y), q) * RhoQuadrature::rho(y) * measure_factor(frame, y);
    let gl = gauss_legendre();
    let cell = |a: f64, b: f64| {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * gl.iter().map(|&(x, w)| w * g(mid + half * x)).sum::<f64>()
    };
    let mut acc = 0.0;
    for i in 0..nodes.len() - 1 {
        let (a, b) = (nodes[i].max(-y_max), nodes[i + 1].min(y_max));
        if a >= b {
            continue;
        }
        let (fa, fb) = (s.eval(a), s.eval(b));
        if fa * fb < 0.0 {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if s.eval(mid) * fa > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            acc += cell(a, root) + cell(root, b);
        } else {
            acc += cell(a, b);
        }
    }
    acc
}

/// `∫ f(w) ρ dμ` truncated at `quad.y_max`.
pub(crate) fn rho_integral(frame: &SimilarityFrame, quad: &RhoQuadrature, f: impl Fn(f64) -> f64) -> Result<f64> {
    match quad.rule {
        RhoRule::Grid => {
            let nodes = frame.grid.nodes();
            let n = nodes.len();
            let mut acc = 0.0;
            for (i, (&y, &w)) in nodes.iter().zip(&frame.values).enumerate() {
                if y.abs() > quad.y_max + 1e-12 {
                    continue;
                }
                let edge = i == 0 || i == n - 1 || (nodes[i] + frame.grid.h).abs() > quad.y_max + 1e-12;
                let weight = if edge { 0.5 } else { 1.0 };
                acc += weight * f(w) * RhoQuadrature::rho(y) * measure_factor(frame, y);
            }
            Ok(acc * frame.grid.h)
        }
        RhoRule::GaussHermite { nodes } => {
            let s = frame.sampler();
            let rule = RhoQuadrature::mapped_nodes(frame.dim, nodes)?;
            Ok(rule.iter().filter(|(y, _)| y.abs() <= quad.y_max).map(|&(y, wt)| wt * f(s.eval(y))).sum())
        }
    }
}

pub fn weighted_norm(frame: &SimilarityFrame, q: f64, quad: &RhoQuadrature) -> Result<WeightedNorm> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("weighted norm needs q > 0 (got {q})")));
    }
    let integral = match quad.rule {
        RhoRule::Grid => grid_abs(frame, q, quad.y_max),
        RhoRule::GaussHermite { .. } => rho_integral(frame, quad, |w| abs_pow(w, q))?,
    };
    let tail_bound = abs_pow(frame.sup_norm(), q) * quad.tail_mass(frame.dim);
    Ok(WeightedNorm {
        q,
        norm: integral.powf(1.0 / q),
        integral,
        tail_bound,
        norm_upper: (integral + tail_bound).powf(1.0 / q),
        quasi: q < 1.0,
    })
}

/// `∫_{|y| <= k} |w|^q dy`, integrating the cubic interpolant cell by cell.
pub fn ball_integral(frame: &SimilarityFrame, k: f64, q: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("ball radius must be positive (got {k})")));
    }
    let s = frame.sampler();
    let g = &frame.grid;
    Ok(match g.kind {
        GridKind::Line => integrate_cells(-k, k, g.start(), g.h, |y| abs_pow(s.eval(y), q)),
        _ => {
            let dim = frame.dim;
            sphere_area(dim) * integrate_cells(0.0, k, 0.0, g.h, |r| abs_pow(s.eval(r), q) * r.powi(dim as i32 - 1))
        }
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::core::Grid;
    use crate::similarity::test_frame as frame_from;

    #[test]
    fn gaussian_integral_in_one_dimension() {
        let rules = [RhoRule::Grid, RhoRule::GaussHermite { nodes: 60 }];
        for grid in [Grid::radial(12.0, 1201).unwrap(), Grid::line(12.0, 2401).unwrap()] {
            let frame = frame_from(1, grid, |_| 1.0);
            for rule in rules {
                let n = weighted_norm(&frame, 1.0, &RhoQuadrature { rule, y_max: 12.0 }).unwrap();
                assert!((n.norm - 2.0 * PI.sqrt()).abs() < 1e-12, "{rule:?}: {}", n.norm);
                assert!(n.tail_bound < 1e-15);
            }
        }
    }

    #[test]
    fn rho_mass_in_higher_dimensions() {
        for dim in 2..=4 {
            let frame = frame_from(dim, Grid::radial(12.0, 2401).unwrap(), |_| 1.0);
            let expect = RhoQuadrature::total_mass(dim);
            let gh =
                weighted_norm(&frame, 1.0, &RhoQuadrature { rule: RhoRule::GaussHermite { nodes: 40 }, y_max: 12.0 })
                    .unwrap();
            assert!((gh.norm / expect - 1.0).abs() < 1e-12);
            let tr = weighted_norm(&frame, 1.0, &RhoQuadrature::default()).unwrap();
            assert!((tr.norm / expect - 1.0).abs() < 1e-5, "N = {dim}: {}", tr.norm / expect);
        }
    }

    #[test]
    fn zero_field_and_bad_exponent() {
        let frame = frame_from(1, Grid::radial(12.0, 101).unwrap(), |_| 0.0);
        assert_eq!(weighted_norm(&frame, 2.0, &RhoQuadrature::default()).unwrap().norm, 0.0);
        assert!(weighted_norm(&frame, 0.0, &RhoQuadrature::default()).is_err());
        assert!(weighted_norm(&frame, 0.5, &RhoQuadrature::default()).unwrap().quasi);
    }

    #[test]
    fn truncation_bound_covers_the_missing_mass() {
        let frame = frame_from(1, Grid::radial(12.0, 1201).unwrap(), |_| 1.0);
        let quad = RhoQuadrature { rule: RhoRule::Grid, y_max: 3.0 };
        let n = weighted_norm(&frame, 1.0, &quad).unwrap();
        let full = 2.0 * PI.sqrt();
        assert!(n.norm < full && n.norm_upper >= full - 1e-4, "{} {}", n.norm, n.norm_upper);
    }

    #[test]
    fn sign_changes_are_integrated_accurately() {
        // ∫ |cos y| e^{-y²/4} dy with the kink split versus a fine reference
        let coarse = frame_from(1, Grid::line(12.0, 1201).unwrap(), |y| y.cos());
        let fine = frame_from(1, Grid::line(12.0, 96001).unwrap(), |y| y.cos());
        let q = RhoQuadrature::default();
        let a = weighted_norm(&coarse, 1.0, &q).unwrap().norm;
        let b = weighted_norm(&fine, 1.0, &q).unwrap().norm;
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn ball_integral_of_a_constant() {
        let frame = frame_from(3, Grid::radial(12.0, 1201).unwrap(), |_| 2.0);
        let v = ball_integral(&frame, 1.5, 2.0).unwrap();
        assert!((v - 4.0 * 4.0 / 3.0 * PI * 1.5f64.powi(3)).abs() < 1e-10);
        let line = frame_from(1, Grid::line(12.0, 1201).unwrap(), |y| y);
        assert!((ball_integral(&line, 2.0, 1.0).unwrap() - 4.0).abs() < 1e-12);
    }
}
