use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::frame::SimilarityFrame;
use super::norms::weighted_norm;
use super::quadrature::{RhoQuadrature, RhoRule};
use crate::core::GridKind;
use crate::error::{Error, Result};

/// `(T(s)φ)(y) = E φ(e^{-s/2} y + sqrt(2(1 - e^{-s})) Z)`, `Z` standard normal: the transition law
/// of the diffusion generated by `Δ - (y/2)·∇`. One dimension only (radial-even or line frames).
///
/// `RhoRule::Grid` sums the Gaussian kernel against the frame nodes;
/// `RhoRule::GaussHermite` evaluates the expectation with Gauss-Hermite nodes and the cubic
/// interpolant of `φ`.
pub fn mehler_apply(frame: &SimilarityFrame, s: f64, quad: &RhoQuadrature) -> Result<SimilarityFrame> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("semigroup time must be non-negative (got {s})")));
    }
    if frame.dim != 1 {
        return Err(Error::Unsupported(format!(
            "the Mehler semigroup is implemented in one dimension (frame has N = {})",
            frame.dim
        )));
    }
    let mut out = frame.clone();
    out.s = frame.s + s;
    if s == 0.0 {
        return Ok(out);
    }
    let decay = (-0.5 * s).exp();
    let var = -(-s).exp_m1(); // 1 - e^{-s}
    let nodes = frame.grid.nodes();
    out.values = match quad.rule {
        RhoRule::GaussHermite { nodes: count } => {
            let gh = gauss_quad::GaussHermite::new(
                std::num::NonZeroUsize::new(count).ok_or_else(|| Error::Config("quadrature needs nodes".into()))?,
            );
            let pairs = gh.as_node_weight_pairs();
            let spread = 2.0 * var.sqrt();
            let sampler = frame.sampler();
            let norm = PI.sqrt().recip();
            nodes
                .par_iter()
                .map(|&y| {
                    let m = decay * y;
                    norm * pairs.iter().map(|&(x, w)| w * sampler.eval(m + spread * x)).sum::<f64>()
                })
                .collect()
        }
        RhoRule::Grid => {
            let h = frame.grid.h;
            let n = nodes.len();
            let mirrored = frame.grid.kind != GridKind::Line;
            let inv4v = 0.25 / var;
            let c = (4.0 * PI * var).sqrt().recip() * h;
            let reach = (160.0 * var).sqrt();
            let start = frame.grid.start();
            let idx = |z: f64| ((z - start) / h).clamp(0.0, (n - 1) as f64);
            let kernel_sum = |m: f64| -> f64 {
                let lo = idx(m - reach).floor() as usize;
                let hi = idx(m + reach).ceil() as usize;
                let mut acc = 0.0;
                for (j, (&z, &v)) in nodes.iter().zip(&frame.values).enumerate().take(hi + 1).skip(lo) {
                    let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                    let d = z - m;
                    acc += w * v * (-d * d * inv4v).exp();
                }
                acc
            };
            nodes
                .par_iter()
                .map(|&y| {
                    let m = decay * y;
                    let mut acc = kernel_sum(m);
                    if mirrored {
                        // φ(-z) = φ(z): the negative half is the positive half seen from -m
                        acc += kernel_sum(-m);
                    }
                    c * acc
                })
                .collect()
        }
    };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionReport {
    pub q: f64,
    pub s: f64,
    pub before: f64,
    pub after: f64,
    /// `‖φ‖ - ‖T(s)φ‖`.
    pub margin: f64,
    pub tolerance: f64,
    pub violated: bool,
}

/// Compares `‖T(s)φ‖_{L^q_ρ}` with `‖φ‖_{L^q_ρ}`.
///
/// The tolerance combines the truncation bounds of both norms with a relative allowance of
/// `1e-9` for interpolation and rounding.
pub fn contraction_check(frame: &SimilarityFrame, s: f64, q: f64, quad: &RhoQuadrature) -> Result<ContractionReport> {
    Ok(contraction_checks(frame, s, &[q], quad)?.remove(0))
}

/// [`contraction_check`] for several exponents, applying the semigroup once.
pub fn contraction_checks(
    frame: &SimilarityFrame,
    s: f64,
    qs: &[f64],
    quad: &RhoQuadrature,
) -> Result<Vec<ContractionReport>> {
    if let Some(q) = qs.iter().find(|&&q| !(q >= 1.0)) {
        return Err(Error::Domain(format!("contraction holds for q >= 1 (got {q})")));
    }
    let moved = mehler_apply(frame, s, quad)?;
    qs.iter()
        .map(|&q| {
            let before = weighted_norm(frame, q, quad)?;
            let after = weighted_norm(&moved, q, quad)?;
            let margin = before.norm - after.norm;
            let tolerance = (before.norm_upper - before.norm) + (after.norm_upper - after.norm) + 1e-9 * before.norm;
            Ok(ContractionReport {
                q,
                s,
                before: before.norm,
                after: after.norm,
                margin,
                tolerance,
                violated: margin < -tolerance,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::Grid;
    use crate::similarity::norms::rho_integral;
    use crate::similarity::test_frame;

    fn rules() -> [RhoQuadrature; 2] {
        [RhoQuadrature::default(), RhoQuadrature { rule: RhoRule::GaussHermite { nodes: 80 }, y_max: 12.0 }]
    }

    fn grids() -> [Grid; 2] {
        [Grid::radial(12.0, 1201).unwrap(), Grid::line(12.0, 2401).unwrap()]
    }

    fn max_err(frame: &SimilarityFrame, f: impl Fn(f64) -> f64, y_lim: f64) -> f64 {
        frame
            .grid
            .nodes()
            .iter()
            .zip(&frame.values)
            .filter(|(y, _)| y.abs() <= y_lim)
            .map(|(&y, &v)| (v - f(y)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn moment_and_eigenfunction_oracles() {
        for grid in grids() {
            for quad in rules() {
                for s in [0.1, 1.0, 5.0] {
                    let one = mehler_apply(&test_frame(1, grid.clone(), |_| 1.0), s, &quad).unwrap();
                    assert!(max_err(&one, |_| 1.0, 6.0) < 1e-8, "{quad:?} s = {s}");
                    let e2 = (-s).exp();
                    let sq = mehler_apply(&test_frame(1, grid.clone(), |y| y * y - 2.0), s, &quad).unwrap();
                    let err = max_err(&sq, |y| e2 * (y * y - 2.0), 6.0);
                    assert!(err < 1e-8, "{quad:?} s = {s}: {err}");
                    if grid.kind == GridKind::Line {
                        let lin = mehler_apply(&test_frame(1, grid.clone(), |y| y), s, &quad).unwrap();
                        let e1 = (-0.5 * s).exp();
                        assert!(max_err(&lin, |y| e1 * y, 6.0) < 1e-8, "{quad:?} s = {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn zero_time_is_identity_and_negative_time_is_rejected() {
        let f = test_frame(1, Grid::radial(12.0, 101).unwrap(), |y| y.sin());
        let quad = RhoQuadrature::default();
        assert_eq!(mehler_apply(&f, 0.0, &quad).unwrap().values, f.values);
        assert!(matches!(mehler_apply(&f, -0.1, &quad), Err(Error::Domain(_))));
        let f3 = test_frame(3, Grid::radial(12.0, 101).unwrap(), |_| 1.0);
        assert!(matches!(mehler_apply(&f3, 1.0, &quad), Err(Error::Unsupported(_))));
    }

    #[test]
    fn semigroup_law_and_invariant_measure() {
        let grid = Grid::line(12.0, 2401).unwrap();
        let phi = test_frame(1, grid, |y| (1.3 * y).cos() + 0.4 * (2.1 * y + 0.5).sin() - 0.2 * y);
        for quad in rules() {
            let a = mehler_apply(&mehler_apply(&phi, 0.3, &quad).unwrap(), 0.9, &quad).unwrap();
            let b = mehler_apply(&phi, 1.2, &quad).unwrap();
            assert!(max_err(&a, |y| b.sampler().eval(y), 6.0) < 1e-6, "{quad:?}");
            let m0 = rho_integral(&phi, &quad, |w| w).unwrap();
            let m1 = rho_integral(&b, &quad, |w| w).unwrap();
            assert!((m0 - m1).abs() < 1e-6 * m0.abs().max(1.0), "{quad:?}: {m0} {m1}");
        }
    }

    #[test]
    fn constants_are_contracted_with_equality() {
        let f = test_frame(1, Grid::line(12.0, 2401).unwrap(), |_| 1.0);
        for q in [1.0, 2.0, 4.0] {
            let r = contraction_check(&f, 1.0, q, &RhoQuadrature::default()).unwrap();
            assert!(r.margin.abs() < 1e-9 && !r.violated, "{r:?}");
        }
    }

    #[test]
    fn alternating_spikes_contract() {
        let spike = |y: f64, b: f64| (-(y - b) * (y - b) / (2.0 * 0.04)).exp();
        let f = test_frame(1, Grid::line(12.0, 2401).unwrap(), |y| spike(y, 0.5) - spike(y, 0.9));
        for s in [0.01, 0.1, 1.0] {
            let r = contraction_check(&f, s, 1.0, &RhoQuadrature::default()).unwrap();
            assert!(!r.violated && r.margin > 0.0, "{r:?}");
        }
    }
}
