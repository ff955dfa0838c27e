use super::problem::Boundary;
use super::snapshot::Snapshot;

/// Second-order radial Laplacian `u'' + (N-1)u'/r` on a uniform grid starting at `r = 0`.
///
/// The origin row uses the even-extension limit `Δu(0) = N u''(0)`, i.e. `2N(u_1 - u_0)/h²`.
/// The last row is zero for Dirichlet data (the value is pinned) and uses the reflected ghost
/// node `u_n = u_{n-2}` for Neumann data.
pub fn radial_laplacian(values: &[f64], h: f64, dim: usize, boundary: Boundary, out: &mut [f64]) {
    let n = values.len();
    debug_assert_eq!(out.len(), n);
    if boundary == Boundary::Homogeneous {
        out.fill(0.0);
        return;
    }
    let inv_h2 = 1.0 / (h * h);
    let drift = (dim as f64 - 1.0) / (2.0 * h * h);
    out[0] = 2.0 * dim as f64 * (values[1] - values[0]) * inv_h2;
    for i in 1..n - 1 {
        let (um, u, up) = (values[i - 1], values[i], values[i + 1]);
        out[i] = (up - 2.0 * u + um) * inv_h2 + drift * (up - um) / i as f64;
    }
    out[n - 1] = match boundary {
        Boundary::DirichletZero => 0.0,
        _ => 2.0 * (values[n - 2] - values[n - 1]) * inv_h2,
    };
}

pub fn apply_laplacian(snapshot: &Snapshot) -> Vec<f64> {
    let mut out = vec![0.0; snapshot.values.len()];
    radial_laplacian(&snapshot.values, snapshot.grid.h, snapshot.spec.dim, snapshot.spec.boundary, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::core::{build_grid, Geometry, InitialData, ProblemSpec};
    use crate::numerics::signed_pow;
    use proptest::prelude::*;

    fn snapshot(dim: usize, boundary: Boundary, radius: f64, n: usize, f: impl Fn(f64) -> f64) -> Snapshot {
        let geometry = if dim == 1 { Geometry::Interval { half_length: radius } } else { Geometry::Ball { radius } };
        let initial = InitialData::Constant { value: 1.0 };
        let boundary_for_spec = if boundary == Boundary::DirichletZero { Boundary::NeumannZero } else { boundary };
        let spec = Arc::new(ProblemSpec::new(dim, 3.0, geometry, boundary_for_spec, initial).unwrap());
        let grid = build_grid(&spec, n).unwrap();
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Snapshot::new(grid, values, 0.0, spec, 0).unwrap()
    }

    #[test]
    fn constant_has_zero_laplacian() {
        for dim in 1..=5 {
            let s = snapshot(dim, Boundary::NeumannZero, 2.0, 41, |_| 1.0);
            assert!(apply_laplacian(&s).iter().all(|&v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn quadratic_in_three_dimensions() {
        let s = snapshot(3, Boundary::NeumannZero, 1.0, 51, |r| r * r);
        let lap = apply_laplacian(&s);
        // the stencil is exact on quadratics away from the outer row
        for &v in &lap[..50] {
            assert!((v - 6.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn bubble_residual_dimension_four() {
        // U = sqrt(8)/(1+r^2) solves ΔU + U^3 = 0 in R^4
        let c = 8f64.sqrt();
        let residual = |n: usize| {
            let s = snapshot(4, Boundary::NeumannZero, 5.0, n, |r| c / (1.0 + r * r));
            let lap = apply_laplacian(&s);
            lap[..n - 1].iter().zip(&s.values).map(|(l, u)| (l + signed_pow(*u, 3.0)).abs()).fold(0.0, f64::max)
        };
        let (coarse, fine) = (residual(201), residual(401));
        // O(h²) truncation, dominated by the origin row (8 c(4) h²)
        assert!(coarse < 3e-2 && fine < 8e-3, "{coarse} {fine}");
        assert!(((coarse / fine).log2() - 2.0).abs() < 0.1);
    }

    #[test]
    fn second_order_convergence_on_cosine() {
        for dim in [1usize, 2, 3, 5] {
            let exact = |r: f64| -> f64 {
                if r == 0.0 {
                    -(dim as f64)
                } else {
                    -r.cos() - (dim as f64 - 1.0) * r.sin() / r
                }
            };
            let errors: Vec<f64> = [81, 161, 321]
                .iter()
                .map(|&n| {
                    let s = snapshot(dim, Boundary::NeumannZero, 2.0, n, f64::cos);
                    let lap = apply_laplacian(&s);
                    s.grid.nodes()[..n - 1].iter().zip(&lap).map(|(&r, &l)| (l - exact(r)).abs()).fold(0.0, f64::max)
                })
                .collect();
            for w in errors.windows(2) {
                let order = (w[0] / w[1]).log2();
                assert!((1.8..=2.2).contains(&order), "N = {dim}: order {order}");
            }
        }
    }

    proptest! {
        #[test]
        fn linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
            let f = |r: f64| (r * (1.0 + seed as f64 * 1e-3)).sin();
            let g = |r: f64| (1.0 + r * r).recip() * (seed as f64 * 1e-2).cos();
            let su = snapshot(3, Boundary::NeumannZero, 2.0, 33, f);
            let sv = snapshot(3, Boundary::NeumannZero, 2.0, 33, g);
            let sw = snapshot(3, Boundary::NeumannZero, 2.0, 33, |r| a * f(r) + b * g(r));
            let (lu, lv, lw) = (apply_laplacian(&su), apply_laplacian(&sv), apply_laplacian(&sw));
            for i in 0..33 {
                let expect = a * lu[i] + b * lv[i];
                prop_assert!((lw[i] - expect).abs() <= 1e-9 * (1.0 + expect.abs()));
            }
        }
    }
}
