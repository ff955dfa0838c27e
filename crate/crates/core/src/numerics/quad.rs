use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

const CELL_ORDER: usize = 6;

/// Gauss-Legendre nodes and weights on `[-1, 1]` for the cell rule used by [`integrate_cells`].
pub fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let rule = GaussLegendre::new(NonZeroUsize::new(CELL_ORDER).unwrap());
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

/// Surface measure of the unit sphere `S^{N-1}` in `R^N` (2 for `N = 1`).
pub fn sphere_area(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        n => 2.0 * PI / (n - 2) as f64 * sphere_area(n - 2),
    }
}

/// Integrates `f` over `[a, b]`, splitting at the breakpoints `start + k h` so that piecewise
/// smooth integrands built on a uniform grid are handled cell by cell.
pub fn integrate_cells(a: f64, b: f64, start: f64, h: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let rule = gauss_legendre();
    let mut k = ((a - start) / h).floor() as i64;
    let mut total = 0.0;
    loop {
        let lo = (start + k as f64 * h).max(a);
        let hi = (start + (k + 1) as f64 * h).min(b);
        if lo >= b {
            break;
        }
        if hi > lo {
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            let mut cell = 0.0;
            for &(x, w) in rule {
                cell += w * f(mid + half * x);
            }
            total += half * cell;
        }
        k += 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert_eq!(sphere_area(1), 2.0);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn polynomial_exact_on_partial_cells() {
        let v = integrate_cells(0.13, 2.71, 0.0, 0.25, |x| x.powi(7) - x);
        let exact = |x: f64| x.powi(8) / 8.0 - x * x / 2.0;
        assert!((v - (exact(2.71) - exact(0.13))).abs() < 1e-10);
    }
}
