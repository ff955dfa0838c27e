//! Backward similarity variables around `(T, a)`:
//!
//! ```text
//! s = -log(T - t),   y = (x - a)/sqrt(T - t),   w(s, y) = (T - t)^β u(t, x)
//! ```
//!
//! `w` solves `w_s = Lw + |w|^{p-1}w - βw` with `L = Δ - (y/2)·∇`, the Ornstein-Uhlenbeck
//! operator that is symmetric in `L²(ρ dy)` for `ρ(y) = exp(-|y|²/4)`.

mod frame;
mod mehler;
mod norms;
mod quadrature;
mod smoothing;
mod wsolve;

pub use frame::{
    to_similarity_frame, to_vn_frame, vn_bound_check, FrameGridSpec, FrameSource, SimilarityFrame, VnBound,
};
pub use mehler::{contraction_check, contraction_checks, mehler_apply, ContractionReport};
pub use norms::{ball_integral, weighted_norm, WeightedNorm};
pub use quadrature::{RhoQuadrature, RhoRule};
pub use smoothing::{delayed_smoothing_scan, ScanRow, ScanSummary, SmoothingScan, SmoothingScanConfig};
pub use wsolve::{solve_w_equation, w_rhs, WSolveOptions};

#[cfg(test)]
pub(crate) fn test_frame(dim: usize, grid: crate::core::Grid, f: impl Fn(f64) -> f64) -> SimilarityFrame {
    let values = grid.nodes().iter().map(|&y| f(y)).collect();
    SimilarityFrame {
        center: 0.0,
        s: 0.0,
        s0: 0.0,
        t_hat: 1.0,
        dim,
        p: 3.0,
        domain_radius: f64::INFINITY,
        grid,
        values,
        source: FrameSource::NativeWSolve,
    }
}
