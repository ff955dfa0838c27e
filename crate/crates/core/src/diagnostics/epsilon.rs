use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::linear_fit;
use crate::physical::RunResult;
use crate::similarity::{to_similarity_frame, weighted_norm, FrameGridSpec, RhoQuadrature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonOptions {
    /// Norm exponent; `None` selects `max(p, Np/2) + 1`.
    pub q: Option<f64>,
    /// Fit window in similarity time; `None` uses the later half of the resolved range.
    pub s_window: Option<(f64, f64)>,
    pub rate_tolerance: f64,
    pub quad: RhoQuadrature,
    pub y_grid: FrameGridSpec,
}

impl Default for EpsilonOptions {
    fn default() -> Self {
        Self {
            q: None,
            s_window: None,
            rate_tolerance: 0.15,
            quad: RhoQuadrature::default(),
            y_grid: FrameGridSpec { y_max: 12.0, node_count: 2401 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonReport {
    pub center: f64,
    pub q: f64,
    /// `q >= p` and `q > Np/2`.
    pub q_condition_met: bool,
    pub beta: f64,
    /// Fitted decay rate of `‖w_a(s)‖_{L^q_ρ}`.
    pub rate_hat: f64,
    pub correlation: f64,
    /// Smallest `C0` with `‖w_a(s)‖_{L^q_ρ} <= C0 e^{-β(s-σ)} ‖w_a(σ)‖_{L¹_ρ}` on the window.
    pub c0_hat: f64,
    pub sigma: f64,
    pub l1_at_sigma: f64,
    /// `(s, ‖w_a(s)‖_{L^q_ρ})` in the window.
    pub norms: Vec<(f64, f64)>,
    pub passes: bool,
}

/// Decay of the weighted norm of `w_a` along a run. Passes when the fitted exponential rate lies
/// within `rate_tolerance` of `β`.
pub fn epsilon_regularity_check(run: &RunResult, center: f64, options: &EpsilonOptions) -> Result<EpsilonReport> {
    let t_hat = run.t_hat.ok_or_else(|| Error::Precondition("run has no blow-up time estimate".into()))?;
    let spec = &run.spec;
    let (p, dim) = (spec.p, spec.dim as f64);
    let beta = 1.0 / (p - 1.0);
    let q = options.q.unwrap_or(p.max(dim * p / 2.0) + 1.0);
    let snaps: Vec<_> = run.snapshots.iter().filter(|s| s.time < t_hat).collect();
    if snaps.len() < 2 {
        return Err(Error::InsufficientData("fewer than two snapshots before the blow-up time".into()));
    }
    let s_of = |t: f64| -(t_hat - t).ln();
    let (s_lo, s_hi) = (s_of(snaps[0].time), s_of(snaps[snaps.len() - 1].time));
    let (w_lo, w_hi) = options.s_window.unwrap_or((0.5 * (s_lo + s_hi), s_hi));
    if w_lo >= w_hi || w_lo > s_hi || w_hi < s_lo {
        return Err(Error::InsufficientData(format!(
            "window [{w_lo}, {w_hi}] lies outside the resolved similarity times [{s_lo}, {s_hi}]"
        )));
    }
    let mut norms = Vec::new();
    let mut l1_at_sigma = f64::NAN;
    for snap in snaps.iter().filter(|s| (w_lo..=w_hi).contains(&s_of(s.time))) {
        let frame = to_similarity_frame(snap, center, t_hat, &options.y_grid)?;
        if norms.is_empty() {
            l1_at_sigma = weighted_norm(&frame, 1.0, &options.quad)?.norm;
        }
        norms.push((frame.s, weighted_norm(&frame, q, &options.quad)?.norm));
    }
    if norms.len() < 5 {
        return Err(Error::InsufficientData(format!("{} frames in the window, need 5", norms.len())));
    }
    let xs: Vec<f64> = norms.iter().map(|n| n.0).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.1.max(f64::MIN_POSITIVE).ln()).collect();
    let fit = linear_fit(&xs, &ys).ok_or_else(|| Error::InsufficientData("degenerate window".into()))?;
    let sigma = norms[0].0;
    let c0_hat = norms.iter().map(|&(s, n)| n * (beta * (s - sigma)).exp() / l1_at_sigma).fold(0.0, f64::max);
    let rate_hat = -fit.slope;
    Ok(EpsilonReport {
        center,
        q,
        q_condition_met: q >= p && q > dim * p / 2.0,
        beta,
        rate_hat,
        correlation: fit.correlation,
        c0_hat,
        sigma,
        l1_at_sigma,
        passes: (rate_hat - beta).abs() <= options.rate_tolerance * beta && c0_hat.is_finite(),
        norms,
    })
}
