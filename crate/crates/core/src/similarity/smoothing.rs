use rayon::prelude::*;
use serde::Serialize;

use super::frame::{FrameGridSpec, FrameSource, SimilarityFrame};
use super::mehler::mehler_apply;
use super::norms::weighted_norm;
use super::quadrature::RhoQuadrature;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothingScanConfig {
    /// Target exponent of `‖T(s)φ_b‖_{L^q_ρ}`.
    pub q: f64,
    /// Source exponent of `‖φ_b‖_{L^m_ρ}`.
    pub m: f64,
    /// Standard deviation of the Gaussian spikes `φ_b(y) = exp(-(y - b)²/(2 width²))`.
    pub spike_width: f64,
    pub centers: Vec<f64>,
    pub s_values: Vec<f64>,
    /// A column counts as bounded when no ratio exceeds this multiple of the ratio at the
    /// smallest `|b|`.
    pub bound_factor: f64,
    pub grid: FrameGridSpec,
}

impl Default for SmoothingScanConfig {
    fn default() -> Self {
        Self {
            q: 2.0,
            m: 1.0,
            spike_width: 0.05,
            centers: (0..=12).map(|k| 0.5 * k as f64).collect(),
            s_values: vec![0.01, 0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0],
            bound_factor: 2.0,
            grid: FrameGridSpec { y_max: 12.0, node_count: 2401 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub b: f64,
    pub s: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSummary {
    pub s: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Largest ratio over the ratio at the smallest `|b|`.
    pub growth: f64,
    pub bounded: bool,
    /// The ratio increases strictly with `|b|`.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothingScan {
    pub q: f64,
    pub m: f64,
    pub rows: Vec<ScanRow>,
    pub summaries: Vec<ScanSummary>,
    /// Least scanned `s` from which every larger scanned `s` is bounded.
    pub s_star: Option<f64>,
}

/// Ratios `‖T(s)φ_b‖_{L^q_ρ} / ‖φ_b‖_{L^m_ρ}` for narrow spikes `φ_b` in one dimension.
pub fn delayed_smoothing_scan(config: &SmoothingScanConfig, quad: &RhoQuadrature) -> Result<SmoothingScan> {
    if !(config.q > 1.0) || !(config.m >= 1.0) {
        return Err(Error::Domain(format!("scan needs q > 1 and m >= 1 (got q = {}, m = {})", config.q, config.m)));
    }
    if config.centers.is_empty() || config.s_values.is_empty() {
        return Err(Error::Config("scan needs at least one centre and one time".into()));
    }
    if config.s_values.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Domain("scan times must be positive".into()));
    }
    let mut centers = config.centers.clone();
    centers.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut s_values = config.s_values.clone();
    s_values.sort_by(f64::total_cmp);
    let grid = config.grid.build(1, 1.0)?;
    let w2 = 2.0 * config.spike_width * config.spike_width;

    let jobs: Vec<(usize, usize)> = (0..s_values.len()).flat_map(|i| (0..centers.len()).map(move |j| (i, j))).collect();
    let ratios: Vec<f64> = jobs
        .par_iter()
        .map(|&(i, j)| -> Result<f64> {
            let b = centers[j];
            let values = grid.nodes().iter().map(|&y| (-(y - b) * (y - b) / w2).exp()).collect();
            let spike = SimilarityFrame {
                center: 0.0,
                s: 0.0,
                s0: 0.0,
                t_hat: 1.0,
                dim: 1,
                p: 2.0,
                domain_radius: f64::INFINITY,
                grid: grid.clone(),
                values,
                source: FrameSource::NativeWSolve,
            };
            let moved = mehler_apply(&spike, s_values[i], quad)?;
            Ok(weighted_norm(&moved, config.q, quad)?.norm / weighted_norm(&spike, config.m, quad)?.norm)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(jobs.len());
    let mut summaries = Vec::with_capacity(s_values.len());
    for (i, &s) in s_values.iter().enumerate() {
        let col = &ratios[i * centers.len()..(i + 1) * centers.len()];
        rows.extend(centers.iter().zip(col).map(|(&b, &ratio)| ScanRow { b, s, ratio }));
        let min_ratio = col.iter().copied().fold(f64::INFINITY, f64::min);
        let max_ratio = col.iter().copied().fold(0.0, f64::max);
        let growth = max_ratio / col[0];
        summaries.push(ScanSummary {
            s,
            min_ratio,
            max_ratio,
            growth,
            bounded: growth <= config.bound_factor,
            monotone: col.windows(2).all(|w| w[1] > w[0]),
        });
    }
    let s_star = summaries
        .iter()
        .rposition(|r| !r.bounded)
        .map_or(Some(0), |k| (k + 1 < summaries.len()).then_some(k + 1))
        .map(|k| summaries[k].s);
    Ok(SmoothingScan { q: config.q, m: config.m, rows, summaries, s_star })
}
