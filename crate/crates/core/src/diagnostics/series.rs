use std::sync::Arc;

use serde::Serialize;

use super::integrals::{concentration_integral, critical_norm, Region};
use super::points::far_field_sup;
use crate::core::Snapshot;
use crate::error::{Error, Result};
use crate::physical::{BlowupFit, RunResult, SeriesRecord};

/// `m(t) = (T - t)^β ‖u(t)‖_∞` at one recorded step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeRecord {
    pub t: f64,
    pub sup_norm: f64,
    pub m: f64,
}

/// Integrals evaluated on one stored snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotRecord {
    pub t: f64,
    /// `∫_Ω |u|^{q*}`.
    pub global_critical: f64,
    /// One entry per tracked ball.
    pub local_critical: Vec<f64>,
    /// One entry per tracked parabola `(a, k)`.
    pub concentration: Vec<f64>,
    pub far_field: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SeriesConfig {
    /// Balls `(a, r)` for local critical integrals.
    pub balls: Vec<(f64, f64)>,
    /// Backward parabolas `(a, k)`.
    pub parabolas: Vec<(f64, f64)>,
    pub r_far: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsSeries {
    pub t_hat: f64,
    pub beta: f64,
    pub q_star: f64,
    pub records: Vec<TypeRecord>,
    pub snapshots: Vec<SnapshotRecord>,
    /// Measured type-I constant `M = max m(t)`.
    pub m_max: f64,
    pub config: SeriesConfig,
}

impl DiagnosticsSeries {
    /// Type records from bare `(t, ‖u‖_∞)` pairs; entries at or after `t_hat` are dropped.
    pub fn from_sup_series(series: &[(f64, f64)], t_hat: f64, p: f64, dim: usize) -> Self {
        let beta = 1.0 / (p - 1.0);
        let records: Vec<TypeRecord> = series
            .iter()
            .filter(|(t, s)| *t < t_hat && s.is_finite())
            .map(|&(t, sup_norm)| TypeRecord { t, sup_norm, m: (t_hat - t).powf(beta) * sup_norm })
            .collect();
        let m_max = records.iter().map(|r| r.m).fold(0.0, f64::max);
        Self {
            t_hat,
            beta,
            q_star: dim as f64 * (p - 1.0) / 2.0,
            records,
            snapshots: Vec::new(),
            m_max,
            config: SeriesConfig::default(),
        }
    }
}

/// Diagnostics of a run with a blow-up time estimate.
pub fn diagnostics_series(run: &RunResult, config: &SeriesConfig) -> Result<DiagnosticsSeries> {
    let t_hat = run.t_hat.ok_or_else(|| Error::Precondition("run has no blow-up time estimate".into()))?;
    let spec = &run.spec;
    let mut out = DiagnosticsSeries::from_sup_series(&run.sup_series(), t_hat, spec.p, spec.dim);
    let q = out.q_star;
    for snap in run.snapshots.iter().filter(|s| s.time < t_hat) {
        let global_critical = critical_norm(snap, Region::WholeDomain, q)?.integral;
        let local_critical = config
            .balls
            .iter()
            .map(|&(center, radius)| critical_norm(snap, Region::Ball { center, radius }, q).map(|c| c.integral))
            .collect::<Result<_>>()?;
        let concentration = config
            .parabolas
            .iter()
            .map(|&(a, k)| concentration_integral(snap, a, k, t_hat, q))
            .collect::<Result<_>>()?;
        let far_field = config.r_far.map(|r| far_field_sup(snap, r)).transpose()?;
        out.snapshots.push(SnapshotRecord { t: snap.time, global_critical, local_critical, concentration, far_field });
    }
    out.config = config.clone();
    Ok(out)
}

/// Applies `u ↦ λ^{2β} u(λ² t, λ x)` to a whole run: snapshots, sup-norm series and the blow-up
/// time estimate.
pub fn rescale_run(run: &RunResult, lambda: f64) -> Result<RunResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("scaling factor must be positive (got {lambda})")));
    }
    let spec = &run.spec;
    let beta = 1.0 / (spec.p - 1.0);
    let amp = lambda.powf(2.0 * beta);
    let l2 = lambda * lambda;
    let snapshots: Vec<Snapshot> = run.snapshots.iter().map(|s| s.rescaled(lambda)).collect::<Result<_>>()?;
    let new_spec: Arc<_> = snapshots.first().map(|s| s.spec.clone()).unwrap_or_else(|| spec.clone());
    let mass_scale = amp * lambda.powi(-(spec.dim as i32));
    Ok(RunResult {
        spec: new_spec,
        control: run.control,
        series: run
            .series
            .iter()
            .map(|r| SeriesRecord { t: r.t / l2, sup_norm: amp * r.sup_norm, dt: r.dt / l2, mass: mass_scale * r.mass })
            .collect(),
        snapshots,
        t_hat: run.t_hat.map(|t| t / l2),
        fit: run.fit.map(|f| BlowupFit {
            t_hat: f.t_hat / l2,
            t_first: f.t_first / l2,
            t_last: f.t_last / l2,
            slope: f.slope * amp.powf(-1.0 / beta) * l2,
            intercept: f.intercept * amp.powf(-1.0 / beta),
            points: f.points,
        }),
        termination: run.termination,
        positivity_violated: run.positivity_violated,
        steps: run.steps,
    })
}
