use serde::Serialize;

use crate::core::{Grid, Snapshot};
use crate::error::{Error, Result};
use crate::numerics::Sampler;
use crate::physical::RunResult;

/// Where the field of a frame came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FrameSource {
    /// Sampled from a physical snapshot at time `time`.
    TransformedFromPhysical { time: f64 },
    /// Produced by the rescaled-equation solver.
    NativeWSolve,
    /// `v_n(s, y) = (T - t_n)^β u(T + (T - t_n)s, y sqrt(T - t_n))`; `s` of the frame is the
    /// rescaled time in `(-2, 0)`.
    VnFrame { index: Option<usize>, t_n: f64 },
}

/// Similarity grid: radial `[0, y_max]` for frames centred on the symmetry axis, otherwise the
/// line `[-y_max, y_max]` (one dimension only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameGridSpec {
    pub y_max: f64,
    pub node_count: usize,
}

impl Default for FrameGridSpec {
    fn default() -> Self {
        Self { y_max: 12.0, node_count: 1201 }
    }
}

impl FrameGridSpec {
    pub fn build(&self, dim: usize, center: f64) -> Result<Grid> {
        if center == 0.0 {
            Grid::radial(self.y_max, self.node_count)
        } else if dim == 1 {
            Grid::line(self.y_max, self.node_count)
        } else {
            Err(Error::Unsupported(format!("off-axis centre a = {center} needs a non-radial grid in dimension {dim}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityFrame {
    pub center: f64,
    pub s: f64,
    /// `-log T`.
    pub s0: f64,
    pub t_hat: f64,
    pub dim: usize,
    pub p: f64,
    /// Radius of the physical domain; nodes with `|a + y e^{-s/2}| >= domain_radius` are outside
    /// `Ω_s`.
    pub domain_radius: f64,
    pub grid: Grid,
    pub values: Vec<f64>,
    pub source: FrameSource,
}

impl SimilarityFrame {
    pub fn beta(&self) -> f64 {
        1.0 / (self.p - 1.0)
    }

    /// Squared length scale linking `y` and `x`: `T - t` for w-frames, `T - t_n` for v-frames.
    pub fn length_scale_sq(&self) -> f64 {
        match self.source {
            FrameSource::VnFrame { t_n, .. } => self.t_hat - t_n,
            _ => (-self.s).exp(),
        }
    }

    pub fn sampler(&self) -> Sampler<'_> {
        self.grid.sampler(&self.values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn in_domain(&self, y: f64) -> bool {
        (self.center + y * self.length_scale_sq().sqrt()).abs() < self.domain_radius
    }

    /// The physical field recovered from the frame: `u(x) = τ^{-β} w((x - a)/sqrt τ)`.
    pub fn physical_value(&self, x: f64) -> f64 {
        let tau = self.length_scale_sq();
        tau.powf(-self.beta()) * self.sampler().eval((x - self.center) / tau.sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.grid.len() {
            return Err(Error::Domain("frame values do not match its grid".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("frame has non-finite values".into()));
        }
        if !matches!(self.source, FrameSource::VnFrame { .. }) && self.s < self.s0 - 1e-12 {
            return Err(Error::Domain(format!("frame time s = {} precedes s0 = {}", self.s, self.s0)));
        }
        Ok(())
    }
}

fn sample_frame(
    snapshot_sampler: Sampler<'_>,
    grid: &Grid,
    center: f64,
    scale_sq: f64,
    amplitude: f64,
    radius: f64,
) -> Vec<f64> {
    let l = scale_sq.sqrt();
    grid.nodes()
        .iter()
        .map(|&y| {
            let x = center + y * l;
            if x.abs() >= radius {
                0.0
            } else {
                amplitude * snapshot_sampler.eval(x)
            }
        })
        .collect()
}

/// `w(s, y) = (T - t)^β u(t, a + y sqrt(T - t))`, `s = -log(T - t)`.
pub fn to_similarity_frame(
    snapshot: &Snapshot,
    center: f64,
    t_hat: f64,
    y_grid: &FrameGridSpec,
) -> Result<SimilarityFrame> {
    let tau = t_hat - snapshot.time;
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("snapshot time {} is not before the blow-up time {t_hat}", snapshot.time)));
    }
    let spec = &snapshot.spec;
    let beta = 1.0 / (spec.p - 1.0);
    let grid = y_grid.build(spec.dim, center)?;
    let values = sample_frame(snapshot.sampler(), &grid, center, tau, tau.powf(beta), spec.radius());
    Ok(SimilarityFrame {
        center,
        s: -tau.ln(),
        s0: -t_hat.ln(),
        t_hat,
        dim: spec.dim,
        p: spec.p,
        domain_radius: spec.radius(),
        grid,
        values,
        source: FrameSource::TransformedFromPhysical { time: snapshot.time },
    })
}

/// Physical field at time `t` from the recorded snapshots, with cubic Hermite interpolation in
/// time between neighbouring records.
fn field_at(run: &RunResult, t: f64) -> Result<Vec<f64>> {
    let snaps = &run.snapshots;
    let (first, last) = (snaps[0].time, run.final_snapshot().time);
    if t < first || t > last {
        return Err(Error::Domain(format!("time {t} outside the recorded range [{first}, {last}]")));
    }
    let j = snaps.partition_point(|s| s.time < t);
    if j < snaps.len() && snaps[j].time == t {
        return Ok(snaps[j].values.clone());
    }
    let (a, b) = (&snaps[j - 1], &snaps[j]);
    let spec = &run.spec;
    let mut fa = vec![0.0; a.values.len()];
    let mut fb = vec![0.0; b.values.len()];
    crate::physical::rhs(&a.values, a.grid.h, spec, &mut fa);
    crate::physical::rhs(&b.values, b.grid.h, spec, &mut fb);
    let dt = b.time - a.time;
    Ok(crate::physical::hermite(&a.values, &fa, &b.values, &fb, dt, (t - a.time) / dt))
}

/// The rescaled field `v_n(s, ·)` around the origin for a run with a blow-up time estimate.
pub fn to_vn_frame(run: &RunResult, t_n: f64, s: f64, y_grid: &FrameGridSpec) -> Result<SimilarityFrame> {
    let t_hat = run.t_hat.ok_or_else(|| Error::Precondition("run has no blow-up time estimate".into()))?;
    if !(s < 0.0) {
        return Err(Error::Domain(format!("v-frame time must be negative (got {s})")));
    }
    let scale = t_hat - t_n;
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("t_n = {t_n} is not before the blow-up time {t_hat}")));
    }
    let t = t_hat + scale * s;
    let values = field_at(run, t)?;
    let spec = &run.spec;
    let grid = y_grid.build(spec.dim, 0.0)?;
    let physical_grid = &run.snapshots[0].grid;
    let beta = 1.0 / (spec.p - 1.0);
    let field = sample_frame(physical_grid.sampler(&values), &grid, 0.0, scale, scale.powf(beta), spec.radius());
    Ok(SimilarityFrame {
        center: 0.0,
        s,
        s0: -t_hat.ln(),
        t_hat,
        dim: spec.dim,
        p: spec.p,
        domain_radius: spec.radius(),
        grid,
        values: field,
        source: FrameSource::VnFrame { index: None, t_n },
    })
}

/// Outcome of `|v_n(s, y)| <= M |s|^{-β}` on a v-frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VnBound {
    pub bound: f64,
    /// `sup |v_n| / (M |s|^{-β})`.
    pub max_ratio: f64,
    pub holds: bool,
}

pub fn vn_bound_check(frame: &SimilarityFrame, m: f64) -> Result<VnBound> {
    if !matches!(frame.source, FrameSource::VnFrame { .. }) {
        return Err(Error::Precondition("bound check needs a v-frame".into()));
    }
    let bound = m * frame.s.abs().powf(-frame.beta());
    let max_ratio = frame.sup_norm() / bound;
    Ok(VnBound { bound, max_ratio, holds: max_ratio <= 1.0 })
}
