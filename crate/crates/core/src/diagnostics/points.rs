use serde::Serialize;

use crate::core::{GridKind, Snapshot};
use crate::error::{Error, Result};
use crate::physical::{RunResult, Termination};

/// `sup |u|` over grid nodes with `|x| >= r_far`.
pub(crate) fn far_field_sup(snapshot: &Snapshot, r_far: f64) -> Result<f64> {
    if !(r_far >= 0.0) || r_far > snapshot.grid.radius {
        return Err(Error::Domain(format!(
            "far-field radius {r_far} is outside the grid radius {}",
            snapshot.grid.radius
        )));
    }
    Ok(snapshot
        .grid
        .nodes()
        .iter()
        .zip(&snapshot.values)
        .filter(|(x, _)| x.abs() >= r_far)
        .fold(0.0, |m, (_, v)| m.max(v.abs())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarFieldReport {
    pub r_far: f64,
    /// Largest far-field value over all snapshots.
    pub sup_value: f64,
    /// `(t, sup_{|x| >= r_far} |u(t)|)` per snapshot.
    pub series: Vec<(f64, f64)>,
    /// Far-field value at the start of the final decade of `T - t` (or of the last tenth of the
    /// run when there is no blow-up time).
    pub reference: f64,
    pub bounded: bool,
}

/// Bounded iff the far-field sup never exceeds its value at the start of the final decade by
/// more than `growth_tolerance` (relative).
pub fn far_field_bound_check(run: &RunResult, r_far: f64, growth_tolerance: f64) -> Result<FarFieldReport> {
    let series: Vec<(f64, f64)> =
        run.snapshots.iter().map(|s| far_field_sup(s, r_far).map(|v| (s.time, v))).collect::<Result<_>>()?;
    let sup_value = series.iter().map(|x| x.1).fold(0.0, f64::max);
    let t_end = run.final_snapshot().time;
    let in_final = |t: f64| match run.t_hat {
        Some(t_hat) => t_hat - t <= 10.0 * (t_hat - t_end),
        None => t >= 0.9 * t_end,
    };
    let tail: Vec<f64> = series.iter().filter(|x| in_final(x.0)).map(|x| x.1).collect();
    let reference = tail.first().copied().unwrap_or(0.0);
    let bounded = tail.iter().all(|&v| v <= (1.0 + growth_tolerance) * reference);
    Ok(FarFieldReport { r_far, sup_value, series, reference, bounded })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupPoint {
    pub center: f64,
    pub peak: f64,
    /// Points closer than this were merged into the centre.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupPointSet {
    pub points: Vec<BlowupPoint>,
    pub warning: Option<String>,
}

/// Local maxima of `|u|` above `u_loc` at the final recorded time, merged within
/// `3 sqrt(T - t_final)`. One-dimensional even data report peaks at `r > 0` as the pair `±r`.
pub fn locate_blowup_points(run: &RunResult, u_loc: f64) -> BlowupPointSet {
    if run.termination != Termination::BlowupThresholdReached {
        return BlowupPointSet { points: Vec::new(), warning: Some("run did not reach the blow-up threshold".into()) };
    }
    let snap = run.final_snapshot();
    let v: Vec<f64> = snap.values.iter().map(|x| x.abs()).collect();
    let nodes = snap.grid.nodes();
    let n = v.len();
    let symmetric = snap.grid.kind != GridKind::Line;
    let radius = match run.t_hat {
        Some(t_hat) if t_hat > snap.time => 3.0 * (t_hat - snap.time).sqrt(),
        _ => 2.0 * snap.grid.h,
    }
    .max(2.0 * snap.grid.h);
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let left = if i == 0 {
            if symmetric {
                v[1]
            } else {
                0.0
            }
        } else {
            v[i - 1]
        };
        let right = if i + 1 < n { v[i + 1] } else { 0.0 };
        if v[i] > u_loc && v[i] >= left && v[i] >= right {
            peaks.push((nodes[i], v[i]));
        }
    }
    let mut merged: Vec<BlowupPoint> = Vec::new();
    for (x, peak) in peaks {
        match merged.last_mut() {
            Some(last) if (x - last.center).abs() <= radius => {
                if peak > last.peak {
                    last.center = x;
                    last.peak = peak;
                }
            }
            _ => merged.push(BlowupPoint { center: x, peak, radius }),
        }
    }
    let mut points = Vec::new();
    for pt in merged {
        if symmetric && snap.spec.dim == 1 && pt.center > 0.0 {
            points.push(BlowupPoint { center: -pt.center, ..pt });
        }
        points.push(pt);
    }
    points.sort_by(|a, b| a.center.total_cmp(&b.center));
    let warning = points.is_empty().then(|| format!("no local maximum above {u_loc}"));
    BlowupPointSet { points, warning }
}
