use serde::Serialize;

use crate::core::{GridKind, Snapshot};
use crate::error::{Error, Result};
use crate::numerics::{abs_pow, integrate_cells, sphere_area};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    WholeDomain,
    /// `B_r(a)`; off-centre balls only in one dimension.
    Ball {
        center: f64,
        radius: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalNorm {
    /// `∫_region |u|^q`.
    pub integral: f64,
    /// `integral^{1/q}` when `q >= 1`.
    pub norm: Option<f64>,
}

/// `∫ |u|^q` over the region, integrating the cubic interpolant of the snapshot cell by cell.
pub fn critical_norm(snapshot: &Snapshot, region: Region, q: f64) -> Result<CriticalNorm> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!("integral exponent must be positive (got {q})")));
    }
    let s = snapshot.sampler();
    let g = &snapshot.grid;
    let dim = snapshot.spec.dim;
    let big_r = g.radius;
    let radial = |lo: f64, hi: f64| {
        sphere_area(dim) * integrate_cells(lo, hi, 0.0, g.h, |r| abs_pow(s.eval(r), q) * r.powi(dim as i32 - 1))
    };
    let integral = match region {
        Region::WholeDomain => match g.kind {
            GridKind::Line => integrate_cells(-big_r, big_r, g.start(), g.h, |x| abs_pow(s.eval(x), q)),
            _ => radial(0.0, big_r),
        },
        Region::Ball { center, radius } => {
            if !(radius >= 0.0) {
                return Err(Error::Domain(format!("ball radius must be non-negative (got {radius})")));
            }
            if dim == 1 {
                let lo = (center - radius).max(-big_r);
                let hi = (center + radius).min(big_r);
                if lo >= hi {
                    0.0
                } else if g.kind == GridKind::Line {
                    integrate_cells(lo, hi, g.start(), g.h, |x| abs_pow(s.eval(x), q))
                } else {
                    // even field stored on [0, R]: split at the origin so cells line up with nodes
                    let mut acc = 0.0;
                    if lo < 0.0 {
                        acc += integrate_cells(hi.min(0.0).abs(), -lo, 0.0, g.h, |x| abs_pow(s.eval(x), q));
                    }
                    if hi > 0.0 {
                        acc += integrate_cells(lo.max(0.0), hi, 0.0, g.h, |x| abs_pow(s.eval(x), q));
                    }
                    acc
                }
            } else if center == 0.0 {
                radial(0.0, radius.min(big_r))
            } else {
                return Err(Error::Unsupported(format!("off-centre balls need a non-radial grid in dimension {dim}")));
            }
        }
    };
    Ok(CriticalNorm { integral, norm: (q >= 1.0).then(|| integral.powf(1.0 / q)) })
}

/// `∫_{|x - a| <= k sqrt(T - t)} |u(t, x)|^q dx` on the backward parabola through `(T, a)`.
pub fn concentration_integral(snapshot: &Snapshot, center: f64, k: f64, t_hat: f64, q: f64) -> Result<f64> {
    let tau = t_hat - snapshot.time;
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("snapshot time {} is not before T = {t_hat}", snapshot.time)));
    }
    Ok(critical_norm(snapshot, Region::Ball { center, radius: k * tau.sqrt() }, q)?.integral)
}
