use serde::Serialize;

use super::frame::{FrameSource, SimilarityFrame};
use crate::core::{Boundary, Grid, GridKind};
use crate::error::{Error, Result};
use crate::numerics::signed_pow;
use crate::physical::{hermite, StepControl};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WSolveOptions {
    /// Frames are returned at these similarity times (inside `(s_start, s_end]`) and at `s_end`.
    pub output_s: Vec<f64>,
}

struct Operator<'a> {
    grid: &'a Grid,
    dim: usize,
    p: f64,
    beta: f64,
}

impl Operator<'_> {
    /// Drift coefficient multiplying `w_y` (radial) or `w_y` on the line.
    fn drift(&self, y: f64) -> f64 {
        match self.grid.kind {
            GridKind::Line => -0.5 * y,
            _ => (self.dim as f64 - 1.0) / y - 0.5 * y,
        }
    }

    fn apply(&self, w: &[f64], active: &[bool], out: &mut [f64]) {
        let n = w.len();
        let h = self.grid.h;
        let ih2 = 1.0 / (h * h);
        let nodes = self.grid.nodes();
        let radial = self.grid.kind != GridKind::Line;
        for i in 0..n {
            if !active[i] || i == n - 1 || (!radial && i == 0) {
                out[i] = 0.0;
                continue;
            }
            let reaction = signed_pow(w[i], self.p) - self.beta * w[i];
            if radial && i == 0 {
                out[0] = 2.0 * self.dim as f64 * (w[1] - w[0]) * ih2 + reaction;
                continue;
            }
            let c = self.drift(nodes[i]);
            let grad = if c.abs() * h > 2.0 {
                if c > 0.0 {
                    (w[i + 1] - w[i]) / h
                } else {
                    (w[i] - w[i - 1]) / h
                }
            } else {
                0.5 * (w[i + 1] - w[i - 1]) / h
            };
            out[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * ih2 + c * grad + reaction;
        }
    }
}

fn active_mask(frame: &SimilarityFrame, s: f64, mask: &mut [bool]) {
    let l = (-0.5 * s).exp();
    for (m, &y) in mask.iter_mut().zip(frame.grid.nodes()) {
        *m = (frame.center + y * l).abs() < frame.domain_radius;
    }
}

/// Right-hand side `Δw - (y/2)·∇w + |w|^{p-1}w - βw` of the rescaled equation on the frame's grid,
/// with `w = 0` at `|y| = Y` and outside `Ω_s`.
pub fn w_rhs(frame: &SimilarityFrame) -> Vec<f64> {
    let op = Operator { grid: &frame.grid, dim: frame.dim, p: frame.p, beta: frame.beta() };
    let mut mask = vec![true; frame.values.len()];
    active_mask(frame, frame.s, &mut mask);
    let mut out = vec![0.0; frame.values.len()];
    op.apply(&frame.values, &mask, &mut out);
    out
}

/// Integrates the rescaled equation from `initial.s` to `s_end` with explicit RK4. Nodes enter the
/// computation as they enter `Ω_s = e^{s/2}(Ω - a)`; the outermost node is held at zero.
///
/// The step is the physical step rule applied to `w` plus an advective limit `cfl h / max|drift|`.
/// Integration stops early, returning the frames so far, if `sup|w|` reaches the control's cap.
pub fn solve_w_equation(
    initial: &SimilarityFrame,
    s_end: f64,
    control: &StepControl,
    options: &WSolveOptions,
) -> Result<Vec<SimilarityFrame>> {
    initial.validate()?;
    control.validate()?;
    if !(s_end >= initial.s) {
        return Err(Error::Domain(format!("s_end = {s_end} precedes the initial frame at s = {}", initial.s)));
    }
    let grid = &initial.grid;
    let op = Operator { grid, dim: initial.dim, p: initial.p, beta: initial.beta() };
    let n = grid.len();
    let h = grid.h;
    let max_drift = grid.nodes().iter().filter(|y| y.abs() > 0.5 * h).map(|&y| op.drift(y).abs()).fold(0.0, f64::max);
    let advective = if max_drift > 0.0 { control.cfl_safety * h / max_drift } else { f64::INFINITY };

    let mut outputs: Vec<f64> = options.output_s.iter().copied().filter(|&s| s > initial.s && s < s_end).collect();
    outputs.push(s_end);
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();

    let mut mask = vec![true; n];
    let mut s = initial.s;
    active_mask(initial, s, &mut mask);
    let mut w = initial.values.clone();
    for (v, &m) in w.iter_mut().zip(&mask) {
        if !m {
            *v = 0.0;
        }
    }
    w[n - 1] = 0.0;
    if grid.kind == GridKind::Line {
        w[0] = 0.0;
    }
    let make =
        |values: Vec<f64>, s: f64| SimilarityFrame { s, values, source: FrameSource::NativeWSolve, ..initial.clone() };
    let mut frames = Vec::new();
    if s_end == s {
        frames.push(make(w, s));
        return Ok(frames);
    }

    let mut k: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
    let mut stage = vec![0.0; n];
    let mut w_prev = vec![0.0; n];
    let mut f_prev = vec![0.0; n];
    let mut next = 0usize;
    op.apply(&w, &mask, &mut f_prev);
    while next < outputs.len() {
        let sup = w.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if sup >= control.sup_norm_cap {
            frames.push(make(w.clone(), s));
            break;
        }
        let mut dt = control.dt(h, initial.dim, initial.p, sup, Boundary::DirichletZero).min(advective);
        if dt < control.dt_min {
            return Err(Error::StepUnderflow { t: s, dt, dt_min: control.dt_min });
        }
        let target = outputs[outputs.len() - 1];
        let last = s + dt >= target;
        if last {
            dt = target - s;
        }
        w_prev.copy_from_slice(&w);
        k[0].copy_from_slice(&f_prev);
        for st in 1..4 {
            let c = if st == 3 { dt } else { 0.5 * dt };
            for i in 0..n {
                stage[i] = w[i] + c * k[st - 1][i];
            }
            let (_, rest) = k.split_at_mut(st);
            op.apply(&stage, &mask, &mut rest[0]);
        }
        for i in 0..n {
            w[i] += dt / 6.0 * (k[0][i] + 2.0 * (k[1][i] + k[2][i]) + k[3][i]);
        }
        if let Some(bad) = w.iter().position(|v| !v.is_finite()) {
            return Err(Error::IntegratorFault { t: s, dump: format!("dt = {dt:e}, non-finite w at node {bad}") });
        }
        let s_new = if last { target } else { s + dt };
        active_mask(initial, s_new, &mut mask);
        let mut f_new = vec![0.0; n];
        op.apply(&w, &mask, &mut f_new);
        while next < outputs.len() && outputs[next] <= s_new {
            let theta = (outputs[next] - s) / dt;
            let values =
                if outputs[next] == s_new { w.clone() } else { hermite(&w_prev, &f_prev, &w, &f_new, dt, theta) };
            frames.push(make(values, outputs[next]));
            next += 1;
        }
        s = s_new;
        f_prev = f_new;
    }
    Ok(frames)
}
