use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::blowup_time::{estimate_blowup_time, BlowupFit, FitWindow};
use crate::core::{build_grid, radial_laplacian, Boundary, Grid, ProblemSpec, Snapshot};
use crate::error::{Error, Result};
use crate::numerics::{signed_pow, sphere_area};

/// Time-step law `dt = min(cfl_safety h²/(2N), ode_safety ‖u‖_∞^{1-p})` for explicit RK4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepControl {
    pub cfl_safety: f64,
    pub ode_safety: f64,
    /// Sup-norm at which a run is declared blown up.
    pub sup_norm_cap: f64,
    pub dt_min: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { cfl_safety: 0.4, ode_safety: 0.05, sup_norm_cap: 1e8, dt_min: 1e-14 }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety < 1.0) {
            return Err(Error::Config("cfl_safety must lie in (0, 1)".into()));
        }
        if !(self.ode_safety > 0.0 && self.ode_safety < 1.0) {
            return Err(Error::Config("ode_safety must lie in (0, 1)".into()));
        }
        if !(self.sup_norm_cap > 0.0) || !(self.dt_min > 0.0) {
            return Err(Error::Config("sup_norm_cap and dt_min must be positive".into()));
        }
        Ok(())
    }

    /// Step size for a state with sup-norm `sup`; the diffusive limit is skipped for
    /// homogeneous problems.
    pub fn dt(&self, h: f64, dim: usize, p: f64, sup: f64, boundary: Boundary) -> f64 {
        let diffusive = if boundary == Boundary::Homogeneous {
            f64::INFINITY
        } else {
            self.cfl_safety * h * h / (2.0 * dim as f64)
        };
        let reactive = if sup > 0.0 { self.ode_safety * sup.powf(1.0 - p) } else { f64::INFINITY };
        let dt = diffusive.min(reactive);
        if dt.is_finite() {
            dt
        } else {
            self.ode_safety
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    BlowupThresholdReached,
    FinalTimeReached,
    StepUnderflow,
}

/// One accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRecord {
    pub t: f64,
    pub sup_norm: f64,
    pub dt: f64,
    /// `∫ u dx` by the radial trapezoid rule.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOptions {
    pub node_count: usize,
    /// Times at which dense-output snapshots are emitted.
    pub output_times: Vec<f64>,
    pub final_time: f64,
    /// When set, the exact state is also recorded each time the sup-norm has grown by this
    /// factor since the last recording. Geometric in the sup-norm means geometric in `T - t`
    /// for type-I blow-up.
    pub record_growth: Option<f64>,
    pub fit_window: FitWindow,
    pub max_steps: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            node_count: 401,
            output_times: Vec::new(),
            final_time: 10.0,
            record_growth: Some(1.05),
            fit_window: FitWindow::default(),
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub spec: Arc<ProblemSpec>,
    pub control: StepControl,
    pub snapshots: Vec<Snapshot>,
    pub series: Vec<SeriesRecord>,
    pub t_hat: Option<f64>,
    pub fit: Option<BlowupFit>,
    pub termination: Termination,
    /// Set when positive data developed a value below `-1e-12 ‖u‖_∞`.
    pub positivity_violated: bool,
    pub steps: u64,
}

impl RunResult {
    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("a run always records its final state")
    }

    pub fn sup_series(&self) -> Vec<(f64, f64)> {
        self.series.iter().map(|r| (r.t, r.sup_norm)).collect()
    }
}

/// `Δu + |u|^{p-1}u` with the boundary condition of `spec`; the Dirichlet node stays pinned.
pub fn rhs(values: &[f64], h: f64, spec: &ProblemSpec, out: &mut [f64]) {
    radial_laplacian(values, h, spec.dim, spec.boundary, out);
    for (o, &u) in out.iter_mut().zip(values) {
        *o += signed_pow(u, spec.p);
    }
    if spec.boundary == Boundary::DirichletZero {
        *out.last_mut().unwrap() = 0.0;
    }
}

struct Rk4 {
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; n]), stage: vec![0.0; n] }
    }

    /// Advances `u` by `dt`; `k[0]` must already hold `rhs(u)`.
    fn advance(&mut self, u: &mut [f64], dt: f64, h: f64, spec: &ProblemSpec) {
        let n = u.len();
        for s in 1..4 {
            let c = if s == 3 { dt } else { 0.5 * dt };
            let (done, rest) = self.k.split_at_mut(s);
            let prev = &done[s - 1];
            for i in 0..n {
                self.stage[i] = u[i] + c * prev[i];
            }
            rhs(&self.stage, h, spec, &mut rest[0]);
        }
        let [k1, k2, k3, k4] = &self.k;
        for i in 0..n {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
    }
}

fn non_finite_dump(u: &[f64], t: f64, dt: f64) -> Option<Error> {
    let bad = u.iter().position(|v| !v.is_finite())?;
    let sup = u.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    Some(Error::IntegratorFault {
        t,
        dump: format!("dt = {dt:e}, first non-finite node {bad} of {}, finite sup = {sup:e}", u.len()),
    })
}

/// One RK4 step of size `dt`.
pub fn step_with_dt(snapshot: &Snapshot, dt: f64) -> Result<Snapshot> {
    let spec = &snapshot.spec;
    let mut u = snapshot.values.clone();
    let mut rk = Rk4::new(u.len());
    rhs(&u, snapshot.grid.h, spec, &mut rk.k[0]);
    rk.advance(&mut u, dt, snapshot.grid.h, spec);
    if let Some(err) = non_finite_dump(&u, snapshot.time, dt) {
        return Err(err);
    }
    Ok(Snapshot {
        grid: snapshot.grid.clone(),
        values: u,
        time: snapshot.time + dt,
        spec: snapshot.spec.clone(),
        step_index: snapshot.step_index + 1,
    })
}

/// One RK4 step with the step size chosen by `control`.
pub fn step(snapshot: &Snapshot, control: &StepControl) -> Result<Snapshot> {
    let spec = &snapshot.spec;
    let dt = control.dt(snapshot.grid.h, spec.dim, spec.p, snapshot.sup_norm(), spec.boundary);
    if dt < control.dt_min {
        return Err(Error::StepUnderflow { t: snapshot.time, dt, dt_min: control.dt_min });
    }
    step_with_dt(snapshot, dt)
}

pub(crate) fn hermite(u0: &[f64], f0: &[f64], u1: &[f64], f1: &[f64], dt: f64, theta: f64) -> Vec<f64> {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let (h00, h10, h01, h11) = (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + theta, -2.0 * t3 + 3.0 * t2, t3 - t2);
    (0..u0.len()).map(|i| h00 * u0[i] + h10 * dt * f0[i] + h01 * u1[i] + h11 * dt * f1[i]).collect()
}

fn trapezoid_mass(u: &[f64], grid: &Grid, dim: usize) -> f64 {
    let n = u.len();
    let mut acc = 0.0;
    for (i, (&v, &r)) in u.iter().zip(grid.nodes()).enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += w * v * r.powi(dim as i32 - 1);
    }
    sphere_area(dim) * grid.h * acc
}

/// Integrates until the sup-norm reaches `control.sup_norm_cap`, `options.final_time` is reached,
/// or the step size underflows.
pub fn solve_until_blowup(spec: Arc<ProblemSpec>, control: &StepControl, options: &SolveOptions) -> Result<RunResult> {
    spec.validate()?;
    control.validate()?;
    let grid = build_grid(&spec, options.node_count)?;
    let h = grid.h;
    let n = grid.len();
    let beta = 1.0 / (spec.p - 1.0);
    let initial = Snapshot::initial(spec.clone(), grid.clone())?;
    let watch_positivity = spec.initial.is_nonnegative();

    let mut outputs: Vec<f64> = options.output_times.iter().copied().filter(|t| t.is_finite() && *t >= 0.0).collect();
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();
    let mut next_output = 0usize;

    let mut snapshots = Vec::new();
    let mut u = initial.values.clone();
    let mut t = 0.0;
    let mut sup = initial.sup_norm();
    let mut steps = 0u64;
    let mut series = vec![SeriesRecord { t, sup_norm: sup, dt: 0.0, mass: trapezoid_mass(&u, &grid, spec.dim) }];
    let mut positivity_violated = false;

    let make = |values: Vec<f64>, time: f64, idx: u64| Snapshot {
        grid: grid.clone(),
        values,
        time,
        spec: spec.clone(),
        step_index: idx,
    };
    while next_output < outputs.len() && outputs[next_output] == 0.0 {
        snapshots.push(initial.clone());
        next_output += 1;
    }
    let mut next_level = options.record_growth.map(|g| sup.max(f64::MIN_POSITIVE) * g);

    let mut rk = Rk4::new(n);
    let mut f_prev = vec![0.0; n];
    rhs(&u, h, &spec, &mut f_prev);
    let mut u_prev = vec![0.0; n];

    let termination = loop {
        if sup >= control.sup_norm_cap {
            break Termination::BlowupThresholdReached;
        }
        if t >= options.final_time {
            break Termination::FinalTimeReached;
        }
        if steps >= options.max_steps {
            return Err(Error::IntegratorFault { t, dump: format!("step budget {} exhausted", options.max_steps) });
        }
        let mut dt = control.dt(h, spec.dim, spec.p, sup, spec.boundary);
        if dt < control.dt_min {
            break Termination::StepUnderflow;
        }
        let mut last_step = false;
        if t + dt >= options.final_time {
            dt = options.final_time - t;
            last_step = true;
        }
        u_prev.copy_from_slice(&u);
        rk.k[0].copy_from_slice(&f_prev);
        rk.advance(&mut u, dt, h, &spec);
        if let Some(err) = non_finite_dump(&u, t, dt) {
            return Err(err);
        }
        let t_new = if last_step { options.final_time } else { t + dt };
        steps += 1;
        let mut f_new = vec![0.0; n];
        rhs(&u, h, &spec, &mut f_new);

        while next_output < outputs.len() && outputs[next_output] <= t_new {
            let theta = (outputs[next_output] - t) / dt;
            let values = hermite(&u_prev, &f_prev, &u, &f_new, dt, theta);
            snapshots.push(make(values, outputs[next_output], steps));
            next_output += 1;
        }
        t = t_new;
        f_prev = f_new;
        sup = u.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if watch_positivity && u.iter().any(|&v| v < -1e-12 * sup.max(1.0)) {
            positivity_violated = true;
        }
        series.push(SeriesRecord { t, sup_norm: sup, dt, mass: trapezoid_mass(&u, &grid, spec.dim) });
        if let Some(level) = next_level {
            if sup >= level && sup < control.sup_norm_cap {
                if snapshots.last().is_none_or(|s: &Snapshot| s.time < t) {
                    snapshots.push(make(u.clone(), t, steps));
                }
                next_level = Some(sup * options.record_growth.unwrap());
            }
        }
    };
    if snapshots.last().is_none_or(|s| s.time < t) {
        snapshots.push(make(u.clone(), t, steps));
    }

    let mut fit = None;
    let mut t_hat = None;
    if termination != Termination::FinalTimeReached {
        let sups: Vec<(f64, f64)> = series.iter().map(|r| (r.t, r.sup_norm)).collect();
        if let Ok(f) = estimate_blowup_time(&sups, beta, options.fit_window) {
            if f.t_hat > t {
                t_hat = Some(f.t_hat);
                fit = Some(f);
            }
        }
    }
    Ok(RunResult { spec, control: *control, snapshots, series, t_hat, fit, termination, positivity_violated, steps })
}

/// Runs independent problems in parallel; results come back in input order.
pub fn solve_sweep(
    specs: &[Arc<ProblemSpec>],
    control: &StepControl,
    options: &SolveOptions,
) -> Vec<Result<RunResult>> {
    specs.par_iter().map(|s| solve_until_blowup(s.clone(), control, options)).collect()
}
