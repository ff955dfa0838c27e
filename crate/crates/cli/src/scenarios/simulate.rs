//! `simulate`: integrate to blow-up and extrapolate the blow-up time.
//!
//! CSV `simulate.csv`: `t, sup_norm, dt, mass`, one row per accepted step.

use bulb_core::core::{Boundary, InitialData, ProblemSpec};
use serde_json::json;

use super::{derived, simulate_problem, thin, Check, Report};
use crate::config::{RunConfig, Scenario};
use crate::output::{Plot, Table};
use crate::snapshot_io::SnapshotFile;

/// Blow-up time and profile of the spatially constant solution, when the problem has one.
fn ode_solution(spec: &ProblemSpec) -> Option<(f64, impl Fn(f64) -> f64)> {
    let InitialData::Constant { value } = spec.initial else { return None };
    if value == 0.0 || spec.boundary == Boundary::DirichletZero {
        return None;
    }
    let (c, p) = (value.abs(), spec.p);
    let beta = 1.0 / (p - 1.0);
    let t_blowup = c.powf(1.0 - p) / (p - 1.0);
    Some((t_blowup, move |t: f64| (c.powf(1.0 - p) - (p - 1.0) * t).powf(-beta)))
}

pub(super) fn run(config: &RunConfig) -> bulb_core::Result<Report> {
    let run = simulate_problem(config)?;
    let mut report = Report::new(Scenario::Simulate, derived(config));

    let mut table = Table::new("simulate", &["t", "sup_norm", "dt", "mass"]);
    for r in &run.series {
        table.push(vec![r.t.into(), r.sup_norm.into(), r.dt.into(), r.mass.into()]);
    }
    report.tables.push(table);

    let tol = config.simulate_oracle_tolerance;
    let mut oracle = serde_json::Value::Null;
    if let Some((t_exact, exact)) = ode_solution(&run.spec) {
        let err = run
            .series
            .iter()
            .filter(|r| r.t < t_exact)
            .map(|r| (r.sup_norm / exact(r.t) - 1.0).abs())
            .fold(0.0, f64::max);
        report.checks.push(Check::at_most(
            "ode_oracle_sup",
            err,
            tol,
            "max relative error of sup |u| against the ODE solution",
        ));
        let t_err = run.t_hat.map_or(f64::INFINITY, |t| (t / t_exact - 1.0).abs());
        report.checks.push(Check::at_most(
            "ode_oracle_t_hat",
            t_err,
            tol,
            "relative error of the extrapolated blow-up time",
        ));
        oracle = json!({ "t_exact": t_exact, "max_relative_error": err, "t_hat_relative_error": t_err });
    }

    let last = run.final_snapshot();
    report.results = json!({
        "termination": run.termination,
        "steps": run.steps,
        "t_hat": run.t_hat,
        "fit": run.fit,
        "final_time": last.time,
        "final_sup_norm": last.sup_norm(),
        "positivity_violated": run.positivity_violated,
        "stored_snapshots": run.snapshots.len(),
        "ode_oracle": oracle,
        "snapshot_file": "simulate.final.bulb",
    });
    let points: Vec<(f64, f64)> = run.series.iter().map(|r| (r.t, r.sup_norm.log10())).collect();
    report.plots.push(Plot {
        name: "simulate_norm".into(),
        title: "sup-norm growth".into(),
        x_label: "t".into(),
        y_label: "log10 sup |u|".into(),
        series: vec![("sup |u|".into(), thin(&points, 2000))],
    });
    report.snapshots.push(("simulate.final.bulb".into(), SnapshotFile::from_snapshot(last)));
    Ok(report)
}
