//! `similarity`: the run seen in backward similarity variables around `similarity.center`.
//!
//! CSV `similarity.csv`: `t, s, tau, sup_w, l1_rho, lq_rho, ball_integral, physical_integral`, one
//! row per stored snapshot before the blow-up time. The last two columns are the critical
//! integral over `|y| < k` in the frame and over the parabola `|x - a| < k sqrt(T - t)`.

use bulb_core::diagnostics::concentration_integral;
use bulb_core::similarity::{ball_integral, to_similarity_frame, weighted_norm, FrameGridSpec, RhoQuadrature};
use bulb_core::Error;
use serde_json::json;

use super::{derived, simulate_problem, Check, Report};
use crate::config::{RunConfig, Scenario};
use crate::output::{Plot, Table};
use crate::snapshot_io::SnapshotFile;

pub(super) fn run(config: &RunConfig) -> bulb_core::Result<Report> {
    let c = &config.similarity;
    let run = simulate_problem(config)?;
    let t_hat = run.t_hat.ok_or_else(|| Error::Precondition("the run has no blow-up time estimate".into()))?;
    let mut report = Report::new(Scenario::Similarity, derived(config));
    let spec = &run.spec;
    let q_star = spec.dim as f64 * (spec.p - 1.0) / 2.0;
    let grid = FrameGridSpec { y_max: c.y_max, node_count: c.y_nodes };
    let quad = RhoQuadrature { y_max: c.y_max, ..RhoQuadrature::default() };

    let mut table =
        Table::new("similarity", &["t", "s", "tau", "sup_w", "l1_rho", "lq_rho", "ball_integral", "physical_integral"]);
    let mut worst = 0.0f64;
    let mut sup_curve = Vec::new();
    let mut l1_curve = Vec::new();
    let mut last_frame = None;
    for snap in run.snapshots.iter().filter(|s| s.time < t_hat) {
        let frame = to_similarity_frame(snap, c.center, t_hat, &grid)?;
        let l1 = weighted_norm(&frame, 1.0, &quad)?.norm;
        let lq = weighted_norm(&frame, c.q, &quad)?.norm;
        let ball = ball_integral(&frame, c.k, q_star)?;
        let physical = concentration_integral(snap, c.center, c.k, t_hat, q_star)?;
        if physical > 0.0 {
            worst = worst.max((ball / physical - 1.0).abs());
        }
        let tau = t_hat - snap.time;
        table.push(vec![
            snap.time.into(),
            frame.s.into(),
            tau.into(),
            frame.sup_norm().into(),
            l1.into(),
            lq.into(),
            ball.into(),
            physical.into(),
        ]);
        sup_curve.push((frame.s, frame.sup_norm()));
        l1_curve.push((frame.s, l1));
        last_frame = Some(frame);
    }
    let last_frame = last_frame.ok_or_else(|| Error::InsufficientData("no snapshot before the blow-up time".into()))?;
    report.checks.push(Check::at_most(
        "change_of_variables",
        worst,
        c.identity_tolerance,
        "max relative difference of the critical integral over |y| < k in the frame and over the physical parabola",
    ));
    report.results = json!({
        "t_hat": t_hat,
        "center": c.center,
        "q_star": q_star,
        "frames": table.rows.len(),
        "s_range": [sup_curve.first().map(|x| x.0), sup_curve.last().map(|x| x.0)],
        "final_sup_w": last_frame.sup_norm(),
        "final_l1_rho": l1_curve.last().map(|x| x.1),
        "snapshot_file": "similarity.final.bulb",
    });
    report.tables.push(table);
    report.plots.push(Plot {
        name: "similarity_norms".into(),
        title: format!("rescaled field around a = {}", c.center),
        x_label: "s".into(),
        y_label: "norm".into(),
        series: vec![("sup |w|".into(), sup_curve), ("L1_rho".into(), l1_curve)],
    });
    report.snapshots.push(("similarity.final.bulb".into(), SnapshotFile::from_frame(&last_frame)));
    Ok(report)
}
