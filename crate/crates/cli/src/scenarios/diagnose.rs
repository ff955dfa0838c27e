//! `diagnose`: blow-up rate, concentration, decay away from the blow-up set, far field and
//! scaling invariance of one run.
//!
//! CSV files:
//! - `diagnose.csv`: `t, tau, sup_norm, m` per accepted step, `m = (T - t)^β sup|u|`.
//! - `diagnose_snapshots.csv`: `t, tau, global_critical, far_field` per stored snapshot.
//! - `diagnose_concentration.csv`: `point, center, t, tau, physical, frame` over the final decade
//!   of `T - t`, the critical integral over the backward parabola and over the ball in the frame.

use bulb_core::diagnostics::{
    classify_blowup_type, concentration_integral, diagnostics_series, epsilon_regularity_check, far_field_bound_check,
    locate_blowup_points, rescale_run, BlowupType, ClassifyWindow, EpsilonOptions, SeriesConfig,
};
use bulb_core::numerics::sphere_area;
use bulb_core::similarity::{ball_integral, to_similarity_frame, FrameGridSpec};
use bulb_core::Error;
use serde_json::{json, Value};

use super::{derived, simulate_problem, thin, Check, Report};
use crate::config::{RunConfig, Scenario};
use crate::output::{Plot, Table};

pub(super) fn run(config: &RunConfig) -> bulb_core::Result<Report> {
    let c = &config.diagnose;
    let run = simulate_problem(config)?;
    let t_hat = run.t_hat.ok_or_else(|| Error::Precondition("the run has no blow-up time estimate".into()))?;
    let exps = derived(config).ok_or_else(|| Error::Config("diagnose needs problem.N and problem.p".into()))?;
    let mut report = Report::new(Scenario::Diagnose, Some(exps));
    let spec = &run.spec;
    let dim = spec.dim;
    let subcritical = exps.p <= exps.p_sobolev;
    let t_end = run.final_snapshot().time;
    let tau_end = t_hat - t_end;
    let in_final_decade = |t: f64| t < t_hat && t_hat - t <= 10.0 * tau_end;

    let points = locate_blowup_points(&run, c.peak_fraction * run.final_snapshot().sup_norm());
    // off-axis points of a radial problem in N >= 2 are spheres, not points
    let centers: Vec<f64> = points.points.iter().map(|p| p.center).filter(|&a| dim == 1 || a == 0.0).collect();
    report.checks.push(Check::new(
        "blowup_points",
        !centers.is_empty(),
        centers.len() as f64,
        1.0,
        "number of blow-up points with a concentration check (at least 1)",
    ));

    let series_config = SeriesConfig {
        balls: Vec::new(),
        parabolas: centers.iter().map(|&a| (a, c.k)).collect(),
        r_far: c.r_far.filter(|&r| r < spec.radius()),
    };
    let series = diagnostics_series(&run, &series_config)?;
    let window = ClassifyWindow { decades: c.classify_decades, ratio: c.classify_ratio, ..ClassifyWindow::default() };
    let classification = classify_blowup_type(&series, &window);

    let mut type_table = Table::new("diagnose", &["t", "tau", "sup_norm", "m"]);
    for r in &series.records {
        type_table.push(vec![r.t.into(), (t_hat - r.t).into(), r.sup_norm.into(), r.m.into()]);
    }
    let mut snap_table = Table::new("diagnose_snapshots", &["t", "tau", "global_critical", "far_field"]);
    for r in &series.snapshots {
        snap_table.push(vec![
            r.t.into(),
            (t_hat - r.t).into(),
            r.global_critical.into(),
            r.far_field.unwrap_or(f64::NAN).into(),
        ]);
    }

    if subcritical {
        let tail: Vec<f64> = series.records.iter().filter(|r| in_final_decade(r.t)).map(|r| r.m).collect();
        let worst = if tail.is_empty() {
            f64::INFINITY
        } else {
            tail.iter().map(|m| (m / exps.kappa - 1.0).abs()).fold(0.0, f64::max)
        };
        report.checks.push(Check::at_most(
            "type_one_constant",
            worst,
            c.kappa_tolerance,
            "max relative deviation of (T - t)^beta sup|u| from kappa over the final decade of T - t",
        ));
    }

    // concentration on backward parabolas around each blow-up point
    let q = exps.q_star;
    let ball_volume = sphere_area(dim) / dim as f64 * c.k.powi(dim as i32);
    let target = exps.kappa.powf(q) * ball_volume;
    let grid = FrameGridSpec { y_max: c.y_max, node_count: c.y_nodes };
    let mut conc_table = Table::new("diagnose_concentration", &["point", "center", "t", "tau", "physical", "frame"]);
    let (mut conc_err, mut eta, mut identity) = (0.0f64, f64::INFINITY, 0.0f64);
    for (i, &a) in centers.iter().enumerate() {
        for snap in run.snapshots.iter().filter(|s| in_final_decade(s.time)) {
            let physical = concentration_integral(snap, a, c.k, t_hat, q)?;
            let frame = ball_integral(&to_similarity_frame(snap, a, t_hat, &grid)?, c.k, q)?;
            conc_err = conc_err.max((physical / target - 1.0).abs());
            eta = eta.min(physical);
            if physical > 0.0 {
                identity = identity.max((frame / physical - 1.0).abs());
            }
            conc_table.push(vec![
                i.into(),
                a.into(),
                snap.time.into(),
                (t_hat - snap.time).into(),
                physical.into(),
                frame.into(),
            ]);
        }
    }
    if !centers.is_empty() {
        if subcritical {
            report.checks.push(Check::at_most(
                "concentration",
                conc_err,
                c.concentration_tolerance,
                "max relative deviation of the parabola integral from kappa^q* |B_k| over the final decade",
            ));
        }
        report.checks.push(Check::new(
            "concentration_lower_bound",
            eta > 0.0,
            eta,
            0.0,
            "smallest parabola integral over the final decade (must be positive)",
        ));
        report.checks.push(Check::at_most(
            "concentration_identity",
            identity,
            c.identity_tolerance,
            "max relative difference of the parabola integral and the same integral in similarity variables",
        ));
    }

    // decay of the weighted L1 norm away from the blow-up set
    let epsilon = if dim == 1 || c.decay_center == 0.0 {
        let opts = EpsilonOptions { q: Some(c.decay_q), rate_tolerance: c.rate_tolerance, ..EpsilonOptions::default() };
        let e = epsilon_regularity_check(&run, c.decay_center, &opts)?;
        report.checks.push(Check::new(
            "decay_rate",
            e.passes,
            (e.rate_hat / e.beta - 1.0).abs(),
            c.rate_tolerance,
            format!(
                "relative deviation of the fitted decay rate of the weighted L{} norm at a = {} from beta",
                e.q, e.center
            ),
        ));
        json!({
            "center": e.center,
            "q": e.q,
            "rate_hat": e.rate_hat,
            "beta": e.beta,
            "correlation": e.correlation,
            "c0_hat": e.c0_hat,
            "sigma": e.sigma,
            "l1_at_sigma": e.l1_at_sigma,
        })
    } else {
        json!({ "skipped": "off-axis centres need N = 1" })
    };

    let far = match series_config.r_far {
        Some(r) => {
            let f = far_field_bound_check(&run, r, c.far_tolerance)?;
            report.checks.push(Check::new(
                "far_field_bounded",
                f.bounded,
                f.sup_value,
                c.far_tolerance,
                format!("sup |u| on |x| >= {r} over the final decade stays within (1 + tolerance) of its value at the start"),
            ));
            json!({ "r_far": r, "sup_value": f.sup_value, "reference": f.reference, "bounded": f.bounded })
        }
        None => Value::Null,
    };

    // invariance of critical quantities under u -> lambda^{2 beta} u(lambda^2 t, lambda x)
    let mut scaling = Vec::new();
    let mut scale_err = 0.0f64;
    let mut same_verdict = true;
    for &lambda in &c.scales {
        let scaled = rescale_run(&run, lambda)?;
        let cfg = SeriesConfig {
            balls: Vec::new(),
            parabolas: series_config.parabolas.iter().map(|&(a, k)| (a / lambda, k)).collect(),
            r_far: series_config.r_far.map(|r| r / lambda),
        };
        let s = diagnostics_series(&scaled, &cfg)?;
        let mut err = 0.0f64;
        for (a, b) in series.snapshots.iter().zip(&s.snapshots) {
            err = err.max((b.global_critical / a.global_critical - 1.0).abs());
            for (x, y) in a.concentration.iter().zip(&b.concentration) {
                err = err.max((y / x - 1.0).abs());
            }
        }
        let v = classify_blowup_type(&s, &window);
        if let (BlowupType::TypeI { c1, c2 }, BlowupType::TypeI { c1: d1, c2: d2 }) = (&classification.kind, &v.kind) {
            err = err.max((d1 / c1 - 1.0).abs()).max((d2 / c2 - 1.0).abs());
        }
        same_verdict &= v.kind.label() == classification.kind.label();
        scale_err = scale_err.max(err);
        scaling.push(json!({ "lambda": lambda, "max_relative_change": err, "verdict": v.kind.label() }));
    }
    if !c.scales.is_empty() {
        report.checks.push(Check::new(
            "scaling_invariance",
            same_verdict && scale_err <= c.scaling_tolerance,
            scale_err,
            c.scaling_tolerance,
            "max relative change of critical integrals and type-I constants under rescaling; the type verdict must not change",
        ));
    }

    report.results = json!({
        "t_hat": t_hat,
        "final_time": t_end,
        "m_max": series.m_max,
        "classification": classification,
        "blowup_points": points,
        "concentration_target": target,
        "epsilon_regularity": epsilon,
        "far_field": far,
        "scaling": scaling,
    });
    let curve: Vec<(f64, f64)> = series.records.iter().map(|r| ((t_hat - r.t).log10(), r.m)).collect();
    report.plots.push(Plot {
        name: "diagnose_rate".into(),
        title: "type-I ratio".into(),
        x_label: "log10 (T - t)".into(),
        y_label: "m(t)".into(),
        series: vec![("m(t)".into(), thin(&curve, 2000))],
    });
    report.tables.extend([type_table, snap_table, conc_table]);
    Ok(report)
}
