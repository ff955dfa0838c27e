//! Diagnostics on a one-dimensional cubic blow-up from Gaussian data, shared across tests.

use std::sync::{Arc, OnceLock};

use bulb_core::core::{Boundary, Geometry, InitialData, ProblemSpec};
use bulb_core::diagnostics::*;
use bulb_core::physical::{solve_until_blowup, RunResult, SolveOptions, StepControl};
use bulb_core::similarity::*;

const KAPPA: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn gaussian_run() -> &'static RunResult {
    static RUN: OnceLock<RunResult> = OnceLock::new();
    RUN.get_or_init(|| {
        let spec = Arc::new(
            ProblemSpec::new(
                1,
                3.0,
                Geometry::Interval { half_length: 4.0 },
                Boundary::DirichletZero,
                InitialData::Gaussian { amplitude: 5.0, width: 1.0 },
            )
            .unwrap(),
        );
        let control = StepControl { sup_norm_cap: 300.0, ..Default::default() };
        let options = SolveOptions { node_count: 2001, record_growth: Some(1.02), ..Default::default() };
        solve_until_blowup(spec, &control, &options).unwrap()
    })
}

fn final_decade(run: &RunResult) -> impl Iterator<Item = &bulb_core::core::Snapshot> {
    let t_hat = run.t_hat.unwrap();
    let tau_end = t_hat - run.final_snapshot().time;
    run.snapshots.iter().filter(move |s| s.time < t_hat && t_hat - s.time <= 10.0 * tau_end)
}

#[test]
fn type_one_rate_approaches_kappa() {
    let run = gaussian_run();
    let series = diagnostics_series(run, &SeriesConfig::default()).unwrap();
    let tau_end = series.t_hat - run.final_snapshot().time;
    let tail: Vec<_> = series.records.iter().filter(|r| series.t_hat - r.t <= 10.0 * tau_end).collect();
    assert!(tail.len() > 20);
    for r in tail {
        assert!((r.m / KAPPA - 1.0).abs() < 0.05, "m = {} at t = {}", r.m, r.t);
    }
    let c = classify_blowup_type(&series, &ClassifyWindow::default());
    assert_eq!(c.kind.label(), "type-I");
    assert!(series.records.iter().all(|r| r.m <= series.m_max));
}

#[test]
fn concentration_on_the_backward_parabola() {
    let run = gaussian_run();
    let t_hat = run.t_hat.unwrap();
    let grid = FrameGridSpec { y_max: 12.0, node_count: 12001 };
    let mut eta = f64::INFINITY;
    for snap in final_decade(run) {
        let c = concentration_integral(snap, 0.0, 3.0, t_hat, 1.0).unwrap();
        assert!((c / (6.0 * KAPPA) - 1.0).abs() < 0.1, "{c}");
        eta = eta.min(c);
        let frame = to_similarity_frame(snap, 0.0, t_hat, &grid).unwrap();
        let via_frame = ball_integral(&frame, 3.0, 1.0).unwrap();
        assert!((via_frame / c - 1.0).abs() < 1e-6, "{via_frame} {c}");
    }
    assert!(eta > 0.0);
}

#[test]
fn concentration_away_from_the_blowup_point_vanishes() {
    let run = gaussian_run();
    let t_hat = run.t_hat.unwrap();
    let values: Vec<f64> =
        final_decade(run).map(|s| concentration_integral(s, 2.0, 3.0, t_hat, 1.0).unwrap()).collect();
    // u stays bounded near x = 2, so the integral shrinks like the parabola width sqrt(T - t)
    assert!(values.windows(2).all(|w| w[1] <= w[0]));
    assert!(values.last().unwrap() < &(0.5 * values[0]), "{values:?}");
}

#[test]
fn weighted_norm_decays_at_rate_beta_away_from_the_blowup_set() {
    let run = gaussian_run();
    let l1 = epsilon_regularity_check(run, 2.0, &EpsilonOptions { q: Some(1.0), ..Default::default() }).unwrap();
    assert!(l1.passes, "{l1:?}");
    let default_q = epsilon_regularity_check(run, 2.0, &EpsilonOptions::default()).unwrap();
    assert_eq!(default_q.q, 4.0);
    assert!(default_q.q_condition_met && default_q.passes);
    let at_peak = epsilon_regularity_check(run, 0.0, &EpsilonOptions { q: Some(1.0), ..Default::default() }).unwrap();
    assert!(!at_peak.passes && at_peak.rate_hat.abs() < 0.1);
}

#[test]
fn scaling_leaves_critical_quantities_unchanged() {
    let run = gaussian_run();
    let base = diagnostics_series(run, &SeriesConfig { parabolas: vec![(0.0, 3.0)], ..Default::default() }).unwrap();
    let verdict = classify_blowup_type(&base, &ClassifyWindow::default());
    for lambda in [0.5, 2.0] {
        let scaled = rescale_run(run, lambda).unwrap();
        let s =
            diagnostics_series(&scaled, &SeriesConfig { parabolas: vec![(0.0, 3.0)], ..Default::default() }).unwrap();
        for (a, b) in base.snapshots.iter().zip(&s.snapshots) {
            assert!((a.global_critical / b.global_critical - 1.0).abs() < 1e-8);
            assert!((a.concentration[0] / b.concentration[0] - 1.0).abs() < 1e-6);
        }
        let v = classify_blowup_type(&s, &ClassifyWindow::default());
        assert_eq!(v.kind.label(), verdict.kind.label());
        if let (BlowupType::TypeI { c1, c2 }, BlowupType::TypeI { c1: d1, c2: d2 }) = (&verdict.kind, &v.kind) {
            assert!((c1 / d1 - 1.0).abs() < 1e-6 && (c2 / d2 - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn far_field_stays_bounded() {
    let report = far_field_bound_check(gaussian_run(), 2.0, 0.1).unwrap();
    assert!(report.bounded, "{report:?}");
    assert!(report.sup_value < 5.0);
    assert!(far_field_bound_check(gaussian_run(), 5.0, 0.1).is_err());
}

#[test]
fn single_blowup_point_at_the_origin() {
    let run = gaussian_run();
    let set = locate_blowup_points(run, 0.5 * run.final_snapshot().sup_norm());
    assert_eq!(set.points.len(), 1, "{set:?}");
    assert!(set.points[0].center.abs() <= run.final_snapshot().grid.h);
}

#[test]
fn two_symmetric_bumps_give_two_points() {
    let radii: Vec<f64> = (0..=400).map(|i| 0.01 * i as f64).collect();
    let values = radii.iter().map(|r| 6.0 * (-(r - 1.5) * (r - 1.5) / 0.08).exp()).collect();
    let spec = Arc::new(
        ProblemSpec::new(
            1,
            3.0,
            Geometry::Interval { half_length: 4.0 },
            Boundary::DirichletZero,
            InitialData::Table { radii, values },
        )
        .unwrap(),
    );
    let control = StepControl { sup_norm_cap: 200.0, ..Default::default() };
    let options = SolveOptions { node_count: 801, ..Default::default() };
    let run = solve_until_blowup(spec, &control, &options).unwrap();
    let set = locate_blowup_points(&run, 0.5 * run.final_snapshot().sup_norm());
    let centers: Vec<f64> = set.points.iter().map(|p| p.center).collect();
    assert_eq!(centers.len(), 2, "{centers:?}");
    assert!((centers[0] + centers[1]).abs() < 1e-12 && centers[1] > 1.0);
}

#[test]
fn rescaled_frames_near_the_end() {
    let run = gaussian_run();
    let t_hat = run.t_hat.unwrap();
    let series = diagnostics_series(run, &SeriesConfig::default()).unwrap();
    let grid = FrameGridSpec { y_max: 12.0, node_count: 1201 };
    let mut masses = Vec::new();
    for snap in final_decade(run).step_by(10) {
        let frame = to_vn_frame(run, snap.time, -1.0, &grid).unwrap();
        let bound = vn_bound_check(&frame, series.m_max).unwrap();
        assert!(bound.holds, "{bound:?}");
        masses.push(ball_integral(&frame, 3.0, 1.0).unwrap());
        let near_end = to_vn_frame(run, snap.time, -0.05, &grid);
        if let Ok(f) = near_end {
            // |v_n| stays bounded at |y| >= 8
            let far = f
                .grid
                .nodes()
                .iter()
                .zip(&f.values)
                .filter(|(y, _)| **y >= 8.0)
                .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
            assert!(far < 1.0, "{far}");
        }
    }
    let (lo, hi) = masses.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &m| (a.min(m), b.max(m)));
    assert!(lo > 0.0 && hi / lo < 1.1, "{masses:?}");
    assert!(to_vn_frame(run, t_hat - 1e-9, 0.5, &grid).is_err());
    assert!(to_vn_frame(run, 0.001, -50.0, &grid).is_err());
}

#[test]
fn rescaled_equation_matches_the_transformed_run() {
    let run = gaussian_run();
    let t_hat = run.t_hat.unwrap();
    // |y| = y_max stays outside the physical interval up to s = 8.5, so w = 0 there is exact
    let grid = FrameGridSpec { y_max: 280.0, node_count: 5601 };
    let snaps: Vec<_> = run.snapshots.iter().filter(|s| s.time < t_hat).collect();
    let s_of = |t: f64| -(t_hat - t).ln();
    let start = snaps.iter().find(|s| s_of(s.time) >= 7.0).unwrap();
    let end = snaps.iter().find(|s| s_of(s.time) >= 8.0).unwrap();
    assert!(s_of(end.time) < 8.5);
    let w1 = to_similarity_frame(start, 0.0, t_hat, &grid).unwrap();
    let w2 = to_similarity_frame(end, 0.0, t_hat, &grid).unwrap();
    let out = solve_w_equation(&w1, w2.s, &StepControl::default(), &WSolveOptions::default()).unwrap();
    let solved = out.last().unwrap();
    let diff = solved.values.iter().zip(&w2.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff <= 1e-3, "{diff}");
}
