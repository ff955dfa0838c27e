//! `semigroup`: the Gaussian-weighted Ornstein-Uhlenbeck semigroup on random and spike data.
//!
//! CSV files:
//! - `semigroup.csv`: `function, q, s, before, after, margin, tolerance` for every contraction test.
//! - `semigroup_scan.csv`: `b, s, ratio` of the delayed-smoothing scan.

use bulb_core::core::Grid;
use bulb_core::similarity::{
    contraction_checks, delayed_smoothing_scan, mehler_apply, FrameGridSpec, FrameSource, RhoQuadrature, RhoRule,
    SimilarityFrame, SmoothingScanConfig,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{Check, Report};
use crate::config::{RunConfig, Scenario, SemigroupSection};
use crate::output::{Plot, Table};

/// Comparisons with closed forms use `|y| <= ORACLE_RANGE`, away from the truncation at `y_max`.
const ORACLE_RANGE: f64 = 6.0;

/// An eigenfunction of the drift operator and minus its eigenvalue.
type Eigenpair = (fn(f64) -> f64, f64);

// 1, y and y² - 2 decay like 1, e^{-s/2} and e^{-s}
const EIGENPAIRS: [Eigenpair; 3] = [(|_| 1.0, 0.0), (|y| y, 0.5), (|y| y * y - 2.0, 1.0)];

fn frame(grid: &Grid, f: impl Fn(f64) -> f64) -> SimilarityFrame {
    SimilarityFrame {
        center: 0.0,
        s: 0.0,
        s0: 0.0,
        t_hat: 1.0,
        dim: 1,
        p: 3.0,
        domain_radius: f64::INFINITY,
        grid: grid.clone(),
        values: grid.nodes().iter().map(|&y| f(y)).collect(),
        source: FrameSource::NativeWSolve,
    }
}

/// Sum of six cosines with random amplitudes in (-1, 1), frequencies in (0, 3) and phases.
fn band_limited(grid: &Grid, rng: &mut ChaCha8Rng) -> SimilarityFrame {
    let modes: Vec<(f64, f64, f64)> = (0..6)
        .map(|_| {
            (rng.random_range(-1.0..1.0), rng.random_range(0.0..3.0), rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    frame(grid, |y| modes.iter().map(|&(a, w, th)| a * (w * y + th).cos()).sum())
}

fn max_error_near_origin(a: &SimilarityFrame, f: impl Fn(f64) -> f64) -> f64 {
    a.grid
        .nodes()
        .iter()
        .zip(&a.values)
        .filter(|(y, _)| y.abs() <= ORACLE_RANGE)
        .map(|(&y, v)| (v - f(y)).abs())
        .fold(0.0, f64::max)
}

fn quadrature(c: &SemigroupSection) -> RhoQuadrature {
    let rule = if c.quad_nodes == 0 { RhoRule::Grid } else { RhoRule::GaussHermite { nodes: c.quad_nodes } };
    RhoQuadrature { rule, y_max: c.y_max }
}

pub(super) fn run(config: &RunConfig) -> bulb_core::Result<Report> {
    let c = &config.semigroup;
    let mut report = Report::new(Scenario::Semigroup, None);
    let grid = Grid::line(c.y_max, c.y_nodes)?;
    let quad = quadrature(c);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut table = Table::new("semigroup", &["function", "q", "s", "before", "after", "margin", "tolerance"]);
    let mut worst = f64::INFINITY;
    let mut flagged = 0usize;
    for i in 0..c.functions {
        let phi = band_limited(&grid, &mut rng);
        let by_s = c
            .s_values
            .iter()
            .map(|&s| contraction_checks(&phi, s, &c.q_values, &quad))
            .collect::<bulb_core::Result<Vec<_>>>()?;
        for (qi, &q) in c.q_values.iter().enumerate() {
            for (reports, &s) in by_s.iter().zip(&c.s_values) {
                let r = &reports[qi];
                worst = worst.min(r.margin);
                flagged += usize::from(r.violated);
                table.push(vec![
                    i.into(),
                    q.into(),
                    s.into(),
                    r.before.into(),
                    r.after.into(),
                    r.margin.into(),
                    r.tolerance.into(),
                ]);
            }
        }
    }
    if c.functions > 0 {
        report.checks.push(Check::new(
            "contraction",
            worst >= -c.margin_tolerance,
            worst,
            -c.margin_tolerance,
            "smallest margin |phi|_q - |T(s) phi|_q over all tests (must not fall below the tolerance)",
        ));
    }

    let mut oracle_err = 0.0f64;
    for &s in &c.s_values {
        for (f, rate) in EIGENPAIRS {
            let moved = mehler_apply(&frame(&grid, f), s, &quad)?;
            oracle_err = oracle_err.max(max_error_near_origin(&moved, |y| (-rate * s).exp() * f(y)));
        }
    }
    report.checks.push(Check::at_most(
        "eigen_oracles",
        oracle_err,
        c.oracle_tolerance,
        "max error on |y| <= 6 of T(s) applied to 1, y and y^2 - 2 against their closed forms",
    ));

    let mut law_err = 0.0f64;
    for _ in 0..10 {
        let phi = band_limited(&grid, &mut rng);
        let (s1, s2) = (rng.random_range(0.05..1.0), rng.random_range(0.05..2.0));
        let two = mehler_apply(&mehler_apply(&phi, s1, &quad)?, s2, &quad)?;
        let one = mehler_apply(&phi, s1 + s2, &quad)?;
        let sampler = one.sampler();
        law_err = law_err.max(max_error_near_origin(&two, |y| sampler.eval(y)));
    }
    report.checks.push(Check::at_most(
        "semigroup_law",
        law_err,
        c.law_tolerance,
        "max difference on |y| <= 6 of T(s1) T(s2) phi and T(s1 + s2) phi over ten random cases",
    ));

    let steps = (c.b_max / c.b_step).floor() as usize;
    let scan_config = SmoothingScanConfig {
        q: c.scan_q,
        m: c.scan_m,
        spike_width: c.spike_width,
        centers: (0..=steps).map(|k| c.b_step * k as f64).collect(),
        s_values: c.scan_s.clone(),
        bound_factor: c.bound_factor,
        grid: FrameGridSpec { y_max: c.y_max, node_count: c.y_nodes },
    };
    let scan = delayed_smoothing_scan(&scan_config, &quad)?;
    let mut scan_table = Table::new("semigroup_scan", &["b", "s", "ratio"]);
    for r in &scan.rows {
        scan_table.push(vec![r.b.into(), r.s.into(), r.ratio.into()]);
    }
    if let Some(first) = scan.summaries.first() {
        report.checks.push(Check::new(
            "smoothing_monotone_at_small_s",
            first.monotone && !first.bounded,
            first.growth,
            c.bound_factor,
            format!("at s = {} the ratio must grow strictly with |b| past the bound factor", first.s),
        ));
    }
    report.checks.push(Check::new(
        "smoothing_delayed_bound",
        scan.s_star.is_some(),
        scan.s_star.unwrap_or(f64::NAN),
        c.bound_factor,
        "measured s*: from here on the ratio stays within the bound factor over the scanned |b|",
    ));

    let mut curves = Vec::new();
    for summary in &scan.summaries {
        let pts: Vec<(f64, f64)> =
            scan.rows.iter().filter(|r| r.s == summary.s).map(|r| (r.b, r.ratio.log10())).collect();
        curves.push((format!("s = {}", summary.s), pts));
    }
    report.results = json!({
        "contraction": { "tests": table.rows.len(), "worst_margin": worst, "flagged": flagged },
        "eigen_oracle_error": oracle_err,
        "semigroup_law_error": law_err,
        "smoothing": { "q": scan.q, "m": scan.m, "s_star": scan.s_star, "summaries": scan.summaries },
    });
    report.tables.extend([table, scan_table]);
    report.plots.push(Plot {
        name: "semigroup_scan".into(),
        title: format!("delayed smoothing L{} -> L{}", c.scan_m, c.scan_q),
        x_label: "b".into(),
        y_label: "log10 ratio".into(),
        series: curves,
    });
    Ok(report)
}
