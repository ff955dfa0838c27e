//! `bubble`: critical norm and residual of the rescaled Aubin-Talenti bubble.
//!
//! CSV `bubble.csv`: `lambda, critical_norm, closed_form, relative_error, residual_scaled`.
//! The residual of `U_λ` is multiplied by `λ^{(N+2)/2}`, which removes its dependence on `λ`, and
//! is computed on a grid of radius `residual_radius λ`.

use bulb_core::core::{derive_exponents, Grid};
use bulb_core::special::{bubble_critical_norm, bubble_residual, BubbleQuadrature, BubbleSpec};
use bulb_core::Error;
use serde_json::json;

use super::{Check, Report};
use crate::config::{RunConfig, Scenario};
use crate::output::{Plot, Table};

pub(super) fn run(config: &RunConfig) -> bulb_core::Result<Report> {
    let c = &config.bubble;
    let dim = config.dim.ok_or_else(|| Error::Config("bubble needs problem.N".into()))?;
    if c.lambdas.is_empty() {
        return Err(Error::Config("bubble.lambdas is empty".into()));
    }
    let p_s = (dim as f64 + 2.0) / (dim as f64 - 2.0);
    let mut report = Report::new(Scenario::Bubble, derive_exponents(dim, p_s).ok());
    let quad = BubbleQuadrature { cutoff: c.cutoff, cell: c.cell };

    let mut table =
        Table::new("bubble", &["lambda", "critical_norm", "closed_form", "relative_error", "residual_scaled"]);
    let (mut norm_err, mut residual) = (0.0f64, 0.0f64);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut curves = Vec::new();
    let mut closed = f64::NAN;
    let mut norms = Vec::new();
    for &lambda in &c.lambdas {
        let b = BubbleSpec::new(dim, lambda)?;
        closed = b.critical_norm_closed_form();
        let norm = bubble_critical_norm(&b, &quad)?.integral;
        let rel = (norm / closed - 1.0).abs();
        let grid = Grid::radial(c.residual_radius * lambda, c.residual_nodes)?;
        let res = bubble_residual(&b, &grid)? * lambda.powf((dim as f64 + 2.0) / 2.0);
        norms.push(norm);
        norm_err = norm_err.max(rel);
        residual = residual.max(res);
        lo = lo.min(norm);
        hi = hi.max(norm);
        table.push(vec![lambda.into(), norm.into(), closed.into(), rel.into(), res.into()]);
        let curve: Vec<(f64, f64)> = (0..=200)
            .map(|k| {
                let r = lambda * 10f64.powf(-2.0 + 4.0 * k as f64 / 200.0);
                (r.log10(), b.value(r))
            })
            .collect();
        curves.push((format!("lambda = {lambda}"), curve));
    }
    let spread = (hi - lo) / lo;
    report.checks.push(Check::at_most(
        "critical_norm",
        norm_err,
        c.norm_tolerance,
        "max relative error of the computed critical integral against the Beta-function closed form",
    ));
    report.checks.push(Check::at_most(
        "lambda_independence",
        spread,
        c.norm_tolerance,
        "relative spread of the critical integral across the scales",
    ));
    report.checks.push(Check::at_most(
        "residual",
        residual,
        c.residual_tolerance,
        "max scale-free residual |Delta U + U^p_S|",
    ));
    report.results = json!({
        "dim": dim,
        "p_sobolev": p_s,
        "closed_form": closed,
        "lambdas": c.lambdas,
        "critical_norm": norms,
        "max_relative_error": norm_err,
        "lambda_spread": spread,
        "residual_scaled": residual,
    });
    report.tables.push(table);
    report.plots.push(Plot {
        name: "bubble".into(),
        title: format!("rescaled bubbles, N = {dim}"),
        x_label: "log10 r".into(),
        y_label: "U_lambda".into(),
        series: curves,
    });
    Ok(report)
}
