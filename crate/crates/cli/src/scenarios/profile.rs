//! `profile`: shooting search for radial self-similar profiles.
//!
//! CSV files:
//! - `profile_scan.csv`: `alpha, classification` for every scanned shooting parameter.
//! - `profile.csv`: `profile, alpha, r, phi, dphi` samples of every decaying candidate.

use bulb_core::special::{profile_critical_norm_growth, search_profiles, FindOptions, ShootOptions};
use bulb_core::Error;
use serde_json::json;

use super::{derived, thin, Check, Report};
use crate::config::{RunConfig, Scenario};
use crate::output::{Plot, Table};

pub(super) fn run(config: &RunConfig) -> bulb_core::Result<Report> {
    let c = &config.profile;
    let exps = derived(config).ok_or_else(|| Error::Config("profile needs problem.N and problem.p".into()))?;
    let (dim, p) = (exps.dim, exps.p);
    let mut report = Report::new(Scenario::Profile, Some(exps));
    let options = FindOptions {
        shoot: ShootOptions { r_max: c.r_max, g_max: c.g_max, ..ShootOptions::default() },
        ..FindOptions::default()
    };
    let search = search_profiles(dim, p, c.alpha_min, c.alpha_max, c.alpha_step, &options)?;

    let mut scan = Table::new("profile_scan", &["alpha", "classification"]);
    for s in &search.scan {
        scan.push(vec![s.alpha.into(), s.classification.as_str().into()]);
    }
    let mut samples = Table::new("profile", &["profile", "alpha", "r", "phi", "dphi"]);
    let mut summaries = Vec::new();
    let mut curves = Vec::new();
    for (i, prof) in search.profiles.iter().enumerate() {
        for s in &prof.samples {
            samples.push(vec![i.into(), prof.alpha.into(), s.r.into(), s.phi.into(), s.dphi.into()]);
        }
        let growth = profile_critical_norm_growth(prof, exps.q_star).ok();
        summaries.push(json!({
            "alpha": prof.alpha,
            "bracket": prof.bracket,
            "r_max": prof.r_max,
            "tail_exponent": prof.tail_exponent,
            "tail_constant": prof.tail_constant(),
            "critical_norm_growth": growth,
        }));
        let curve: Vec<(f64, f64)> = prof.samples.iter().filter(|s| s.r > 0.0).map(|s| (s.r.log10(), s.phi)).collect();
        curves.push((format!("alpha = {:.6}", prof.alpha), thin(&curve, 1500)));
    }

    let expected_tail = -2.0 * exps.beta;
    if exps.p_sobolev < p && p < exps.p_jl {
        report.checks.push(Check::new(
            "profile_found",
            !search.profiles.is_empty(),
            search.profiles.len() as f64,
            1.0,
            "number of nonconstant decaying profiles (at least 1)",
        ));
        if let Some(first) = search.profiles.first() {
            let tail = first.tail_exponent.unwrap_or(f64::NAN);
            report.checks.push(Check::at_most(
                "tail_exponent",
                ((tail - expected_tail) / expected_tail).abs(),
                c.tail_tolerance,
                format!("relative deviation of the tail exponent {tail} of the first profile from -2 beta = {expected_tail}"),
            ));
            let g = profile_critical_norm_growth(first, exps.q_star)?;
            report.checks.push(Check::new(
                "critical_norm_log_growth",
                g.correlation > c.correlation_min && g.slope > 0.0,
                g.correlation,
                c.correlation_min,
                format!("correlation of I(R) with log R (slope {})", g.slope),
            ));
        }
    } else if p <= exps.p_sobolev {
        report.checks.push(Check::new(
            "only_constant_profile",
            search.profiles.is_empty(),
            search.profiles.len() as f64,
            0.0,
            "number of nonconstant decaying profiles (none expected up to the Sobolev exponent)",
        ));
    }

    report.results = json!({
        "kappa": exps.kappa,
        "expected_tail_exponent": expected_tail,
        "scanned": search.scan.len(),
        "brackets": search.brackets,
        "profiles": summaries,
    });
    report.tables.extend([scan, samples]);
    report.plots.push(Plot {
        name: "profile".into(),
        title: format!("self-similar profiles, N = {dim}, p = {p}"),
        x_label: "log10 r".into(),
        y_label: "phi".into(),
        series: curves,
    });
    Ok(report)
}
