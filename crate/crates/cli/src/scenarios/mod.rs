//! Scenario pipelines. Each one turns a [`RunConfig`] into tables, plots, snapshot files and a
//! list of checks; [`run_scenario`] writes them out.

mod bubble;
mod diagnose;
mod profile;
mod semigroup;
mod similarity;
mod simulate;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use bulb_core::core::{derive_exponents, DerivedExponents, ProblemSpec};
use bulb_core::physical::{solve_until_blowup, FitWindow, RunResult, SolveOptions, StepControl};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{RunConfig, Scenario};
use crate::error::{CliError, Result};
use crate::output::{write_atomic, Plot, Table};
use crate::snapshot_io::{write_snapshot_file, SnapshotFile};

/// One pass/fail verdict. `measured` is compared against `tolerance` in the direction the check
/// describes; `detail` says which.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, measured, tolerance, detail: detail.into() }
    }

    /// Passes when `measured <= tolerance`.
    pub fn at_most(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self::new(name, measured <= tolerance, measured, tolerance, detail)
    }
}

/// Everything a scenario produced, before anything is written.
#[derive(Debug, Clone)]
pub struct Report {
    pub scenario: Scenario,
    pub derived: Option<DerivedExponents>,
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
    pub snapshots: Vec<(String, SnapshotFile)>,
    pub checks: Vec<Check>,
    /// Scenario-specific summary values.
    pub results: Value,
}

impl Report {
    fn new(scenario: Scenario, derived: Option<DerivedExponents>) -> Self {
        Self {
            scenario,
            derived,
            tables: Vec::new(),
            plots: Vec::new(),
            snapshots: Vec::new(),
            checks: Vec::new(),
            results: Value::Null,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The JSON summary; `wall_time` is the only field that varies between identical runs.
    pub fn summary(&self, config: &RunConfig, wall_time: f64) -> Value {
        let verdicts: serde_json::Map<String, Value> =
            self.checks.iter().map(|c| (c.name.clone(), Value::from(if c.passed { "pass" } else { "fail" }))).collect();
        let tolerances: serde_json::Map<String, Value> =
            self.checks.iter().map(|c| (c.name.clone(), Value::from(c.tolerance))).collect();
        json!({
            "scenario": self.scenario.as_str(),
            "inputs": config.inputs_json(),
            "derived_exponents": self.derived,
            "verdicts": verdicts,
            "checks": self.checks,
            "tolerances": tolerances,
            "passed": self.passed(),
            "results": self.results,
            "wall_time_s": wall_time,
        })
    }
}

/// A finished scenario and the files it wrote.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub wall_time: f64,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    /// Process exit status: 0 when every check passed, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            0
        } else {
            2
        }
    }
}

/// Runs the pipeline of `config.scenario` without writing anything.
pub fn execute(config: &RunConfig) -> Result<Report> {
    let scenario = config.scenario.ok_or(CliError::MissingScenario)?;
    let wrap = |source: bulb_core::Error| CliError::Scenario { scenario: scenario.as_str(), source };
    match scenario {
        Scenario::Simulate => simulate::run(config).map_err(wrap),
        Scenario::Similarity => similarity::run(config).map_err(wrap),
        Scenario::Profile => profile::run(config).map_err(wrap),
        Scenario::Semigroup => semigroup::run(config).map_err(wrap),
        Scenario::Bubble => bubble::run(config).map_err(wrap),
        Scenario::Diagnose => diagnose::run(config).map_err(wrap),
    }
}

/// Runs the scenario and writes the config echo, CSV tables, JSON summary, SVG plots and
/// snapshot files into `config.out_dir`, each file atomically.
pub fn run_scenario(config: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let report = execute(config)?;
    let wall_time = start.elapsed().as_secs_f64();
    let name = report.scenario.as_str();
    let dir = &config.out_dir;
    let mut files = Vec::new();
    let mut emit = |file: String, bytes: &[u8]| -> Result<()> {
        let path = dir.join(file);
        write_atomic(&path, bytes)?;
        files.push(path);
        Ok(())
    };
    emit(format!("{name}.ini"), config.echo().as_bytes())?;
    if config.format.csv() {
        for t in &report.tables {
            emit(format!("{}.csv", t.name), &t.to_csv())?;
        }
    }
    if config.format.json() {
        let mut text = serde_json::to_string_pretty(&report.summary(config, wall_time)).expect("serializable");
        text.push('\n');
        emit(format!("{name}.json"), text.as_bytes())?;
    }
    if config.svg {
        for p in &report.plots {
            emit(format!("{}.svg", p.name), p.to_svg().as_bytes())?;
        }
    }
    for (file, snap) in &report.snapshots {
        let path = dir.join(file);
        write_snapshot_file(snap, &path)?;
        files.push(path);
    }
    Ok(Outcome { report, wall_time, files })
}

fn problem(config: &RunConfig) -> bulb_core::Result<Arc<ProblemSpec>> {
    config
        .problem
        .clone()
        .map(Arc::new)
        .ok_or_else(|| bulb_core::Error::Config("scenario needs problem.N and problem.p".into()))
}

fn derived(config: &RunConfig) -> Option<DerivedExponents> {
    match (config.dim, config.p) {
        (Some(n), Some(p)) => derive_exponents(n, p).ok(),
        _ => None,
    }
}

fn step_control(config: &RunConfig) -> StepControl {
    let s = &config.solver;
    StepControl { cfl_safety: s.cfl_safety, ode_safety: s.ode_safety, sup_norm_cap: s.sup_norm_cap, dt_min: s.dt_min }
}

/// Integrates the configured problem to blow-up (or the final time).
fn simulate_problem(config: &RunConfig) -> bulb_core::Result<RunResult> {
    let s = &config.solver;
    let options = SolveOptions {
        node_count: s.nodes,
        output_times: Vec::new(),
        final_time: s.final_time,
        record_growth: s.record_growth,
        fit_window: FitWindow { sup_fraction: s.fit_fraction, ..FitWindow::default() },
        max_steps: s.max_steps,
    };
    solve_until_blowup(problem(config)?, &step_control(config), &options)
}

/// `(t, sup)` thinned to at most `limit` points for plotting.
fn thin<T: Copy>(points: &[T], limit: usize) -> Vec<T> {
    let stride = points.len().div_ceil(limit.max(1)).max(1);
    let mut out: Vec<T> = points.iter().step_by(stride).copied().collect();
    if let Some(&last) = points.last() {
        if !(points.len() - 1).is_multiple_of(stride) {
            out.push(last);
        }
    }
    out
}
