//! INI-style run configuration.
//!
//! ```text
//! # comment
//! [problem]
//! N = 1
//! p = 3
//! [solver]
//! nodes = 2001
//! ```
//!
//! Keys before the first section header belong to `[problem]`. Every key has a default except
//! `problem.N` and `problem.p`, which are required by the scenarios that integrate the PDE.
//! Unknown sections and keys are rejected; errors cite the line (or `--set` override) at fault.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use bulb_core::core::{derive_exponents, Boundary, Geometry, InitialData, ProblemSpec};

use crate::error::{CliError, Origin, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scenario {
    Simulate,
    Similarity,
    Profile,
    Semigroup,
    Bubble,
    Diagnose,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Simulate,
        Scenario::Similarity,
        Scenario::Profile,
        Scenario::Semigroup,
        Scenario::Bubble,
        Scenario::Diagnose,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Simulate => "simulate",
            Scenario::Similarity => "similarity",
            Scenario::Profile => "profile",
            Scenario::Semigroup => "semigroup",
            Scenario::Bubble => "bubble",
            Scenario::Diagnose => "diagnose",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL.into_iter().find(|x| x.as_str() == s).ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        self != OutputFormat::Json
    }

    pub fn json(self) -> bool {
        self != OutputFormat::Csv
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Int,
    Float,
    Bool,
    Floats,
    Choice(&'static [&'static str]),
    Text,
}

struct Key {
    section: &'static str,
    name: &'static str,
    kind: Kind,
    /// `None`: no default (required or optional depending on the key).
    default: Option<&'static str>,
}

const SCENARIOS: &[&str] = &["simulate", "similarity", "profile", "semigroup", "bubble", "diagnose"];

macro_rules! keys {
    ($( $section:literal { $( $name:literal : $kind:expr => $default:expr ),* $(,)? } )*) => {
        &[ $( $( Key { section: $section, name: $name, kind: $kind, default: $default } ),* ),* ]
    };
}

const SCHEMA: &[Key] = keys! {
    "run" {
        "scenario": Kind::Choice(SCENARIOS) => None,
        "seed": Kind::Int => Some("0"),
        "format": Kind::Choice(&["csv", "json", "both"]) => Some("both"),
        "svg": Kind::Bool => Some("false"),
        "out_dir": Kind::Text => Some("bulb-out"),
    }
    "problem" {
        "N": Kind::Int => None,
        "p": Kind::Float => None,
        "geometry": Kind::Choice(&["auto", "interval", "ball", "whole-space"]) => Some("auto"),
        "radius": Kind::Float => Some("4"),
        "boundary": Kind::Choice(&["dirichlet", "neumann", "homogeneous"]) => Some("dirichlet"),
        "initial": Kind::Choice(&["gaussian", "constant", "bubble"]) => Some("gaussian"),
        "amplitude": Kind::Float => Some("5"),
        "width": Kind::Float => Some("1"),
        "value": Kind::Float => Some("1"),
        "lambda": Kind::Float => Some("1"),
    }
    "solver" {
        "nodes": Kind::Int => Some("401"),
        "cfl_safety": Kind::Float => Some("0.4"),
        "ode_safety": Kind::Float => Some("0.05"),
        "sup_norm_cap": Kind::Float => Some("1e8"),
        "dt_min": Kind::Float => Some("1e-14"),
        "final_time": Kind::Float => Some("10"),
        "record_growth": Kind::Float => Some("1.05"),
        "fit_fraction": Kind::Float => Some("0.25"),
        "max_steps": Kind::Int => Some("50000000"),
    }
    "simulate" {
        "oracle_tolerance": Kind::Float => Some("1e-4"),
    }
    "similarity" {
        "center": Kind::Float => Some("0"),
        "y_max": Kind::Float => Some("12"),
        "y_nodes": Kind::Int => Some("12001"),
        "q": Kind::Float => Some("2"),
        "k": Kind::Float => Some("3"),
        "identity_tolerance": Kind::Float => Some("1e-6"),
    }
    "diagnose" {
        "k": Kind::Float => Some("3"),
        "kappa_tolerance": Kind::Float => Some("0.05"),
        "concentration_tolerance": Kind::Float => Some("0.1"),
        "identity_tolerance": Kind::Float => Some("1e-6"),
        "y_max": Kind::Float => Some("12"),
        "y_nodes": Kind::Int => Some("12001"),
        "peak_fraction": Kind::Float => Some("0.5"),
        "decay_center": Kind::Float => Some("2"),
        "decay_q": Kind::Float => Some("1"),
        "rate_tolerance": Kind::Float => Some("0.15"),
        "r_far": Kind::Float => Some("2"),
        "far_tolerance": Kind::Float => Some("0.1"),
        "scales": Kind::Floats => Some("0.5, 2"),
        "scaling_tolerance": Kind::Float => Some("1e-6"),
        "classify_decades": Kind::Float => Some("2"),
        "classify_ratio": Kind::Float => Some("10"),
    }
    "profile" {
        "alpha_min": Kind::Float => Some("0.05"),
        "alpha_max": Kind::Float => Some("10"),
        "alpha_step": Kind::Float => Some("1e-3"),
        "r_max": Kind::Float => Some("30"),
        "g_max": Kind::Float => Some("1e3"),
        "tail_tolerance": Kind::Float => Some("0.1"),
        "correlation_min": Kind::Float => Some("0.99"),
    }
    "semigroup" {
        "functions": Kind::Int => Some("100"),
        "q_values": Kind::Floats => Some("1, 2, 4"),
        "s_values": Kind::Floats => Some("0.1, 1, 5"),
        "quad_nodes": Kind::Int => Some("0"),
        "y_max": Kind::Float => Some("12"),
        "y_nodes": Kind::Int => Some("2401"),
        "margin_tolerance": Kind::Float => Some("1e-6"),
        "scan_q": Kind::Float => Some("2"),
        "scan_m": Kind::Float => Some("1"),
        "spike_width": Kind::Float => Some("0.05"),
        "scan_s": Kind::Floats => Some("0.01, 0.1, 0.5, 1, 2, 3, 4, 5"),
        "b_max": Kind::Float => Some("6"),
        "b_step": Kind::Float => Some("0.5"),
        "bound_factor": Kind::Float => Some("2"),
        "oracle_tolerance": Kind::Float => Some("1e-8"),
        "law_tolerance": Kind::Float => Some("1e-6"),
    }
    "bubble" {
        "lambdas": Kind::Floats => Some("0.1, 1, 10"),
        "cutoff": Kind::Float => Some("40"),
        "cell": Kind::Float => Some("0.05"),
        "residual_radius": Kind::Float => Some("10"),
        "residual_nodes": Kind::Int => Some("10001"),
        "norm_tolerance": Kind::Float => Some("1e-6"),
        "residual_tolerance": Kind::Float => Some("1e-5"),
    }
};

fn schema_key(section: &str, name: &str) -> Option<&'static Key> {
    SCHEMA.iter().find(|k| k.section == section && k.name == name)
}

/// Explicitly given `key = value` pairs, validated against the schema.
#[derive(Debug, Clone, Default)]
struct Entries {
    map: BTreeMap<(&'static str, &'static str), (String, Origin)>,
}

impl Entries {
    fn insert(&mut self, section: &str, name: &str, value: &str, origin: Origin) -> Result<()> {
        if !SCHEMA.iter().any(|k| k.section == section) {
            return Err(CliError::config(origin, format!("unknown section [{section}]")));
        }
        let key = schema_key(section, name)
            .ok_or_else(|| CliError::config(origin.clone(), format!("unknown key '{name}' in [{section}]")))?;
        check_kind(key, value).map_err(|m| CliError::config(origin.clone(), m))?;
        if let (Some((_, Origin::Line(prev))), Origin::Line(_)) = (self.map.get(&(key.section, key.name)), &origin) {
            return Err(CliError::config(origin, format!("duplicate key '{name}' (first set on line {prev})")));
        }
        self.map.insert((key.section, key.name), (value.to_string(), origin));
        Ok(())
    }

    fn get(&self, section: &'static str, name: &'static str) -> Option<&(String, Origin)> {
        self.map.get(&(section, name))
    }

    /// The value with its origin, falling back to the schema default.
    fn value(&self, section: &'static str, name: &'static str) -> (String, Origin) {
        match self.get(section, name) {
            Some(v) => v.clone(),
            None => {
                let key = schema_key(section, name).expect("schema key");
                (key.default.unwrap_or_default().to_string(), Origin::Default)
            }
        }
    }
}

fn parse_floats(value: &str) -> Result<Vec<f64>, String> {
    value.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| format!("'{}' is not a number", x.trim()))).collect()
}

fn check_kind(key: &Key, value: &str) -> Result<(), String> {
    let name = key.name;
    match key.kind {
        Kind::Int => {
            value.parse::<u64>().map(drop).map_err(|_| format!("{name} must be a nonnegative integer (got '{value}')"))
        }
        Kind::Float => match value.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(()),
            _ => Err(format!("{name} must be a finite number (got '{value}')")),
        },
        Kind::Bool => match value {
            "true" | "false" => Ok(()),
            _ => Err(format!("{name} must be true or false (got '{value}')")),
        },
        Kind::Floats => parse_floats(value).map(drop).map_err(|e| format!("{name}: {e}")),
        Kind::Choice(options) => {
            if options.contains(&value) {
                Ok(())
            } else {
                Err(format!("{name} must be one of {} (got '{value}')", options.join(", ")))
            }
        }
        Kind::Text => Ok(()),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn unquote(value: &str) -> &str {
    value.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(value)
}

fn parse_entries(text: &str, overrides: &[String]) -> Result<Entries> {
    let mut entries = Entries::default();
    let mut section = String::from("problem");
    for (i, raw) in text.lines().enumerate() {
        let origin = Origin::Line(i + 1);
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| CliError::config(origin.clone(), format!("malformed section header '{line}'")))?
                .trim();
            if !SCHEMA.iter().any(|k| k.section == name) {
                return Err(CliError::config(origin, format!("unknown section [{name}]")));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(origin.clone(), format!("expected 'key = value', found '{line}'")))?;
        entries.insert(&section, key.trim(), unquote(value.trim()), origin)?;
    }
    for (i, item) in overrides.iter().enumerate() {
        let origin = Origin::Override(i + 1);
        let (path, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::config(origin.clone(), format!("expected section.key=value, found '{item}'")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| CliError::config(origin.clone(), format!("override key '{path}' needs a section")))?;
        entries.insert(section, key, unquote(value.trim()), origin)?;
    }
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSection {
    pub nodes: usize,
    pub cfl_safety: f64,
    pub ode_safety: f64,
    pub sup_norm_cap: f64,
    pub dt_min: f64,
    pub final_time: f64,
    /// `None` when set to 0.
    pub record_growth: Option<f64>,
    pub fit_fraction: f64,
    pub max_steps: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilaritySection {
    pub center: f64,
    pub y_max: f64,
    pub y_nodes: usize,
    pub q: f64,
    pub k: f64,
    pub identity_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnoseSection {
    pub k: f64,
    pub kappa_tolerance: f64,
    pub concentration_tolerance: f64,
    pub identity_tolerance: f64,
    pub y_max: f64,
    pub y_nodes: usize,
    pub peak_fraction: f64,
    pub decay_center: f64,
    pub decay_q: f64,
    pub rate_tolerance: f64,
    /// `None` when set to 0.
    pub r_far: Option<f64>,
    pub far_tolerance: f64,
    pub scales: Vec<f64>,
    pub scaling_tolerance: f64,
    pub classify_decades: f64,
    pub classify_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSection {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub r_max: f64,
    pub g_max: f64,
    pub tail_tolerance: f64,
    pub correlation_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupSection {
    pub functions: usize,
    pub q_values: Vec<f64>,
    pub s_values: Vec<f64>,
    /// 0 (the default) selects the grid rule; otherwise the Gauss-Hermite node count. A fixed
    /// Gauss-Hermite rule cannot resolve the narrow spikes of the smoothing scan at small s.
    pub quad_nodes: usize,
    pub y_max: f64,
    pub y_nodes: usize,
    pub margin_tolerance: f64,
    pub scan_q: f64,
    pub scan_m: f64,
    pub spike_width: f64,
    pub scan_s: Vec<f64>,
    pub b_max: f64,
    pub b_step: f64,
    pub bound_factor: f64,
    pub oracle_tolerance: f64,
    pub law_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BubbleSection {
    pub lambdas: Vec<f64>,
    pub cutoff: f64,
    pub cell: f64,
    pub residual_radius: f64,
    pub residual_nodes: usize,
    pub norm_tolerance: f64,
    pub residual_tolerance: f64,
}

/// A fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    pub seed: u64,
    pub format: OutputFormat,
    pub svg: bool,
    pub out_dir: PathBuf,
    pub dim: Option<usize>,
    pub p: Option<f64>,
    /// Built when both `N` and `p` are present.
    pub problem: Option<ProblemSpec>,
    pub solver: SolverSection,
    pub simulate_oracle_tolerance: f64,
    pub similarity: SimilaritySection,
    pub diagnose: DiagnoseSection,
    pub profile: ProfileSection,
    pub semigroup: SemigroupSection,
    pub bubble: BubbleSection,
    entries: Entries,
}

struct Reader<'a> {
    entries: &'a Entries,
}

impl Reader<'_> {
    fn raw(&self, section: &'static str, name: &'static str) -> (String, Origin) {
        self.entries.value(section, name)
    }

    fn float(&self, section: &'static str, name: &'static str) -> f64 {
        self.raw(section, name).0.parse().expect("checked on insert")
    }

    fn int(&self, section: &'static str, name: &'static str) -> u64 {
        self.raw(section, name).0.parse().expect("checked on insert")
    }

    fn usize(&self, section: &'static str, name: &'static str) -> Result<usize> {
        let (v, origin) = self.raw(section, name);
        v.parse().map_err(|_| CliError::config(origin, format!("{name} is too large")))
    }

    fn floats(&self, section: &'static str, name: &'static str) -> Vec<f64> {
        parse_floats(&self.raw(section, name).0).expect("checked on insert")
    }

    /// A float that must satisfy `ok`, or a configuration error citing its origin.
    fn checked(&self, section: &'static str, name: &'static str, ok: impl Fn(f64) -> bool, what: &str) -> Result<f64> {
        let (text, origin) = self.raw(section, name);
        let v: f64 = text.parse().expect("checked on insert");
        if ok(v) {
            Ok(v)
        } else {
            Err(CliError::config(origin, format!("{name} {what} (got {v})")))
        }
    }

    fn positive(&self, section: &'static str, name: &'static str) -> Result<f64> {
        self.checked(section, name, |v| v > 0.0, "must be positive")
    }
}

fn build_problem(r: &Reader<'_>, dim: usize, p: f64) -> Result<ProblemSpec> {
    let radius = r.positive("problem", "radius")?;
    let geometry = match r.raw("problem", "geometry").0.as_str() {
        "interval" => Geometry::Interval { half_length: radius },
        "ball" => Geometry::Ball { radius },
        "whole-space" => Geometry::WholeSpace { radius },
        _ if dim == 1 => Geometry::Interval { half_length: radius },
        _ => Geometry::Ball { radius },
    };
    let boundary = match r.raw("problem", "boundary").0.as_str() {
        "neumann" => Boundary::NeumannZero,
        "homogeneous" => Boundary::Homogeneous,
        _ => Boundary::DirichletZero,
    };
    let initial = match r.raw("problem", "initial").0.as_str() {
        "constant" => InitialData::Constant { value: r.float("problem", "value") },
        "bubble" => InitialData::Bubble { lambda: r.positive("problem", "lambda")? },
        _ => {
            InitialData::Gaussian { amplitude: r.float("problem", "amplitude"), width: r.positive("problem", "width")? }
        }
    };
    let origin = r.raw("problem", "N").1;
    ProblemSpec::new(dim, p, geometry, boundary, initial)
        .map_err(|e| CliError::config(origin, format!("[problem]: {e}")))
}

/// Parses configuration text with no overrides and no scenario from the command line.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &[], None)
}

/// Parses configuration text, applies `--set` overrides in order and resolves the scenario
/// (a subcommand wins over `run.scenario`).
pub fn parse_config_with(text: &str, overrides: &[String], scenario: Option<Scenario>) -> Result<RunConfig> {
    let mut entries = parse_entries(text, overrides)?;
    let scenario = match scenario {
        Some(s) => {
            entries.map.insert(("run", "scenario"), (s.as_str().to_string(), Origin::Default));
            Some(s)
        }
        None => entries.get("run", "scenario").map(|(v, _)| v.parse().expect("checked on insert")),
    };
    let r = Reader { entries: &entries };

    let mut missing = Vec::new();
    let needs_dim = scenario != Some(Scenario::Semigroup);
    let needs_p = needs_dim && scenario != Some(Scenario::Bubble);
    if needs_dim && entries.get("problem", "N").is_none() {
        missing.push("problem.N".to_string());
    }
    if needs_p && entries.get("problem", "p").is_none() {
        missing.push("problem.p".to_string());
    }

    let dim = match entries.get("problem", "N") {
        Some((v, origin)) => {
            let n: usize = v.parse().map_err(|_| CliError::config(origin.clone(), "N is too large"))?;
            if n == 0 {
                return Err(CliError::config(origin.clone(), "N must be at least 1"));
            }
            Some(n)
        }
        None => None,
    };
    let p = match entries.get("problem", "p") {
        Some(_) => Some(r.checked("problem", "p", |v| v > 1.0, "must exceed 1")?),
        None => None,
    };
    if !missing.is_empty() {
        return Err(CliError::MissingKeys { keys: missing });
    }
    match scenario {
        Some(Scenario::Semigroup) => {
            if let Some(n) = dim.filter(|&n| n != 1) {
                let origin = r.raw("problem", "N").1;
                return Err(CliError::config(origin, format!("semigroup scans are one-dimensional (N = {n})")));
            }
        }
        Some(Scenario::Bubble) => {
            let n = dim.expect("checked above");
            if n < 3 {
                return Err(CliError::config(r.raw("problem", "N").1, format!("the bubble needs N >= 3 (got {n})")));
            }
            let p_s = derive_exponents(n, 2.0).expect("valid").p_sobolev;
            if let Some(p) = p.filter(|&p| p != p_s) {
                let origin = r.raw("problem", "p").1;
                return Err(CliError::config(
                    origin,
                    format!("the bubble solves the equation with p = {p_s}, not {p}"),
                ));
            }
        }
        _ => {}
    }
    let problem = match (dim, p) {
        (Some(n), Some(p)) if scenario != Some(Scenario::Semigroup) => Some(build_problem(&r, n, p)?),
        _ => None,
    };

    let solver = SolverSection {
        nodes: r.usize("solver", "nodes")?,
        cfl_safety: r.float("solver", "cfl_safety"),
        ode_safety: r.float("solver", "ode_safety"),
        sup_norm_cap: r.positive("solver", "sup_norm_cap")?,
        dt_min: r.positive("solver", "dt_min")?,
        final_time: r.positive("solver", "final_time")?,
        record_growth: {
            let g = r.checked("solver", "record_growth", |v| v == 0.0 || v > 1.0, "must be 0 or exceed 1")?;
            (g > 0.0).then_some(g)
        },
        fit_fraction: r.checked("solver", "fit_fraction", |v| v > 0.0 && v < 1.0, "must lie in (0, 1)")?,
        max_steps: r.int("solver", "max_steps"),
    };
    let similarity = SimilaritySection {
        center: r.float("similarity", "center"),
        y_max: r.positive("similarity", "y_max")?,
        y_nodes: r.usize("similarity", "y_nodes")?,
        q: r.positive("similarity", "q")?,
        k: r.positive("similarity", "k")?,
        identity_tolerance: r.positive("similarity", "identity_tolerance")?,
    };
    let diagnose = DiagnoseSection {
        k: r.positive("diagnose", "k")?,
        kappa_tolerance: r.positive("diagnose", "kappa_tolerance")?,
        concentration_tolerance: r.positive("diagnose", "concentration_tolerance")?,
        identity_tolerance: r.positive("diagnose", "identity_tolerance")?,
        y_max: r.positive("diagnose", "y_max")?,
        y_nodes: r.usize("diagnose", "y_nodes")?,
        peak_fraction: r.checked("diagnose", "peak_fraction", |v| v > 0.0 && v <= 1.0, "must lie in (0, 1]")?,
        decay_center: r.float("diagnose", "decay_center"),
        decay_q: r.positive("diagnose", "decay_q")?,
        rate_tolerance: r.positive("diagnose", "rate_tolerance")?,
        r_far: {
            let v = r.checked("diagnose", "r_far", |v| v >= 0.0, "must be nonnegative")?;
            (v > 0.0).then_some(v)
        },
        far_tolerance: r.positive("diagnose", "far_tolerance")?,
        scales: r.floats("diagnose", "scales"),
        scaling_tolerance: r.positive("diagnose", "scaling_tolerance")?,
        classify_decades: r.positive("diagnose", "classify_decades")?,
        classify_ratio: r.checked("diagnose", "classify_ratio", |v| v > 1.0, "must exceed 1")?,
    };
    let profile = ProfileSection {
        alpha_min: r.positive("profile", "alpha_min")?,
        alpha_max: r.positive("profile", "alpha_max")?,
        alpha_step: r.positive("profile", "alpha_step")?,
        r_max: r.positive("profile", "r_max")?,
        g_max: r.positive("profile", "g_max")?,
        tail_tolerance: r.positive("profile", "tail_tolerance")?,
        correlation_min: r.positive("profile", "correlation_min")?,
    };
    let semigroup = SemigroupSection {
        functions: r.usize("semigroup", "functions")?,
        q_values: r.floats("semigroup", "q_values"),
        s_values: r.floats("semigroup", "s_values"),
        quad_nodes: r.usize("semigroup", "quad_nodes")?,
        y_max: r.positive("semigroup", "y_max")?,
        y_nodes: r.usize("semigroup", "y_nodes")?,
        margin_tolerance: r.positive("semigroup", "margin_tolerance")?,
        scan_q: r.positive("semigroup", "scan_q")?,
        scan_m: r.positive("semigroup", "scan_m")?,
        spike_width: r.positive("semigroup", "spike_width")?,
        scan_s: r.floats("semigroup", "scan_s"),
        b_max: r.positive("semigroup", "b_max")?,
        b_step: r.positive("semigroup", "b_step")?,
        bound_factor: r.checked("semigroup", "bound_factor", |v| v >= 1.0, "must be at least 1")?,
        oracle_tolerance: r.positive("semigroup", "oracle_tolerance")?,
        law_tolerance: r.positive("semigroup", "law_tolerance")?,
    };
    let bubble = BubbleSection {
        lambdas: r.floats("bubble", "lambdas"),
        cutoff: r.checked("bubble", "cutoff", |v| v > 1.0, "must exceed 1")?,
        cell: r.positive("bubble", "cell")?,
        residual_radius: r.positive("bubble", "residual_radius")?,
        residual_nodes: r.usize("bubble", "residual_nodes")?,
        norm_tolerance: r.positive("bubble", "norm_tolerance")?,
        residual_tolerance: r.positive("bubble", "residual_tolerance")?,
    };
    let simulate_oracle_tolerance = r.positive("simulate", "oracle_tolerance")?;
    let format = match r.raw("run", "format").0.as_str() {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        _ => OutputFormat::Both,
    };

    Ok(RunConfig {
        scenario,
        seed: r.int("run", "seed"),
        format,
        svg: r.raw("run", "svg").0 == "true",
        out_dir: PathBuf::from(r.raw("run", "out_dir").0),
        dim,
        p,
        problem,
        solver,
        simulate_oracle_tolerance,
        similarity,
        diagnose,
        profile,
        semigroup,
        bubble,
        entries,
    })
}

impl RunConfig {
    pub fn set_out_dir(&mut self, dir: PathBuf) {
        self.entries.map.insert(("run", "out_dir"), (dir.display().to_string(), Origin::Default));
        self.out_dir = dir;
    }

    pub fn set_format(&mut self, format: OutputFormat) {
        let text = match format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Both => "both",
        };
        self.entries.map.insert(("run", "format"), (text.into(), Origin::Default));
        self.format = format;
    }

    pub fn set_svg(&mut self, svg: bool) {
        self.entries.map.insert(("run", "svg"), (svg.to_string(), Origin::Default));
        self.svg = svg;
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.entries.map.insert(("run", "seed"), (seed.to_string(), Origin::Default));
        self.seed = seed;
    }

    /// Every key with its effective value in schema order; unset keys without a default are
    /// omitted.
    pub fn resolved(&self) -> Vec<(&'static str, &'static str, String)> {
        SCHEMA
            .iter()
            .filter_map(|k| match self.entries.get(k.section, k.name) {
                Some((v, _)) => Some((k.section, k.name, v.clone())),
                None => k.default.map(|d| (k.section, k.name, d.to_string())),
            })
            .collect()
    }

    /// Resolved inputs grouped by section with typed values. The output directory is left out
    /// so that identical runs written to different places summarise identically.
    pub fn inputs_json(&self) -> serde_json::Value {
        use serde_json::{Map, Value};
        let mut root = Map::new();
        for (section, name, value) in self.resolved() {
            if (section, name) == ("run", "out_dir") {
                continue;
            }
            let kind = schema_key(section, name).expect("schema key").kind;
            let typed = match kind {
                Kind::Int => value.parse::<u64>().map(Value::from).unwrap_or(Value::Null),
                Kind::Float => value.parse::<f64>().map(Value::from).unwrap_or(Value::Null),
                Kind::Bool => Value::Bool(value == "true"),
                Kind::Floats => parse_floats(&value).map(Value::from).unwrap_or(Value::Null),
                Kind::Choice(_) | Kind::Text => Value::String(value),
            };
            root.entry(section)
                .or_insert_with(|| Value::Object(Map::new()))
                .as_object_mut()
                .expect("section object")
                .insert(name.to_string(), typed);
        }
        Value::Object(root)
    }

    /// The resolved configuration as INI text; parsing it reproduces this configuration.
    pub fn echo(&self) -> String {
        let mut out = String::from("# resolved configuration\n");
        let mut current = "";
        for (section, name, value) in self.resolved() {
            if section != current {
                let _ = write!(out, "\n[{section}]\n");
                current = section;
            }
            let _ = writeln!(out, "{name} = {value}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_problem() {
        let c = parse_config("[problem]\nN = 1\np = 3").unwrap();
        let spec = c.problem.unwrap();
        assert_eq!(spec.dim, 1);
        assert_eq!(spec.p, 3.0);
        assert!(matches!(spec.geometry, Geometry::Interval { half_length } if half_length == 4.0));
        assert_eq!(c.scenario, None);
    }

    #[test]
    fn p_below_one_cites_the_line() {
        let e = parse_config("p = 0.5").unwrap_err().to_string();
        assert!(e.contains("p must exceed 1") && e.contains("line 1"), "{e}");
    }

    #[test]
    fn empty_file_lists_required_keys() {
        let e = parse_config("").unwrap_err().to_string();
        assert!(e.contains("problem.N") && e.contains("problem.p"), "{e}");
    }

    #[test]
    fn unknown_key_and_section() {
        let e = parse_config("[problem]\nN = 1\np = 3\ncolour = red").unwrap_err().to_string();
        assert!(e.contains("line 4") && e.contains("colour"), "{e}");
        let e = parse_config("[nope]\n").unwrap_err().to_string();
        assert!(e.contains("line 1") && e.contains("[nope]"), "{e}");
    }

    #[test]
    fn malformed_values() {
        let e = parse_config("[problem]\nN = 1\np = 3\n[solver]\nnodes = many").unwrap_err().to_string();
        assert!(e.contains("line 5") && e.contains("nodes"), "{e}");
        let e = parse_config("[problem]\nN = 1\np = three").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = parse_config("[problem\nN = 1").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
        let e = parse_config("N = 1\nN = 2\np = 3").unwrap_err().to_string();
        assert!(e.contains("duplicate") && e.contains("line 2"), "{e}");
    }

    #[test]
    fn overrides_replace_file_values() {
        let c = parse_config_with(
            "[problem]\nN = 1\np = 3\n[solver]\nnodes = 11",
            &["solver.nodes=21".into(), "run.seed = 9".into()],
            None,
        )
        .unwrap();
        assert_eq!(c.solver.nodes, 21);
        assert_eq!(c.seed, 9);
        let e = parse_config_with("N = 1\np = 3", &["solver.bogus=1".into()], None).unwrap_err().to_string();
        assert!(e.contains("--set #1"), "{e}");
    }

    #[test]
    fn scenario_from_file_or_command_line() {
        let c = parse_config("[run]\nscenario = profile\n[problem]\nN = 3\np = 7").unwrap();
        assert_eq!(c.scenario, Some(Scenario::Profile));
        let c = parse_config_with("[run]\nscenario = profile\n[problem]\nN = 3\np = 7", &[], Some(Scenario::Diagnose))
            .unwrap();
        assert_eq!(c.scenario, Some(Scenario::Diagnose));
    }

    #[test]
    fn scenario_specific_requirements() {
        assert!(parse_config_with("", &[], Some(Scenario::Semigroup)).is_ok());
        let e = parse_config_with("N = 2", &[], Some(Scenario::Semigroup)).unwrap_err().to_string();
        assert!(e.contains("one-dimensional"), "{e}");
        let b = parse_config_with("N = 4", &[], Some(Scenario::Bubble)).unwrap();
        assert_eq!(b.dim, Some(4));
        assert!(parse_config_with("N = 4\np = 2", &[], Some(Scenario::Bubble)).is_err());
        assert!(parse_config_with("N = 2", &[], Some(Scenario::Bubble)).is_err());
        let e = parse_config_with("", &[], Some(Scenario::Bubble)).unwrap_err().to_string();
        assert!(e.contains("problem.N") && !e.contains("problem.p"), "{e}");
    }

    #[test]
    fn echo_round_trips() {
        let c = parse_config_with(
            "# a comment\n[problem]\nN = 1   # inline\np = 3\nboundary = \"neumann\"\n[diagnose]\nscales = 0.25, 4",
            &["semigroup.functions=7".into()],
            Some(Scenario::Diagnose),
        )
        .unwrap();
        let again = parse_config(&c.echo()).unwrap();
        assert_eq!(again.echo(), c.echo());
        assert_eq!(again.scenario, Some(Scenario::Diagnose));
        assert_eq!(again.problem, c.problem);
        assert_eq!(again.diagnose, c.diagnose);
        assert_eq!(again.semigroup.functions, 7);
        assert_eq!(again.problem.unwrap().boundary, Boundary::NeumannZero);
    }

    #[test]
    fn problem_validation_is_reported() {
        let e = parse_config("N = 2\np = 3\ngeometry = interval").unwrap_err().to_string();
        assert!(e.contains("interval geometry requires N = 1"), "{e}");
        let e = parse_config("N = 1\np = 3\n[solver]\nrecord_growth = 0.5").unwrap_err().to_string();
        assert!(e.contains("record_growth") && e.contains("line 4"), "{e}");
    }
}
