use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bulb::{parse_config_with, read_snapshot_file, run_scenario, CliError, FrameKind, OutputFormat, Scenario};
use clap::{Parser, Subcommand, ValueEnum};

/// Numerical blow-up laboratory for u_t = Δu + |u|^{p-1} u.
///
/// Exit status: 0 when every check passes, 2 when a check fails, 1 on any error.
#[derive(Debug, Parser)]
#[command(name = "bulb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// INI configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one key, e.g. `--set solver.nodes=2001`; repeatable, applied in order.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,

    /// Output directory (overrides run.out_dir).
    #[arg(long, global = true, env = "BULB_OUT_DIR", value_name = "PATH")]
    out_dir: Option<PathBuf>,

    /// Which summaries to write.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Also write SVG plots.
    #[arg(long, global = true)]
    svg: bool,

    /// Seed for randomized test functions.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate to blow-up and extrapolate the blow-up time.
    Simulate,
    /// Follow the run in backward similarity variables.
    Similarity,
    /// Search for radial self-similar profiles by shooting.
    Profile,
    /// Contraction, smoothing and exactness checks of the weighted semigroup.
    Semigroup,
    /// Critical norm and residual of the rescaled bubble.
    Bubble,
    /// Rate, concentration, decay, far-field and scaling diagnostics of a run.
    Diagnose,
    /// Run the scenario named by run.scenario in the configuration.
    Run,
    /// Print the header of a snapshot file.
    Inspect { file: PathBuf },
}

fn scenario_of(command: &Command) -> Option<Scenario> {
    Some(match command {
        Command::Simulate => Scenario::Simulate,
        Command::Similarity => Scenario::Similarity,
        Command::Profile => Scenario::Profile,
        Command::Semigroup => Scenario::Semigroup,
        Command::Bubble => Scenario::Bubble,
        Command::Diagnose => Scenario::Diagnose,
        Command::Run | Command::Inspect { .. } => return None,
    })
}

fn inspect(file: &Path) -> Result<(), CliError> {
    let f = read_snapshot_file(file)?;
    let (lo, hi) = f.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    println!("kind       {:?}", f.kind);
    println!("N          {}", f.dim);
    println!("p          {}", f.p);
    let (geometry, boundary) = match f.kind {
        FrameKind::Physical => (
            ["interval", "ball", "whole-space"].get(usize::from(f.geometry)).copied().unwrap_or("unknown"),
            ["dirichlet", "neumann", "homogeneous"].get(usize::from(f.boundary)).copied().unwrap_or("unknown"),
        ),
        _ => (if f.geometry == 1 { "line grid" } else { "half-line grid" }, "none"),
    };
    println!("geometry   {geometry} ({})", f.geometry);
    println!("R          {}", f.radius);
    println!("boundary   {boundary} ({})", f.boundary);
    println!("t          {}", f.time);
    println!("nodes      {}", f.values.len());
    println!("range      [{lo}, {hi}]");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    if let Command::Inspect { file } = &cli.command {
        inspect(file)?;
        return Ok(0);
    }
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.clone(), source: e })?,
        None => String::new(),
    };
    let mut config = parse_config_with(&text, &cli.set, scenario_of(&cli.command))?;
    if let Some(dir) = &cli.out_dir {
        config.set_out_dir(dir.clone());
    }
    if let Some(f) = cli.format {
        config.set_format(match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
            Format::Both => OutputFormat::Both,
        });
    }
    if cli.svg {
        config.set_svg(true);
    }
    if let Some(seed) = cli.seed {
        config.set_seed(seed);
    }
    let outcome = run_scenario(&config)?;
    for c in &outcome.report.checks {
        println!(
            "{}: {} (measured {:.6e}, tolerance {:.6e})",
            c.name,
            if c.passed { "pass" } else { "fail" },
            c.measured,
            c.tolerance
        );
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    println!("{} finished in {:.2} s", outcome.report.scenario.as_str(), outcome.wall_time);
    Ok(outcome.exit_code() as u8)
}
