use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use bulb::{parse_config_with, read_snapshot, read_snapshot_file, write_snapshot, FrameKind, SnapshotFile};
use bulb_core::core::{build_grid, Boundary, Geometry, InitialData, ProblemSpec, Snapshot};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

fn bulb(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bulb"))
        .args(args)
        .env_remove("BULB_OUT_DIR")
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

/// A snapshot holding `values` on the natural grid of the given problem.
fn table_snapshot(dim: usize, p: f64, geometry: Geometry, boundary: Boundary, time: f64, values: Vec<f64>) -> Snapshot {
    let mut spec = ProblemSpec { dim, p, geometry, boundary, initial: InitialData::Constant { value: 0.0 } };
    let grid = build_grid(&spec, values.len()).unwrap();
    spec.initial = InitialData::Table { radii: grid.nodes().to_vec(), values: values.clone() };
    spec.validate().unwrap();
    Snapshot::new(grid, values, time, Arc::new(spec), 0).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bubble_run_passes_and_reports_the_critical_norm() {
    let tmp = TempDir::new().unwrap();
    let o = bulb(&["bubble", "--set", "problem.N=4", "--out-dir", "out", "--format", "json", "--svg"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("critical_norm: pass"));
    let out = tmp.path().join("out");
    assert!(out.join("bubble.svg").exists());
    assert!(!out.join("bubble.csv").exists());
    let json: Value = serde_json::from_slice(&fs::read(out.join("bubble.json")).unwrap()).unwrap();
    assert_eq!(json["scenario"], "bubble");
    assert_eq!(json["verdicts"]["residual"], "pass");
    let expected = 64.0 * std::f64::consts::PI.powi(2) / 6.0;
    for v in json["results"]["critical_norm"].as_array().unwrap() {
        assert!((v.as_f64().unwrap() / expected - 1.0).abs() < 1e-6);
    }
    assert_eq!(json["derived_exponents"]["p_sobolev"], 3.0);
}

#[test]
fn failed_check_exits_with_two() {
    let tmp = TempDir::new().unwrap();
    let o =
        bulb(&["bubble", "--set", "problem.N=3", "--set", "bubble.norm_tolerance=1e-30", "--out-dir", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("critical_norm: fail"));
    let json: Value = serde_json::from_slice(&fs::read(tmp.path().join("o/bubble.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], false);
}

#[test]
fn configuration_errors_exit_with_one() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("empty.ini"), "").unwrap();
    let o = bulb(&["run", "--config", "empty.ini"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing required keys: problem.N, problem.p"), "{}", stderr(&o));

    fs::write(tmp.path().join("bad.ini"), "[problem]\nN = 1\np = 3\n\n[solver]\nnodez = 5\n").unwrap();
    let o = bulb(&["simulate", "--config", "bad.ini"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 6"), "{}", stderr(&o));

    let o = bulb(&["simulate", "--set", "problem.N=1", "--set", "problem.p=0.5"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--set #2"), "{}", stderr(&o));

    let o = bulb(&["inspect", "missing.bulb"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let o = bulb(&["--no-such-flag"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(!tmp.path().join("bulb-out").exists());
}

#[test]
fn output_directory_comes_from_the_environment() {
    let tmp = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_bulb"))
        .args(["bubble", "--set", "problem.N=5", "--format", "csv"])
        .env("BULB_OUT_DIR", "from-env")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("from-env/bubble.csv")).unwrap();
    assert!(csv.starts_with("lambda,critical_norm,closed_form,relative_error,residual_scaled\n"));
    assert_eq!(csv.lines().count(), 4);
    // the echoed configuration reproduces the run
    let echo = fs::read_to_string(tmp.path().join("from-env/bubble.ini")).unwrap();
    let again = parse_config_with(&echo, &[], None).unwrap();
    assert_eq!(again.echo(), echo);
}

#[test]
fn simulate_writes_an_inspectable_snapshot() {
    let tmp = TempDir::new().unwrap();
    let config = "[run]\nscenario = simulate\n[problem]\nN = 1\np = 2\ngeometry = interval\nradius = 1\n\
                  boundary = neumann\ninitial = constant\nvalue = 1\n[solver]\nnodes = 11\node_safety = 0.002\n\
                  sup_norm_cap = 1e6\n";
    fs::write(tmp.path().join("ode.ini"), config).unwrap();
    let o = bulb(&["run", "--config", "ode.ini", "--out-dir", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let snap = read_snapshot(&tmp.path().join("o/simulate.final.bulb")).unwrap();
    assert!(snap.sup_norm() >= 1e6);
    let exact = 1.0 / (1.0 - snap.time);
    assert!((snap.sup_norm() / exact - 1.0).abs() < 1e-4);

    let o = bulb(&["inspect", "o/simulate.final.bulb"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("geometry   interval (0)") && text.contains("boundary   neumann (1)"), "{text}");
    assert!(text.contains("nodes      11"));
}

#[test]
fn random_snapshots_round_trip_through_files() {
    let tmp = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..20 {
        let n = rng.random_range(2..400usize);
        let mut values: Vec<f64> = (0..n).map(|_| f64::from_bits(rng.random::<u64>() >> 2)).collect();
        let (geometry, dim) = match i % 3 {
            0 => (Geometry::Interval { half_length: rng.random_range(0.5..8.0) }, 1),
            1 => (Geometry::Ball { radius: rng.random_range(0.5..8.0) }, rng.random_range(1..6)),
            _ => (Geometry::WholeSpace { radius: rng.random_range(0.5..8.0) }, rng.random_range(1..6)),
        };
        let boundary = match geometry {
            Geometry::WholeSpace { .. } => Boundary::DirichletZero,
            _ => [Boundary::DirichletZero, Boundary::NeumannZero][i % 2],
        };
        if boundary == Boundary::DirichletZero {
            values[n - 1] = 0.0;
        }
        let p = rng.random_range(1.1..9.0);
        let snap = table_snapshot(dim, p, geometry, boundary, rng.random_range(0.0..2.0), values);
        let path = tmp.path().join(format!("s{i}.bulb"));
        write_snapshot(&snap, &path).unwrap();
        let back = read_snapshot(&path).unwrap();
        assert_eq!(back.time.to_bits(), snap.time.to_bits());
        assert_eq!(back.spec.p.to_bits(), p.to_bits());
        assert_eq!(back.spec.geometry, snap.spec.geometry);
        assert_eq!(back.spec.boundary, snap.spec.boundary);
        assert!(back.values.iter().zip(&snap.values).all(|(a, b)| a.to_bits() == b.to_bits()));
        let file = read_snapshot_file(&path).unwrap();
        assert_eq!(file.kind, FrameKind::Physical);
        assert_eq!(file.encode(), fs::read(&path).unwrap());
        assert_eq!(SnapshotFile::from_snapshot(&back).encode(), file.encode());
    }
}

#[test]
fn corrupted_snapshots_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("s.bulb");
    let snap = table_snapshot(
        1,
        3.0,
        Geometry::Interval { half_length: 1.0 },
        Boundary::DirichletZero,
        0.0,
        vec![1.0, 0.5, 0.0],
    );
    write_snapshot(&snap, &path).unwrap();
    let bytes = fs::read(&path).unwrap();
    fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    assert!(read_snapshot(&path).unwrap_err().to_string().contains("length mismatch"));
    let mut bad = bytes.clone();
    bad[0] = b'X';
    fs::write(&path, &bad).unwrap();
    assert!(read_snapshot(&path).is_err());
}

#[test]
fn identical_seed_gives_identical_semigroup_tables() {
    let tmp = TempDir::new().unwrap();
    let args = |dir: &'static str, seed: &'static str| {
        vec![
            "semigroup",
            "--set",
            "semigroup.functions=3",
            "--set",
            "semigroup.scan_s=0.5, 5",
            "--set",
            "semigroup.y_nodes=801",
            "--seed",
            seed,
            "--out-dir",
            dir,
        ]
    };
    for (dir, seed) in [("a", "3"), ("b", "3"), ("c", "4")] {
        let o = bulb(&args(dir, seed), tmp.path());
        assert!(matches!(o.status.code(), Some(0 | 2)), "{}", stderr(&o));
    }
    let read = |d: &str| fs::read(tmp.path().join(d).join("semigroup.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    let json = |d: &str| {
        let mut v: Value =
            serde_json::from_slice(&fs::read(tmp.path().join(d).join("semigroup.json")).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    assert_eq!(json("a"), json("b"));
    assert_eq!(json("a")["inputs"]["run"]["seed"], 3);
}
