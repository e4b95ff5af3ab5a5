use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lielorentz"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn identity_reduction_grid() {
    let out = TempDir::new().unwrap();
    let o = run(&["build-eval"], &config("identity_a.toml"), out.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&out.path().join("field.csv"));
    assert_eq!(rows.len(), 4);
    for r in rows {
        let (x, y) = (num(&r[0]), num(&r[1]));
        assert!((num(&r[3]) - 0.2 * y).abs() < 1e-12);
        assert!((num(&r[4]) - 0.3).abs() < 1e-12);
        assert!((num(&r[5]) - (1.0 + 0.1 * x)).abs() < 1e-12);
        assert_eq!(r[6], "");
    }
}

#[test]
fn case_d_uniform_magnetic_column() {
    let out = TempDir::new().unwrap();
    let o = run(&["build-eval"], &config("case_d_uniform.toml"), out.path());
    assert_eq!(code(&o), 0);
    let rows = rows(&out.path().join("field.csv"));
    assert_eq!(rows.len(), 27);
    for r in rows {
        assert_eq!(num(&r[5]), 1.0);
    }
}

#[test]
fn malformed_expression_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bad.toml",
        "[case]\nkind = \"A\"\ninterval = [0, 1]\n[functions]\nrho = \"1 + *t\"\n[grid]\nx = [0, 1, 2]\ny = [0, 1, 2]\n",
    );
    let o = run(&["build-eval"], &cfg, dir.path());
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("functions.rho"), "{err}");
}

#[test]
fn missing_config_flag_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_lielorentz"))
        .arg("check")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_lielorentz"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn symmetric_family_passes_check() {
    let out = TempDir::new().unwrap();
    let o = run(&["check"], &config("round_trip_a.toml"), out.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(out.path().join("residuals.csv").exists());
    assert!(out.path().join("summary.txt").exists());
}

#[test]
fn corrupted_e2_fails_check() {
    let dir = TempDir::new().unwrap();
    let base = std::fs::read_to_string(config("round_trip_a.toml")).unwrap();
    let cfg = write_config(&dir, "corrupt.toml", &format!("{base}\n[check]\ncorrupt_e2 = \"x\"\n"));
    let o = run(&["check"], &cfg, dir.path());
    assert_eq!(code(&o), 1);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("R_E2: scaled"), "{text}");
}

#[test]
fn orbit_scaling_is_reported() {
    let out = TempDir::new().unwrap();
    let o = run(&["check", "--seed", "3"], &config("swirl_b.toml"), out.path());
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{text}");
    assert!(text.contains("10 of 10 states"), "{text}");
    for r in rows(&out.path().join("orbit.csv")) {
        let ratio = num(&r[7]);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
}

#[test]
fn gyro_orbit_csv_matches_closed_form() {
    let out = TempDir::new().unwrap();
    let o = run(&["integrate"], &config("gyro.toml"), out.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&out.path().join("lab.csv"));
    assert_eq!(rows.len(), 6285);
    let last = rows.last().unwrap();
    assert_eq!(num(&last[0]), TAU);
    for r in &rows {
        let t = num(&r[0]);
        assert!((num(&r[1]) - t.sin()).abs() < 1e-8);
        assert!((num(&r[2]) - (t.cos() - 1.0)).abs() < 1e-8);
    }
    let plot = std::fs::read_to_string(out.path().join("lab_q1_q2.dat")).unwrap();
    assert_eq!(plot.lines().count(), 6285);
    assert_eq!(plot.lines().next().unwrap().split(' ').count(), 2);
}

#[test]
fn zero_field_gives_straight_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "free.toml",
        "[case]\nkind = \"A\"\ninterval = [0, 3]\n[functions]\nrho = \"1\"\n\
         [integrate]\nt0 = 0\nt1 = 2\nstep = 0.01\ninitial = [1, 2, 0.5, -0.25]\n",
    );
    let o = run(&["integrate"], &cfg, dir.path());
    assert_eq!(code(&o), 0);
    for r in rows(&dir.path().join("lab.csv")) {
        let t = num(&r[0]);
        assert!((num(&r[1]) - (1.0 + 0.5 * t)).abs() < 1e-12);
        assert!((num(&r[2]) - (2.0 - 0.25 * t)).abs() < 1e-12);
    }
}

#[test]
fn both_frames_agree() {
    let out = TempDir::new().unwrap();
    let o = run(&["integrate"], &config("round_trip_a.toml"), out.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.path().join("lab.csv").exists() && out.path().join("canonical.csv").exists());
    let worst = rows(&out.path().join("frames.csv"))
        .iter()
        .map(|r| num(&r[5]))
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn outputs_are_bit_identical_across_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for out in [&a, &b] {
        assert_eq!(
            code(&run(&["check", "--workers", "3"], &config("swirl_b.toml"), out.path())),
            0
        );
    }
    for name in ["residuals.csv", "orbit.csv", "summary.txt"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn complete_faraday_tables() {
    let out = TempDir::new().unwrap();
    let o = run(&["complete-faraday"], &config("round_trip_a.toml"), out.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&out.path().join("completed.csv"));
    assert_eq!(rows.len(), 9);
    // the completed component vanishes on the xb = 0 line
    for r in rows.iter().filter(|r| num(&r[0]) == 0.0) {
        assert!(num(&r[4]).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn canon_points_and_trajectory() {
    let out = TempDir::new().unwrap();
    let o = run(&["canon"], &config("points_c.toml"), out.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&out.path().join("canon.csv"));
    assert_eq!(rows.len(), 2);
    let r = &rows[0];
    let (x, y, t) = (num(&r[0]), num(&r[1]), num(&r[2]));
    let (a1, a2) = (0.3 * t, 1.0 + 0.2 * t.sin());
    assert!((num(&r[3]) - (x - a1 * y / a2)).abs() < 1e-12);
    assert_eq!(num(&r[4]), t);
    assert!((num(&r[5]) - y / a2).abs() < 1e-12);

    // lab trajectory from `integrate`, then transformed
    let dir = TempDir::new().unwrap();
    let lab = run(&["integrate"], &config("round_trip_a.toml"), dir.path());
    assert_eq!(code(&lab), 0);
    let base = std::fs::read_to_string(config("round_trip_a.toml")).unwrap();
    let cfg = write_config(
        &dir,
        "canon.toml",
        &format!("{base}\n[canon]\ntrajectory = \"lab.csv\"\n"),
    );
    let o = run(&["canon"], &cfg, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let moved = std::fs::read(dir.path().join("canon_trajectory.csv")).unwrap();
    let direct = std::fs::read(dir.path().join("canonical.csv")).unwrap();
    assert_eq!(moved, direct);
}

#[test]
fn normalize_is_idempotent() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_lielorentz"))
        .args(["normalize", "--config"])
        .arg(config("swirl_b.toml"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let once = String::from_utf8(o.stdout).unwrap();
    let cfg = write_config(&dir, "norm.toml", &once);
    let o = Command::new(env!("CARGO_BIN_EXE_lielorentz"))
        .args(["normalize", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), once);
}
