//! End-to-end tests for the `dualpair` binary: documents in, documents/CSV
//! out, with the exit-code contract (0 success, 1 verification failure,
//! 2 usage error, 3 numerical failure).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dualpair"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_expect(args: &[&str], code: i32) -> Output {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "args {args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write_file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn coords(doc: &Value) -> &Value {
    &doc["coordinates"]
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|e| e.as_f64().unwrap())
        .collect()
}

fn complexes(v: &Value) -> Vec<(f64, f64)> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|pair| {
            let p = floats(pair);
            (p[0], p[1])
        })
        .collect()
}

fn complex1(v: &Value) -> (f64, f64) {
    let p = floats(v);
    (p[0], p[1])
}

/// The two-particle worked point: angles ±π/4, momenta zero, coupling 1.
fn worked_p_doc() -> String {
    r#"{
      "coordinates": {"p": [0.0, 0.0], "q": [0.7853981633974483, -0.7853981633974483]},
      "coupling": {"n": 2, "x": 1.0},
      "model": "P",
      "schemaVersion": 1
    }"#
    .to_string()
}

fn p2i_doc() -> String {
    r#"{
      "coordinates": {"delta": [0.9, 1.2], "gamma": [0.3, -0.4], "u0": 0.3, "w0": -0.2},
      "coupling": {"n": 3, "x": 1.0},
      "model": "P2-I",
      "schemaVersion": 1
    }"#
    .to_string()
}

#[test]
fn transform_worked_point_to_dual_actions() {
    let dir = TempDir::new().unwrap();
    let input = write_file(&dir, "p.json", &worked_p_doc());
    let out = dir.path().join("phat.json");
    run_expect(
        &[
            "transform",
            "--in",
            input.to_str().unwrap(),
            "--to",
            "Phat",
            "--out",
            out.to_str().unwrap(),
        ],
        0,
    );
    let doc = read_json(&out);
    assert_eq!(doc["model"], "Phat");
    let phat = floats(&coords(&doc)["phat"]);
    let expected = 0.5_f64.sqrt();
    assert!(
        (phat[0] - expected).abs() < 1e-9 && (phat[1] + expected).abs() < 1e-9,
        "phat = {phat:?}"
    );
}

#[test]
fn transform_roundtrip_returns_input_coordinates() {
    let dir = TempDir::new().unwrap();
    let input = write_file(
        &dir,
        "phatc.json",
        r#"{
          "coordinates": {"bigZ": [0.9, -0.4], "z": [[0.8, 0.3]]},
          "coupling": {"n": 2, "x": 1.0},
          "model": "PhatC",
          "schemaVersion": 1
        }"#,
    );
    let to_p = dir.path().join("p.json");
    let back = dir.path().join("back.json");
    run_expect(
        &[
            "transform",
            "--in",
            input.to_str().unwrap(),
            "--to",
            "P",
            "--out",
            to_p.to_str().unwrap(),
        ],
        0,
    );
    run_expect(
        &[
            "transform",
            "--in",
            to_p.to_str().unwrap(),
            "--to",
            "PhatC",
            "--out",
            back.to_str().unwrap(),
        ],
        0,
    );
    let doc = read_json(&back);
    let z = complexes(&coords(&doc)["z"]);
    let big_z = complex1(&coords(&doc)["bigZ"]);
    assert!((z[0].0 - 0.8).abs() < 1e-8 && (z[0].1 - 0.3).abs() < 1e-8, "z = {z:?}");
    assert!(
        (big_z.0 - 0.9).abs() < 1e-8 && (big_z.1 + 0.4).abs() < 1e-8,
        "bigZ = {big_z:?}"
    );
}

#[test]
fn transform_direct_path_matches_chained_path() {
    let dir = TempDir::new().unwrap();
    let input = write_file(&dir, "p2i.json", &p2i_doc());
    let direct = dir.path().join("direct.json");
    run_expect(
        &[
            "transform",
            "--in",
            input.to_str().unwrap(),
            "--to",
            "PhatC",
            "--out",
            direct.to_str().unwrap(),
        ],
        0,
    );
    // The same target reached one covering level at a time.
    let mut current = input.clone();
    for (i, target) in ["P1-I", "P", "PhatC"].iter().enumerate() {
        let next = dir.path().join(format!("step{i}.json"));
        run_expect(
            &[
                "transform",
                "--in",
                current.to_str().unwrap(),
                "--to",
                target,
                "--out",
                next.to_str().unwrap(),
            ],
            0,
        );
        current = next;
    }
    let a = read_json(&direct);
    let b = read_json(&current);
    let za = complexes(&coords(&a)["z"]);
    let zb = complexes(&coords(&b)["z"]);
    for (p, q) in za.iter().zip(zb.iter()) {
        assert!((p.0 - q.0).abs() < 1e-8 && (p.1 - q.1).abs() < 1e-8);
    }
    let big_a = complex1(&coords(&a)["bigZ"]);
    let big_b = complex1(&coords(&b)["bigZ"]);
    assert!((big_a.0 - big_b.0).abs() < 1e-8 && (big_a.1 - big_b.1).abs() < 1e-8);
}

#[test]
fn transform_refuses_covering_lifts() {
    let dir = TempDir::new().unwrap();
    let input = write_file(&dir, "p.json", &worked_p_doc());
    let out = run_expect(
        &["transform", "--in", input.to_str().unwrap(), "--to", "P1-I"],
        2,
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("no registered map path"));
}

#[test]
fn transform_rejects_off_chamber_document() {
    let dir = TempDir::new().unwrap();
    let input = write_file(
        &dir,
        "bad.json",
        r#"{
          "coordinates": {"phat": [0.2, -0.2], "qhat": [0.0, 0.0]},
          "coupling": {"n": 2, "x": 1.0},
          "model": "Phat",
          "schemaVersion": 1
        }"#,
    );
    run_expect(
        &["transform", "--in", input.to_str().unwrap(), "--to", "PhatC"],
        3,
    );
}

#[test]
fn canonical_form_is_save_stable() {
    let dir = TempDir::new().unwrap();
    let input = write_file(&dir, "p.json", &worked_p_doc());
    let first = dir.path().join("canonical.json");
    let second = dir.path().join("again.json");
    // Identity transform canonicalizes the hand-written document …
    run_expect(
        &[
            "transform",
            "--in",
            input.to_str().unwrap(),
            "--to",
            "P",
            "--out",
            first.to_str().unwrap(),
        ],
        0,
    );
    // … and a second pass must reproduce the bytes exactly.
    run_expect(
        &[
            "transform",
            "--in",
            first.to_str().unwrap(),
            "--to",
            "P",
            "--out",
            second.to_str().unwrap(),
        ],
        0,
    );
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap()
    );
}

#[test]
fn evolve_rigid_rotation_is_monotone() {
    let dir = TempDir::new().unwrap();
    let input = write_file(&dir, "p.json", &worked_p_doc());
    let csv = dir.path().join("traj.csv");
    run_expect(
        &[
            "evolve",
            "--in",
            input.to_str().unwrap(),
            "--family",
            "h",
            "-k",
            "1",
            "-t",
            "1.5",
            "--samples",
            "6",
            "--out",
            csv.to_str().unwrap(),
        ],
        0,
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,q_1,q_2,p_1,p_2,h_1,h_2");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    for pair in rows.windows(2) {
        // The first invariant generates a rigid rotation of all angles.
        assert!(pair[1][1] > pair[0][1], "q_1 must increase");
        assert!(pair[1][2] > pair[0][2], "q_2 must increase");
    }
    for row in &rows {
        // Invariant columns stay at their initial values.
        assert!((row[5] - rows[0][5]).abs() < 1e-9);
        assert!((row[6] - rows[0][6]).abs() < 1e-9);
    }
}

#[test]
fn evolve_zero_time_writes_single_row() {
    let dir = TempDir::new().unwrap();
    let input = write_file(&dir, "p.json", &worked_p_doc());
    let csv = dir.path().join("traj.csv");
    run_expect(
        &[
            "evolve",
            "--in",
            input.to_str().unwrap(),
            "--family",
            "h",
            "-k",
            "2",
            "-t",
            "0",
            "--samples",
            "1",
            "--out",
            csv.to_str().unwrap(),
        ],
        0,
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 2, "header plus one row:\n{text}");
}

#[test]
fn evolve_dual_family_runs_on_completed_points() {
    let dir = TempDir::new().unwrap();
    let input = write_file(
        &dir,
        "phatc.json",
        r#"{
          "coordinates": {"bigZ": [0.9, -0.4], "z": [[0.8, 0.3]]},
          "coupling": {"n": 2, "x": 1.0},
          "model": "PhatC",
          "schemaVersion": 1
        }"#,
    );
    let csv = dir.path().join("traj.csv");
    run_expect(
        &[
            "evolve",
            "--in",
            input.to_str().unwrap(),
            "--family",
            "hhat",
            "-k",
            "-1",
            "-t",
            "0.4",
            "--samples",
            "5",
            "--out",
            csv.to_str().unwrap(),
        ],
        0,
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,Z_re,Z_im,z_1_re,z_1_im,hhat_1,hhat_2,hhat_-1,hhat_-2"
    );
    assert_eq!(text.lines().count(), 6);
    // Mismatched family and model is a usage error.
    run_expect(
        &[
            "evolve",
            "--in",
            input.to_str().unwrap(),
            "--family",
            "h",
            "-k",
            "1",
            "-t",
            "1",
            "--out",
            csv.to_str().unwrap(),
        ],
        2,
    );
}

#[test]
fn verify_suite_is_reproducible_and_exits_clean() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("r1.json");
    let second = dir.path().join("r2.json");
    for path in [&first, &second] {
        let out = run_expect(
            &[
                "verify",
                "--suite",
                "identities",
                "--seed",
                "7",
                "--out",
                path.to_str().unwrap(),
            ],
            0,
        );
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains("identity-sum-rule"), "{stdout}");
        assert!(stdout.contains("pass"), "{stdout}");
    }
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap(),
        "same suite and seed must produce identical reports"
    );
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    let out = run_expect(&["verify", "--suite", "nonsense"], 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn verify_tolerance_override_changes_the_verdict() {
    // The deck-quotient residual sits near 1e-15: an impossible bound must
    // turn the run into a verification failure (exit 1), a loose one must
    // keep it green.
    run_expect(
        &["verify", "--suite", "deck-quotient", "--seed", "3", "--tol", "1e-30"],
        1,
    );
    run_expect(
        &["verify", "--suite", "deck-quotient", "--seed", "3", "--tol", "0.5"],
        0,
    );
}

#[test]
fn scan_hits_the_closed_form_value() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("scan.csv");
    run_expect(
        &[
            "scan",
            "--coupling",
            "2,1.0",
            "--grid",
            "0.5,2.0,4",
            "--observable",
            "hrs",
            "--out",
            csv.to_str().unwrap(),
        ],
        0,
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gap,hrs");
    // Gaps 0.5, 1.0, 1.5, 2.0; the first two fall outside the open chamber
    // (1.0 sits exactly on the wall) and are dropped.
    assert_eq!(lines.len(), 3, "{text}");
    let last: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - 2.0).abs() < 1e-15);
    assert!(
        (last[1] - 3.0_f64.sqrt()).abs() < 1e-12,
        "closed-form value at gap 2 must be sqrt(3), got {}",
        last[1]
    );
}

#[test]
fn scan_empty_grid_writes_header_only() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("scan.csv");
    run_expect(
        &[
            "scan",
            "--coupling",
            "3,1.0",
            "--grid",
            "1.5,3.0,0",
            "--observable",
            "mingap",
            "--out",
            csv.to_str().unwrap(),
        ],
        0,
    );
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "gap,mingap\n");
}

#[test]
fn scan_rejects_unknown_observable() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("scan.csv");
    run_expect(
        &[
            "scan",
            "--coupling",
            "2,1.0",
            "--grid",
            "1.5,2.0,2",
            "--observable",
            "energy",
            "--out",
            csv.to_str().unwrap(),
        ],
        2,
    );
}

#[test]
fn inspect_reports_invariant_diagnostics() {
    let dir = TempDir::new().unwrap();
    let input = write_file(&dir, "p2i.json", &p2i_doc());
    let out = run_expect(&["inspect", "--in", input.to_str().unwrap()], 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("model: P2-I"), "{text}");
    assert!(text.contains("coupling: n = 3"), "{text}");
    assert!(text.contains("moment residual:"), "{text}");
    assert!(text.contains("actions (spectrum of iJ, descending):"), "{text}");
    assert!(text.contains("satisfied: true"), "{text}");
    assert!(text.contains("h_1:"), "{text}");
    assert!(text.contains("hhat_-1:"), "{text}");
}
