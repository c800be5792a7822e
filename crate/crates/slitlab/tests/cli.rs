//! End-to-end checks of the binary: exit codes, artifact round trips, and
//! byte reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slitlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn family_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("dim6.json");
    let report = dir.path().join("report.json");

    let made = run(&[
        "family",
        "dim6",
        "--p",
        "0.25",
        "--theta",
        "0",
        "--out",
        instance.to_str().unwrap(),
    ]);
    assert_eq!(code(&made), 0, "{made:?}");

    let verified = run(&[
        "verify",
        "--in",
        instance.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&verified), 0, "{verified:?}");
    let text = stdout(&verified);
    for name in ["C1", "C2", "C3", "C4", "C5"] {
        assert!(
            text.contains(&format!("{name}: pass")),
            "missing {name} in {text}"
        );
    }
    assert!(text.contains("verdict: pass"));

    let report_json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report_json["verdict"], serde_json::Value::Bool(true));
    assert!(report_json["C1"]["residual"].as_f64().unwrap() > 0.5);
}

#[test]
fn verify_fails_with_exit_one_on_broken_projector() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("dim6.json");
    run(&["family", "dim6", "--out", instance.to_str().unwrap()]);

    let mut value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&instance).unwrap()).unwrap();
    // scale one matrix entry: still parses, no longer idempotent
    value["k"]["entries"][0][0] = serde_json::json!(0.9);
    fs::write(&instance, serde_json::to_string(&value).unwrap()).unwrap();

    let verified = run(&["verify", "--in", instance.to_str().unwrap()]);
    assert_eq!(code(&verified), 1);
}

#[test]
fn malformed_input_is_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{\"schema_version\": 1, \"layout\":").unwrap();
    let out = run(&["verify", "--in", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    let missing = run(&[
        "verify",
        "--in",
        dir.path().join("nope.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn strict_mode_rejects_non_normalized_state() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("dim6.json");
    run(&["family", "dim6", "--out", instance.to_str().unwrap()]);
    let mut value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&instance).unwrap()).unwrap();
    let entry = value["psi"]["x"][0][1][0].as_f64().unwrap();
    value["psi"]["x"][0][1][0] = serde_json::json!(entry * 3.0);
    fs::write(&instance, serde_json::to_string(&value).unwrap()).unwrap();

    let strict = run(&["verify", "--in", instance.to_str().unwrap(), "--strict"]);
    assert_eq!(code(&strict), 2);
    // non-strict renormalizes (and then fails verification instead of parsing)
    let loose = run(&["verify", "--in", instance.to_str().unwrap()]);
    assert_eq!(code(&loose), 1);
}

#[test]
fn dim2_search_reports_no_solutions() {
    let out = run(&["search", "--dim1", "2", "--trials", "200", "--seed", "42"]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("exact argument: infeasible"));
    assert!(text.contains("200 random states, 0 solutions"));
}

#[test]
fn search_from_instance_finds_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("dim6.json");
    let report = dir.path().join("search.json");
    run(&["family", "dim6", "--out", instance.to_str().unwrap()]);
    let out = run(&[
        "search",
        "--in",
        instance.to_str().unwrap(),
        "--rank-target",
        "3",
        "--restarts",
        "16",
        "--seed",
        "5",
        "--require-solution",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["subspace_dim"], serde_json::json!(4));
    assert!(!json["solutions"].as_array().unwrap().is_empty());
}

#[test]
fn simulate_eraser_selection_controls_cross_term() {
    let dir = tempfile::tempdir().unwrap();
    let bright = dir.path().join("bright.csv");
    let dark = dir.path().join("dark.csv");

    let out = run(&[
        "simulate",
        "--family",
        "eraser",
        "--select",
        "Tplus",
        "--screen",
        "dft",
        "--out",
        bright.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let out = run(&[
        "simulate",
        "--family",
        "eraser",
        "--select",
        "T",
        "--screen",
        "dft",
        "--out",
        dark.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let cross_column = |path: &Path| -> Vec<f64> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .skip(1)
            .map(|line| line.split(',').nth(3).unwrap().parse::<f64>().unwrap())
            .collect()
    };
    assert!(cross_column(&bright).iter().any(|v| v.abs() > 1e-3));
    assert!(cross_column(&dark).iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn simulate_rejects_tplus_outside_eraser() {
    let out = run(&[
        "simulate",
        "--family",
        "dim6",
        "--select",
        "Tplus",
        "--out",
        "/dev/null",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn outputs_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    run(&[
        "family",
        "dim4-sym",
        "--q",
        "0.3",
        "--theta",
        "1.1",
        "--out",
        a.to_str().unwrap(),
    ]);
    run(&[
        "family",
        "dim4-sym",
        "--q",
        "0.3",
        "--theta",
        "1.1",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let s1 = dir.path().join("s1.csv");
    let s2 = dir.path().join("s2.csv");
    for path in [&s1, &s2] {
        let out = run(&[
            "sample",
            "--family",
            "ideal",
            "--n",
            "20000",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{out:?}");
    }
    assert_eq!(fs::read(&s1).unwrap(), fs::read(&s2).unwrap());
}

#[test]
fn sample_writes_joint_counts_with_labels() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("runs.csv");
    let out = run(&[
        "sample",
        "--family",
        "ideal",
        "--n",
        "5000",
        "--seed",
        "3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("cavity A"));
    assert!(text.contains("slit1"));
    let content = fs::read_to_string(&csv).unwrap();
    let mut lines = content.lines();
    assert_eq!(lines.next().unwrap(), "cavity,bin,probability,count");
    // 4 cavities x 6 bins
    assert_eq!(lines.count(), 24);
    let total: u64 = content
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 5000);
}

#[test]
fn screen_check_flags_degenerate_screens() {
    let ok = run(&["screen-check", "--dim1", "6"]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("screen ok"));

    let degenerate = run(&["screen-check", "--dim1", "4", "--screen", "identity"]);
    assert_eq!(code(&degenerate), 1);
}

#[test]
fn every_committed_fixture_verifies() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut seen = 0usize;
    for entry in fs::read_dir(&fixtures).expect("fixtures directory") {
        let path = entry.unwrap().path();
        if path.extension().map(|e| e == "json").unwrap_or(false) {
            let out = run(&["verify", "--in", path.to_str().unwrap()]);
            assert_eq!(code(&out), 0, "fixture {} failed: {out:?}", path.display());
            seen += 1;
        }
    }
    assert!(
        seen >= 6,
        "expected the committed fixture set, found {seen}"
    );
}

#[test]
fn version_prints_schema() {
    let out = run(&["--version"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("(schema 1)"));
}

#[test]
fn tolerance_env_override_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("dim6.json");
    run(&["family", "dim6", "--out", instance.to_str().unwrap()]);
    // an absurdly tight equality tolerance makes exact conditions still pass
    // (their residuals are zero) but a bogus one breaks parsing
    let out = bin()
        .args(["verify", "--in", instance.to_str().unwrap()])
        .env("SLITLAB_TOL", "1e-14")
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 0);
    let bad = bin()
        .args(["verify", "--in", instance.to_str().unwrap()])
        .env("SLITLAB_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad.status.code().unwrap(), 2);
}
