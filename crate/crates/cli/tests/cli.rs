//! End-to-end tests driving the compiled binary: exit codes, report
//! determinism, and the documented command flows.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_proxyaudit"));
    // Tests control the seed explicitly; keep the caller's environment out.
    cmd.env_remove("PROXYAUDIT_SEED");
    cmd
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Generates a scenario into `dir` and returns the CSV and schema paths.
fn simulate(dir: &Path, scenario: &str, n: usize, seed: &str) -> (PathBuf, PathBuf) {
    let out = run_in(
        dir,
        &["simulate", "--scenario", scenario, "--n", &n.to_string(), "--seed", seed],
    );
    assert_eq!(code(&out), 0, "simulate failed: {}", stderr(&out));
    (
        dir.join(format!("{scenario}.csv")),
        dir.join(format!("{scenario}.schema.json")),
    )
}

const LENDING_MODEL: &str = r#"{
  "id": "lending",
  "family": "ols",
  "outcome": "default",
  "predictors": ["name_change", "joint_accounts"]
}"#;

#[test]
fn simulate_is_deterministic_and_seed_aware() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();

    let (csv_a, schema_a) = simulate(a.path(), "marital_lending", 2000, "7");
    let (csv_b, _) = simulate(b.path(), "marital_lending", 2000, "7");
    let (csv_c, _) = simulate(c.path(), "marital_lending", 2000, "8");

    let bytes = |p: &PathBuf| std::fs::read(p).unwrap();
    assert_eq!(bytes(&csv_a), bytes(&csv_b), "same seed, same bytes");
    assert_ne!(bytes(&csv_a), bytes(&csv_c), "different seed, different draw");
    assert!(schema_a.exists());

    // The environment seed applies when no flag is given; the flag wins.
    let d = tempfile::tempdir().unwrap();
    let out = bin()
        .current_dir(d.path())
        .env("PROXYAUDIT_SEED", "7")
        .args(["simulate", "--scenario", "marital_lending", "--n", "2000"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        bytes(&csv_a),
        bytes(&d.path().join("marital_lending.csv")),
        "env seed must match the explicit flag"
    );

    let e = tempfile::tempdir().unwrap();
    let out = bin()
        .current_dir(e.path())
        .env("PROXYAUDIT_SEED", "7")
        .args(["simulate", "--scenario", "marital_lending", "--n", "2000", "--seed", "8"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(
        bytes(&csv_c),
        bytes(&e.path().join("marital_lending.csv")),
        "the flag must override the environment seed"
    );
}

#[test]
fn audit_flags_exact_proxies_and_reports_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, schema) = simulate(dir.path(), "marital_lending", 2000, "42");
    let model = dir.path().join("model.json");
    write(&model, LENDING_MODEL);

    let audit = |report: &str| -> Output {
        run_in(
            dir.path(),
            &[
                "audit",
                "--data",
                csv.to_str().unwrap(),
                "--schema",
                schema.to_str().unwrap(),
                "--model",
                model.to_str().unwrap(),
                "--protected",
                "marital_status",
                "--out",
                report,
            ],
        )
    };

    let out = audit("report_a.json");
    assert_eq!(code(&out), 1, "exact proxies must flag: {}", stderr(&out));

    let report = read_json(&dir.path().join("report_a.json"));
    let violations = report["verdicts"][0]["violations"].as_array().unwrap();
    assert!(!violations.is_empty(), "no violations in {report}");
    for field in ["tool_version", "generated_at", "command", "inputs", "proxy_reports"] {
        assert!(report.get(field).is_some(), "missing {field}");
    }
    assert_eq!(report["command"], "audit");
    assert_eq!(
        report["proxy_reports"][0]["semi_partial"]["marital_status"], 0.0,
        "exact proxies leave nothing for the attribute to add"
    );

    // Re-running yields the identical report apart from the timestamp.
    let out = audit("report_b.json");
    assert_eq!(code(&out), 1);
    let mut a = report;
    let mut b = read_json(&dir.path().join("report_b.json"));
    a.as_object_mut().unwrap().remove("generated_at");
    b.as_object_mut().unwrap().remove("generated_at");
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap(),
        "reports must be byte-identical outside the envelope timestamp"
    );
}

#[test]
fn commit_prints_a_stable_digest() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    write(&model, LENDING_MODEL);

    let first = run_in(dir.path(), &["commit", "--model", model.to_str().unwrap()]);
    let second = run_in(dir.path(), &["commit", "--model", model.to_str().unwrap()]);
    assert_eq!(code(&first), 0);
    assert_eq!(stdout(&first), stdout(&second), "digest must be reproducible");
    let digest = stdout(&first).trim().to_string();
    assert_eq!(digest.len(), 64, "SHA-256 hex: {digest}");

    // The digest covers the specification contents.
    let other = dir.path().join("other.json");
    write(&other, &LENDING_MODEL.replace("lending", "lending2"));
    let third = run_in(dir.path(), &["commit", "--model", other.to_str().unwrap()]);
    assert_ne!(stdout(&first), stdout(&third));
}

#[test]
fn compare_applies_the_capped_rule_to_measurement_files() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("five.json"),
        r#"{ "model_id": "five_proxies", "semi_partial": 0.04 }"#,
    );
    write(
        &dir.path().join("ten.json"),
        r#"{ "model_id": "ten_proxies", "semi_partial": 0.06 }"#,
    );
    write(&dir.path().join("policy.json"), r#"{ "cap": 0.05 }"#);

    let out = run_in(
        dir.path(),
        &[
            "compare",
            "--model", "five.json",
            "--model", "ten.json",
            "--policy", "policy.json",
            "--out", "verdict.json",
        ],
    );
    assert_eq!(code(&out), 1, "over-cap model must flag: {}", stderr(&out));
    let report = read_json(&dir.path().join("verdict.json"));
    let verdict = &report["verdicts"][0];
    assert_eq!(verdict["winner"], "five_proxies");
    assert_eq!(verdict["violations"][0]["subject"], "ten_proxies");

    // Both under the cap: differences are ignored.
    write(
        &dir.path().join("five.json"),
        r#"{ "model_id": "five_proxies", "semi_partial": 0.03 }"#,
    );
    write(
        &dir.path().join("ten.json"),
        r#"{ "model_id": "ten_proxies", "semi_partial": 0.04 }"#,
    );
    let out = run_in(
        dir.path(),
        &[
            "compare",
            "--model", "five.json",
            "--model", "ten.json",
            "--policy", "policy.json",
            "--out", "verdict.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(read_json(&dir.path().join("verdict.json"))["verdicts"][0]["winner"], "tie");
}

#[test]
fn compare_ranks_model_specs_on_a_lockbox() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, schema) = simulate(dir.path(), "segregated_school", 2000, "42");
    write(
        &dir.path().join("with_school.json"),
        r#"{ "id": "with-school", "family": "logistic", "outcome": "admit",
             "predictors": ["sat", "gpa", "high_school"] }"#,
    );
    write(
        &dir.path().join("scores_only.json"),
        r#"{ "id": "scores-only", "family": "logistic", "outcome": "admit",
             "predictors": ["sat", "gpa"] }"#,
    );
    write(
        &dir.path().join("policy.json"),
        r#"{ "band": 0.02, "protected": ["race"] }"#,
    );

    let out = run_in(
        dir.path(),
        &[
            "compare",
            "--data", csv.to_str().unwrap(),
            "--schema", schema.to_str().unwrap(),
            "--model", "with_school.json",
            "--model", "scores_only.json",
            "--policy", "policy.json",
            "--lockbox-fraction", "0.3",
            "--seed", "42",
            "--out", "verdict.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = read_json(&dir.path().join("verdict.json"));
    assert_eq!(
        report["verdicts"][0]["winner"], "scores-only",
        "the leaner, school-free model must win: {}",
        report["verdicts"][0]
    );
    assert!(report["lockbox"]["digest"].is_string());

    // Mixing a measurement file into a spec comparison is an input error.
    write(&dir.path().join("meas.json"), r#"{ "model_id": "m", "semi_partial": 0.01 }"#);
    let out = run_in(
        dir.path(),
        &[
            "compare",
            "--data", csv.to_str().unwrap(),
            "--schema", schema.to_str().unwrap(),
            "--model", "with_school.json",
            "--model", "meas.json",
            "--policy", "policy.json",
        ],
    );
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn compete_disqualifies_retrofitted_submissions() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, schema) = simulate(dir.path(), "segregated_school", 2000, "42");
    let subs = dir.path().join("subs");
    std::fs::create_dir(&subs).unwrap();

    let honest_spec = r#"{ "id": "scores-only", "family": "logistic", "outcome": "admit",
                           "predictors": ["sat", "gpa"] }"#;
    write(&subs.join("honest.json"), honest_spec);
    let out = run_in(
        dir.path(),
        &[
            "commit",
            "--model", subs.join("honest.json").to_str().unwrap(),
            "--out", subs.join("honest.commit").to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    // The cheat commits to one specification, then swaps in another.
    write(&subs.join("cheat.json"), &honest_spec.replace("scores-only", "original"));
    let out = run_in(
        dir.path(),
        &[
            "commit",
            "--model", subs.join("cheat.json").to_str().unwrap(),
            "--out", subs.join("cheat.commit").to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 0);
    write(
        &subs.join("cheat.json"),
        r#"{ "id": "retrofitted", "family": "logistic", "outcome": "admit",
             "predictors": ["sat", "gpa", "high_school"] }"#,
    );

    write(
        &dir.path().join("policy.json"),
        r#"{ "band": 0.02, "protected": ["race"] }"#,
    );
    let out = run_in(
        dir.path(),
        &[
            "compete",
            "--data", csv.to_str().unwrap(),
            "--schema", schema.to_str().unwrap(),
            "--submissions", "subs",
            "--policy", "policy.json",
            "--seed", "42",
            "--out", "result.json",
        ],
    );
    assert_eq!(code(&out), 1, "a disqualification must flag: {}", stderr(&out));
    let report = read_json(&dir.path().join("result.json"));
    let competition = &report["competition"];
    assert_eq!(competition["winner"], "honest");
    assert_eq!(competition["disqualified"][0]["party"], "cheat");
    let reason = competition["disqualified"][0]["reason"].as_str().unwrap();
    assert!(reason.contains("commitment"), "reason: {reason}");
}

#[test]
fn markdown_reports_render_from_the_json() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("five.json"),
        r#"{ "model_id": "five_proxies", "semi_partial": 0.04 }"#,
    );
    write(
        &dir.path().join("ten.json"),
        r#"{ "model_id": "ten_proxies", "semi_partial": 0.06 }"#,
    );
    write(&dir.path().join("policy.json"), r#"{ "cap": 0.05 }"#);

    let out = run_in(
        dir.path(),
        &[
            "compare",
            "--model", "five.json",
            "--model", "ten.json",
            "--policy", "policy.json",
            "--format", "md",
        ],
    );
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.starts_with("# Proxy audit report"), "{text}");
    assert!(text.contains("five_proxies"), "{text}");
    assert!(text.contains("**winner**"), "{text}");
}

#[test]
fn bad_inputs_exit_two_and_separation_exits_three() {
    let dir = tempfile::tempdir().unwrap();

    // Unknown scenario name.
    let out = run_in(
        dir.path(),
        &["simulate", "--scenario", "no_such_world", "--n", "2000"],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown scenario"), "{}", stderr(&out));

    // Unreadable data file.
    write(&dir.path().join("schema.json"), r#"{ "columns": [
        {"name": "x", "kind": "continuous", "role": "predictor"},
        {"name": "y", "kind": "binary", "role": "outcome"}
    ]}"#);
    write(&dir.path().join("model.json"), r#"{ "id": "m", "family": "logistic",
        "outcome": "y", "predictors": ["x"] }"#);
    let out = run_in(
        dir.path(),
        &[
            "audit",
            "--data", "missing.csv",
            "--schema", "schema.json",
            "--model", "model.json",
            "--protected", "x",
        ],
    );
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    // A malformed environment seed is an input error, not a silent default.
    let out = bin()
        .current_dir(dir.path())
        .env("PROXYAUDIT_SEED", "not-a-number")
        .args(["simulate", "--scenario", "marital_lending", "--n", "2000"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    // A protected attribute that separates the outcome is a numerical
    // failure: the semi-partial gain is undefined at infinite coefficients.
    let mut rows = vec!["x,p,y".to_string()];
    for i in 0..40 {
        let y = i % 2;
        rows.push(format!("{}.5,{y},{y}", i % 7));
    }
    write(&dir.path().join("sep.csv"), &(rows.join("\n") + "\n"));
    write(&dir.path().join("sep.schema.json"), r#"{ "columns": [
        {"name": "x", "kind": "continuous", "role": "predictor"},
        {"name": "p", "kind": "binary", "role": "protected"},
        {"name": "y", "kind": "binary", "role": "outcome"}
    ]}"#);
    let out = run_in(
        dir.path(),
        &[
            "audit",
            "--data", "sep.csv",
            "--schema", "sep.schema.json",
            "--model", "model.json",
            "--protected", "p",
        ],
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("separates"), "{}", stderr(&out));
}
