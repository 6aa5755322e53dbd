//! End-to-end checks of the command-line interface: argument parsing,
//! output formats, exit codes, and determinism of repeated runs.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geomconst"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn constant_json_reports_a2_on_the_euclidean_plane() {
    let out = run(&[
        "constant",
        "--space",
        "lp:2:2",
        "--name",
        "a2",
        "--restarts",
        "16",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["space"], "lp:2:2");
    assert_eq!(v["constant"], "A2");
    assert_eq!(v["mode"], "substituted");
    let value = v["value"].as_f64().unwrap();
    assert!((value - 2.0f64.sqrt()).abs() < 1e-6, "value {value}");
    assert_eq!(v["certification"], "heuristic-lower-bound");
    assert!(v["witness"]["x"].as_array().unwrap().len() == 2);
}

#[test]
fn resolution_flag_switches_to_the_grid_oracle() {
    let out = run(&[
        "constant",
        "--space",
        "lp:1:2",
        "--name",
        "cnjprime",
        "--resolution",
        "128",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["certification"], "grid-certified");
    let value = v["value"].as_f64().unwrap();
    assert!((value - 2.0).abs() < 1e-9, "value {value}");
    assert!(v["window"].as_f64().unwrap() > 0.0);
}

#[test]
fn grid_certification_rejects_searches_without_pair_objectives() {
    let out = run(&[
        "constant",
        "--space",
        "lp:2:2",
        "--name",
        "delta",
        "--eps",
        "1",
        "--resolution",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("pair objectives"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_constant_name_exits_with_usage_error() {
    let out = run(&["constant", "--space", "lp:2:2", "--name", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown constant"), "stderr: {}", stderr(&out));
}

#[test]
fn missing_parameter_is_a_usage_error() {
    let out = run(&["constant", "--space", "lp:2:2", "--name", "e"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mismatched_tau_upsilon_pair_is_rejected() {
    let out = run(&[
        "constant",
        "--space",
        "lp:2:2",
        "--name",
        "lyjprime",
        "--tau",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--tau and --upsilon"));
}

#[test]
fn verify_single_identity_passes_and_exits_zero() {
    let out = run(&[
        "verify",
        "--space",
        "lp:2:2",
        "--identity",
        "EQ-A2",
        "--restarts",
        "16",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["identity"], "EQ-A2");
    assert_eq!(v["status"], "pass");
    assert_eq!(v["rhs"]["kind"], "eq");
}

#[test]
fn inapplicable_identity_is_a_usage_error() {
    let out = run(&["verify", "--space", "lp:1:2", "--identity", "HIL-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("does not apply"));
}

#[test]
fn identity_without_space_is_rejected() {
    let out = run(&["verify", "--identity", "EQ-A2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--space"));
}

#[test]
fn core_suite_csv_has_one_row_per_report_all_passing() {
    let out = run(&[
        "verify",
        "--space",
        "lp:1:2",
        "--suite",
        "core",
        "--restarts",
        "16",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "identity,space,params,status,lhs,rhs_kind,rhs_lo,rhs_hi,tol,notes"
    );
    let rows: Vec<&str> = lines.collect();
    // HIL-1 does not apply to the l1 plane, so six core identities run.
    assert_eq!(rows.len(), 6, "rows: {rows:?}");
    for row in rows {
        assert!(row.contains(",pass,"), "row: {row}");
    }
}

#[test]
fn verify_json_runs_are_byte_identical() {
    let args = [
        "verify",
        "--space",
        "lp:1:2",
        "--suite",
        "core",
        "--restarts",
        "16",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn report_csv_covers_the_whole_catalog() {
    let out = run(&[
        "report",
        "--space",
        "lp:2:2",
        "--restarts",
        "12",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "space,constant,mode,tau,upsilon,t,eps,value,hilbert,certification,evals,skipped,window"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 25, "rows: {}", rows.len());
    // On the Euclidean plane every estimate must match its closed form.
    // The modulus-based A2 recovery stacks two searches and is the least
    // accurate row, so the band is its 5e-3 contract.
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        let value: f64 = cols[7].parse().unwrap();
        let hilbert: f64 = cols[8].parse().unwrap();
        assert!(
            (value - hilbert).abs() < 5e-3,
            "row {row} deviates from the closed form"
        );
    }
}

#[test]
fn out_flag_writes_the_file_instead_of_stdout() {
    let dir = std::env::temp_dir().join("geomconst-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a2.json");
    let out = run(&[
        "constant",
        "--space",
        "lp:1:2",
        "--name",
        "a2",
        "--restarts",
        "8",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    std::fs::remove_file(&path).ok();
}

#[test]
fn spaces_parse_from_shorthand_json_and_file() {
    // Shorthand with an infinite exponent.
    let out = run(&[
        "constant", "--space", "lp:inf:2", "--name", "a2", "--restarts", "8",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    // Inline JSON document.
    let out = run(&[
        "constant",
        "--space",
        r#"{"family": "weighted-lp", "p": 1, "weights": [1.0, 2.0]}"#,
        "--name",
        "a2",
        "--restarts",
        "8",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["space"], "wlp:1:2");

    // Document in a file.
    let dir = std::env::temp_dir().join("geomconst-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("octagon-doc.json");
    std::fs::write(
        &path,
        r#"{"family": "lp", "p": 3.0, "dim": 2}"#,
    )
    .unwrap();
    let out = run(&[
        "constant",
        "--space",
        path.to_str().unwrap(),
        "--name",
        "a2",
        "--restarts",
        "8",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    std::fs::remove_file(&path).ok();

    // Malformed shorthand.
    let out = run(&["constant", "--space", "lp:2", "--name", "a2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn listings_cover_constants_and_identities() {
    let out = run(&["list-constants"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in [
        "C_NJ", "C_NJ_prime", "A2", "J", "H", "H_tilde", "H_tilde_sq", "E", "E_I",
        "L_YJ_prime", "L_YJ_I", "C_NJ_I", "delta_X", "A2_via_modulus",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
    assert!(text.contains("EQ-A2"));
    assert!(text.contains("REM-H"));

    let out = run(&["list-spaces"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("lp:<p>:<dim>"));
    assert!(text.contains("octagon"));
    assert!(Path::new("Cargo.toml").exists() || !text.is_empty());
}

#[test]
fn corpus_file_mixes_shorthands_and_documents() {
    let dir = std::env::temp_dir().join("geomconst-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("corpus.json");
    std::fs::write(
        &path,
        r#"["lp:1:2", {"family": "lp", "p": 2.0, "dim": 2}]"#,
    )
    .unwrap();
    let out = run(&[
        "verify",
        "--spaces",
        path.to_str().unwrap(),
        "--suite",
        "core",
        "--restarts",
        "16",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("lp:1:2"));
    assert!(text.contains("lp:2:2"));
    std::fs::remove_file(&path).ok();
}
