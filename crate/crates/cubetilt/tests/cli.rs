//! Contract tests for the command-line surface: exit codes, output
//! formats, and reproducibility, all through the real binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cubetilt::distribution::read_weights_jsonl;
use cubetilt::hypercube::Dataset;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubetilt"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).expect("write fixture");
    path
}

#[test]
fn exact_w1_of_opposite_point_masses_prints_the_dimension() {
    let dir = tempfile::tempdir().expect("temp dir");
    let a = write(dir.path(), "pm000.tsv", "#dim=3\np0\t000\n");
    let b = write(dir.path(), "pm111.tsv", "#dim=3\np1\t111\n");
    for method in ["exact", "greedy"] {
        let out = run(&[
            "w1",
            "--a",
            a.to_str().unwrap(),
            "--b",
            b.to_str().unwrap(),
            "--method",
            method,
        ]);
        assert!(out.status.success());
        assert_eq!(stdout(&out), "3.000000000\n", "method {method}");
    }
}

#[test]
fn usage_problems_exit_one() {
    for args in [
        vec!["no-such-subcommand"],
        vec!["w1", "--a", "x.tsv"],
        vec!["w1", "--a", "x.tsv", "--b", "y.tsv", "--method", "psychic"],
        vec!["reweigh", "--bogus-flag"],
        vec!["gen", "--kind", "clustered", "--d", "8", "--out-source", "s", "--out-target", "t"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}");
        assert!(!out.stderr.is_empty(), "args {args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    for args in [vec!["--help"], vec!["--version"], vec!["w1", "--help"]] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "args {args:?}");
    }
}

#[test]
fn data_problems_exit_two_with_distinct_messages() {
    let dir = tempfile::tempdir().expect("temp dir");
    let d3 = write(dir.path(), "d3.tsv", "#dim=3\na\t000\n");
    let d4 = write(dir.path(), "d4.tsv", "#dim=4\nb\t0000\n");
    let malformed = write(dir.path(), "bad.tsv", "#dim=3\na\t0102\n");

    let missing = run(&["w1", "--a", "nope.tsv", "--b", d3.to_str().unwrap(), "--method", "exact"]);
    let mismatch = run(&[
        "w1",
        "--a",
        d3.to_str().unwrap(),
        "--b",
        d4.to_str().unwrap(),
        "--method",
        "exact",
    ]);
    let parse = run(&[
        "w1",
        "--a",
        malformed.to_str().unwrap(),
        "--b",
        d3.to_str().unwrap(),
        "--method",
        "exact",
    ]);
    let out = dir.path().join("w.jsonl");
    let report = dir.path().join("r.json");
    let bad_alpha = run(&[
        "reweigh",
        "--source",
        d3.to_str().unwrap(),
        "--target",
        d3.to_str().unwrap(),
        "--alpha",
        "1.5",
        "--out",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);

    let mut messages = Vec::new();
    for (label, o) in [
        ("missing", &missing),
        ("mismatch", &mismatch),
        ("parse", &parse),
        ("alpha", &bad_alpha),
    ] {
        assert_eq!(o.status.code(), Some(2), "{label}");
        let msg = String::from_utf8_lossy(&o.stderr).into_owned();
        assert!(msg.starts_with("error: "), "{label}: {msg}");
        messages.push(msg);
    }
    let unique: std::collections::HashSet<&String> = messages.iter().collect();
    assert_eq!(unique.len(), messages.len(), "messages collide: {messages:?}");
}

#[test]
fn reweigh_writes_weights_report_and_summary() {
    let dir = tempfile::tempdir().expect("temp dir");
    let source = write(
        dir.path(),
        "source.tsv",
        "#dim=4\ns0\t0000\t3.0\ns1\t0011\t1.0\n",
    );
    let target = write(dir.path(), "target.tsv", "#dim=4\nt0\t1111\n");
    let out = dir.path().join("weights.jsonl");
    let report = dir.path().join("report.json");
    let output = run(&[
        "reweigh",
        "--source",
        source.to_str().unwrap(),
        "--target",
        target.to_str().unwrap(),
        "--alpha",
        "0.5",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    let mut lines = text.lines();
    let before = lines.next().expect("first summary line");
    let after = lines.next().expect("second summary line");
    assert!(before.starts_with("w1_source_target="));
    assert!(after.starts_with("w1_result_target="));
    // Nine decimal places on both printed values.
    for line in [before, after] {
        let decimals = line.split('.').next_back().expect("decimal part");
        assert_eq!(decimals.len(), 9, "line {line}");
    }

    let weights =
        read_weights_jsonl(&std::fs::read_to_string(&out).expect("weights file")).expect("jsonl");
    assert_eq!(
        weights.iter().map(|l| l.id.as_str()).collect::<Vec<_>>(),
        ["s0", "s1"]
    );
    let total: f64 = weights.iter().map(|l| l.w).sum();
    assert!((total - 1.0).abs() < 1e-9);

    let report_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).expect("report file"))
            .expect("valid json");
    assert_eq!(report_json["alpha"], 0.5);
    assert_eq!(report_json["tie_break"], "lex");
    assert_eq!(report_json["dim"], 4);
    assert_eq!(report_json["timings_ms"], serde_json::Value::Null);
    assert!(report_json["w1_source_target"].as_f64().unwrap() > 0.0);
    // Key order is fixed by the report struct declaration.
    let raw = std::fs::read_to_string(&report).expect("report file");
    let alpha_at = raw.find("\"alpha\"").expect("alpha key");
    let scale_at = raw.find("\"scale\"").expect("scale key");
    let drift_at = raw.find("\"weight_drift\"").expect("drift key");
    assert!(alpha_at < scale_at && scale_at < drift_at);
}

#[test]
fn analyze_reports_pinned_hostile_ratio() {
    let dir = tempfile::tempdir().expect("temp dir");
    let s = dir.path().join("adv_s.tsv");
    let t = dir.path().join("adv_t.tsv");
    let gen = run(&[
        "gen",
        "--kind",
        "adversarial",
        "--d",
        "8",
        "--level",
        "2",
        "--out-source",
        s.to_str().unwrap(),
        "--out-target",
        t.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    assert!(Dataset::read(&s).is_ok(), "generated source parses back");

    let out = run(&["analyze", "--a", s.to_str().unwrap(), "--b", t.to_str().unwrap()]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(json["greedy_cost"], 10);
    assert_eq!(json["exact_cost"], 4);
    assert_eq!(json["ratio"], 2.5);
    let cycles = json["cycles"].as_array().expect("cycles array");
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0]["lemma_holds"], true);
    assert!(json["ceiling"].as_f64().unwrap() >= 2.5);
}

#[test]
fn cover_prints_certificate_for_generated_clusters() {
    let dir = tempfile::tempdir().expect("temp dir");
    let s = dir.path().join("cl_s.tsv");
    let t = dir.path().join("cl_t.tsv");
    let gen = run(&[
        "gen",
        "--kind",
        "clustered",
        "--d",
        "32",
        "--n",
        "300",
        "--eta",
        "3",
        "--zeta",
        "2",
        "--seed",
        "8",
        "--out-source",
        s.to_str().unwrap(),
        "--out-target",
        t.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let out = run(&["cover", "--input", s.to_str().unwrap(), "--radius", "2"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(json["zeta"], 2);
    assert!(json["eta"].as_u64().unwrap() <= 3, "generator promised 3 clusters");
    assert_eq!(
        json["centers"].as_array().unwrap().len(),
        json["eta"].as_u64().unwrap() as usize
    );
    assert_eq!(json["packing_radius"], 5);
}

#[test]
fn sample_exp_prints_rows_and_writes_artifacts() {
    let dir = tempfile::tempdir().expect("temp dir");
    let input = write(
        dir.path(),
        "input.tsv",
        "#dim=4\na\t0000\t4.0\nb\t0011\t2.0\nc\t1111\t2.0\n",
    );
    let report = dir.path().join("exp.json");
    let csv = dir.path().join("exp.csv");
    let out = run(&[
        "sample-exp",
        "--input",
        input.to_str().unwrap(),
        "--m-values",
        "16,64",
        "--trials",
        "4",
        "--seed",
        "2",
        "--estimator",
        "greedy",
        "--report",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().next().unwrap().starts_with("m=16 threshold="));

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).expect("report"))
            .expect("valid json");
    assert_eq!(json.as_array().unwrap().len(), 2);
    assert_eq!(json[0]["m"], 16);
    assert_eq!(json[0]["trials"], 4);

    let csv_text = std::fs::read_to_string(&csv).expect("csv");
    let mut lines = csv_text.lines();
    assert_eq!(lines.next(), Some("m,trial,w1"));
    assert_eq!(csv_text.lines().count(), 1 + 2 * 4);

    // Same invocation, different worker cap: identical bytes everywhere.
    let rerun = bin()
        .env("WASS_THREADS", "7")
        .args([
            "sample-exp",
            "--input",
            input.to_str().unwrap(),
            "--m-values",
            "16,64",
            "--trials",
            "4",
            "--seed",
            "2",
            "--estimator",
            "greedy",
            "--csv",
        ])
        .arg(dir.path().join("exp7.csv"))
        .output()
        .expect("binary runs");
    assert!(rerun.status.success());
    assert_eq!(
        std::fs::read(dir.path().join("exp7.csv")).expect("csv"),
        csv_text.as_bytes()
    );
}
