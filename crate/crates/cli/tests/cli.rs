use std::path::Path;
use std::process::{Command, Output};

fn spanroute(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spanroute"))
        .args(args)
        .current_dir(dir)
        .env_remove("SPANROUTE_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn pipeline_args() -> [&'static str; 6] {
    ["--graph", "g/graph.json", "--factors", "g/factorization.json", "--words", "g/words.json"]
}

#[test]
fn cp_pipeline_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(&spanroute(dir, &["build", "cp", "--d", "2", "--D", "2", "--out", "g"])), 0);
    assert_eq!(code(&spanroute(dir, &["words", "cp", "--d", "2", "--D", "2", "--out", "g/words.json"])), 0);
    let mut args = vec!["verify"];
    args.extend(pipeline_args());
    assert_eq!(code(&spanroute(dir, &args)), 0);

    let out = spanroute(dir, &["schedule", "--words", "g/words.json", "--method", "cp-min", "--out", "g/s.json"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("makespan 5"));

    let mut args = vec!["simulate", "--schedule", "g/s.json", "--out", "g/report.json"];
    args.extend(pipeline_args());
    let out = spanroute(dir, &args);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("g/report.json")).unwrap()).unwrap();
    assert_eq!(report["packets_delivered"], 30);
    assert_eq!(report["conflict_count"], 0);
}

#[test]
fn broken_words_fail_verification() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(&spanroute(dir, &["build", "cp", "--d", "2", "--D", "2", "--out", "g"])), 0);
    let words = r#"{"d": 2, "words": [[], [1], [2], [1, 1], [2, 2], [2, 1]]}"#;
    std::fs::write(dir.join("g/words.json"), words).unwrap();
    let mut args = vec!["verify"];
    args.extend(pipeline_args());
    let out = spanroute(dir, &args);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL words span"));
}

#[test]
fn diam2_schedule_on_h5() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(&spanroute(dir, &["words", "mms", "--q", "5", "--out", "w.json"])), 0);
    let out = spanroute(
        dir,
        &["--format", "json", "schedule", "--words", "w.json", "--method", "diam2", "--out", "s.json"],
    );
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["makespan"], 13);
    assert_eq!(report["is_minimum"], true);
}

#[test]
fn counts_check_agrees() {
    let tmp = tempfile::tempdir().unwrap();
    let out = spanroute(tmp.path(), &["counts", "cp", "--d", "4", "--D", "3", "--check"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("all formulas agree"));
}

#[test]
fn errors_are_json_with_usage_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = spanroute(tmp.path(), &["build", "mms", "--q", "7", "--out", "x"]);
    assert_eq!(code(&out), 2);
    let first = String::from_utf8_lossy(&out.stderr).lines().next().unwrap().to_string();
    let err: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(err["error"]["kind"], "BadOrder");

    let out = spanroute(tmp.path(), &["export-dot", "missing.json"]);
    assert_eq!(code(&out), 2);

    std::fs::write(tmp.path().join("bad.json"), "{not json").unwrap();
    let out = spanroute(tmp.path(), &["factorize", "bad.json", "--out", "f.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"Parse\""));
}

#[test]
fn cp_min_rejects_foreign_words() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(&spanroute(dir, &["words", "mms", "--q", "5", "--out", "w.json"])), 0);
    let out = spanroute(dir, &["schedule", "--words", "w.json", "--method", "cp-min", "--out", "s.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn relations_report_failures_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = spanroute(tmp.path(), &["--format", "json", "relations", "mms", "--q", "5"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let failed = checks.iter().filter(|c| c["status"] == "fail").count();
    assert_eq!(code(&out), if failed == 0 { 0 } else { 1 });
    let automorphism = checks.iter().find(|c| c["relation"] == "h is an automorphism").unwrap();
    assert_eq!(automorphism["status"], "pass");
}

#[test]
fn manifest_records_inputs_and_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    spanroute(dir, &["build", "cp", "--d", "3", "--D", "2", "--out", "g"]);
    let out = spanroute(dir, &["--manifest", "m.json", "factorize", "g/graph.json", "--out", "f.json"]);
    assert_eq!(code(&out), 0);
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("m.json")).unwrap()).unwrap();
    assert_eq!(m["status"], "pass");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["inputs"][0]["path"], "g/graph.json");
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["outputs"][0], "f.json");
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let files = ["a/graph.json", "a/factorization.json", "a/w.json", "a/s.json", "a/f.json", "a/g.dot"];
    let run = |out: &str| {
        let p = |f: &str| format!("{out}/{f}");
        spanroute(dir, &["build", "cp", "--d", "3", "--D", "3", "--out", out]);
        spanroute(dir, &["words", "cp", "--d", "3", "--D", "3", "--out", &p("w.json")]);
        spanroute(dir, &["schedule", "--words", &p("w.json"), "--seed", "7", "--out", &p("s.json")]);
        spanroute(dir, &["factorize", &p("graph.json"), "--out", &p("f.json")]);
        spanroute(dir, &["export-dot", &p("graph.json"), "--out", &p("g.dot")]);
    };
    run("a");
    run("b");
    for f in files {
        let a = std::fs::read(dir.join(f)).unwrap();
        let b = std::fs::read(dir.join(f.replacen("a/", "b/", 1))).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{f} differs between runs");
    }
}

#[test]
fn search_writes_spanning_words() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    spanroute(dir, &["build", "cp", "--d", "2", "--D", "2", "--out", "g"]);
    let out = spanroute(
        dir,
        &["words", "search", "--graph", "g/graph.json", "--factors", "g/factorization.json", "--seed", "1", "--out", "g/words.json"],
    );
    assert_eq!(code(&out), 0);
    let mut args = vec!["verify"];
    args.extend(pipeline_args());
    assert_eq!(code(&spanroute(dir, &args)), 0);
}

#[test]
fn bad_thread_count_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_spanroute"))
        .args(["counts", "cp", "--d", "3", "--D", "2"])
        .current_dir(tmp.path())
        .env("SPANROUTE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
