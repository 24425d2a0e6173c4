use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn amseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amseq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden").join(name)
}

#[test]
fn gen_power_roundtrips_through_transform() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("root.json");
    let o = amseq(&["gen", "omega-p", "--p", "0.5", "--out", seq.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&seq).unwrap()).unwrap();
    assert_eq!(doc["kind"], "formula");

    let o = amseq(&["transform", "am", "--in", seq.to_str().unwrap(), "--horizon", "16", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,log_value,value");
    assert_eq!(rows.len(), 17);
    let second: f64 = rows[2].split(',').nth(2).unwrap().parse().unwrap();
    assert!((second - (1.0 + 0.5f64.sqrt()) / 2.0).abs() < 1e-12);
}

#[test]
fn csv_dump_of_harmonic() {
    let o = amseq(&["gen", "omega-p", "--p", "1", "--horizon", "10", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("10,"));
    let v: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    assert!((v - 0.1).abs() < 1e-15);
}

#[test]
fn example6_matches_golden() {
    let o = amseq(&["gen", "example6", "--stages", "8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), std::fs::read_to_string(golden("example6_k8.json")).unwrap());
    let o = amseq(&["gen", "omega-half", "--stages", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), std::fs::read_to_string(golden("omega_half_k4.json")).unwrap());
}

#[test]
fn hat_of_summable_is_a_capability_error() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("sq.json");
    assert!(amseq(&["gen", "omega-p", "--p", "2", "--out", seq.to_str().unwrap()]).status.success());
    let o = amseq(&["transform", "hat", "--in", seq.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("summable"));
}

#[test]
fn inadmissible_ratio_reports_index() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.json");
    std::fs::write(&file, "[1, 3, 1.2]").unwrap();
    let o = amseq(&["gen", "from-ratio", "--file", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n = 2"));
}

#[test]
fn from_ratio_reconstructs_harmonic() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.json");
    let h: Vec<f64> = (1..=10).scan(0.0, |acc, k| {
        *acc += 1.0 / k as f64;
        Some(*acc)
    }).collect();
    std::fs::write(&file, serde_json::to_string(&h).unwrap()).unwrap();
    let o = amseq(&["gen", "from-ratio", "--file", file.to_str().unwrap(), "--horizon", "10", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for (k, row) in stdout(&o).lines().skip(1).enumerate() {
        let v: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((v * (k + 1) as f64 - 1.0).abs() < 1e-12, "{row}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(amseq(&["check", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(amseq(&["--horizon", "5", "gen", "omega-p", "--p", "1"]).status.code(), Some(2));
    assert_eq!(amseq(&["--tol", "0.1", "gen", "omega-p", "--p", "1"]).status.code(), Some(2));
    assert_eq!(amseq(&["check", "lemmas", "--subject", "bogus"]).status.code(), Some(2));
    assert_eq!(amseq(&["gen", "omega-p"]).status.code(), Some(2));
}

#[test]
fn lemma_suite_passes_on_omega() {
    let o = amseq(&["check", "lemmas", "--subject", "omega", "--horizon", "10000", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc.get("generated_at").is_none());
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 7);
    assert!(reports.iter().all(|r| r["subject"] == "omega"));
}

#[test]
fn finite_rank_preconditions_are_skipped_not_failed() {
    let o = amseq(&["check", "lemmas", "--subject", "finite-rank", "--check", "h-bound", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("skipped"));
}

#[test]
fn check_output_is_deterministic() {
    let args = ["check", "lemmas", "--subject", "omega-1/2", "--horizon", "2000", "--seed", "7", "--no-timestamp"];
    let a = amseq(&args);
    let b = amseq(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let mut csv = args.to_vec();
    csv.extend(["--format", "csv"]);
    let a = amseq(&csv);
    let b = amseq(&csv);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("check_id,"));
}

#[test]
fn timestamp_is_present_by_default() {
    let o = amseq(&["check", "hat", "--horizon", "100"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc["generated_at"].as_u64().unwrap() > 0);
    let o = amseq(&["check", "hat", "--horizon", "100", "--format", "csv"]);
    assert!(stdout(&o).starts_with("# generated_at "));
}

#[test]
fn empty_suite_passes() {
    let o = amseq(&["check", "empty", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc["reports"].as_array().unwrap().is_empty());
}
