use std::path::PathBuf;
use std::process::{Command, Output};

use quatbranch::cli::{BranchRecord, ClassifyRecord, DefectRecord, ExistsRecord, OracleRecord};
use quatbranch::defects::QuadClass;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatbranch")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("quatbranch-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_text_and_json() {
    let out = run(&["classify", "1", "t"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ReducibleSep (A^s) t=0\n");

    let out = run(&["--format", "json", "classify", "0", "t"]);
    assert_eq!(out.status.code(), Some(0));
    let rec: ClassifyRecord = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((rec.family.as_str(), rec.t), ("B^i", 0));
}

#[test]
fn defect_json_record() {
    let out = run(&["--format", "json", "defect", "as", "t^-3"]);
    assert_eq!(out.status.code(), Some(0));
    let rec: DefectRecord = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((rec.ideal.as_str(), rec.ideal_val), ("(t^-3)", Some(-3)));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "1"]).status.code(), Some(2));
    let out = run(&["classify", "1 +", "t"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn short_precision_exits_3() {
    let out = run(&["defect", "as", "t^-3 (mod t^-2)"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("undetermined"));
}

#[test]
fn arguments_from_files() {
    let path = scratch("matrix.txt");
    std::fs::write(&path, "[[0, 1], [t, 0]]\n").unwrap();
    let arg = format!("@{}", path.display());
    let out = run(&["--format", "json", "branch", &arg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rec: BranchRecord = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rec.class, QuadClass::RamInsep);
}

#[test]
fn oracle_writes_dot_and_matches() {
    let path = scratch("pair.dot");
    let out = run(&["--radius", "5", "--dot", path.to_str().unwrap(), "--format", "json", "oracle", "[[1,0],[0,0]]", "[[0,1],[t,0]]"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rec: OracleRecord = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rec.verdict, "MATCH");
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("graph") && dot.trim_end().ends_with('}'));
}

#[test]
fn exists_reports_condition_and_witness() {
    let out = run(&["--format", "json", "exists", "--lambda", "0", "--m1", "1,1", "--m2", "0,t"]);
    assert_eq!(out.status.code(), Some(0));
    let rec: ExistsRecord = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!rec.exists);

    let out = run(&["--format", "json", "exists", "--lambda", "t^-1", "--m1", "1,0", "--m2", "0,t", "--witness"]);
    let rec: ExistsRecord = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rec.exists && rec.witness.is_some());
    assert_eq!(rec.condition, "I");
}

#[test]
fn selftest_passes_and_is_reproducible() {
    let args = ["--radius", "6", "--seed", "3", "--format", "json", "selftest", "--count", "40"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.get("pairs").is_some());
}
