//! The `modgen` binary: exit codes, output formats and reproducibility.

use std::process::{Command, Output};

fn modgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modgen"))
        .args(args)
        .output()
        .expect("modgen runs")
}

fn code(args: &[&str]) -> i32 {
    modgen(args).status.code().expect("exit code")
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["count", "--n", "10"]), 0);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["gen", "--n", "x"]), 2);
    assert_eq!(code(&["gen", "--n", "10", "--k", "1"]), 2);
    assert_eq!(code(&["gen", "--n", "10", "--format", "xml"]), 2);
    assert_eq!(code(&["gen", "--n", "60", "--core", "--count", "20", "--max-restarts", "1"]), 3);
    assert_eq!(code(&["stats-uniformity", "--n", "10", "--count", "20", "--check"]), 5);
    assert_eq!(code(&["stats-uniformity", "--n", "6", "--k", "2", "--check"]), 0);
}

#[test]
fn corrupt_cache_is_a_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    assert_eq!(code(&["count", "--n", "12", "--table-cache", cache]), 0);
    let file = dir.path().join("tables-v1-n12-k3-sigma2.json");
    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, text.replacen("\"format_version\":1", "\"format_version\":7", 1)).unwrap();
    assert_eq!(code(&["count", "--n", "12", "--table-cache", cache]), 4);
}

#[test]
fn jsonl_records() {
    let out = modgen(&["gen", "--n", "30", "--k", "3", "--sigma", "2", "--count", "5", "--seed", "11"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    for (i, line) in lines.iter().enumerate() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["n"], 30);
        assert_eq!(v["k"], 3);
        assert_eq!(v["sigma"], 2);
        assert_eq!(v["seed"], format!("11:{i}"));
        assert!(v["attempts"].as_u64().unwrap() >= 1);
        for arc in v["arcs"].as_array().unwrap() {
            let (a, b) = (arc[0].as_u64().unwrap(), arc[1].as_u64().unwrap());
            assert!(1 <= a && a < b && b <= 30);
        }
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    let args = ["gen", "--n", "24", "--count", "7", "--seed", "2"];
    let direct = modgen(&args).stdout;
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let out = modgen(&with_out);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct);
}

#[test]
fn seeds_change_output() {
    let a = modgen(&["gen", "--n", "40", "--count", "5", "--seed", "1"]).stdout;
    let b = modgen(&["gen", "--n", "40", "--count", "5", "--seed", "2"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn count_with_oracle() {
    let out = modgen(&["count", "--n", "10", "--k", "3", "--sigma", "2", "--oracle"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["total"], "94");
    assert_eq!(v["oracle"], "94");
    assert_eq!(v["matches"], true);
    let out = modgen(&["count", "--n", "8", "--k", "3", "--core"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["total"], "582");
    assert_eq!(v["sigma"], 1);
}

#[test]
fn selftest_runs() {
    let out = modgen(&["selftest", "--max-n", "8"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("all checks passed"));
}

#[test]
fn selftest_detects_corrupted_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    assert_eq!(code(&["selftest", "--max-n", "6", "--table-cache", cache]), 0);
    // bump one stored count so the file still parses but no longer adds up
    let file = dir.path().join("tables-v1-n6-k3-sigma2.json");
    let text = std::fs::read_to_string(&file).unwrap();
    let corrupted = text.replacen("\"count\":[[\"1\"", "\"count\":[[\"2\"", 1);
    assert_ne!(corrupted, text);
    std::fs::write(&file, corrupted).unwrap();
    let out = modgen(&["selftest", "--max-n", "6", "--table-cache", cache]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("MISMATCH"));
}
