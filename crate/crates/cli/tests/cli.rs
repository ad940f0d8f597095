use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn greedylab(args: &[&str]) -> Out {
    let out = Command::new(env!("CARGO_BIN_EXE_greedylab"))
        .args(args)
        .env_remove("GREEDYLAB_THREADS")
        .output()
        .expect("binary runs");
    Out {
        code: out.status.code().expect("exited"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn seq_file(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn norm_examples() {
    let dir = TempDir::new().unwrap();
    let nonneg = seq_file(&dir, "a.txt", "1 3\n2 1\n3 2\n");
    let pair = seq_file(&dir, "b.txt", "1 2\n2 1\n");
    let alt = seq_file(&dir, "c.json", r#"{"entries": [[1, "4"], [2, "-3"], [3, "2"], [4, "-1"]]}"#);
    assert_eq!(greedylab(&["norm", "--input", &nonneg, "--which", "B"]).stdout, "6\n");
    assert_eq!(greedylab(&["norm", "--input", &pair, "--which", "lorentz:2"]).stdout, "6 ^(1/2)\n");
    assert_eq!(greedylab(&["norm", "--input", &alt, "--which", "A"]).stdout, "2\n");
    let with_oracle = greedylab(&["norm", "--input", &alt, "--which", "B-comb", "--space", "lorentz:inf", "--oracle"]);
    assert_eq!(with_oracle.stdout, "6\noracle 6 AGREE\n");
    let approx = greedylab(&["--float", "norm", "--input", &pair, "--which", "lorentz:2"]);
    assert_eq!(approx.stdout, "6 ^(1/2) (~2.449490)\n");
}

#[test]
fn norm_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = seq_file(&dir, "bad.txt", "2 1\n1 1\n");
    let ok = seq_file(&dir, "ok.txt", "1 1\n");
    let wide = seq_file(&dir, "wide.txt", &(1..=30).map(|n| format!("{n} {}\n", n % 3 + 1)).collect::<String>());
    let parse = greedylab(&["norm", "--input", &bad, "--which", "B"]);
    assert_eq!(parse.code, 2);
    assert!(parse.stdout.is_empty() && parse.stderr.contains("line 2"));
    assert_eq!(greedylab(&["norm", "--input", &ok, "--which", "B-comb"]).code, 3);
    assert_eq!(greedylab(&["norm", "--input", &ok, "--which", "nope"]).code, 3);
    assert_eq!(greedylab(&["norm", "--input", &ok, "--which", "l1", "--oracle"]).code, 3);
    assert_eq!(greedylab(&["norm", "--input", &wide, "--which", "A", "--oracle"]).code, 4);
    assert_eq!(greedylab(&["norm", "--bogus"]).code, 3);
}

#[test]
fn envelope_examples() {
    let first = |out: Out| out.stdout.lines().next().unwrap_or_default().to_string();
    assert_eq!(first(greedylab(&["envelope", "--target", "indicator:8", "--space", "lorentz:inf"])), "8 8");
    assert_eq!(first(greedylab(&["envelope", "--target", "alt-indicator:1"])), "1 1");
    // The exact optimum over the eight cyclic harmonic atoms is 2.
    assert_eq!(first(greedylab(&["envelope", "--target", "alt-indicator:4", "--dict", "cyclic:harmonic"])), "1 2");
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("env.json");
    let out = greedylab(&["envelope", "--target", "indicator:3", "--report", report.to_str().unwrap()]);
    assert_eq!(out.stdout, "3 3\n");
    let parsed: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed["lower"], "3");
}

#[test]
fn construct_examples() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("h0.txt");
    let run =
        greedylab(&["construct", "--which", "h0", "--preset", "A", "--depth", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 78);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("h0.txt.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["n"], serde_json::json!([3, 12, 39]));

    let meta_path = dir.path().join("g.json");
    let g = greedylab(&["construct", "--which", "G", "--t", "1", "--meta", meta_path.to_str().unwrap()]);
    assert_eq!(g.stdout.lines().count(), 32);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(&meta_path).unwrap()).unwrap();
    let a: greedylab_core::Scalar = meta["tail_mass"].as_str().unwrap().parse().unwrap();
    let predicted: greedylab_core::Scalar = meta["predicted_norm"].as_str().unwrap().parse().unwrap();
    assert_eq!(predicted, greedylab_core::Scalar::one() + a);

    assert_eq!(greedylab(&["construct", "--which", "leibniz"]).stdout, "1 4\n2 -3\n3 2\n4 -1\n");
    let json = greedylab(&["construct", "--which", "leibniz", "--format", "json"]).stdout;
    assert_eq!(json, "{\"entries\":[[1,\"4\"],[2,\"-3\"],[3,\"2\"],[4,\"-1\"]]}\n");
}

#[test]
fn construct_exit_codes() {
    assert_eq!(greedylab(&["construct", "--which", "h0", "--depth", "0"]).code, 6);
    assert_eq!(greedylab(&["construct", "--which", "G", "--t", "3/2"]).code, 6);
    assert_eq!(greedylab(&["construct", "--which", "G", "--t", "1", "--n", "6"]).code, 6);
    assert_eq!(greedylab(&["construct", "--which", "G"]).code, 3);
    assert_eq!(greedylab(&["construct", "--which", "leibniz", "--t", "0"]).code, 6);
}

#[test]
fn verify_examples() {
    let bogus = greedylab(&["verify", "--suite", "BOGUS"]);
    assert_eq!(bogus.code, 3);
    assert!(bogus.stderr.contains("unknown suite"));
    let oracle = greedylab(&["verify", "--suite", "ORACLE-EQ", "--trials", "200"]);
    assert_eq!(oracle.code, 0, "{}", oracle.stderr);
    let report: serde_json::Value = serde_json::from_str(oracle.stdout.trim()).unwrap();
    assert_eq!(report["suite"], "ORACLE-EQ");
    assert_eq!(report["failures"], serde_json::json!([]));

    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.jsonl");
    let run = greedylab(&["verify", "--suite", "TWISTED-ID", "--trials", "50", "--report", path.to_str().unwrap()]);
    assert_eq!((run.code, run.stdout.as_str()), (0, ""));
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 1);
}

#[test]
fn democracy_examples() {
    let rows = |m: usize| -> String {
        "m,phi_l,phi_u\n".to_string() + &(1..=m).map(|k| format!("{k},{k},{k}\n")).collect::<String>()
    };
    assert_eq!(greedylab(&["democracy", "--space", "lorentz:inf", "--m-max", "5"]).stdout, rows(5));
    assert_eq!(
        greedylab(&["democracy", "--which", "B-comb", "--space", "lorentz:inf", "--m-max", "5"]).stdout,
        rows(5)
    );
    let a = greedylab(&["democracy", "--which", "A", "--m-max", "4"]).stdout;
    assert_eq!(a.lines().nth(4), Some("4,2,4"));
    assert_eq!(greedylab(&["democracy", "--space", "lorentz:inf", "--m-max", "4", "--window", "3"]).code, 3);
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("d.csv");
    let run = greedylab(&["democracy", "--space", "lorentz:2", "--m-max", "2", "--csv", csv.to_str().unwrap()]);
    assert_eq!(run.stdout, "");
    assert!(Path::new(&csv).exists());
}

#[test]
fn greedy_listing() {
    let dir = TempDir::new().unwrap();
    let f = seq_file(&dir, "f.txt", "1 2\n2 -1\n3 1\n");
    assert_eq!(greedylab(&["greedy", "--input", &f]).stdout, "[]\n[1]\n[1,2]\n[1,3]\n[1,2,3]\n");
    assert_eq!(greedylab(&["greedy", "--input", &f, "--size", "2"]).stdout, "[1,2]\n[1,3]\n");
    assert_eq!(greedylab(&["greedy", "--input", &f, "--cap", "3"]).code, 4);
    assert_eq!(greedylab(&["greedy", "--input", &f, "--size", "9"]).code, 3);
}

#[test]
fn thread_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_greedylab"))
        .args(["verify", "--suite", "REARR", "--trials", "30"])
        .env("GREEDYLAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_greedylab"))
        .args(["verify", "--suite", "REARR"])
        .env("GREEDYLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}
