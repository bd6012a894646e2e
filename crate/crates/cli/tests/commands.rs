use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn grandam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grandam"))
        .args(args)
        .output()
        .expect("run grandam")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn constant_rows(n: usize, weight: f64, value: f64) -> String {
    (0..n).map(|i| format!("{i},{weight},{value}\n")).collect()
}

#[test]
fn norm_of_constant_on_probability_space() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.csv", &constant_rows(4, 0.25, 1.0));
    let cfg = write(&dir, "run.toml", "[exponents]\np = 2\ntheta = 0\n");
    let out = grandam(&["norm", "--config", s(&cfg), "--f", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["report"]["value"].as_f64(), Some(1.0));
    assert_eq!(r["report"]["closure"]["status"], "inapplicable");
}

#[test]
fn witness_ratio() {
    let out = grandam(&["witness", "--m", "2", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let ratio = r["report"]["ratio"].as_f64().unwrap();
    assert!((ratio - 6f64.sqrt() / 2.0).abs() < 1e-12);
    assert!((ratio - 1.2247).abs() < 1e-4);
    assert_eq!(r["report"]["growing"], true);
}

#[test]
fn counting_group_is_flagged_not_failed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "run.toml",
        "trials = 5\n[space]\natoms = 8\nnormalization = \"counting\"\n",
    );
    let out = grandam(&["conv-check", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["status"], "not-applicable");
    assert_eq!(r["warnings"][0], "hypotheses-not-met");

    let f = write(&dir, "f.csv", "0,1,1\n1,1,1\n2,1,0\n3,1,0\n");
    let out = grandam(&["conv-check", "--config", s(&cfg), "--f", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["report"]["warnings"][0], "hypotheses-not-met");
}

#[test]
fn conv_check_pass_and_violation() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.csv", &constant_rows(8, 0.125, 1.0));
    let ok = write(&dir, "ok.toml", "[exponents]\np = 2\ntheta = 1\n");
    let out = grandam(&["conv-check", "--config", s(&ok), "--f", s(&f), "--g", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["report"]["ratio"].as_f64(), Some(1.0));

    // below p = 2 the grand norm of constants is not submultiplicative
    let bad = write(&dir, "bad.toml", "[exponents]\np = 1.5\ntheta = 1\n");
    let out = grandam(&["conv-check", "--config", s(&bad), "--f", s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "fail");
    assert!((r["report"]["ratio"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(r["report"]["within_proven_bound"], true);
}

#[test]
fn conv_check_random_trials() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.toml", "trials = 20\n[space]\natoms = 16\n");
    let out = grandam(&["conv-check", "--config", s(&cfg), "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["report"]["trials"], 20);
    assert_eq!(r["report"]["seed"], 3);
    assert_eq!(r["report"]["failures"], 0);

    let out = grandam(&["conv-check", "--amalgam", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["report"]["worst"]["constant_C"]
        .as_f64()
        .is_some());
}

#[test]
fn amalgam_on_z8() {
    let dir = TempDir::new().unwrap();
    let mut rows = String::new();
    for i in 0..8 {
        rows += &format!("{i},0.125,{}\n", if i < 2 { 1 } else { 0 });
    }
    let f = write(&dir, "f.csv", &rows);
    let cfg = write(
        &dir,
        "run.toml",
        "[space]\nkind = \"cyclic\"\n[exponents]\np = 2\nq = 2\ntheta = 0\n[window]\nsize = 2\n",
    );
    let out = grandam(&["amalgam", "--config", s(&cfg), "--f", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["report"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(
        r["report"]["control_function"][0]["value"].as_f64(),
        Some(0.5)
    );
    assert_eq!(
        r["report"]["control_function"][4]["value"].as_f64(),
        Some(0.0)
    );
}

#[test]
fn profile_writes_csv() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "f.jsonl",
        "{\"i\":0,\"w\":0.5,\"v\":1}\n{\"i\":1,\"w\":0.5,\"v\":1}\n",
    );
    let out_path = dir.path().join("report.json");
    let out = grandam(&["profile", "--f", s(&f), "--out", s(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((r["report"]["sup_value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let csv = fs::read_to_string(dir.path().join("report.profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eps,value"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (e, v) = l.split_once(',').unwrap();
            (e.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert!(rows.len() >= 64);
    assert!(!csv.contains('\r'));
    let sup = r["report"]["sup_value"].as_f64().unwrap();
    assert!(rows
        .iter()
        .all(|&(e, v)| (0.0..=1.0).contains(&e) && v <= sup * (1.0 + 1e-12)));
    assert!(rows.iter().any(|&(e, _)| e == 1.0));
}

#[test]
fn bupu_validate_flags_ragged() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "run.toml",
        "[space]\natoms = 8\n[bupu]\nblock_size = 3\n",
    );
    let out = grandam(&["bupu-validate", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["warnings"][0], "ragged-final-block");
    assert_eq!(r["report"]["functions"], 3);
    assert_eq!(r["report"]["bupu_validation"]["a"]["pass"], true);
    assert_eq!(r["report"]["well_spread"]["is_u_dense"], true);
}

#[test]
fn equivalence_single_and_trials() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "run.toml",
        "trials = 10\n[space]\nkind = \"cyclic\"\natoms = 16\n[exponents]\np = 1.5\nq = 3\ntheta = 1\n",
    );
    let out = grandam(&["equivalence", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["report"]["failures"], 0);
    assert_eq!(
        r["report"]["first"]["geometry"]["translate_mass_invariant"],
        true
    );

    let rows: String = (0..16)
        .map(|i| format!("{i},0.0625,{}\n", (i as f64).sin()))
        .collect();
    let f = write(&dir, "f.csv", &rows);
    let out = grandam(&["equivalence", "--config", s(&cfg), "--f", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["report"]["within_bounds"], true);
    for key in ["continuous", "discrete", "step"] {
        assert!(r["report"]["norms"][key].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "run.toml",
        "trials = 8\nseed = 11\n[space]\nkind = \"cyclic\"\n",
    );
    let a = grandam(&["equivalence", "--config", s(&cfg)]);
    let b = grandam(&["equivalence", "--config", s(&cfg)]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = grandam(&["equivalence", "--config", s(&cfg), "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("e-1") || text.contains("e0"));
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = grandam(&["norm", "--f", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["status"], "error");
    assert_eq!(r["report"]["error"]["kind"], "io");

    let empty = write(&dir, "empty.csv", "");
    let r = report(&grandam(&["norm", "--f", s(&empty)]));
    assert_eq!(r["report"]["error"]["kind"], "no-rows");

    let zero = write(&dir, "zero.csv", "0,0.5,1\n1,0,2\n");
    let out = grandam(&["norm", "--f", s(&zero)]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["report"]["error"]["kind"], "bad-row");
    assert_eq!(r["report"]["error"]["line"], 2);

    let out = grandam(&["norm"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["report"]["error"]["kind"], "missing-input");

    let cfg = write(&dir, "bad.toml", "[exponents]\np = 2\nfoo = 1\n");
    let out = grandam(&["witness", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["report"]["error"]["kind"], "config");

    let out = grandam(&["witness", "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["report"]["error"]["kind"], "domain");

    let out = grandam(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
