//! End-to-end runs of the `hh` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn hh(root: &Path, args: &[&str]) -> Run {
    let out: Output = Command::new(env!("CARGO_BIN_EXE_hh"))
        .args(args)
        .env("HH_OUT_ROOT", root)
        .output()
        .expect("hh runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn only_dir(root: &Path) -> PathBuf {
    let dirs: Vec<PathBuf> = fs::read_dir(root).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs[0].clone()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn catalog_listing() {
    let tmp = tempfile::tempdir().unwrap();
    let all = hh(tmp.path(), &["catalog"]);
    assert_eq!(all.code, 0);
    let mr = all.stdout.lines().skip_while(|l| !l.starts_with("kdv-mr")).take(6).collect::<Vec<_>>().join("\n");
    assert!(mr.contains("M > R"), "{mr}");

    let generic = hh(tmp.path(), &["catalog", "--family", "generic"]);
    for beta in ["beta=1/3", "beta=2", "beta=16/3"] {
        assert!(generic.stdout.contains(beta), "{beta} missing:\n{}", generic.stdout);
    }

    let json = hh(tmp.path(), &["catalog", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
}

#[test]
fn verify_outcomes() {
    let tmp = tempfile::tempdir().unwrap();
    let sk = hh(&tmp.path().join("a"), &["verify", "--model", "sk", "--n", "2"]);
    assert_eq!(sk.code, 0, "{}", sk.stderr);
    assert!(sk.stdout.lines().any(|l| l.starts_with("PASS sk 2")), "{}", sk.stdout);

    let mr = hh(
        &tmp.path().join("b"),
        &["verify", "--model", "kdv-mr:M=4,R=3", "--n", "4", "--centrifugal", "symbolic"],
    );
    assert_eq!(mr.code, 0, "{}", mr.stderr);
    assert!(mr.stdout.contains("PASS kdv-mr:M=4,R=3 4 symbolic"), "{}", mr.stdout);

    let generic = hh(&tmp.path().join("c"), &["verify", "--model", "generic:beta=1", "--n", "2"]);
    assert_eq!(generic.code, 1);
    assert!(generic.stderr.contains("has no integral"), "{}", generic.stderr);

    let float = hh(&tmp.path().join("d"), &["verify", "--model", "kdv", "--params", "alpha=0.5"]);
    assert_eq!(float.code, 1, "{}", float.stderr);
}

#[test]
fn integrate_writes_trajectory_and_plot() {
    let tmp = tempfile::tempdir().unwrap();
    let run = hh(
        tmp.path(),
        &["integrate", "--model", "kdv", "--params", "alpha=0.5", "--x0", "5e-4,5e-4,0,0", "--T", "100", "--record-every", "100"],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let dir = only_dir(tmp.path());
    for f in ["trajectory.csv", "trajectory.gp", "summary.txt", "config.toml"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    let (header, rows) = csv_rows(&dir.join("trajectory.csv"));
    assert_eq!(header, ["t", "q1", "q2", "p1", "p2", "driftH", "driftI", "status"]);
    assert_eq!(rows.len(), 1001);
    for r in &rows {
        for col in [5, 6] {
            assert!(r[col].parse::<f64>().unwrap() < 1e-8);
        }
    }
    assert_eq!(rows.last().unwrap()[7], "completed");
    assert!(rows[..rows.len() - 1].iter().all(|r| r[7] == "ok"));
}

#[test]
fn escaping_orbit_is_recorded_then_strict_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["integrate", "--model", "kdv", "--params", "alpha=0.5", "--x0", "0.1,0.1,0,0", "--T", "100"];
    let run = hh(&tmp.path().join("a"), &args);
    assert_eq!(run.code, 0);
    let (_, rows) = csv_rows(&only_dir(&tmp.path().join("a")).join("trajectory.csv"));
    assert_eq!(rows.last().unwrap().last().unwrap(), "blowup");

    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(hh(&tmp.path().join("b"), &strict).code, 3);
}

#[test]
fn classic_poincare_survey() {
    let tmp = tempfile::tempdir().unwrap();
    let run = hh(tmp.path(), &["poincare", "--model", "generic", "--params", "beta=-1/3", "--energy", "1/6"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let dir = only_dir(tmp.path());
    let (header, rows) = csv_rows(&dir.join("section.csv"));
    assert_eq!(header, ["orbit", "t", "q1", "q2", "p1", "p2", "residual"]);
    assert!(rows.len() > 1000);
    for r in &rows {
        assert!(r[2].parse::<f64>().unwrap().abs() < 1e-9);
        assert!(r[4].parse::<f64>().unwrap() > 0.0);
        assert!(r[6].parse::<f64>().unwrap() < 1e-10);
    }
    assert!(dir.join("section.gp").is_file());
    let summary = fs::read_to_string(dir.join("summary.txt")).unwrap();
    let stat: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("section statistic (median local thickness, k=10): "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(stat > 0.3, "{stat}");
}

#[test]
fn sweep_rows_are_ordered() {
    let tmp = tempfile::tempdir().unwrap();
    let run = hh(tmp.path(), &["sweep", "--grid", "b1=0:1:0.5", "--x0", "5e-4,5e-4,0,0", "--T", "1"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let (header, rows) = csv_rows(&only_dir(tmp.path()).join("sweep.csv"));
    assert_eq!(header[0], "b1");
    let coords: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(coords, ["0", "1/2", "1"]);
}

#[test]
fn nd_centrifugal_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let run = hh(
        tmp.path(),
        &[
            "sweep", "--model", "kdv:delta=1/2,Omega=0,alpha=1/10", "--n", "3", "--grid", "b1=0,1,-1/8",
            "--x0", "1,0.7,0.05,0,0,0.02", "--T", "50",
        ],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let (header, rows) = csv_rows(&only_dir(tmp.path()).join("sweep.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for r in &rows[..2] {
        assert_eq!(r[col("status")], "completed");
        for d in ["driftH", "driftI", "driftC2"] {
            assert!(r[col(d)].parse::<f64>().unwrap() < 1e-6, "{d} {r:?}");
        }
    }
    assert_eq!(rows[2][col("status")], "singular");
}

#[test]
fn beta_sweep_marks_integrable_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let run = hh(
        tmp.path(),
        &[
            "sweep", "--model", "generic:delta=0,Omega=0,alpha=1/10", "--grid", "beta=1/3,2,16/3,1",
            "--x0", "0.2,0.1,0,0.1", "--T", "5",
        ],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let (header, rows) = csv_rows(&only_dir(tmp.path()).join("sweep.csv"));
    let i = header.iter().position(|h| h == "driftI").unwrap();
    let defined: Vec<bool> = rows.iter().map(|r| !r[i].is_empty()).collect();
    assert_eq!(defined, [true, true, true, false]);
}

#[test]
fn lift_reports_and_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = hh(&tmp.path().join("a"), &["lift", "--model", "kdv"]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert!(ok.stdout.contains("PASS lift abstract(M=1) H,I"), "{}", ok.stdout);

    let h = tmp.path().join("h.txt");
    let i = tmp.path().join("i.txt");
    fs::write(&h, "1/2*(p1^2 + p2^2) + q1 + q2^3").unwrap();
    fs::write(&i, "p2").unwrap();
    let bad = hh(&tmp.path().join("b"), &["lift", "--h", h.to_str().unwrap(), "--i", i.to_str().unwrap()]);
    assert_eq!(bad.code, 2, "{}", bad.stderr);
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn resolved_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let run = hh(
        &first,
        &["integrate", "--model", "sk", "--x0", "0.1,0.2,0.05,0", "--T", "3", "--dt", "1e-2", "--record-every", "10"],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let dir = only_dir(&first);
    let config = dir.join("config.toml");
    let again = tmp.path().join("again");
    let out = again.join("out");
    let rerun = hh(&again, &["integrate", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(rerun.code, 0, "{}", rerun.stderr);
    let a: Vec<_> = tree(&dir).into_iter().filter(|(n, _)| n != "config.toml").collect();
    let b: Vec<_> = tree(&out).into_iter().filter(|(n, _)| n != "config.toml").collect();
    assert_eq!(a, b);
}

#[test]
fn bad_config_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "[model]\nname = \"sk\"\n").unwrap();
    assert_eq!(hh(tmp.path(), &["verify", "--config", cfg.to_str().unwrap()]).code, 1);
    assert_eq!(hh(tmp.path(), &["frobnicate"]).code, 1);
}
