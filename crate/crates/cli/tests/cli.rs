use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn simplek(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simplek"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn ok(out: &Path, args: &[&str]) -> String {
    let o = simplek(out, args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

fn pipeline(out: &Path, extra: &[&str]) {
    for step in ["build", "kappa", "construct", "verify"] {
        let mut args = vec![step];
        args.extend_from_slice(extra);
        ok(out, &args);
    }
}

#[test]
fn default_pipeline_and_queries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert!(ok(out, &["build"]).starts_with("programs=55987 data=49 "));
    assert_eq!(ok(out, &["kappa"]), "kappa=3 pairs=42");
    ok(out, &["construct"]);
    assert_eq!(ok(out, &["verify"]), "triples=294 all_exact=true kappa=3");
    assert_eq!(ok(out, &["delta-report"]), "finite=343 infinite=0 min=-6 max=3");

    assert_eq!(ok(out, &["query", "kU", "^", "^"]), "3 111");
    assert_eq!(ok(out, &["query", "kU", "11", "11"]), "6 010111");
    assert_eq!(ok(out, &["query", "kU", "0101010101010", "^"]), "inf");

    // K_W(α|⟨γ,d⟩) against the theorem's right-hand side
    let k = |x: &str, d: &str| -> i64 {
        ok(out, &["query", "kU", x, d]).split(' ').next().unwrap().parse().unwrap()
    };
    let kw = ok(out, &["query", "kW", "0", "1", "^"]);
    let (len, code) = kw.split_once(' ').unwrap();
    // ⟨0, 1⟩ = "001"
    assert_eq!(len.parse::<i64>().unwrap(), k("001", "^") - k("1", "^") + 3);
    assert_eq!(code.len().to_string(), len);
    assert_eq!(ok(out, &["query", "kW", "0", "^", "1"]), ok(out, &["query", "kU", "0", "1"]));
}

#[test]
fn trivial_delta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    pipeline(out, &["--delta", "1"]);
    assert_eq!(ok(out, &["verify", "--delta", "1"]), "triples=0 all_exact=true kappa=1");
    assert_eq!(
        ok(out, &["delta-report", "--delta", "1"]),
        "finite=1 infinite=0 min=-3 max=-3"
    );
    let survey = fs::read_to_string(out.join("delta_survey.tsv")).unwrap();
    assert!(survey.ends_with("-3\t1\n"));
}

#[test]
fn tampered_wtable_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    pipeline(out, &["--delta", "5"]);
    let path = out.join("wtable.tsv");
    let text = fs::read_to_string(&path).unwrap();
    let target: Vec<String> = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split('\t')
        .map(str::to_owned)
        .collect();
    // lengthen every codeword W_s uses for this (d, r)
    let tampered: String = text
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            if f.len() == 5 && f[0] == target[0] && f[1] == target[1] && f[3] == target[3] {
                format!("{}\t{}\t{}11\t{}\t{}\n", f[0], f[1], f[2], f[3], f[4])
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    fs::write(&path, tampered).unwrap();
    let o = simplek(out, &["verify", "--delta", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("all_exact=false"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("residual="));
}

#[test]
fn missing_or_mismatched_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(simplek(out, &["kappa", "--delta", "5"]).status.code(), Some(2));
    ok(out, &["build", "--delta", "5"]);
    assert_eq!(simplek(out, &["construct", "--delta", "5"]).status.code(), Some(2));
    ok(out, &["kappa", "--delta", "5"]);
    // artifacts built under another configuration are refused
    assert_eq!(simplek(out, &["kappa", "--delta", "5", "--steps", "500"]).status.code(), Some(2));
    fs::remove_file(out.join("ktable.tsv")).unwrap();
    assert_eq!(simplek(out, &["query", "kU", "^", "^", "--delta", "5"]).status.code(), Some(2));
}

#[test]
fn bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    fs::write(&file, "").unwrap();
    let o = simplek(&file.join("sub"), &["build", "--delta", "1"]);
    assert_ne!(o.status.code(), Some(0));

    let out = dir.path().join("lab");
    assert_eq!(simplek(&out, &["query", "kU", "012", "^"]).status.code(), Some(2));
    assert_eq!(simplek(&out, &["query", "kW", "0", "1"]).status.code(), Some(2));
    assert_eq!(simplek(&out, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(simplek(&out, &["build", "--max-len", "15"]).status.code(), Some(3));
    ok(&out, &["build", "--max-len", "15", "--allow-partial"]);
}
