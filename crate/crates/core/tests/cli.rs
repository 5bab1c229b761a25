use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ergolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergolab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn builtin_names() -> Vec<String> {
    let o = ergolab(&["list"]);
    assert_eq!(code(&o), 0);
    String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .filter_map(|l| l.split_whitespace().next().map(str::to_owned))
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn list_shows_builtins() {
    let names = builtin_names();
    assert!(names.len() >= 8, "{names:?}");
    for want in ["cantor-example-4.4", "skew-torus-example-4.5", "chacon-example-4.2", "rudin-shapiro-example-4.3"] {
        assert!(names.iter().any(|n| n == want), "missing {want}");
    }
}

#[test]
fn describe_prints_json_and_rejects_unknown() {
    let o = ergolab(&["describe", "vdc-lemma-7.1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["name"], "vdc-lemma-7.1");
    assert_eq!(code(&ergolab(&["describe", "no-such-scenario"])), 2);
}

#[test]
fn empty_scenario_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "empty.json", r#"{"name": "empty", "steps": []}"#);
    let out = dir.path().join("out");
    let o = ergolab(&["run", &file, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(!out.exists());
}

#[test]
fn unknown_system_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"name": "bad", "steps": [{"op": "correlation",
        "system": {"name": "x", "family": "foo"},
        "f": {"name": "f", "kind": {"type": "character", "frequencies": [1]}},
        "lags": [0, 1]}]}"#;
    let file = write(dir.path(), "bad.json", text);
    let o = ergolab(&["run", &file, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "broken.json", "{\"name\": \"x\",\n  \"steps\": [\n");
    let o = ergolab(&["run", &file, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3 column"), "{err}");
}

#[test]
fn failed_expectation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"name": "strict", "steps": [{"op": "cantor_identities", "max_n": 64,
        "factor_range": 2, "factor_power": 6,
        "expect": [{"path": "/max_factorization_gap", "le": -1.0}]}]}"#;
    let file = write(dir.path(), "strict.json", text);
    let out = dir.path().join("o");
    let o = ergolab(&["run", &file, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("strict.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], false);
}

#[test]
fn every_builtin_passes_and_is_deterministic() {
    for name in builtin_names() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for dir in [&a, &b] {
            let o = ergolab(&["run", &name, "--out", dir.path().to_str().unwrap()]);
            assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stdout));
        }
        let mut files: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        files.sort();
        assert!(files.iter().any(|f| f.to_str() == Some(&format!("{name}.json"))));
        for f in files {
            let x = fs::read(a.path().join(&f)).unwrap();
            let y = fs::read(b.path().join(&f)).unwrap();
            assert!(x == y, "{name}: {f:?} differs between runs");
        }
    }
}

#[test]
fn seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let o = ergolab(&["run", "vdc-lemma-7.1", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("vdc-lemma-7.1.json")).unwrap()).unwrap();
    assert_eq!(v["seed"], 7);
}
