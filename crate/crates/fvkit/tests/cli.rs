use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fvkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fvkit")).current_dir(dir).args(args).output().expect("spawn fvkit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn parse_prints_canonically() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.fml", "; units\n(forall x (exists y (or (= x 0) (= (* x y) 1))))\n");
    let o = fvkit(dir.path(), &["parse", "a.fml"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let printed = stdout(&o);
    write(dir.path(), "b.fml", &printed);
    let again = fvkit(dir.path(), &["parse", "b.fml"]);
    assert_eq!(stdout(&again), printed);
}

#[test]
fn eval_reports_truth_in_builtin_field() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.fml", "(forall x (exists y (or (= x 0) (= (* x y) 1))))");
    let o = fvkit(dir.path(), &["eval", "--structure", "(builtin gf 4)", "a.fml"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("true"), "{}", stdout(&o));
}

#[test]
fn missing_structure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.fml", "(= 0 0)");
    let o = fvkit(dir.path(), &["eval", "--structure", "nope.str", "a.fml"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("nope.str: file not found"), "{err}");
}

#[test]
fn malformed_formula_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.fml", "(and\n  (=== x 0))");
    let o = fvkit(dir.path(), &["parse", "bad.fml"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.fml: 2:4:"), "{err}");
}

const CONFIG: &str = r#"
seed = 11

[[suite]]
name = "fv"
kind = "fv-verify"
products = ["f2f3.prod", "(product (factors (builtin gf 2) (builtin gf 4)))"]
formulas = ["units.fml"]
corpus = { depth = 1, free = 1, sample = 20 }

[[suite]]
name = "rings"
kind = "vnr"
rings = ["(builtin zmod 6)", "(builtin dual 2)"]

[[suite]]
name = "dense-f4f2"
kind = "dense"
products = ["(product (factors (builtin gf-pair 4 2)))"]
chi = "chi.fml"
d_max = 2
"#;

fn run_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "f2f3.prod", "(product (factors (builtin gf 2) (builtin gf 3)))\n");
    write(dir.path(), "units.fml", "(forall x (exists y (or (= x 0) (= (* x y) 1))))\n");
    write(dir.path(), "chi.fml", "(= x x)\n");
    write(dir.path(), "run.toml", CONFIG);
    dir
}

#[test]
fn run_passes_with_report_only_failure() {
    let dir = run_dir();
    let o = fvkit(dir.path(), &["run", "run.toml", "--out", "report.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "pass");
    assert_eq!(report["seed"], 11);
    assert!(report["input_hashes"]["f2f3.prod"].is_string());
    assert!(report["input_hashes"]["config"].is_string());
    let dense = report["report_only"].as_array().unwrap().iter().find(|s| s["suite"] == "dense-f4f2").expect("dense suite");
    assert_eq!(dense["status"], "fail");
    let d2 = dense["checks"].as_array().unwrap().iter().find(|c| c["status"] == "fail").unwrap();
    assert!(d2.to_string().contains("x^2 + x + 1"), "{d2}");
}

#[test]
fn run_digest_is_stable() {
    let dir = run_dir();
    let digest = |out: &str| {
        let o = fvkit(dir.path(), &["run", "run.toml", "--out", out]);
        assert_eq!(o.status.code(), Some(0));
        let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join(out)).unwrap()).unwrap();
        v["digest"].as_str().unwrap().to_string()
    };
    assert_eq!(digest("a.json"), digest("b.json"));
}

#[test]
fn run_fails_on_assertive_failure() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "run.toml",
        "[[suite]]\nkind = \"axioms\"\ntheory = \"T_v\"\nstructures = [\"(builtin zmod 4)\"]\nexpect_all_hold = true\n",
    );
    let o = fvkit(dir.path(), &["run", "run.toml"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn run_with_missing_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.toml", "[[suite]]\nkind = \"projector\"\nstructures = [\"gone.str\"]\n");
    let o = fvkit(dir.path(), &["run", "run.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gone.str"));
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn corpus_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = fvkit(dir.path(), &["corpus", "--max-depth", "1", "--free", "1", "--sample", "30", "--seed", "5", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = tree(&dir.path().join("a"));
    assert!(a.iter().any(|(p, _)| p.ends_with(".fml")));
    assert_eq!(a, tree(&dir.path().join("b")));
}

#[test]
fn axioms_emit_writes_parseable_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = fvkit(dir.path(), &["axioms", "emit", "--theory", "T_v", "--out", "tv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("tv/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["roundtrip_failures"].as_array().map(Vec::len), Some(0));
    let axioms = manifest["axioms"].as_array().unwrap();
    assert!(!axioms.is_empty());
    for ax in axioms {
        let file = ax["file"].as_str().unwrap();
        let o = fvkit(&dir.path().join("tv"), &["parse", file, "--sig", "signature.sig"]);
        assert_eq!(o.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn ring_derivations_roundtrip_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = fvkit(dir.path(), &["ring", "derivations", "(builtin dual 2)"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("derivation"), "{text}");
    let o = fvkit(dir.path(), &["ring", "check", "(builtin zmod 6)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
