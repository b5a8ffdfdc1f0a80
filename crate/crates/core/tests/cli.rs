use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fabry::cli::{AnalyzeBody, CoverBody, Document, ProbeBody};
use serde_json::{json, Value};

fn fabry(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fabry")).args(args).current_dir(dir).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) {
    let out = fabry(dir, args);
    assert_eq!(out.status.code(), Some(0), "fabry {args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn generate(dir: &Path, name: &str, spec: Value) -> String {
    let spec_path = format!("{name}.spec.json");
    fs::write(dir.join(&spec_path), spec.to_string()).unwrap();
    let out = format!("{name}.jsonl");
    ok(dir, &["generate", &spec_path, "-o", &out]);
    out
}

fn records(dir: &Path, file: &str) -> Vec<Value> {
    fs::read_to_string(dir.join(file)).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn geometric_file_has_unit_records() {
    let tmp = tempfile::tempdir().unwrap();
    let f = generate(tmp.path(), "g", json!({"family": "geometric", "N": 8}));
    let recs = records(tmp.path(), &f);
    assert_eq!(recs.len(), 9);
    assert!(recs.iter().all(|r| r["re"] == "1" && r["im"] == "0"));
}

#[test]
fn hadamard_file_is_supported_on_powers_of_two() {
    let tmp = tempfile::tempdir().unwrap();
    let f = generate(tmp.path(), "h", json!({"family": "hadamard_gap", "N": 16}));
    let nonzero: Vec<u64> =
        records(tmp.path(), &f).iter().filter(|r| r["re"] != "0" || r["im"] != "0").map(|r| r["m"].as_u64().unwrap()).collect();
    assert_eq!(nonzero, vec![1, 2, 4, 8, 16]);
}

#[test]
fn generation_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = json!({"family": "random_signs", "N": 256, "seed": 7});
    let a = generate(tmp.path(), "a", spec.clone());
    let b = generate(tmp.path(), "b", spec);
    assert_eq!(fs::read(tmp.path().join(a)).unwrap(), fs::read(tmp.path().join(b)).unwrap());
}

#[test]
fn analyze_geometric_and_reproduce_from_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let f = generate(dir, "g", json!({"family": "geometric", "N": 4096}));
    ok(dir, &["analyze", &f, "-o", "a1.json"]);
    ok(dir, &["--config", "a1.json", "analyze", &f, "-o", "a2.json"]);
    assert_eq!(fs::read(dir.join("a1.json")).unwrap(), fs::read(dir.join("a2.json")).unwrap());
    let doc: Document<AnalyzeBody> = Document::read(&dir.join("a1.json"), "density_report").unwrap();
    assert_eq!(doc.schema_version, 1);
    assert_eq!(doc.body.delta, 0.0);
    assert!(doc.body.report.chain_ok);
}

#[test]
fn analyze_density_gap_support() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let f = generate(dir, "d", json!({"family": "density_gap", "params": {"density": "1/2"}, "N": 4096}));
    ok(dir, &["analyze", &f, "--lambda", "nonzero", "-o", "a.json"]);
    let doc: Document<AnalyzeBody> = Document::read(&dir.join("a.json"), "density_report").unwrap();
    assert!((doc.body.report.d2.value - 0.5).abs() <= 0.02, "{}", doc.body.report.d2.value);
}

#[test]
fn probe_recovers_poles() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let g = generate(dir, "g", json!({"family": "geometric", "N": 64}));
    ok(dir, &["probe", &g, "--pade", "1", "1", "-o", "p.json"]);
    let doc: Document<ProbeBody> = Document::read(&dir.join("p.json"), "probe_report").unwrap();
    let poles = &doc.body.report.pade[0].poles;
    assert_eq!(poles.len(), 1);
    assert!((poles[0] - num_complex::Complex64::new(1.0, 0.0)).norm() < 1e-12);

    let two = generate(
        dir,
        "two",
        json!({"family": "rational", "params": {"poles": [{"r": 1.0, "theta": 0.0}, {"r": 2.0, "theta": std::f64::consts::PI}]}, "N": 64}),
    );
    ok(dir, &["probe", &two, "--pade", "2", "2", "-o", "p2.json"]);
    let doc: Document<ProbeBody> = Document::read(&dir.join("p2.json"), "probe_report").unwrap();
    let mut re: Vec<f64> = doc.body.report.pade[0].poles.iter().map(|p| p.re).collect();
    re.sort_by(f64::total_cmp);
    assert!((re[0] + 2.0).abs() < 1e-9 && (re[1] - 1.0).abs() < 1e-9, "{re:?}");
}

#[test]
fn probe_against_a_report_emits_a_narrative() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let f = generate(dir, "h", json!({"family": "hadamard_gap", "N": 4096}));
    ok(dir, &["analyze", &f, "-o", "a.json"]);
    ok(dir, &["probe", &f, "--pade", "16", "16", "--report", "a.json", "-o", "p.json"]);
    let doc: Document<ProbeBody> = Document::read(&dir.join("p.json"), "probe_report").unwrap();
    let arc = doc.body.arc_consistency.expect("arc check");
    assert!(!arc.narrative.is_empty());
}

#[test]
fn cover_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for (input, want) in [(json!([[0, 3], [1, 2]]), vec![(0.0, 3.0)]), (json!([[0, 2], [1, 3]]), vec![(0.0, 2.0), (1.0, 3.0)])] {
        fs::write(dir.join("e.json"), input.to_string()).unwrap();
        ok(dir, &["cover", "e.json", "-o", "c.json"]);
        let doc: Document<CoverBody> = Document::read(&dir.join("c.json"), "cover").unwrap();
        assert_eq!(doc.body.selected.pairs(), want);
        assert!(doc.body.audit.union_preserved && doc.body.audit.max_multiplicity <= 2);
    }
}

#[test]
fn input_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(fabry(dir, &["analyze", "missing.jsonl", "-o", "a.json"]).status.code(), Some(2));
    fs::write(dir.join("bad.jsonl"), "{\"m\":0,\"re\":\"1\",\"im\":\"0\"}\nnot json\n").unwrap();
    let out = fabry(dir, &["analyze", "bad.jsonl", "-o", "a.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"), "{}", String::from_utf8_lossy(&out.stderr));
    fs::write(dir.join("e.json"), "[[3, 1]]").unwrap();
    assert_eq!(fabry(dir, &["cover", "e.json", "-o", "c.json"]).status.code(), Some(2));
}
