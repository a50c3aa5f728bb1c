use std::path::Path;
use std::process::{Command, Output};

use decomp_lab::linalg::ComplexMatrix;
use decomp_lab::superop::SuperOperator;
use decomp_lab::C64;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decomp-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(o: &Output, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no '{key}' line in {}", stdout(o)))
        .parse()
        .unwrap()
}

fn write_map(dir: &Path, name: &str, t: &SuperOperator) -> String {
    let path = dir.join(name);
    t.write_json(&path).unwrap();
    path.to_str().unwrap().to_owned()
}

fn pauli_row() -> SuperOperator {
    let x = ComplexMatrix::from_fn(2, 2, |i, j| if i != j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let z = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => C64::new(1.0, 0.0),
        (1, 1) => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 0.0),
    });
    SuperOperator::from_commutative(&[x, z]).unwrap()
}

#[test]
fn identity_map_has_norm_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_map(dir.path(), "id.json", &SuperOperator::identity(3));
    let o = run(&["dec-norm", &f, "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((value(&o, "dec") - 1.0).abs() < 1e-6);
    assert!((value(&o, "cb") - 1.0).abs() < 1e-6);
    assert!(dir.path().join("id.witness.json").exists());
    assert!(dir.path().join("id.report.json").exists());
}

#[test]
fn transpose_on_m2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_map(dir.path(), "t.json", &SuperOperator::transpose_map(2));
    let o = run(&["dec-norm", &f, "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!((value(&o, "dec") - 2.0).abs() < 1e-5);
    // The witness file parses back into maps of the right shape.
    let w: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.witness.json")).unwrap()).unwrap();
    let v1: SuperOperator = serde_json::from_value(w["v1"].clone()).unwrap();
    assert_eq!((v1.in_dim(), v1.out_dim()), (2, 2));
}

#[test]
fn pauli_unitary_row() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_map(dir.path(), "row.json", &pauli_row());
    let o = run(&["dec-norm", &f, "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!((value(&o, "dec") - 2.0).abs() < 1e-5, "{}", stdout(&o));
}

#[test]
fn schur_symbol_at_finite_p() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("schur.json");
    let sym = serde_json::json!({
        "kind": "schur",
        "values": { "rows": 2, "cols": 2, "re": [1.0, 1.0, 0.0, 1.0], "im": [0.0, 0.0, 0.0, 0.0] }
    });
    std::fs::write(&path, sym.to_string()).unwrap();
    let o = run(&["dec-norm", path.to_str().unwrap(), "--p", "3", "--restarts", "4", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    // Triangular truncation on M_2: dec = 2/√3.
    assert!((value(&o, "dec") - 2.0 / 3f64.sqrt()).abs() < 1e-5);
    assert!(stdout(&o).contains("PASS estimate below dec"));
}

#[test]
fn general_map_needs_p_infinity() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_map(dir.path(), "id.json", &SuperOperator::identity(2));
    let o = run(&["dec-norm", &f, "--p", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["dec-norm", bad.to_str().unwrap()]).status.code(), Some(2));
    let shape = dir.path().join("shape.json");
    std::fs::write(&shape, r#"{"in_dim": 2, "out_dim": 2, "choi": {"rows": 1, "cols": 1, "re": [1], "im": [0]}}"#).unwrap();
    assert_eq!(run(&["dec-norm", shape.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["dec-norm", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["verify", "no-such-suite"]).status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_map(dir.path(), "t.json", &SuperOperator::transpose_map(3));
    let o = run(&["dec-norm", &f, "--sdp-maxiter", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_unitary_row_and_modulus() {
    let o = run(&["verify", "unitary-row"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS unitary row"));
    let o = run(&["verify", "modulus", "--seed", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS modulus block: 50/50"));
}

#[test]
fn failing_assertion_exits_1_with_witness() {
    let o = run(&["verify", "unitary-row", "--tol-scale", "1e-12"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("failed: unitary row"));
    assert!(err.lines().any(|l| l.starts_with("witness: {")));
}

/// Report rerun with the same seed: CSVs and every field but wall time agree byte for byte.
#[test]
fn quick_report_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = run(&["report", "--quick", "--seed", "11", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", stdout(&o));
    }
    for f in ["truncation.csv", "matsaev.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let strip = |d: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_s");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(a.path()), strip(b.path()));
}
