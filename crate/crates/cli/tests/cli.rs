use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;
use ultrarep::fixtures;
use ultrarep::reps::factor_projection;
use ultrarep::{IndexSet, Representation};

fn ultrarep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultrarep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    succeeds(out);
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn succeeds(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn write(dir: &Path, name: &str, value: &impl serde::Serialize) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn xy() -> IndexSet {
    IndexSet::from_pairs([("x", 1), ("y", 2)]).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `S · p_y · S⁻¹` for a seeded `S`.
fn conjugated_point(set: &IndexSet, label: &str, seed: u64) -> Representation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = set.index_of(label).unwrap();
    fixtures::conjugated_sum(set, &[(y, 1)], 50.0, &mut rng).unwrap().rep
}

#[test]
fn decompose_factor_projection() {
    let dir = TempDir::new().unwrap();
    let rep = write(dir.path(), "py.json", &factor_projection(&xy(), 1).unwrap());
    let out = stdout_json(&ultrarep(&["decompose", s(&rep)]));
    assert_eq!(out["support"], serde_json::json!(["y"]));
    assert_eq!(out["multiplicities"], serde_json::json!({"y": 1}));
    assert!(out["residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn selfcheck_passes() {
    let out = stdout_json(&ultrarep(&["selfcheck"]));
    assert_eq!(out["passed"], Value::Bool(true));
    let checks = out["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks[0]["detail"].as_str().unwrap().contains("commutant 2"));
}

#[test]
fn extract_filter_from_conjugated_point() {
    let dir = TempDir::new().unwrap();
    let rep = write(dir.path(), "r.json", &conjugated_point(&xy(), "y", 3));
    let out = stdout_json(&ultrarep(&["extract-filter", s(&rep)]));
    assert_eq!(out["kernel"], serde_json::json!(["y"]));
    assert_eq!(out["universe"], serde_json::json!(["x", "y"]));
}

#[test]
fn rebuilt_representation_is_equivalent() {
    let dir = TempDir::new().unwrap();
    let set = IndexSet::from_pairs([("a", 1), ("b", 3), ("c", 2)]).unwrap();
    let index_set = write(dir.path(), "set.json", &set);
    for (seed, label) in ["a", "b", "c"].into_iter().enumerate() {
        let original = write(dir.path(), "orig.json", &conjugated_point(&set, label, seed as u64));
        let filter = dir.path().join("filter.json");
        let rebuilt = dir.path().join("rebuilt.json");
        succeeds(&ultrarep(&["extract-filter", s(&original), "--out", s(&filter)]));
        succeeds(&ultrarep(&[
            "build-rep",
            s(&filter),
            "--index-set",
            s(&index_set),
            "--out",
            s(&rebuilt),
        ]));
        let cert = stdout_json(&ultrarep(&["check-equiv", s(&rebuilt), s(&original)]));
        assert_eq!(cert["equivalent"], Value::Bool(true), "point {label}");
        assert!(cert["residual"].as_f64().unwrap() <= 1e-7);
    }
}

#[test]
fn build_rep_with_basis_choice() {
    let dir = TempDir::new().unwrap();
    let filter = write(
        dir.path(),
        "f.json",
        &serde_json::json!({"universe": ["x", "y"], "kernel": ["y"]}),
    );
    let set = write(dir.path(), "set.json", &xy());
    let basis = write(
        dir.path(),
        "basis.json",
        &serde_json::json!({"y": {"rows": 2, "cols": 2, "data": [[1, 0], [1, 0], [0, 0], [2, 0]]}}),
    );
    let out = stdout_json(&ultrarep(&[
        "build-rep",
        s(&filter),
        "--index-set",
        s(&set),
        "--basis",
        s(&basis),
    ]));
    assert_eq!(out["carrier_dim"], 2);
    let rep: Representation = serde_json::from_value(out).unwrap();
    assert!(rep.validate(1e-8).unwrap().valid);
}

#[test]
fn non_ultrafilter_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let filter = write(
        dir.path(),
        "f.json",
        &serde_json::json!({"universe": ["x", "y"], "kernel": ["x", "y"]}),
    );
    let set = write(dir.path(), "set.json", &xy());
    let out = ultrarep(&["build-rep", s(&filter), "--index-set", s(&set)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "not_an_ultrafilter");
}

#[test]
fn broken_representation_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let mut rep = serde_json::to_value(factor_projection(&xy(), 1).unwrap()).unwrap();
    rep["images"]["y:1:2"]["data"][0] = serde_json::json!([3.0, 0.0]);
    let path = write(dir.path(), "bad.json", &rep);
    for cmd in ["validate", "decompose", "extract-filter"] {
        let out = ultrarep(&[cmd, s(&path)]);
        assert_eq!(out.status.code(), Some(1), "{cmd}");
        assert_eq!(stderr_json(&out)["error"], "not_a_representation");
    }
}

#[test]
fn reducible_representation_has_no_filter() {
    let dir = TempDir::new().unwrap();
    let set = xy();
    let rep = factor_projection(&set, 0)
        .unwrap()
        .direct_sum(&factor_projection(&set, 1).unwrap())
        .unwrap();
    let path = write(dir.path(), "sum.json", &rep);
    let out = ultrarep(&["extract-filter", s(&path)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "not_irreducible");
}

#[test]
fn io_and_schema_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    let out = ultrarep(&["decompose", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "io_error");

    let garbage = write(dir.path(), "g.json", &serde_json::json!({"rows": 2}));
    let out = ultrarep(&["spectrum", s(&garbage)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "schema_error");

    let out = ultrarep(&["--tol", "-1", "selfcheck"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ultrarep(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_of_involution() {
    let dir = TempDir::new().unwrap();
    let m = write(
        dir.path(),
        "a.json",
        &serde_json::json!({"rows": 2, "cols": 2, "data": [[0, 0], [0.5, 0], [2, 0], [0, 0]]}),
    );
    let out = stdout_json(&ultrarep(&["spectrum", s(&m)]));
    let eig = out["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 2);
    assert!((eig[0][0].as_f64().unwrap() + 1.0).abs() < 1e-10);
    assert!((eig[1][0].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn enumerate_lists_factor_projections() {
    let dir = TempDir::new().unwrap();
    let set = write(dir.path(), "set.json", &xy());
    let out = stdout_json(&ultrarep(&["enumerate", s(&set)]));
    let reps: Vec<Representation> = serde_json::from_value(out).unwrap();
    assert_eq!(reps.len(), 2);
    assert_eq!(reps[0], factor_projection(&xy(), 0).unwrap());
    assert_eq!(reps[1], factor_projection(&xy(), 1).unwrap());
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let rep = write(dir.path(), "r.json", &conjugated_point(&xy(), "y", 9));
    let first = ultrarep(&["decompose", s(&rep)]);
    let second = ultrarep(&["decompose", s(&rep)]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn gen_fixture_is_seeded() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_gen-fixture"))
            .args(["--seed", seed, "--points", "a:2,b:1", "--mult", "a:2,b:1", "--cond", "20"])
            .output()
            .unwrap()
    };
    let first = run("5");
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, run("5").stdout);
    assert_ne!(first.stdout, run("6").stdout);

    let dir = TempDir::new().unwrap();
    let path = dir.path().join("fx.json");
    std::fs::write(&path, &first.stdout).unwrap();
    let out = stdout_json(&ultrarep(&["decompose", s(&path)]));
    assert_eq!(out["multiplicities"], serde_json::json!({"a": 2, "b": 1}));

    let bad = Command::new(env!("CARGO_BIN_EXE_gen-fixture"))
        .args(["--seed", "1", "--points", "a:2", "--mult", "z:1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
