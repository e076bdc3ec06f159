use std::path::PathBuf;
use std::process::Command;

use jetvariant::cli::{load, run, Outcome};
use jetvariant::expr::parse;
use serde_json::Value;

fn cli(args: &[&str]) -> Outcome {
    let mut all = vec!["jetvariant"];
    all.extend_from_slice(args);
    run(all)
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = cli(&all);
    let v: Value = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {out:?}"));
    assert_eq!(v["schema_version"], 1);
    (v, out.code)
}

fn scratch_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jetvariant-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn invariant_check_passes_with_exit_zero() {
    let out = cli(&["check", "euclidean-curves", "--invariant", "K2", "--order", "2"]);
    assert_eq!(out.code, 0, "{out:?}");
    assert!(out.stdout.starts_with("PASS"));
}

#[test]
fn failed_check_exits_one_and_reports_residue() {
    let (v, code) = json(&["check", "euclidean-curves", "--invariant", "y2"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "FAIL");
    assert_eq!(v["results"][0]["generator"], "rotation");
    assert_eq!(v["results"][0]["residue"], "3*y1*y2");
}

#[test]
fn hilbert_prints_profile_line() {
    let out = cli(&["hilbert", "euclidean-curves", "--max-order", "5", "--seed", "1", "--trials", "8"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().next(), Some("0 0 1 1 1 1"));
}

#[test]
fn hilbert_json_profile_and_range_flag() {
    let (v, code) = json(&["hilbert", "euclidean-curves", "--max-order", "4", "--range", "-3..3"]);
    assert_eq!(code, 0);
    assert_eq!(v["range"], serde_json::json!([-3, 3]));
    assert_eq!(v["profile"]["d"], serde_json::json!([0, 0, 1, 1, 1]));
    assert_eq!(v["profile"]["orbit"], serde_json::json!([2, 3, 3, 3, 3]));
}

#[test]
fn find_without_fields_returns_every_monomial() {
    let path = scratch_file(
        "empty.toml",
        "[context]\nindependents = [\"x\"]\ndependents = [\"y\"]\n",
    );
    let (v, code) = json(&["find", path.to_str().unwrap(), "--order", "1", "--num-degree", "1", "--den", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["dimension"], 4);
    let sc = load(path.to_str().unwrap()).unwrap();
    let basis: Vec<_> = v["basis"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| parse(s.as_str().unwrap(), &sc.ctx).unwrap())
        .collect();
    for want in ["1", "x", "y", "y_1"] {
        let w = parse(want, &sc.ctx).unwrap();
        assert!(basis.iter().any(|b| b.equals(&w)), "{want} missing");
    }
}

#[test]
fn find_on_pseudogroup_equation() {
    let (v, code) = json(&["find", "pseudogroup-ux0", "--order", "1", "--num-degree", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["basis"], serde_json::json!(["1", "u_y"]));
}

#[test]
fn json_expressions_reparse_to_engine_values() {
    let sc = load("euclidean-curves").unwrap();
    let (v, _) = json(&["prolong", "euclidean-curves", "--order", "3", "--field", "rotation"]);
    let coeffs = v["fields"][0]["coefficients"].as_array().unwrap();
    let p = jetvariant::prolong::prolong_field(&sc.algebra.fields[2], 3, &sc.ctx);
    assert_eq!(coeffs.len(), p.coeffs.values().filter(|c| !c.is_zero()).count());
    for c in coeffs {
        let var = sc.ctx.resolve(c["coordinate"].as_str().unwrap()).unwrap();
        let value = parse(c["value"].as_str().unwrap(), &sc.ctx).unwrap();
        assert!(value.equals(&p.coeffs[&var]));
    }
    let (v, _) = json(&["find", "euclidean-curves", "--order", "2", "--num-degree", "2", "--den", "(1+y1^2)^3"]);
    let k2 = parse("y2^2/(1+y1^2)^3", &sc.ctx).unwrap();
    let basis: Vec<_> = v["basis"].as_array().unwrap().iter().map(|s| parse(s.as_str().unwrap(), &sc.ctx).unwrap()).collect();
    assert!(basis.iter().any(|b| b.equals(&k2)));
}

#[test]
fn reduce_expression_and_table() {
    let (v, code) = json(&["reduce", "flux-sl3", "--expr", "w_20"]);
    assert_eq!(code, 0);
    let sc = load("flux-sl3").unwrap();
    let got = parse(v["results"][0]["normal_form"].as_str().unwrap(), &sc.ctx).unwrap();
    assert!(got.equals(&parse("w^2*w_2 + 2*w*w_1^2", &sc.ctx).unwrap()));
    let out = cli(&["reduce", "flux-sl3", "--order", "2"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().count(), 3);
}

#[test]
fn tresse_and_commutators() {
    let (v, code) = json(&["tresse", "pseudogroup-plane", "--invariants", "u,y", "--apply", "u"]);
    assert_eq!(code, 0);
    assert_eq!(v["derivations"][0]["coefficients"], serde_json::json!(["1/u_x", "0"]));
    assert_eq!(v["derivations"][0]["applied"][0]["value"], "1");
    assert_eq!(v["derivations"][1]["applied"][0]["value"], "0");
    let (v, code) = json(&["commutators", "pseudogroup-plane", "--derivations", "nabla_x,Dy"]);
    assert_eq!(code, 0);
    assert_eq!(v["commutators"][0]["coefficients"], serde_json::json!(["u_xy/u_x^2", "0"]));
    assert_eq!(v["commutators"][0]["decomposition"], serde_json::json!(["u_xy/u_x", "0"]));
}

#[test]
fn poincare_from_profile_and_from_scenario() {
    let (v, code) = json(&["poincare", "--profile", "0,0,1,0,1,0,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["fit"]["status"], "unstable");
    let (v, code) = json(&["poincare", "euclidean-curves", "--max-order", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["fit"]["status"], "fits");
    assert_eq!(v["fit"]["d"], 0);
}

#[test]
fn corpus_command_exit_codes() {
    let out = cli(&["corpus", "--filter", "euclidean", "--fast"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("10 passed, 0 failed"));
    assert_eq!(cli(&["corpus", "--filter", "nothing-matches"]).code, 2);
}

#[test]
fn input_errors_exit_two() {
    for args in [
        vec!["bogus"],
        vec!["check"],
        vec!["check", "/no/such/file.toml", "--symmetry"],
        vec!["check", "euclidean-curves", "--invariant", "nonsense_name"],
        vec!["check", "euclidean-curves", "--invariant", "y2 +"],
        vec!["check", "euclidean-curves"],
        vec!["check", "euclidean-curves", "--symmetry"],
        vec!["find", "euclidean-curves", "--order", "1", "--num-degree", "1", "--den", "0"],
        vec!["hilbert", "euclidean-curves", "--range", "5..1"],
        vec!["hilbert", "euclidean-curves", "--trials", "zero"],
        vec!["poincare"],
        vec!["tresse", "pseudogroup-plane", "--invariants", "u"],
        vec!["commutators", "pseudogroup-plane", "--derivations", "missing"],
        vec!["check", "euclidean-curves", "--invariant", "K2", "--fields", "nope"],
    ] {
        let out = cli(&args);
        assert_eq!(out.code, 2, "{args:?}: {out:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn syntax_errors_carry_position() {
    let path = scratch_file(
        "broken.toml",
        "[context]\nindependents = [\"x\"]\ndependents = [\"y\"]\n\n[[fields]]\nname = \"bad\"\nalpha = [\"1 +\"]\nbeta = [\"0\"]\n",
    );
    let out = cli(&["check", path.to_str().unwrap(), "--invariant", "y"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("broken.toml:7:"), "{}", out.stderr);
}

#[test]
fn help_and_version_exit_zero() {
    let out = cli(&["--help"]);
    assert_eq!(out.code, 0);
    for cmd in ["check", "find", "prolong", "reduce", "tresse", "commutators", "hilbert", "poincare", "corpus"] {
        assert!(out.stdout.contains(cmd), "{cmd}");
    }
    assert_eq!(cli(&["--version"]).code, 0);
}

#[test]
fn binary_uses_the_same_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_jetvariant");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["check", "euclidean-curves", "--invariant", "K2"]), Some(0));
    assert_eq!(code(&["check", "euclidean-curves", "--invariant", "y2"]), Some(1));
    assert_eq!(code(&["check", "euclidean-curves", "--invariant", "zz"]), Some(2));
    let out = Command::new(bin)
        .args(["--json", "check", "euclidean-curves", "--invariant", "K2"])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
}
