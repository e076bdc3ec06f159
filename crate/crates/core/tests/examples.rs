mod expressions {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/expressions.rs"));
}

mod total_derivatives {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/total_derivatives.rs"));
}

mod prolongation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/prolongation.rs"));
}

mod point_maps {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/point_maps.rs"));
}

mod solved_equations {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/solved_equations.rs"));
}

mod invariance {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/invariance.rs"));
}

mod find_invariants {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/find_invariants.rs"));
}

mod derivations {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/derivations.rs"));
}

mod hilbert {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/hilbert.rs"));
}

mod scenarios {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenarios.rs"));
}

mod corpus {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/corpus.rs"));
}

mod command_line {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/command_line.rs"));
}

#[test]
fn expressions_example_runs() {
    let out = expressions::run_example().unwrap();
    assert!(out.contains("reparses to the same value: true"), "{out}");
    assert!(out.contains("f - f = 0"), "{out}");
}

#[test]
fn total_derivatives_example_runs() {
    let out = total_derivatives::run_example().unwrap();
    assert!(out.contains("D_y D_x f = D_x D_y f: true"), "{out}");
}

#[test]
fn prolongation_example_runs() {
    let out = prolongation::run_example().unwrap();
    assert!(out.contains("d_y3: 4*y1*y3 + 3*y2^2"), "{out}");
    assert!(out.contains("formulas agree: true"), "{out}");
}

#[test]
fn point_maps_example_runs() {
    let out = point_maps::run_example().unwrap();
    assert!(out.contains("K^2 is fixed: true"), "{out}");
    assert!(out.contains("flips sign: true"), "{out}");
}

#[test]
fn solved_equations_example_runs() {
    let out = solved_equations::run_example().unwrap();
    assert!(out.contains("w_20 -> w^2*w_02 + 2*w*w_01^2"), "{out}");
    assert!(out.contains("idempotent: true"), "{out}");
}

#[test]
fn invariance_example_runs() {
    let out = invariance::run_example().unwrap();
    assert!(out.contains("(1 + y1^2)^3: invariant = true"), "{out}");
    assert!(out.contains("`rotation` leaves 3*y1*y2"), "{out}");
}

#[test]
fn find_invariants_example_runs() {
    let out = find_invariants::run_example().unwrap();
    assert!(out.contains("span{1, u_y}"), "{out}");
}

#[test]
fn derivations_example_runs() {
    let out = derivations::run_example().unwrap();
    assert!(out.contains("in the basis (nabla_x, D_y): (u_xy/u_x, 0)"), "{out}");
    assert!(out.contains("d/du = (1/u_x, 0)"), "{out}");
}

#[test]
fn hilbert_example_runs() {
    let out = hilbert::run_example().unwrap();
    assert!(out.contains("d_k = [0, 0, 1, 1, 1, 1]"), "{out}");
    assert!(out.contains("fit: Fits, d = Some(0), R = [0, 0, 1]"), "{out}");
}

#[test]
fn scenarios_example_runs() {
    let out = scenarios::run_example().unwrap();
    assert!(out.contains("Pass symmetry"), "{out}");
    assert!(out.contains("Pass invariant u_x"), "{out}");
}

#[test]
fn corpus_example_runs() {
    let out = corpus::run_example().unwrap();
    assert!(out.contains("10 passed, 0 failed"), "{out}");
}

#[test]
fn command_line_example_runs() {
    let out = command_line::run_example().unwrap();
    assert!(out.contains("exit 0 schema 1 status \"PASS\""), "{out}");
}
