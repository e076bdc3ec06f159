mod common;

use common::*;

#[test]
fn ring_laws_hold() {
    ring_laws().unwrap();
}

#[test]
fn leibniz_rule_holds() {
    leibniz().unwrap();
}

#[test]
fn total_derivatives_commute_on_random_functions() {
    total_derivatives_commute().unwrap();
}

#[test]
fn prolongation_is_local_and_formulas_agree() {
    prolongation().unwrap();
}

#[test]
fn reduction_is_idempotent_and_a_homomorphism() {
    reduction().unwrap();
}

#[test]
fn tresse_derivatives_are_dual_and_commute() {
    tresse().unwrap();
}

#[test]
fn commutator_is_bilinear_and_antisymmetric() {
    commutators().unwrap();
}

#[test]
fn derivations_obey_leibniz() {
    derivation_leibniz().unwrap();
}

#[test]
fn printed_expressions_reparse() {
    print_round_trip().unwrap();
}
