mod common;

use std::collections::BTreeSet;

use common::props;
use umbrella::newton::newton_diagram;

#[test]
fn series_ring_laws() {
    props::ring_laws(1000).unwrap();
}

#[test]
fn evaluation_is_a_ring_map_and_respects_composition() {
    props::evaluation(1000).unwrap();
}

#[test]
fn chain_rule() {
    props::chain_rule(1000).unwrap();
}

#[test]
fn formal_inverse_is_two_sided() {
    props::inversion(1000).unwrap();
}

#[test]
fn diagram_matches_hull_oracle() {
    props::diagrams(1000).unwrap();
}

#[test]
fn quadratic_roots_match_closed_form() {
    props::quadratic_roots(1000).unwrap();
}

#[test]
fn discriminant_identity_is_exact() {
    props::discriminant_identity(1000).unwrap();
}

#[test]
fn jet_json_round_trip() {
    props::jet_round_trip(1000).unwrap();
}

#[test]
fn field_agrees_with_jacobian_route() {
    props::jacobian_route(12).unwrap();
}

#[test]
fn standard_support_drops_the_quartic_term() {
    let standard: BTreeSet<[i32; 2]> = [[2, 0], [0, 2], [4, 0]].into();
    let d = newton_diagram(&standard).unwrap();
    assert_eq!(d.vertices, vec![[2, 0], [0, 2]]);
    props::check_diagram(&d, &standard).unwrap();
}

#[test]
fn oracle_rejects_a_wrong_diagram() {
    // A hull oracle that accepted everything would be useless.
    let pts: BTreeSet<[i32; 2]> = [[3, 0], [1, 1], [0, 3]].into();
    let mut d = newton_diagram(&pts).unwrap();
    assert_eq!(props::oracle_vertices(&pts), vec![[3, 0], [1, 1], [0, 3]]);
    d.vertices.remove(1);
    assert!(props::check_diagram(&d, &pts).is_err());
}
