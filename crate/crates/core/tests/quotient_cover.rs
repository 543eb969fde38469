mod support;

use hatc_core::cover::{
    check_lemma_nq, compose, derived_cover, quotient, quotient_group_action, translation_action,
    Projection, SpanningTree, VoltageAssignment,
};
use hatc_core::symmetry::{aut_group, certificate, GraphAction};
use hatc_core::{Graph, Perm};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{cycle, graph_pool};

fn rotation(n: usize, k: usize) -> Perm {
    Perm::from_images((0..n).map(|i| (i + k) % n).collect()).unwrap()
}

fn vertex_action(g: &Graph, perms: Vec<Perm>) -> GraphAction {
    GraphAction::from_vertex_perms(g, perms, None).unwrap()
}

#[test]
fn trivial_group_gives_an_isomorphic_quotient() {
    for g in graph_pool() {
        let n = GraphAction::trivial(&g);
        let (q, proj) = quotient(&g, &n).unwrap();
        assert_eq!(certificate(&q).unwrap(), certificate(&g).unwrap());
        assert!(proj.is_covering());
        assert_eq!(proj.constant_fibre_size(), Some(1));
        let c = check_lemma_nq(&g, &n).unwrap();
        assert!(c.semiregular && c.valence_preserving && c.covering);
    }
}

#[test]
fn hexagon_over_half_turn_is_a_triangle() {
    let h = cycle(6);
    let n = vertex_action(&h, vec![rotation(6, 3)]);
    let (q, proj) = quotient(&h, &n).unwrap();
    assert_eq!(certificate(&q).unwrap(), certificate(&cycle(3)).unwrap());
    assert_eq!(proj.constant_fibre_size(), Some(2));
    let c = check_lemma_nq(&h, &n).unwrap();
    assert!(c.semiregular && c.valence_preserving && c.covering);
}

#[test]
fn square_reflection_through_two_vertices_is_not_a_covering() {
    let s = cycle(4);
    let n = vertex_action(&s, vec![Perm::from_cycles(4, &[&[1, 3]]).unwrap()]);
    let (q, proj) = quotient(&s, &n).unwrap();
    // the fixed vertices become ends of a path of length two
    assert_eq!((q.vertex_count(), q.dart_count()), (3, 4));
    assert!(!q.has_semiedges());
    assert!(!proj.is_covering());
    let c = check_lemma_nq(&s, &n).unwrap();
    assert!(!c.semiregular && !c.valence_preserving && !c.covering);
}

#[test]
fn doubled_cycle_semiregular_element() {
    let g = Graph::doubled_cycle(6).unwrap();
    let aut = aut_group(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = (0..2000)
        .map(|_| aut.random_subgroup(&g, 1, &mut rng))
        .find(|n| n.order() > 1 && check_lemma_nq(&g, n).unwrap().semiregular)
        .expect("a semiregular element");
    let c = check_lemma_nq(&g, &n).unwrap();
    assert!(c.valence_preserving && c.covering);
}

#[test]
fn derived_cover_examples() {
    let t = cycle(3);
    let cot = SpanningTree::bfs(&t).unwrap().cotree_darts(&t);
    assert_eq!(cot.len(), 1);
    let z = VoltageAssignment::new(&t, 2, 1, &[(cot[0], vec![1])]).unwrap();
    let (c, proj) = derived_cover(&z).unwrap();
    assert_eq!(certificate(&c).unwrap(), certificate(&cycle(6)).unwrap());
    assert!(proj.is_covering());
    assert_eq!(proj.constant_fibre_size(), Some(2));
    // zero voltage disconnects the cover
    let zero = VoltageAssignment::new(&t, 2, 1, &[]).unwrap();
    assert!(derived_cover(&zero).is_err());
    // the empty voltage space gives back the base
    let d0 = VoltageAssignment::new(&t, 3, 0, &[]).unwrap();
    let (c0, p0) = derived_cover(&d0).unwrap();
    assert_eq!(c0, t);
    assert_eq!(p0, Projection::identity(&t));
    assert!(VoltageAssignment::new(&t, 4, 1, &[]).is_err());
    assert!(VoltageAssignment::new(&Graph::four_semiedge_vertex(), 2, 1, &[]).is_err());
}

#[test]
fn translations_quotient_back_to_the_base() {
    let t = cycle(3);
    let cot = SpanningTree::bfs(&t).unwrap().cotree_darts(&t);
    let z = VoltageAssignment::new(&t, 5, 1, &[(cot[0], vec![2])]).unwrap();
    let (c, _) = derived_cover(&z).unwrap();
    let tr = translation_action(&c, 5, 1).unwrap();
    assert_eq!(tr.order(), 5);
    let (q, _) = quotient(&c, &tr).unwrap();
    assert_eq!(certificate(&q).unwrap(), certificate(&t).unwrap());
}

#[test]
fn composition_examples() {
    let c12 = cycle(12);
    let (c6, inner) = quotient(&c12, &vertex_action(&c12, vec![rotation(12, 6)])).unwrap();
    // the rotation of the 12-cycle induces a rotation of the hexagon
    let step = vertex_action(&c12, vec![rotation(12, 1)]);
    let r = quotient_group_action(
        &c12,
        &step,
        &vertex_action(&c12, vec![rotation(12, 6)]),
        &inner,
    )
    .unwrap();
    let h3 = GraphAction::new(
        &c6,
        vec![r.vertex_perms()[0].pow(3)],
        vec![r.dart_perms()[0].pow(3)],
        None,
    )
    .unwrap();
    let (c3, outer) = quotient(&c6, &h3).unwrap();
    assert_eq!(certificate(&c3).unwrap(), certificate(&cycle(3)).unwrap());
    let both = compose(&outer, &inner).unwrap();
    assert!(both.is_covering());
    assert_eq!(both.constant_fibre_size(), Some(4));
    assert_eq!(compose(&Projection::identity(&c3), &both).unwrap(), both);
    assert_eq!(compose(&both, &Projection::identity(&c12)).unwrap(), both);
    assert!(compose(&inner, &outer).is_err());
}

#[test]
fn semiregular_valence_preserving_and_covering_agree() {
    let fixtures = support::subgroup_fixtures(2024);
    assert!(fixtures.len() >= 100, "only {} fixtures", fixtures.len());
    let (mut yes, mut no) = (0, 0);
    for (name, g, n) in &fixtures {
        let c = check_lemma_nq(g, n).unwrap();
        assert!(
            c.semiregular == c.valence_preserving && c.valence_preserving == c.covering,
            "{name}: {c:?}"
        );
        if c.covering {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 10 && no > 10, "{yes} coverings, {no} non-coverings");
}

#[test]
fn normal_covering_quotients_transfer_symmetry() {
    let fixtures = support::normal_fixtures(7);
    assert!(fixtures.len() >= 30, "only {} fixtures", fixtures.len());
    let mut nontrivial = 0;
    for (name, g, a, n) in &fixtures {
        assert_eq!(support::normal_quotient_mismatch(g, a, n), None, "{name}");
        if n.order() > 1 {
            nontrivial += 1;
        }
    }
    assert!(nontrivial >= 10, "{nontrivial}");
}

#[test]
fn quotient_action_rejects_non_coverings() {
    let s = cycle(4);
    let a = aut_group(&s).unwrap();
    let n = vertex_action(&s, vec![Perm::from_cycles(4, &[&[1, 3]]).unwrap()]);
    let (_, proj) = quotient(&s, &n).unwrap();
    assert!(quotient_group_action(&s, &a, &n, &proj).is_err());
}
