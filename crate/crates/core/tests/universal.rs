mod support;

use std::collections::HashSet;

use hatc_core::symmetry::{aut_group, certificate};
use hatc_core::universal::{
    base_pairs, coset_graph, dedupe_pairs, epimorphism_search, involution_classes, EpiWitness,
};
use hatc_core::{GraphError, Perm, PermGroup};
use support::{cycle, group};

#[test]
fn witness_counts() {
    for (name, want) in [
        ("PGL2_7", 2),
        ("PSL2_7", 0),
        ("A6", 0),
        ("S6_as_PSigmaL2_9", 0),
        ("M10", 2),
        ("PGL2_9", 2),
        ("PSL2_17", 4),
    ] {
        let cg = group(name);
        let ws = epimorphism_search(&cg.group);
        assert_eq!(ws.len(), want, "{name}");
        assert!(ws.iter().all(|w| w.check(&cg.group)), "{name}");
    }
    // order not divisible by 8
    assert!(epimorphism_search(&group("A5").group).is_empty());
}

#[test]
fn witnesses_satisfy_the_relations() {
    for name in ["PGL2_7", "M10", "PGL2_9", "S5", "PSL2_11", "PGL2_11"] {
        let cg = group(name);
        for w in epimorphism_search(&cg.group) {
            let (a, b, c) = (w.a.clone(), w.b(), w.c());
            assert!(a.mul(&a).is_identity() && !a.is_identity());
            assert!(b.mul(&b).is_identity() && c.mul(&c).is_identity());
            let ab = a.mul(&b);
            let bc = b.mul(&c);
            let ac = a.mul(&c);
            assert!(ab.mul(&ab).is_identity() && bc.mul(&bc).is_identity());
            assert_eq!(ac.mul(&ac), b);
            assert!(w.stabiliser().is_dihedral_8());
            assert_eq!(
                PermGroup::new(cg.group.degree(), vec![a, w.g.clone()])
                    .unwrap()
                    .order(),
                cg.group.order()
            );
        }
    }
}

#[test]
fn witnesses_are_pairwise_non_conjugate_and_classes_are_closed() {
    let cg = group("PGL2_7");
    let elements = cg.group.elements();
    let ws = epimorphism_search(&cg.group);
    let key = |w: &EpiWitness| (w.a.clone(), w.g.clone());
    for (i, w) in ws.iter().enumerate() {
        let orbit: HashSet<(Perm, Perm)> = elements
            .iter()
            .map(|h| (w.a.conjugate(h), w.g.conjugate(h)))
            .collect();
        for (j, v) in ws.iter().enumerate() {
            assert_eq!(orbit.contains(&key(v)), i == j);
        }
        // every conjugate is again a witness with an isomorphic coset graph
        let (g0, _) = w.coset_graph(&cg.group).unwrap();
        for h in elements.iter().step_by(37) {
            let c = EpiWitness {
                a: w.a.conjugate(h),
                g: w.g.conjugate(h),
            };
            assert!(c.check(&cg.group));
            let (g1, _) = c.coset_graph(&cg.group).unwrap();
            assert_eq!(certificate(&g1).unwrap(), certificate(&g0).unwrap());
        }
    }
}

#[test]
fn involution_classes_of_pgl27() {
    let cg = group("PGL2_7");
    let reps = involution_classes(&cg.group.elements(), cg.group.generators());
    assert_eq!(reps.len(), 2);
    let mut sorted = reps.clone();
    sorted.sort();
    assert_eq!(sorted, reps);
}

#[test]
fn coset_graphs_of_witnesses() {
    for name in ["PGL2_7", "M10", "PGL2_9", "PSL2_17"] {
        let cg = group(name);
        for (w, pair) in base_pairs(&cg.name, &cg.group) {
            let g = &pair.graph;
            assert_eq!(g.vertex_count() as u128, cg.group.order() / 8, "{name}");
            assert!(g.is_simple() && g.is_tetravalent() && g.is_connected());
            assert_eq!(pair.action.order(), cg.group.order());
            assert_eq!(pair.action.dart_group().orbits().len(), 2);
            let st = pair.action.vertex_stabiliser(0);
            assert!(st.is_dihedral_8());
            assert!(pair.is_relevant());
            assert!(!pair.action.group().is_solvable().unwrap());
            assert_eq!(w.stabiliser().order(), 8);
        }
    }
}

#[test]
fn coset_graph_examples() {
    // the regular cyclic group with trivial stabiliser gives a cycle
    let r = Perm::from_images((0..7).map(|i| (i + 1) % 7).collect()).unwrap();
    let z7 = PermGroup::new(7, vec![r.clone()]).unwrap();
    let (g, a) = coset_graph(&z7, &PermGroup::trivial(7), &r).unwrap();
    assert_eq!(certificate(&g).unwrap(), certificate(&cycle(7)).unwrap());
    assert_eq!(a.order(), 7);
    // a normal stabiliser is not core-free
    let d8 = PermGroup::new(
        4,
        vec![
            Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap(),
            Perm::from_cycles(4, &[&[0, 2]]).unwrap(),
        ],
    )
    .unwrap();
    assert!(matches!(
        coset_graph(&d8, &d8, &Perm::identity(4)),
        Err(GraphError::Invalid(_))
    ));
    // an element inside a proper subgroup does not connect the cosets
    let s = PermGroup::new(7, vec![]).unwrap();
    assert!(matches!(
        coset_graph(&z7, &s, &Perm::identity(7)),
        Err(GraphError::Disconnected)
    ));
}

#[test]
fn dedupe_examples() {
    let cg = group("PGL2_7");
    let pairs: Vec<_> = base_pairs(&cg.name, &cg.group)
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    assert_eq!(pairs.len(), 2);
    let d = dedupe_pairs(pairs.clone()).unwrap();
    assert_eq!(d.len(), 1);
    // doubling the input changes nothing
    let again = dedupe_pairs(pairs.iter().chain(&pairs).cloned().collect()).unwrap();
    assert_eq!(again.len(), 1);
    assert_eq!(again[0].0, d[0].0);
    assert!(dedupe_pairs(Vec::new()).unwrap().is_empty());
}

fn element_orders(g: &PermGroup) -> HashSet<u64> {
    g.elements().iter().map(|x| x.order()).collect()
}

#[test]
fn the_two_order_720_pairs_share_a_graph() {
    let m10 = support::pairs_of("M10");
    let pgl = support::pairs_of("PGL2_9");
    assert_eq!((m10.len(), pgl.len()), (1, 1));
    let (x, y) = (&m10[0], &pgl[0]);
    // the graphs are isomorphic ...
    assert_eq!(
        certificate(&x.graph).unwrap(),
        certificate(&y.graph).unwrap()
    );
    assert_eq!(aut_group(&x.graph).unwrap().order(), 2880);
    // ... but the groups are not: only PGL(2,9) has elements of order 10
    assert!(!element_orders(x.action.group()).contains(&10));
    assert!(element_orders(y.action.group()).contains(&10));
}

#[test]
fn witness_records() {
    let cg = group("PGL2_7");
    let w = &epimorphism_search(&cg.group)[0];
    let line = w.record("PGL2_7", 42);
    let fields: Vec<&str> = line.split(' ').collect();
    assert_eq!(fields[0], "epi");
    assert_eq!(fields[1], "group=PGL2_7");
    assert!(fields[2]
        .strip_prefix("a=")
        .is_some_and(|h| h.len() == 12 && h.chars().all(|c| c.is_ascii_hexdigit())));
    assert!(fields[3].strip_prefix("g=").is_some_and(|h| h.len() == 12));
    assert_eq!(fields[4], "coset_order=42");
}
