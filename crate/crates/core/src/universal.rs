//! Epimorphisms from the universal group of tetravalent half-arc-transitive
//! pairs with stabiliser D4 onto finite permutation groups, and the coset
//! graphs they determine.
//!
//! The universal group is generated by `a` and `g` subject to
//! `b = g^-1 a g`, `c = g^-1 b g`, `a^2 = b^2 = c^2 = (ab)^2 = (bc)^2 = 1`
//! and `(ac)^2 = b`; the images of `a, b, c` generate the vertex stabiliser.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::GraphError;
use crate::graph::Graph;
use crate::group::PermGroup;
use crate::perm::Perm;
use crate::symmetry::{certificate, is_relevant_pair, GraphAction, GraphCertificate};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpiWitness {
    pub a: Perm,
    pub g: Perm,
}

fn images_hash(p: &Perm) -> String {
    let mut h = Sha256::new();
    for &x in p.raw() {
        h.update(x.to_le_bytes());
    }
    hex::encode(&h.finalize()[..6])
}

/// Closure of a generating set, given up to `limit` elements.
fn closure(gens: &[Perm], limit: usize) -> Option<Vec<Perm>> {
    let n = gens.first()?.degree();
    let mut seen: HashSet<Perm> = HashSet::from([Perm::identity(n)]);
    let mut queue = VecDeque::from([Perm::identity(n)]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = x.mul(s);
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<Perm> = seen.into_iter().collect();
    out.sort();
    Some(out)
}

fn is_involution(x: &Perm) -> bool {
    !x.is_identity() && x.mul(x).is_identity()
}

impl EpiWitness {
    pub fn b(&self) -> Perm {
        self.a.conjugate(&self.g)
    }

    pub fn c(&self) -> Perm {
        self.b().conjugate(&self.g)
    }

    /// Image of the vertex stabiliser, `<a, b, c>`.
    pub fn stabiliser(&self) -> PermGroup {
        PermGroup::new(self.a.degree(), vec![self.a.clone(), self.b(), self.c()])
            .expect("same degree")
    }

    /// The defining relations and the two subgroup conditions.
    pub fn check(&self, target: &PermGroup) -> bool {
        self.relations_hold()
            && self.stabiliser().is_dihedral_8()
            && PermGroup::new(target.degree(), vec![self.a.clone(), self.g.clone()])
                .expect("same degree")
                .order()
                == target.order()
    }

    fn relations_hold(&self) -> bool {
        let (a, b, c) = (&self.a, self.b(), self.c());
        let sq = |x: &Perm| x.mul(x);
        is_involution(a)
            && sq(&b).is_identity()
            && sq(&c).is_identity()
            && sq(&a.mul(&b)).is_identity()
            && sq(&b.mul(&c)).is_identity()
            && sq(&a.mul(&c)) == b
    }

    pub fn record(&self, group_name: &str, coset_order: usize) -> String {
        format!(
            "epi group={group_name} a={} g={} coset_order={coset_order}",
            images_hash(&self.a),
            images_hash(&self.g)
        )
    }
}

/// Involution class representatives: the least element of each class.
pub fn involution_classes(elements: &[Perm], gens: &[Perm]) -> Vec<Perm> {
    let mut sorted: Vec<&Perm> = elements.iter().filter(|x| is_involution(x)).collect();
    sorted.sort();
    let mut seen: HashSet<Perm> = HashSet::new();
    let mut reps = Vec::new();
    for x in sorted {
        if seen.contains(x) {
            continue;
        }
        reps.push(x.clone());
        seen.insert(x.clone());
        let mut stack = vec![x.clone()];
        while let Some(y) = stack.pop() {
            for s in gens {
                let z = y.conjugate(s);
                if seen.insert(z.clone()) {
                    stack.push(z);
                }
            }
        }
    }
    reps
}

/// All epimorphisms from the universal group onto `target`, one per class
/// under simultaneous conjugation of `(a, g)`.
pub fn epimorphism_search(target: &PermGroup) -> Vec<EpiWitness> {
    let order = target.order();
    if !order.is_multiple_of(8) {
        return Vec::new();
    }
    let mut elements = target.elements();
    elements.sort();
    let reps = involution_classes(&elements, target.generators());
    let mut out = Vec::new();
    for a in reps {
        let centraliser: Vec<&Perm> = elements.iter().filter(|h| a.mul(h) == h.mul(&a)).collect();
        let valid: Vec<&Perm> = elements
            .par_iter()
            .filter(|g| {
                let w = EpiWitness {
                    a: a.clone(),
                    g: (*g).clone(),
                };
                w.relations_hold()
                    && closure(&[w.a.clone(), w.b(), w.c()], 8).is_some_and(|h| h.len() == 8)
            })
            .filter(|g| {
                let w = EpiWitness {
                    a: a.clone(),
                    g: (*g).clone(),
                };
                w.stabiliser().is_dihedral_8()
                    && PermGroup::new(target.degree(), vec![a.clone(), (*g).clone()])
                        .expect("degree")
                        .order()
                        == order
            })
            .collect();
        // keep g when it is least among its conjugates under C(a)
        for g in valid {
            if centraliser.iter().all(|h| g.conjugate(h) >= *g) {
                out.push(EpiWitness {
                    a: a.clone(),
                    g: g.clone(),
                });
            }
        }
    }
    out
}

// right cosets Hx keyed by their least element
fn coset_key(sub: &[Perm], x: &Perm) -> Perm {
    sub.iter()
        .map(|h| h.mul(x))
        .min()
        .expect("non-empty subgroup")
}

/// The action of `G` by right multiplication on the right cosets of a
/// small subgroup, listed breadth-first from the subgroup itself.
struct CosetAction {
    reps: Vec<Perm>,
    index: HashMap<Perm, usize>,
    perms: Vec<Perm>,
}

fn coset_action(gens: &[Perm], sub: &[Perm]) -> CosetAction {
    let id = Perm::identity(sub[0].degree());
    let first = coset_key(sub, &id);
    let mut reps = vec![first.clone()];
    let mut index = HashMap::from([(first, 0usize)]);
    let mut images: Vec<Vec<usize>> = vec![Vec::new(); gens.len()];
    let mut i = 0;
    while i < reps.len() {
        for (si, s) in gens.iter().enumerate() {
            let key = coset_key(sub, &reps[i].mul(s));
            let next = index.len();
            let j = *index.entry(key.clone()).or_insert_with(|| {
                reps.push(key);
                next
            });
            images[si].push(j);
        }
        i += 1;
    }
    let perms = images
        .into_iter()
        .map(|im| Perm::from_images(im).expect("coset action"))
        .collect();
    CosetAction { reps, index, perms }
}

/// The coset graph `Cos(G, H, g)`: vertices are the right cosets of `H`;
/// darts are `(Kx, ±)` with `K = H ∩ H^g`, where `(Kx, +)` runs from `Hx`
/// to `Hgx` and `(Kx, -)` is its reverse. Fails unless `H` is core-free.
pub fn coset_graph(
    target: &PermGroup,
    h: &PermGroup,
    g: &Perm,
) -> Result<(Graph, GraphAction), GraphError> {
    let hs = h.elements();
    let hg: HashSet<Perm> = hs.iter().map(|x| x.conjugate(g)).collect();
    let ks: Vec<Perm> = hs.iter().filter(|x| hg.contains(*x)).cloned().collect();
    let gens = target.generators();
    let vertices = coset_action(gens, &hs);
    let arcs = coset_action(gens, &ks);
    let nv = vertices.reps.len();
    let na = arcs.reps.len();
    let mut beg = vec![0; 2 * na];
    let mut inv = vec![0; 2 * na];
    for (i, x) in arcs.reps.iter().enumerate() {
        beg[2 * i] = vertices.index[&coset_key(&hs, x)];
        beg[2 * i + 1] = vertices.index[&coset_key(&hs, &g.mul(x))];
        inv[2 * i] = 2 * i + 1;
        inv[2 * i + 1] = 2 * i;
    }
    let graph = Graph::new(nv, beg, inv)?;
    if !graph.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let dps: Vec<Perm> = arcs
        .perms
        .iter()
        .map(|p| {
            let im = (0..2 * na).map(|x| 2 * p.apply(x / 2) + x % 2).collect();
            Perm::from_images(im).expect("dart action")
        })
        .collect();
    let action = GraphAction::new(&graph, vertices.perms, dps, None)?;
    if action.order() != target.order() {
        return Err(GraphError::Invalid(format!(
            "coset action is not faithful: image order {} of {}",
            action.order(),
            target.order()
        )));
    }
    Ok((graph, action))
}

impl EpiWitness {
    pub fn coset_graph(&self, target: &PermGroup) -> Result<(Graph, GraphAction), GraphError> {
        coset_graph(target, &self.stabiliser(), &self.g)
    }
}

/// Where a relevant pair came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Base {
        group: String,
        witness: usize,
    },
    Cover {
        parent: usize,
        level: usize,
        p: u32,
        d: usize,
        kernel_hash: String,
    },
}

#[derive(Clone, Debug)]
pub struct RelevantPair {
    pub graph: Graph,
    pub action: GraphAction,
    pub provenance: Provenance,
}

impl RelevantPair {
    pub fn is_relevant(&self) -> bool {
        is_relevant_pair(&self.graph, &self.action)
    }
}

/// Relevant pairs from every witness of a catalog group.
pub fn base_pairs(name: &str, target: &PermGroup) -> Vec<(EpiWitness, RelevantPair)> {
    let mut out = Vec::new();
    for (i, w) in epimorphism_search(target).into_iter().enumerate() {
        let Ok((graph, action)) = w.coset_graph(target) else {
            continue;
        };
        let pair = RelevantPair {
            graph,
            action,
            provenance: Provenance::Base {
                group: name.to_string(),
                witness: i,
            },
        };
        if pair.is_relevant() {
            out.push((w, pair));
        }
    }
    out
}

/// One pair per graph certificate, ordered by `(|V|, certificate)`.
pub fn dedupe_pairs(
    pairs: Vec<RelevantPair>,
) -> Result<Vec<(GraphCertificate, RelevantPair)>, GraphError> {
    let certs: Vec<GraphCertificate> = pairs
        .par_iter()
        .map(|p| certificate(&p.graph))
        .collect::<Result<Vec<_>, _>>()?;
    let mut keyed: Vec<(GraphCertificate, RelevantPair)> = certs.into_iter().zip(pairs).collect();
    // stable: the first pair of each graph survives
    keyed.sort_by(|x, y| {
        (x.1.graph.vertex_count(), x.0.as_bytes()).cmp(&(y.1.graph.vertex_count(), y.0.as_bytes()))
    });
    keyed.dedup_by(|x, y| x.0 == y.0);
    Ok(keyed)
}
