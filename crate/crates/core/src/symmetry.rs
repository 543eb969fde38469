//! Group actions on graphs, automorphism groups and transitivity.

use std::collections::HashMap;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::canon::{self, ColouredGraph};
use crate::error::{GraphError, GroupError};
use crate::graph::Graph;
use crate::group::PermGroup;
use crate::perm::Perm;

/// A group acting on the vertices and darts of a graph, compatibly with
/// `beg` and `inv`.
///
/// Chains are built on the vertices when the graph is simple (that action
/// is faithful) and on vertices plus darts otherwise.
#[derive(Clone, Debug)]
pub struct GraphAction {
    vertex_count: usize,
    dart_count: usize,
    vertex_perms: Vec<Perm>,
    dart_perms: Vec<Perm>,
    faithful_on_vertices: bool,
    group: PermGroup,
}

fn check_compatible(g: &Graph, vp: &Perm, dp: &Perm) -> Result<(), GraphError> {
    if vp.degree() != g.vertex_count() || dp.degree() != g.dart_count() {
        return Err(GraphError::Invalid(
            "permutation degree does not match graph".into(),
        ));
    }
    for x in 0..g.dart_count() {
        if vp.apply(g.beg(x)) != g.beg(dp.apply(x)) {
            return Err(GraphError::Invalid(format!(
                "action does not commute with beg at dart {x}"
            )));
        }
        if dp.apply(g.inv(x)) != g.inv(dp.apply(x)) {
            return Err(GraphError::Invalid(format!(
                "action does not commute with inv at dart {x}"
            )));
        }
    }
    Ok(())
}

/// Vertex permutation induced by a dart permutation.
pub fn vertex_perm_from_darts(g: &Graph, dp: &Perm) -> Result<Perm, GraphError> {
    let mut images = vec![usize::MAX; g.vertex_count()];
    for x in 0..g.dart_count() {
        let (u, v) = (g.beg(x), g.beg(dp.apply(x)));
        if images[u] == usize::MAX {
            images[u] = v;
        } else if images[u] != v {
            return Err(GraphError::Invalid(format!(
                "dart permutation does not respect beg at dart {x}"
            )));
        }
    }
    if images.contains(&usize::MAX) {
        return Err(GraphError::Invalid(
            "isolated vertex: vertex images undetermined".into(),
        ));
    }
    Perm::from_images(images).map_err(|e| GraphError::Invalid(e.to_string()))
}

/// Dart permutation induced by a vertex automorphism of a simple graph.
pub fn dart_perm_from_vertices(g: &Graph, vp: &Perm) -> Result<Perm, GraphError> {
    let mut images = Vec::with_capacity(g.dart_count());
    for x in 0..g.dart_count() {
        let (u, v) = (vp.apply(g.beg(x)), vp.apply(g.end(x)));
        let y = g.dart_between(u, v).ok_or_else(|| {
            GraphError::Invalid(format!(
                "vertex permutation does not preserve adjacency at dart {x}"
            ))
        })?;
        images.push(y);
    }
    Perm::from_images(images).map_err(|e| GraphError::Invalid(e.to_string()))
}

impl GraphAction {
    /// Builds an action from dart permutations; vertex permutations follow.
    pub fn from_dart_perms(
        g: &Graph,
        dart_perms: Vec<Perm>,
        order: Option<u128>,
    ) -> Result<Self, GraphError> {
        let vertex_perms = dart_perms
            .iter()
            .map(|dp| vertex_perm_from_darts(g, dp))
            .collect::<Result<Vec<_>, _>>()?;
        GraphAction::new(g, vertex_perms, dart_perms, order)
    }

    /// Builds an action of vertex automorphisms of a simple graph.
    pub fn from_vertex_perms(
        g: &Graph,
        vertex_perms: Vec<Perm>,
        order: Option<u128>,
    ) -> Result<Self, GraphError> {
        if !g.is_simple() {
            return Err(GraphError::Invalid(
                "vertex permutations determine darts only for simple graphs".into(),
            ));
        }
        let dart_perms = vertex_perms
            .iter()
            .map(|vp| dart_perm_from_vertices(g, vp))
            .collect::<Result<Vec<_>, _>>()?;
        GraphAction::new(g, vertex_perms, dart_perms, order)
    }

    pub fn new(
        g: &Graph,
        vertex_perms: Vec<Perm>,
        dart_perms: Vec<Perm>,
        order: Option<u128>,
    ) -> Result<Self, GraphError> {
        if vertex_perms.len() != dart_perms.len() {
            return Err(GraphError::Invalid(
                "vertex and dart generator counts differ".into(),
            ));
        }
        for (vp, dp) in vertex_perms.iter().zip(&dart_perms) {
            check_compatible(g, vp, dp)?;
        }
        let faithful_on_vertices = g.is_simple();
        let gens: Vec<Perm> = if faithful_on_vertices {
            vertex_perms.clone()
        } else {
            vertex_perms
                .iter()
                .zip(&dart_perms)
                .map(|(vp, dp)| combine(vp, dp))
                .collect()
        };
        let degree = if faithful_on_vertices {
            g.vertex_count()
        } else {
            g.vertex_count() + g.dart_count()
        };
        let group = match order {
            Some(n) => PermGroup::with_order(degree, gens, n),
            None => PermGroup::new(degree, gens),
        }
        .map_err(|e| GraphError::Invalid(e.to_string()))?;
        Ok(GraphAction {
            vertex_count: g.vertex_count(),
            dart_count: g.dart_count(),
            vertex_perms,
            dart_perms,
            faithful_on_vertices,
            group,
        })
    }

    pub fn trivial(g: &Graph) -> Self {
        GraphAction::new(g, Vec::new(), Vec::new(), Some(1)).expect("trivial action")
    }

    pub fn vertex_perms(&self) -> &[Perm] {
        &self.vertex_perms
    }

    pub fn dart_perms(&self) -> &[Perm] {
        &self.dart_perms
    }

    pub fn generator_count(&self) -> usize {
        self.dart_perms.len()
    }

    /// The faithful permutation group carrying the chain.
    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn order(&self) -> u128 {
        self.group.order()
    }

    pub fn vertex_group(&self) -> PermGroup {
        PermGroup::new(self.vertex_count, self.vertex_perms.clone()).expect("degrees match")
    }

    pub fn dart_group(&self) -> PermGroup {
        PermGroup::new(self.dart_count, self.dart_perms.clone()).expect("degrees match")
    }

    /// The action on the disjoint union of vertices (first) and darts.
    pub fn combined_group(&self) -> PermGroup {
        let gens = self
            .vertex_perms
            .iter()
            .zip(&self.dart_perms)
            .map(|(v, d)| combine(v, d))
            .collect();
        PermGroup::with_order(self.vertex_count + self.dart_count, gens, self.order())
            .expect("same group")
    }

    pub fn faithful_on_vertices(&self) -> bool {
        self.faithful_on_vertices
    }

    /// Stabiliser of vertex `v`, in the faithful representation.
    pub fn vertex_stabiliser(&self, v: usize) -> PermGroup {
        self.group.point_stabiliser(v)
    }

    /// Splits a faithful-representation element into vertex and dart parts.
    pub fn split(&self, g: &Graph, elt: &Perm) -> Result<(Perm, Perm), GraphError> {
        if self.faithful_on_vertices {
            Ok((elt.clone(), dart_perm_from_vertices(g, elt)?))
        } else {
            Ok((
                elt.restrict(0, self.vertex_count),
                elt.restrict(self.vertex_count, self.dart_count),
            ))
        }
    }

    /// Embeds a (vertex, dart) pair into the faithful representation.
    pub fn faithful_element(&self, vp: &Perm, dp: &Perm) -> Perm {
        if self.faithful_on_vertices {
            vp.clone()
        } else {
            combine(vp, dp)
        }
    }

    /// Subgroup generated by random elements; used by tests and fixtures.
    pub fn random_subgroup<R: rand::Rng>(
        &self,
        g: &Graph,
        count: usize,
        rng: &mut R,
    ) -> GraphAction {
        let mut vps = Vec::new();
        let mut dps = Vec::new();
        for _ in 0..count {
            let e = self.group.random_element(rng);
            let (vp, dp) = self.split(g, &e).expect("group element acts on the graph");
            vps.push(vp);
            dps.push(dp);
        }
        GraphAction::new(g, vps, dps, None).expect("elements of an action")
    }
}

fn combine(vp: &Perm, dp: &Perm) -> Perm {
    let n = vp.degree();
    let mut images = vp.images();
    images.extend(dp.images().into_iter().map(|x| x + n));
    Perm::from_images(images).expect("disjoint union of permutations")
}

fn vertex_graph(g: &Graph) -> ColouredGraph {
    let adj = g
        .adjacency()
        .into_iter()
        .map(|a| a.into_iter().map(|v| v as u32).collect())
        .collect();
    ColouredGraph::new(adj, vec![0; g.vertex_count()])
}

/// Vertex nodes first, then one node per dart. Each dart node is joined to
/// its initial vertex and to its inverse dart; `dart_colour` assigns the
/// dart colours (semiedges and arc classes are told apart this way).
fn incidence_graph(g: &Graph, dart_colour: impl Fn(usize) -> u32) -> ColouredGraph {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n + g.dart_count()];
    let mut colours = vec![0; n];
    for x in 0..g.dart_count() {
        let node = (n + x) as u32;
        adj[g.beg(x)].push(node);
        adj[n + x].push(g.beg(x) as u32);
        let y = g.inv(x);
        if y != x {
            adj[n + x].push((n + y) as u32);
        }
        colours.push(dart_colour(x));
    }
    ColouredGraph::new(adj, colours)
}

fn semiedge_colour(g: &Graph) -> impl Fn(usize) -> u32 + '_ {
    move |x| if g.inv(x) == x { 2 } else { 1 }
}

/// The full automorphism group.
pub fn aut_group(g: &Graph) -> Result<GraphAction, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    if g.is_simple() {
        let res = canon::search(&vertex_graph(g));
        let gens = res
            .generators
            .into_iter()
            .map(Perm::from_u32_unchecked)
            .collect();
        GraphAction::from_vertex_perms(g, gens, Some(res.order))
    } else {
        let res = canon::search(&incidence_graph(g, semiedge_colour(g)));
        incidence_action(g, res.generators, res.order)
    }
}

fn incidence_action(
    g: &Graph,
    gens: Vec<Vec<u32>>,
    order: u128,
) -> Result<GraphAction, GraphError> {
    let n = g.vertex_count() as u32;
    let mut vps = Vec::new();
    let mut dps = Vec::new();
    for im in gens {
        vps.push(Perm::from_u32_unchecked(im[..n as usize].to_vec()));
        dps.push(Perm::from_u32_unchecked(
            im[n as usize..].iter().map(|&x| x - n).collect(),
        ));
    }
    GraphAction::new(g, vps, dps, Some(order))
}

/// Canonical byte string identifying a connected graph up to isomorphism.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphCertificate(Vec<u8>);

impl GraphCertificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn digest_hex(&self) -> String {
        hex::encode(Sha256::digest(&self.0))
    }
}

impl fmt::Debug for GraphCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphCertificate({})", &self.digest_hex()[..16])
    }
}

pub fn certificate(g: &Graph) -> Result<GraphCertificate, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let (tag, res) = if g.is_simple() {
        (b'S', canon::search(&vertex_graph(g)))
    } else {
        (b'N', canon::search(&incidence_graph(g, semiedge_colour(g))))
    };
    let mut bytes = vec![tag];
    bytes.extend(res.certificate);
    Ok(GraphCertificate(bytes))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    ArcTransitive,
    HalfArcTransitive,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransitivityProfile {
    pub vertex_transitive: bool,
    pub edge_transitive: bool,
    pub dart_transitive: bool,
    pub classification: Classification,
}

pub fn transitivity_profile(g: &Graph, a: &GraphAction) -> TransitivityProfile {
    let vertex_transitive = a.vertex_group().orbit(0).len() == g.vertex_count();
    let (edge_transitive, dart_transitive) = if g.dart_count() == 0 {
        (true, true)
    } else {
        let labels = a.dart_group().orbit_labels();
        let (l0, l1) = (labels[0], labels[g.inv(0)]);
        (
            labels.iter().all(|&l| l == l0 || l == l1),
            labels.iter().all(|&l| l == l0),
        )
    };
    let classification = match (vertex_transitive && edge_transitive, dart_transitive) {
        (true, true) => Classification::ArcTransitive,
        (true, false) => Classification::HalfArcTransitive,
        _ => Classification::Other,
    };
    TransitivityProfile {
        vertex_transitive,
        edge_transitive,
        dart_transitive,
        classification,
    }
}

/// A graph together with a set of darts meeting every edge `{x, inv x}`
/// exactly once.
#[derive(Clone, Debug)]
pub struct Digraph {
    pub graph: Graph,
    arcs: Vec<bool>,
}

impl Digraph {
    pub fn new(graph: Graph, arcs: Vec<bool>) -> Result<Self, GraphError> {
        if arcs.len() != graph.dart_count() {
            return Err(GraphError::Invalid(
                "arc mask length differs from dart count".into(),
            ));
        }
        for x in 0..graph.dart_count() {
            if arcs[x] == arcs[graph.inv(x)] {
                return Err(GraphError::Invalid(format!(
                    "dart {x} and its inverse are not split by the arc set"
                )));
            }
        }
        Ok(Digraph { graph, arcs })
    }

    /// Orients every link of a doubled cycle from `i` to `i + 1`.
    pub fn clockwise_doubled_cycle(n: usize) -> Result<Self, GraphError> {
        let g = Graph::doubled_cycle(n)?;
        let arcs = (0..g.dart_count()).map(|x| (x / 2) % 2 == 0).collect();
        Digraph::new(g, arcs)
    }

    pub fn is_arc(&self, x: usize) -> bool {
        self.arcs[x]
    }

    pub fn arcs(&self) -> Vec<usize> {
        (0..self.arcs.len()).filter(|&x| self.arcs[x]).collect()
    }

    pub fn out_valence(&self, v: usize) -> usize {
        self.graph
            .neighbourhood(v)
            .iter()
            .filter(|&&x| self.arcs[x])
            .count()
    }

    pub fn in_valence(&self, v: usize) -> usize {
        self.graph
            .neighbourhood(v)
            .iter()
            .filter(|&&x| !self.arcs[x])
            .count()
    }
}

pub fn extract_digraph(g: &Graph, a: &GraphAction) -> Result<Digraph, GraphError> {
    if transitivity_profile(g, a).classification != Classification::HalfArcTransitive {
        return Err(GraphError::Invalid(
            "action is not half-arc-transitive".into(),
        ));
    }
    if g.has_semiedges() {
        return Err(GraphError::Semiedges);
    }
    let labels = a.dart_group().orbit_labels();
    let arcs = labels.iter().map(|&l| l == labels[0]).collect();
    Digraph::new(g.clone(), arcs)
}

/// Automorphisms of the underlying graph preserving the arc set.
pub fn digraph_aut(d: &Digraph) -> Result<GraphAction, GraphError> {
    let g = &d.graph;
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let res = canon::search(&incidence_graph(g, |x| if d.arcs[x] { 1 } else { 3 }));
    incidence_action(g, res.generators, res.order)
}

pub fn is_relevant_pair(g: &Graph, a: &GraphAction) -> bool {
    if !g.is_connected() || !g.is_tetravalent() {
        return false;
    }
    if transitivity_profile(g, a).classification != Classification::HalfArcTransitive {
        return false;
    }
    if !a.vertex_stabiliser(0).is_dihedral_8() {
        return false;
    }
    assert_eq!(
        a.order(),
        8 * g.vertex_count() as u128,
        "orbit-stabiliser bookkeeping"
    );
    true
}

/// Graph isomorphism as vertex and dart maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertex_map: Vec<usize>,
    pub dart_map: Vec<usize>,
}

impl Isomorphism {
    pub fn is_valid(&self, from: &Graph, to: &Graph) -> bool {
        if self.vertex_map.len() != from.vertex_count() || self.dart_map.len() != from.dart_count()
        {
            return false;
        }
        if to.vertex_count() != from.vertex_count() || to.dart_count() != from.dart_count() {
            return false;
        }
        let bij = |m: &[usize], n: usize| {
            let mut seen = vec![false; n];
            m.iter()
                .all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
        };
        bij(&self.vertex_map, to.vertex_count())
            && bij(&self.dart_map, to.dart_count())
            && (0..from.dart_count()).all(|x| {
                to.beg(self.dart_map[x]) == self.vertex_map[from.beg(x)]
                    && to.inv(self.dart_map[x]) == self.dart_map[from.inv(x)]
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonSimpleForm {
    DoubledCycle(usize, Isomorphism),
    FourSemiedges(Isomorphism),
    NotApplicable,
}

/// Identifies a connected tetravalent edge-transitive non-simple graph
/// with a doubled cycle or the one-vertex graph with four semiedges.
pub fn classify_nonsimple_tetravalent_et(
    g: &Graph,
    a: &GraphAction,
) -> Result<NonSimpleForm, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    if !g.is_tetravalent() {
        return Err(GraphError::NotTetravalent);
    }
    if !transitivity_profile(g, a).edge_transitive {
        return Err(GraphError::NotEdgeTransitive);
    }
    if g.is_simple() {
        return Ok(NonSimpleForm::NotApplicable);
    }
    if g.has_semiedges() {
        if g.vertex_count() != 1 || (0..4).any(|x| g.inv(x) != x) {
            return Err(GraphError::Invalid(
                "semiedges outside the one-vertex normal form".into(),
            ));
        }
        let iso = Isomorphism {
            vertex_map: vec![0],
            dart_map: (0..4).collect(),
        };
        return Ok(NonSimpleForm::FourSemiedges(iso));
    }
    let n = g.vertex_count();
    let target = Graph::doubled_cycle(n)?;
    let idx = |i: usize, e: usize, j: usize| 4 * i + 2 * e + j;
    let mut vertex_map = vec![usize::MAX; n];
    let mut dart_map = vec![usize::MAX; g.dart_count()];
    if n == 1 {
        // two loops: one per value of j
        let mut j = 0;
        for x in 0..4 {
            if dart_map[x] == usize::MAX {
                dart_map[x] = idx(0, 0, j);
                dart_map[g.inv(x)] = idx(0, 1, j);
                j += 1;
            }
        }
        vertex_map[0] = 0;
    } else {
        // walk the cycle, sending the two links from step i to i + 1 onto
        // the darts (i, 0, 0) and (i, 0, 1)
        let mut prev = usize::MAX;
        let mut cur = 0;
        for i in 0..n {
            vertex_map[cur] = i;
            let darts = g.neighbourhood(cur);
            let forward: Vec<usize> = if n == 2 {
                darts
                    .iter()
                    .copied()
                    .filter(|&x| dart_map[x] == usize::MAX)
                    .take(2)
                    .collect()
            } else {
                let next = if i == 0 {
                    Some(g.end(darts[0]))
                } else {
                    darts.iter().map(|&x| g.end(x)).find(|&w| w != prev)
                };
                match next {
                    Some(w) => darts.iter().copied().filter(|&x| g.end(x) == w).collect(),
                    None => Vec::new(),
                }
            };
            if forward.len() != 2 {
                return Err(GraphError::Invalid("graph is not a doubled cycle".into()));
            }
            for (j, &x) in forward.iter().enumerate() {
                dart_map[x] = idx(i, 0, j);
                dart_map[g.inv(x)] = idx((i + 1) % n, 1, j);
            }
            prev = cur;
            cur = g.end(forward[0]);
        }
    }
    let iso = Isomorphism {
        vertex_map,
        dart_map,
    };
    if !iso.is_valid(g, &target) {
        return Err(GraphError::Invalid("graph is not a doubled cycle".into()));
    }
    Ok(NonSimpleForm::DoubledCycle(n, iso))
}

/// Element of `a` also in `b`: used to check subgroup containment.
pub fn is_subaction(sub: &GraphAction, sup: &GraphAction) -> bool {
    sub.dart_perms
        .iter()
        .zip(&sub.vertex_perms)
        .all(|(dp, vp)| sup.group.contains(&sup.faithful_element(vp, dp)))
}

/// Map from edge (minimal dart) to its index in `Graph::edges` order.
pub fn edge_index(g: &Graph) -> HashMap<usize, usize> {
    g.edges()
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect()
}

pub fn order_check(a: &GraphAction, expected: u128) -> Result<(), GroupError> {
    let got = a.order();
    if got == expected {
        Ok(())
    } else {
        Err(GroupError::OrderMismatch {
            declared: expected,
            computed: got,
        })
    }
}
