//! Quotients, covering projections and elementary abelian regular covers.
//!
//! Cover vertices and darts are pairs `(base index, a)` with `a` in
//! GF(p)^d, stored at `base * p^d + index(a)` where `index` reads `a` as a
//! little-endian base-p number.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CoverError, ParseError};
use crate::graph::Graph;
use crate::group::smallest_prime_factor;
use crate::io::{content_lines, parse_usize};
use crate::perm::Perm;
use crate::symmetry::GraphAction;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    source: Graph,
    target: Graph,
    vertex_map: Vec<usize>,
    dart_map: Vec<usize>,
}

impl Projection {
    pub fn new(
        source: Graph,
        target: Graph,
        vertex_map: Vec<usize>,
        dart_map: Vec<usize>,
    ) -> Result<Self, CoverError> {
        if vertex_map.len() != source.vertex_count() || dart_map.len() != source.dart_count() {
            return Err(CoverError::Mismatch(
                "map sizes differ from the source graph".into(),
            ));
        }
        if vertex_map.iter().any(|&v| v >= target.vertex_count())
            || dart_map.iter().any(|&x| x >= target.dart_count())
        {
            return Err(CoverError::Mismatch(
                "map image outside the target graph".into(),
            ));
        }
        for x in 0..source.dart_count() {
            let y = dart_map[x];
            if target.beg(y) != vertex_map[source.beg(x)] {
                return Err(CoverError::Mismatch(format!(
                    "beg not preserved at dart {x}"
                )));
            }
            if target.inv(y) != dart_map[source.inv(x)] {
                return Err(CoverError::Mismatch(format!(
                    "inv not preserved at dart {x}"
                )));
            }
        }
        let mut hit_v = vec![false; target.vertex_count()];
        vertex_map.iter().for_each(|&v| hit_v[v] = true);
        let mut hit_d = vec![false; target.dart_count()];
        dart_map.iter().for_each(|&x| hit_d[x] = true);
        if hit_v.contains(&false) || hit_d.contains(&false) {
            return Err(CoverError::Mismatch("projection is not surjective".into()));
        }
        Ok(Projection {
            source,
            target,
            vertex_map,
            dart_map,
        })
    }

    pub fn identity(g: &Graph) -> Self {
        Projection {
            source: g.clone(),
            target: g.clone(),
            vertex_map: (0..g.vertex_count()).collect(),
            dart_map: (0..g.dart_count()).collect(),
        }
    }

    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn target(&self) -> &Graph {
        &self.target
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn dart_map(&self) -> &[usize] {
        &self.dart_map
    }

    /// Local bijectivity: every neighbourhood maps bijectively onto the
    /// neighbourhood of its image.
    pub fn is_covering(&self) -> bool {
        (0..self.source.vertex_count()).all(|v| {
            let w = self.vertex_map[v];
            let mut images: Vec<usize> = self
                .source
                .neighbourhood(v)
                .iter()
                .map(|&x| self.dart_map[x])
                .collect();
            images.sort_unstable();
            images == self.target.neighbourhood(w)
        })
    }

    pub fn vertex_fibre(&self, w: usize) -> Vec<usize> {
        (0..self.vertex_map.len())
            .filter(|&v| self.vertex_map[v] == w)
            .collect()
    }

    /// The common fibre size, if all vertex and dart fibres agree.
    pub fn constant_fibre_size(&self) -> Option<usize> {
        let mut vs = vec![0usize; self.target.vertex_count()];
        self.vertex_map.iter().for_each(|&v| vs[v] += 1);
        let mut ds = vec![0usize; self.target.dart_count()];
        self.dart_map.iter().for_each(|&x| ds[x] += 1);
        let k = vs[0];
        (vs.iter().chain(&ds).all(|&c| c == k)).then_some(k)
    }
}

/// `outer ∘ inner`.
pub fn compose(outer: &Projection, inner: &Projection) -> Result<Projection, CoverError> {
    if inner.target != outer.source {
        return Err(CoverError::Mismatch(
            "target of the inner projection is not the source of the outer".into(),
        ));
    }
    Ok(Projection {
        source: inner.source.clone(),
        target: outer.target.clone(),
        vertex_map: inner
            .vertex_map
            .iter()
            .map(|&v| outer.vertex_map[v])
            .collect(),
        dart_map: inner.dart_map.iter().map(|&x| outer.dart_map[x]).collect(),
    })
}

fn check_acts_on(g: &Graph, a: &GraphAction) -> Result<(), CoverError> {
    let ok = a
        .vertex_perms()
        .iter()
        .all(|p| p.degree() == g.vertex_count())
        && a.dart_perms().iter().all(|p| p.degree() == g.dart_count());
    if !ok {
        return Err(CoverError::Incompatible(
            "permutation degrees differ from the graph".into(),
        ));
    }
    for (i, (vp, dp)) in a.vertex_perms().iter().zip(a.dart_perms()).enumerate() {
        for x in 0..g.dart_count() {
            if vp.apply(g.beg(x)) != g.beg(dp.apply(x)) || dp.apply(g.inv(x)) != g.inv(dp.apply(x))
            {
                return Err(CoverError::Incompatible(format!(
                    "generator {i} at dart {x}"
                )));
            }
        }
    }
    Ok(())
}

// orbits numbered densely by least element
fn dense_orbits(n: usize, gens: &[Perm]) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = g.apply(x);
                if label[y] == usize::MAX {
                    label[y] = count;
                    stack.push(y);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// The quotient `Γ/N`: vertex and dart orbits, with `beg` and `inv` taken
/// orbit-wise.
pub fn quotient(g: &Graph, n: &GraphAction) -> Result<(Graph, Projection), CoverError> {
    check_acts_on(g, n)?;
    let (vlab, vc) = dense_orbits(g.vertex_count(), n.vertex_perms());
    let (dlab, dc) = dense_orbits(g.dart_count(), n.dart_perms());
    let mut beg = vec![0; dc];
    let mut inv = vec![0; dc];
    for x in 0..g.dart_count() {
        beg[dlab[x]] = vlab[g.beg(x)];
        inv[dlab[x]] = dlab[g.inv(x)];
    }
    let q = Graph::new(vc, beg, inv)?;
    let proj = Projection {
        source: g.clone(),
        target: q.clone(),
        vertex_map: vlab,
        dart_map: dlab,
    };
    Ok((q, proj))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormalQuotientCheck {
    pub semiregular: bool,
    pub valence_preserving: bool,
    pub covering: bool,
}

/// The three conditions on a normal quotient, each computed on its own.
pub fn check_lemma_nq(g: &Graph, n: &GraphAction) -> Result<NormalQuotientCheck, CoverError> {
    let (q, proj) = quotient(g, n)?;
    // N_v = 1 exactly when the orbit of v has length |N|
    let order = n.order();
    let labels = n.vertex_group().orbit_labels();
    let mut sizes = vec![0u128; g.vertex_count()];
    labels.iter().for_each(|&l| sizes[l] += 1);
    let semiregular = labels.iter().all(|&l| sizes[l] == order);
    let valence_preserving =
        (0..g.vertex_count()).all(|v| g.valence(v) == q.valence(proj.vertex_map[v]));
    Ok(NormalQuotientCheck {
        semiregular,
        valence_preserving,
        covering: proj.is_covering(),
    })
}

/// The action of `G/N` induced on `Γ/N`. Each generator of `G` must
/// permute the `N`-orbits.
pub fn quotient_group_action(
    g: &Graph,
    a: &GraphAction,
    n: &GraphAction,
    proj: &Projection,
) -> Result<GraphAction, CoverError> {
    check_acts_on(g, a)?;
    if proj.source() != g {
        return Err(CoverError::Mismatch(
            "projection source is not the graph".into(),
        ));
    }
    if !proj.is_covering() {
        return Err(CoverError::NotCovering);
    }
    let (vlab, _) = dense_orbits(g.vertex_count(), n.vertex_perms());
    let (dlab, _) = dense_orbits(g.dart_count(), n.dart_perms());
    if vlab != proj.vertex_map || dlab != proj.dart_map {
        return Err(CoverError::Mismatch(
            "projection is not the quotient by the given group".into(),
        ));
    }
    let q = proj.target();
    let induce = |labels: &[usize], count: usize, p: &Perm| -> Result<Perm, CoverError> {
        let mut images = vec![usize::MAX; count];
        for x in 0..labels.len() {
            let (from, to) = (labels[x], labels[p.apply(x)]);
            if images[from] == usize::MAX {
                images[from] = to;
            } else if images[from] != to {
                return Err(CoverError::Incompatible(
                    "generator does not permute the orbits".into(),
                ));
            }
        }
        Perm::from_images(images).map_err(|e| CoverError::Incompatible(e.to_string()))
    };
    let mut vps = Vec::new();
    let mut dps = Vec::new();
    for (vp, dp) in a.vertex_perms().iter().zip(a.dart_perms()) {
        vps.push(induce(&vlab, q.vertex_count(), vp)?);
        dps.push(induce(&dlab, q.dart_count(), dp)?);
    }
    Ok(GraphAction::new(q, vps, dps, None)?)
}

/// Breadth-first spanning tree from vertex 0, darts explored in id order.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    /// The dart from the parent into each vertex (none at the root).
    pub parent_dart: Vec<Option<usize>>,
    /// Vertices in discovery order.
    pub order: Vec<usize>,
    pub is_tree_dart: Vec<bool>,
}

impl SpanningTree {
    pub fn bfs(g: &Graph) -> Result<Self, CoverError> {
        let n = g.vertex_count();
        let mut parent_dart = vec![None; n];
        let mut seen = vec![false; n];
        let mut is_tree_dart = vec![false; g.dart_count()];
        let mut order = vec![0];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for &x in g.neighbourhood(u) {
                let v = g.end(x);
                if !seen[v] {
                    seen[v] = true;
                    parent_dart[v] = Some(x);
                    is_tree_dart[x] = true;
                    is_tree_dart[g.inv(x)] = true;
                    order.push(v);
                    queue.push_back(v);
                }
            }
        }
        if order.len() != n {
            return Err(crate::error::GraphError::Disconnected.into());
        }
        Ok(SpanningTree {
            parent_dart,
            order,
            is_tree_dart,
        })
    }

    /// Cotree darts that represent their edge: the smaller dart of each
    /// non-tree link or loop, in increasing order. Semiedges are excluded.
    pub fn cotree_darts(&self, g: &Graph) -> Vec<usize> {
        (0..g.dart_count())
            .filter(|&x| !self.is_tree_dart[x] && x < g.inv(x))
            .collect()
    }
}

pub fn vector_index(a: &[u32], p: u32) -> usize {
    a.iter()
        .rev()
        .fold(0usize, |acc, &c| acc * p as usize + c as usize)
}

pub fn index_vector(mut i: usize, p: u32, d: usize) -> Vec<u32> {
    (0..d)
        .map(|_| {
            let c = (i % p as usize) as u32;
            i /= p as usize;
            c
        })
        .collect()
}

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && smallest_prime_factor(p as u128) == p as u128
}

/// Voltages in GF(p)^d on the darts of a base graph, antisymmetric under
/// `inv`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoltageAssignment {
    base: Graph,
    p: u32,
    d: usize,
    voltages: Vec<Vec<u32>>,
}

impl VoltageAssignment {
    /// Voltages given on designated darts, one per edge at most; the
    /// partner dart gets the negation and omitted edges carry zero.
    pub fn new(
        base: &Graph,
        p: u32,
        d: usize,
        designated: &[(usize, Vec<u32>)],
    ) -> Result<Self, CoverError> {
        if !is_prime(p) {
            return Err(CoverError::InvalidVoltage(format!("{p} is not prime")));
        }
        if base.has_semiedges() {
            return Err(CoverError::InvalidVoltage(
                "base graph has semiedges".into(),
            ));
        }
        let mut voltages = vec![vec![0; d]; base.dart_count()];
        let mut set = vec![false; base.dart_count()];
        for (x, vec) in designated {
            let x = *x;
            if x >= base.dart_count() {
                return Err(CoverError::InvalidVoltage(format!("dart {x} out of range")));
            }
            if vec.len() != d {
                return Err(CoverError::InvalidVoltage(format!(
                    "dart {x} has {} coordinates, expected {d}",
                    vec.len()
                )));
            }
            let y = base.inv(x);
            if set[x] || set[y] {
                return Err(CoverError::InvalidVoltage(format!(
                    "edge of dart {x} given twice"
                )));
            }
            set[x] = true;
            set[y] = true;
            voltages[x] = vec.iter().map(|c| c % p).collect();
            voltages[y] = voltages[x].iter().map(|&c| (p - c) % p).collect();
        }
        Ok(VoltageAssignment {
            base: base.clone(),
            p,
            d,
            voltages,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn voltage(&self, x: usize) -> &[u32] {
        &self.voltages[x]
    }

    pub fn fibre_size(&self) -> usize {
        (self.p as usize).pow(self.d as u32)
    }

    /// Dimension of the span of closed-walk voltages; the derived cover is
    /// connected exactly when this equals `d`.
    pub fn span_dim(&self) -> usize {
        let g = &self.base;
        let p = self.p;
        let Ok(tree) = SpanningTree::bfs(g) else {
            return 0;
        };
        // potential: sum of voltages along the tree path from the root
        let mut pot = vec![vec![0u32; self.d]; g.vertex_count()];
        for &v in &tree.order[1..] {
            let x = tree.parent_dart[v].expect("non-root");
            let u = g.beg(x);
            pot[v] = (0..self.d)
                .map(|i| (pot[u][i] + self.voltages[x][i]) % p)
                .collect();
        }
        let f = crate::gf::GfP::new(p);
        let mut e = crate::gf::Echelon::new(f, self.d);
        for x in tree.cotree_darts(g) {
            let (u, v) = (g.beg(x), g.end(x));
            let net: Vec<u32> = (0..self.d)
                .map(|i| (pot[u][i] + self.voltages[x][i] + p - pot[v][i]) % p)
                .collect();
            e.insert(net);
        }
        e.dim()
    }
}

/// The derived regular cover of a voltage assignment.
pub fn derived_cover(z: &VoltageAssignment) -> Result<(Graph, Projection), CoverError> {
    let span = z.span_dim();
    if span != z.d {
        return Err(CoverError::DeficientSpan { span, dim: z.d });
    }
    let g = &z.base;
    let k = z.fibre_size();
    let p = z.p;
    let (nv, nd) = (g.vertex_count() * k, g.dart_count() * k);
    let mut beg = vec![0; nd];
    let mut inv = vec![0; nd];
    for x in 0..g.dart_count() {
        let zeta = &z.voltages[x];
        for i in 0..k {
            let a = index_vector(i, p, z.d);
            let b: Vec<u32> = a.iter().zip(zeta).map(|(&s, &t)| (s + t) % p).collect();
            beg[x * k + i] = g.beg(x) * k + i;
            inv[x * k + i] = g.inv(x) * k + vector_index(&b, p);
        }
    }
    let cover = Graph::new(nv, beg, inv)?;
    let proj = Projection {
        source: cover.clone(),
        target: g.clone(),
        vertex_map: (0..nv).map(|v| v / k).collect(),
        dart_map: (0..nd).map(|x| x / k).collect(),
    };
    Ok((cover, proj))
}

/// The translation group GF(p)^d acting on a derived cover.
pub fn translation_action(cover: &Graph, p: u32, d: usize) -> Result<GraphAction, CoverError> {
    let k = (p as usize).pow(d as u32);
    let shift = |n: usize, j: usize| -> Perm {
        let images = (0..n)
            .map(|t| {
                let (base, i) = (t / k, t % k);
                let mut a = index_vector(i, p, d);
                a[j] = (a[j] + 1) % p;
                base * k + vector_index(&a, p)
            })
            .collect();
        Perm::from_images(images).expect("translation is a bijection")
    };
    let vps = (0..d).map(|j| shift(cover.vertex_count(), j)).collect();
    let dps = (0..d).map(|j| shift(cover.dart_count(), j)).collect();
    Ok(GraphAction::new(cover, vps, dps, Some(k as u128))?)
}

/// ```text
/// voltage 2 1
/// 4 1
/// ```
pub fn parse_voltage(text: &str, base: &Graph) -> Result<VoltageAssignment, ParseError> {
    let mut lines = content_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| ParseError::Format("empty voltage file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "voltage" {
        return Err(ParseError::at(ln, "expected `voltage <p> <d>`"));
    }
    let p = parse_usize(toks[1], ln)? as u32;
    let d = parse_usize(toks[2], ln)?;
    let mut designated = Vec::new();
    for (ln, line) in lines {
        let nums = line
            .split_whitespace()
            .map(|t| parse_usize(t, ln))
            .collect::<Result<Vec<_>, _>>()?;
        if nums.len() != d + 1 {
            return Err(ParseError::at(
                ln,
                format!("expected a dart and {d} coordinates"),
            ));
        }
        designated.push((nums[0], nums[1..].iter().map(|&c| c as u32).collect()));
    }
    VoltageAssignment::new(base, p, d, &designated).map_err(|e| ParseError::Format(e.to_string()))
}

pub fn format_voltage(z: &VoltageAssignment) -> String {
    let mut out = format!("voltage {} {}\n", z.p, z.d);
    for x in 0..z.base.dart_count() {
        if x < z.base.inv(x) && z.voltages[x].iter().any(|&c| c != 0) {
            let cs: Vec<String> = z.voltages[x].iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{x} {}", cs.join(" "));
        }
    }
    out
}

pub fn read_voltage(path: impl AsRef<Path>, base: &Graph) -> Result<VoltageAssignment, ParseError> {
    parse_voltage(&std::fs::read_to_string(path)?, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::{aut_group, certificate};

    fn cycle(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_simple_edges(n, &edges).unwrap()
    }

    fn rotation(n: usize, k: usize) -> Perm {
        Perm::from_images((0..n).map(|i| (i + k) % n).collect()).unwrap()
    }

    #[test]
    fn antipodal_quotient_of_hexagon() {
        let g = cycle(6);
        let n = GraphAction::from_vertex_perms(&g, vec![rotation(6, 3)], None).unwrap();
        let (q, proj) = quotient(&g, &n).unwrap();
        assert_eq!(q.vertex_count(), 3);
        assert!(q.is_simple());
        assert!(proj.is_covering());
        let c = check_lemma_nq(&g, &n).unwrap();
        assert_eq!(
            c,
            NormalQuotientCheck {
                semiregular: true,
                valence_preserving: true,
                covering: true
            }
        );
    }

    #[test]
    fn reflection_quotient_of_square() {
        let g = cycle(4);
        let refl = Perm::from_images(vec![0, 3, 2, 1]).unwrap();
        let n = GraphAction::from_vertex_perms(&g, vec![refl], None).unwrap();
        let (q, proj) = quotient(&g, &n).unwrap();
        assert_eq!(q.vertex_count(), 3);
        assert!(!proj.is_covering());
        assert_eq!(q.valence(proj.vertex_map()[0]), 1);
        let c = check_lemma_nq(&g, &n).unwrap();
        assert_eq!(
            c,
            NormalQuotientCheck {
                semiregular: false,
                valence_preserving: false,
                covering: false
            }
        );
    }

    #[test]
    fn double_cover_of_triangle() {
        let g = cycle(3);
        let tree = SpanningTree::bfs(&g).unwrap();
        let cot = tree.cotree_darts(&g);
        assert_eq!(cot.len(), 1);
        let z = VoltageAssignment::new(&g, 2, 1, &[(cot[0], vec![1])]).unwrap();
        let (c, proj) = derived_cover(&z).unwrap();
        assert_eq!(certificate(&c).unwrap(), certificate(&cycle(6)).unwrap());
        assert!(proj.is_covering());
        assert_eq!(proj.constant_fibre_size(), Some(2));
        let t = translation_action(&c, 2, 1).unwrap();
        let (q, _) = quotient(&c, &t).unwrap();
        assert_eq!(certificate(&q).unwrap(), certificate(&g).unwrap());
        // two double covers compose to a 12-cycle over the triangle
        let tree2 = SpanningTree::bfs(&c).unwrap();
        let z2 = VoltageAssignment::new(&c, 2, 1, &[(tree2.cotree_darts(&c)[0], vec![1])]).unwrap();
        let (c2, proj2) = derived_cover(&z2).unwrap();
        let both = compose(&proj, &proj2).unwrap();
        assert!(both.is_covering());
        assert_eq!(certificate(&c2).unwrap(), certificate(&cycle(12)).unwrap());
        assert_eq!(both.constant_fibre_size(), Some(4));
        assert!(compose(&proj2, &proj).is_err());
    }

    #[test]
    fn zero_voltage_is_deficient() {
        let g = cycle(3);
        let z = VoltageAssignment::new(&g, 3, 1, &[]).unwrap();
        assert!(matches!(
            derived_cover(&z),
            Err(CoverError::DeficientSpan { span: 0, dim: 1 })
        ));
        let trivial = VoltageAssignment::new(&g, 3, 0, &[]).unwrap();
        let (c, _) = derived_cover(&trivial).unwrap();
        assert_eq!(c, g);
    }

    #[test]
    fn voltage_round_trip() {
        let g = Graph::doubled_cycle(3).unwrap();
        let z = VoltageAssignment::new(&g, 5, 2, &[(0, vec![1, 2]), (3, vec![0, 4])]).unwrap();
        let again = parse_voltage(&format_voltage(&z), &g).unwrap();
        assert_eq!(again, z);
        assert_eq!(z.voltage(g.inv(0)), &[4, 3]);
    }

    #[test]
    fn quotient_action_of_cover() {
        let g = Graph::doubled_cycle(3).unwrap();
        let a = aut_group(&g).unwrap();
        let trivial = GraphAction::trivial(&g);
        let (q, proj) = quotient(&g, &trivial).unwrap();
        let qa = quotient_group_action(&g, &a, &trivial, &proj).unwrap();
        assert_eq!(q, g);
        assert_eq!(qa.order(), a.order());
    }
}
