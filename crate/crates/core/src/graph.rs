//! Dart-based graphs.
//!
//! A graph is the tuple `(D, V; beg, inv)`: darts and vertices are dense
//! indices, `beg` assigns each dart its initial vertex and `inv` is an
//! involution on darts. Loops, parallel links and semiedges are all
//! representable, which is what makes normal quotients well behaved.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::GraphError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_count: usize,
    beg: Vec<usize>,
    inv: Vec<usize>,
    // darts grouped by initial vertex, ascending within each vertex
    neighbourhoods: Vec<Vec<usize>>,
}

/// Kind of the edge (inv-orbit) containing a dart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Semiedge,
    Loop,
    Link,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralProfile {
    pub is_connected: bool,
    pub is_simple: bool,
    /// Valences sorted ascending.
    pub valences: Vec<usize>,
    pub semiedges: usize,
    pub loops: usize,
    pub links: usize,
    /// Number of unordered endpoint pairs joined by two or more links.
    pub parallel_classes: usize,
}

impl Graph {
    pub fn new(vertex_count: usize, beg: Vec<usize>, inv: Vec<usize>) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Invalid(
                "a graph needs at least one vertex".into(),
            ));
        }
        if beg.len() != inv.len() {
            return Err(GraphError::Invalid(format!(
                "beg has {} entries but inv has {}",
                beg.len(),
                inv.len()
            )));
        }
        for (x, &v) in beg.iter().enumerate() {
            if v >= vertex_count {
                return Err(GraphError::Invalid(format!(
                    "beg({x}) = {v} is not a vertex"
                )));
            }
        }
        for (x, &y) in inv.iter().enumerate() {
            if y >= inv.len() {
                return Err(GraphError::Invalid(format!("inv({x}) = {y} is not a dart")));
            }
            if inv[y] != x {
                return Err(GraphError::NotInvolution(x));
            }
        }
        let mut neighbourhoods = vec![Vec::new(); vertex_count];
        for (x, &v) in beg.iter().enumerate() {
            neighbourhoods[v].push(x);
        }
        Ok(Graph {
            vertex_count,
            beg,
            inv,
            neighbourhoods,
        })
    }

    /// Simple graph with darts `2i = (u, v)` and `2i + 1 = (v, u)` for the
    /// `i`-th edge `{u, v}`.
    pub fn from_simple_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut seen = std::collections::HashSet::new();
        let mut beg = Vec::with_capacity(2 * edges.len());
        let mut inv = Vec::with_capacity(2 * edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(GraphError::Invalid(format!(
                    "edge {{{u},{v}}} has an endpoint >= {n}"
                )));
            }
            if u == v {
                return Err(GraphError::Invalid(format!(
                    "self-pair {{{u},{u}}} in a simple graph"
                )));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::Invalid(format!("duplicate edge {{{u},{v}}}")));
            }
            beg.push(u);
            beg.push(v);
            inv.push(2 * i + 1);
            inv.push(2 * i);
        }
        Graph::new(n, beg, inv)
    }

    /// The doubled cycle: vertices `Z_n`, darts `(i, e, j)` stored at index
    /// `4i + 2e + j`, with `inv(i, e, j) = (i + (-1)^e, 1 - e, j)`.
    pub fn doubled_cycle(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Invalid("doubled cycle needs n >= 1".into()));
        }
        let idx = |i: usize, e: usize, j: usize| 4 * i + 2 * e + j;
        let mut beg = vec![0; 4 * n];
        let mut inv = vec![0; 4 * n];
        for i in 0..n {
            for e in 0..2 {
                for j in 0..2 {
                    let target = if e == 0 { (i + 1) % n } else { (i + n - 1) % n };
                    beg[idx(i, e, j)] = i;
                    inv[idx(i, e, j)] = idx(target, 1 - e, j);
                }
            }
        }
        Graph::new(n, beg, inv)
    }

    /// One vertex carrying four semiedges.
    pub fn four_semiedge_vertex() -> Self {
        Graph::new(1, vec![0; 4], vec![0, 1, 2, 3]).expect("valid by construction")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn dart_count(&self) -> usize {
        self.beg.len()
    }

    pub fn beg(&self, x: usize) -> usize {
        self.beg[x]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inv[x]
    }

    /// Initial vertex of the inverse dart.
    pub fn end(&self, x: usize) -> usize {
        self.beg[self.inv[x]]
    }

    pub fn beg_map(&self) -> &[usize] {
        &self.beg
    }

    pub fn inv_map(&self) -> &[usize] {
        &self.inv
    }

    pub fn neighbourhood(&self, v: usize) -> &[usize] {
        &self.neighbourhoods[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.neighbourhoods[v].len()
    }

    pub fn is_regular(&self, k: usize) -> bool {
        self.neighbourhoods.iter().all(|n| n.len() == k)
    }

    pub fn is_tetravalent(&self) -> bool {
        self.is_regular(4)
    }

    pub fn edge_kind(&self, x: usize) -> EdgeKind {
        let y = self.inv[x];
        if y == x {
            EdgeKind::Semiedge
        } else if self.beg[y] == self.beg[x] {
            EdgeKind::Loop
        } else {
            EdgeKind::Link
        }
    }

    /// Edges as their minimal dart, in increasing order.
    pub fn edges(&self) -> Vec<usize> {
        (0..self.dart_count())
            .filter(|&x| self.inv[x] >= x)
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.dart_count()).filter(|&x| self.inv[x] >= x).count()
    }

    pub fn has_semiedges(&self) -> bool {
        (0..self.dart_count()).any(|x| self.inv[x] == x)
    }

    pub fn is_connected(&self) -> bool {
        self.component_of(0).len() == self.vertex_count
    }

    /// Vertices reachable from `v` by walking along darts.
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([v]);
        seen[v] = true;
        let mut out = vec![v];
        while let Some(u) = queue.pop_front() {
            for &x in &self.neighbourhoods[u] {
                let w = self.end(x);
                if !seen[w] {
                    seen[w] = true;
                    out.push(w);
                    queue.push_back(w);
                }
            }
        }
        out
    }

    pub fn is_simple(&self) -> bool {
        let p = self.structural_profile();
        p.is_simple
    }

    pub fn structural_profile(&self) -> StructuralProfile {
        let mut semiedges = 0;
        let mut loops = 0;
        let mut links = 0;
        let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for x in self.edges() {
            match self.edge_kind(x) {
                EdgeKind::Semiedge => semiedges += 1,
                EdgeKind::Loop => loops += 1,
                EdgeKind::Link => {
                    links += 1;
                    let (u, v) = (self.beg(x), self.end(x));
                    *pairs.entry((u.min(v), u.max(v))).or_default() += 1;
                }
            }
        }
        let parallel_classes = pairs.values().filter(|&&c| c > 1).count();
        let mut valences: Vec<usize> = self.neighbourhoods.iter().map(Vec::len).collect();
        valences.sort_unstable();
        StructuralProfile {
            is_connected: self.is_connected(),
            is_simple: semiedges == 0 && loops == 0 && parallel_classes == 0,
            valences,
            semiedges,
            loops,
            links,
            parallel_classes,
        }
    }

    /// Dart from `u` to `v`, if any. Intended for simple graphs.
    pub fn dart_between(&self, u: usize, v: usize) -> Option<usize> {
        self.neighbourhoods[u]
            .iter()
            .copied()
            .find(|&x| self.end(x) == v)
    }

    /// Vertex adjacency lists (end vertices of the darts at each vertex).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        self.neighbourhoods
            .iter()
            .map(|darts| darts.iter().map(|&x| self.end(x)).collect())
            .collect()
    }

    /// Edge list `{beg, end}` of a simple graph, one entry per edge in
    /// minimal-dart order.
    pub fn simple_edges(&self) -> Vec<(usize, usize)> {
        self.edges()
            .into_iter()
            .map(|x| (self.beg(x), self.end(x)))
            .collect()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.vertex_count)
            .field("darts", &self.dart_count())
            .finish()
    }
}
