//! Individualization-refinement search for vertex-coloured simple graphs.
//!
//! One search yields generators of the automorphism group, its exact order
//! and a canonical labelling. Partitions are refined to equitable ones with
//! a Hopcroft-style splitter queue; the target cell is always the first
//! smallest non-singleton cell. Leaves are compared on the pair
//! (refinement trace, relabelled edge list), and automorphisms come from
//! leaves equivalent to the first or to the best leaf seen so far.

use std::cmp::Ordering;
use std::collections::VecDeque;

/// Undirected simple graph on `0..n` with a colour per node.
#[derive(Clone, Debug)]
pub struct ColouredGraph {
    adj: Vec<Vec<u32>>,
    colours: Vec<u32>,
}

impl ColouredGraph {
    pub fn new(adj: Vec<Vec<u32>>, colours: Vec<u32>) -> Self {
        assert_eq!(adj.len(), colours.len());
        ColouredGraph { adj, colours }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Automorphisms as node image arrays.
    pub generators: Vec<Vec<u32>>,
    pub order: u128,
    /// `labelling[u]` is the canonical position of node `u`.
    pub labelling: Vec<u32>,
    /// Byte string equal for two inputs iff they are isomorphic.
    pub certificate: Vec<u8>,
}

#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    pos: Vec<u32>,
    // start of the cell containing each node
    cell: Vec<u32>,
    // exclusive end, indexed by cell start
    end: Vec<u32>,
    cells: usize,
}

impl Partition {
    fn from_colours(colours: &[u32]) -> Self {
        let n = colours.len();
        let mut lab: Vec<u32> = (0..n as u32).collect();
        lab.sort_by_key(|&u| (colours[u as usize], u));
        let mut pos = vec![0; n];
        let mut cell = vec![0; n];
        let mut end = vec![0; n];
        let mut cells = 0;
        let mut start = 0;
        for i in 0..n {
            pos[lab[i] as usize] = i as u32;
            if i > 0 && colours[lab[i] as usize] != colours[lab[i - 1] as usize] {
                end[start] = i as u32;
                start = i;
                cells += 1;
            }
            cell[lab[i] as usize] = start as u32;
        }
        if n > 0 {
            end[start] = n as u32;
            cells += 1;
        }
        Partition {
            lab,
            pos,
            cell,
            end,
            cells,
        }
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    fn target_cell(&self) -> Option<(usize, usize)> {
        let n = self.lab.len();
        let mut best: Option<(usize, usize)> = None;
        let mut s = 0;
        while s < n {
            let e = self.end[s] as usize;
            let size = e - s;
            if size > 1 && best.is_none_or(|(bs, be)| size < be - bs) {
                best = Some((s, e));
                if size == 2 {
                    break;
                }
            }
            s = e;
        }
        best
    }

    fn swap(&mut self, i: usize, j: usize) {
        let (a, b) = (self.lab[i], self.lab[j]);
        self.lab[i] = b;
        self.lab[j] = a;
        self.pos[a as usize] = j as u32;
        self.pos[b as usize] = i as u32;
    }

    /// Splits `v` off the front of its cell; returns the new singleton start.
    fn individualize(&mut self, v: u32) -> usize {
        let s = self.cell[v as usize] as usize;
        let e = self.end[s] as usize;
        let p = self.pos[v as usize] as usize;
        self.swap(s, p);
        self.end[s] = s as u32 + 1;
        self.end[s + 1] = e as u32;
        for i in s + 1..e {
            self.cell[self.lab[i] as usize] = s as u32 + 1;
        }
        self.cells += 1;
        s
    }
}

struct Refiner<'a> {
    g: &'a ColouredGraph,
    count: Vec<u32>,
    touched: Vec<u32>,
    in_queue: Vec<bool>,
}

const SEED: u64 = 0xcbf2_9ce4_8422_2325;

fn mix(h: u64, x: u64) -> u64 {
    let mut z = h ^ x
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(h << 6)
        .wrapping_add(h >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl<'a> Refiner<'a> {
    fn new(g: &'a ColouredGraph) -> Self {
        let n = g.node_count();
        Refiner {
            g,
            count: vec![0; n],
            touched: Vec::new(),
            in_queue: vec![false; n],
        }
    }

    /// Refines to the coarsest equitable partition finer than `p`, starting
    /// from the given splitters, and returns an invariant trace hash.
    fn refine(&mut self, p: &mut Partition, splitters: &[usize]) -> u64 {
        let mut h = SEED;
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in splitters {
            if !self.in_queue[s] {
                self.in_queue[s] = true;
                queue.push_back(s);
            }
        }
        let mut cell_nodes: Vec<u32> = Vec::new();
        while let Some(w) = queue.pop_front() {
            self.in_queue[w] = false;
            if p.is_discrete() {
                continue;
            }
            let we = p.end[w] as usize;
            let members: Vec<u32> = p.lab[w..we].to_vec();
            for &u in &members {
                for &v in &self.g.adj[u as usize] {
                    if self.count[v as usize] == 0 {
                        self.touched.push(v);
                    }
                    self.count[v as usize] += 1;
                }
            }
            let mut touched = std::mem::take(&mut self.touched);
            touched.sort_unstable_by_key(|&v| p.pos[v as usize]);
            let mut i = 0;
            while i < touched.len() {
                let s = p.cell[touched[i] as usize] as usize;
                let mut j = i;
                while j < touched.len() && p.cell[touched[j] as usize] as usize == s {
                    j += 1;
                }
                cell_nodes.clear();
                cell_nodes.extend_from_slice(&touched[i..j]);
                self.split_cell(p, s, &cell_nodes, &mut queue, &mut h, w);
                i = j;
            }
            for &v in &touched {
                self.count[v as usize] = 0;
            }
            touched.clear();
            self.touched = touched;
        }
        mix(h, p.cells as u64)
    }

    fn split_cell(
        &mut self,
        p: &mut Partition,
        s: usize,
        hit: &[u32],
        queue: &mut VecDeque<usize>,
        h: &mut u64,
        splitter: usize,
    ) {
        let e = p.end[s] as usize;
        let size = e - s;
        if size == 1 {
            return;
        }
        let c0 = self.count[hit[0] as usize];
        if hit.len() == size && hit.iter().all(|&v| self.count[v as usize] == c0) {
            return;
        }
        // move hit nodes to the back of the cell, then order them by count
        let back = e - hit.len();
        let mut t = e;
        for &v in hit {
            t -= 1;
            let cur = p.pos[v as usize] as usize;
            p.swap(cur, t);
        }
        let mut sorted: Vec<u32> = hit.to_vec();
        sorted.sort_unstable_by_key(|&v| self.count[v as usize]);
        for (k, &v) in sorted.iter().enumerate() {
            p.lab[back + k] = v;
            p.pos[v as usize] = (back + k) as u32;
        }
        let mut frags: Vec<(usize, usize, u32)> = Vec::new();
        if back > s {
            frags.push((s, back, 0));
        }
        let mut f = back;
        while f < e {
            let c = self.count[p.lab[f] as usize];
            let mut g = f;
            while g < e && self.count[p.lab[g] as usize] == c {
                g += 1;
            }
            frags.push((f, g, c));
            f = g;
        }
        *h = mix(*h, splitter as u64);
        *h = mix(*h, s as u64);
        *h = mix(*h, frags.len() as u64);
        for &(a, b, c) in &frags {
            *h = mix(*h, c as u64);
            *h = mix(*h, (b - a) as u64);
        }
        for &(a, b, _) in &frags {
            p.end[a] = b as u32;
            if a != s {
                for i in a..b {
                    p.cell[p.lab[i] as usize] = a as u32;
                }
            }
        }
        p.cells += frags.len() - 1;
        if self.in_queue[s] {
            for &(a, _, _) in &frags[1..] {
                self.in_queue[a] = true;
                queue.push_back(a);
            }
        } else {
            let mut largest = 0;
            for (k, &(a, b, _)) in frags.iter().enumerate() {
                if b - a > frags[largest].1 - frags[largest].0 {
                    largest = k;
                }
            }
            for (k, &(a, _, _)) in frags.iter().enumerate() {
                if k != largest {
                    self.in_queue[a] = true;
                    queue.push_back(a);
                }
            }
        }
    }
}

struct Leaf {
    trace: Vec<u64>,
    edges: Vec<(u32, u32)>,
    lab: Vec<u32>,
    path: Vec<u32>,
}

impl Leaf {
    fn key_cmp(&self, trace: &[u64], edges: &[(u32, u32)]) -> Ordering {
        self.trace
            .as_slice()
            .cmp(trace)
            .then_with(|| self.edges.as_slice().cmp(edges))
    }
}

enum Step {
    Continue,
    Jump(usize),
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big as u32;
        self.size[big] += self.size[small];
    }
}

struct Search<'a> {
    g: &'a ColouredGraph,
    refiner: Refiner<'a>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Vec<u32>>,
    orbits: UnionFind,
}

/// Compares a node trace against the prefix of a leaf trace.
fn trace_cmp(node: &[u64], leaf: &[u64]) -> Ordering {
    let k = node.len().min(leaf.len());
    node[..k].cmp(&leaf[..k]).then(if leaf.len() < node.len() {
        Ordering::Greater
    } else {
        Ordering::Equal
    })
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl<'a> Search<'a> {
    fn relabelled_edges(&self, p: &Partition) -> Vec<(u32, u32)> {
        let mut edges = Vec::new();
        for (u, nbrs) in self.g.adj.iter().enumerate() {
            let pu = p.pos[u];
            for &v in nbrs {
                let pv = p.pos[v as usize];
                if pu < pv {
                    edges.push((pu, pv));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    fn add_automorphism(&mut self, from: &Partition, to_lab: &[u32]) {
        let gamma: Vec<u32> = (0..from.lab.len())
            .map(|u| to_lab[from.pos[u] as usize])
            .collect();
        if gamma.iter().enumerate().all(|(i, &x)| i as u32 == x) {
            return;
        }
        for (u, &v) in gamma.iter().enumerate() {
            self.orbits.union(u, v as usize);
        }
        self.gens.push(gamma);
    }

    fn child(&mut self, p: &Partition, v: u32) -> (Partition, u64) {
        let mut c = p.clone();
        let s = c.individualize(v);
        let h = self.refiner.refine(&mut c, &[s]);
        let at = c.pos[v as usize] as u64;
        (c, mix(h, at))
    }

    fn leaf(&mut self, p: &Partition, trace: &[u64], path: &[u32]) -> Step {
        let edges = self.relabelled_edges(p);
        if self.first.is_none() {
            let leaf = Leaf {
                trace: trace.to_vec(),
                edges: edges.clone(),
                lab: p.lab.clone(),
                path: path.to_vec(),
            };
            self.best = Some(Leaf {
                trace: trace.to_vec(),
                edges,
                lab: p.lab.clone(),
                path: path.to_vec(),
            });
            self.first = Some(leaf);
            return Step::Continue;
        }
        let first = self.first.as_ref().expect("set");
        if first.key_cmp(trace, &edges) == Ordering::Equal {
            let lab = first.lab.clone();
            let d = common_prefix(path, &first.path);
            self.add_automorphism(p, &lab);
            return Step::Jump(d);
        }
        let best = self.best.as_ref().expect("set");
        match best.key_cmp(trace, &edges) {
            Ordering::Equal => {
                let lab = best.lab.clone();
                let d = common_prefix(path, &best.path);
                self.add_automorphism(p, &lab);
                Step::Jump(d)
            }
            Ordering::Greater => {
                self.best = Some(Leaf {
                    trace: trace.to_vec(),
                    edges,
                    lab: p.lab.clone(),
                    path: path.to_vec(),
                });
                Step::Continue
            }
            Ordering::Less => Step::Continue,
        }
    }

    fn prunable(&self, trace: &[u64]) -> bool {
        let first = self.first.as_ref().expect("first leaf exists");
        if trace_cmp(trace, &first.trace) == Ordering::Equal {
            return false;
        }
        let best = self.best.as_ref().expect("best leaf exists");
        trace_cmp(trace, &best.trace) == Ordering::Greater
    }

    /// Explores the subtree below a non-first-path node.
    fn explore(&mut self, p: &Partition, trace: &mut Vec<u64>, path: &mut Vec<u32>) -> Step {
        if p.is_discrete() {
            return self.leaf(p, trace, path);
        }
        let (s, e) = p.target_cell().expect("not discrete");
        let cell: Vec<u32> = p.lab[s..e].to_vec();
        let depth = path.len();
        // orbits on the cell of known automorphisms fixing the current path
        let index: std::collections::HashMap<u32, usize> =
            cell.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut local = UnionFind::new(cell.len());
        let mut seen_gens = 0;
        let mut done: Vec<usize> = Vec::new();
        for (i, &w) in cell.iter().enumerate() {
            while seen_gens < self.gens.len() {
                let gamma = &self.gens[seen_gens];
                seen_gens += 1;
                if path.iter().all(|&v| gamma[v as usize] == v) {
                    for (a, &v) in cell.iter().enumerate() {
                        local.union(a, index[&gamma[v as usize]]);
                    }
                }
            }
            let r = local.find(i);
            if done.iter().any(|&d| local.find(d) == r) {
                continue;
            }
            done.push(i);
            let (c, h) = self.child(p, w);
            trace.push(h);
            path.push(w);
            let step = if self.prunable(trace) {
                Step::Continue
            } else {
                self.explore(&c, trace, path)
            };
            trace.pop();
            path.pop();
            if let Step::Jump(d) = step {
                if d < depth {
                    return Step::Jump(d);
                }
            }
        }
        Step::Continue
    }

    fn run(&mut self) -> SearchResult {
        let n = self.g.node_count();
        let mut root = Partition::from_colours(&self.g.colours);
        let mut starts: Vec<usize> = Vec::new();
        let mut s = 0;
        while s < n {
            starts.push(s);
            s = root.end[s] as usize;
        }
        let h0 = self.refiner.refine(&mut root, &starts);
        // first path
        let mut nodes = vec![root];
        let mut trace = vec![h0];
        let mut path: Vec<u32> = Vec::new();
        while !nodes.last().expect("nonempty").is_discrete() {
            let p = nodes.last().expect("nonempty");
            let (s, _) = p.target_cell().expect("not discrete");
            let v = p.lab[s];
            let (c, h) = self.child(&p.clone(), v);
            trace.push(h);
            path.push(v);
            nodes.push(c);
        }
        let leaf_p = nodes.last().expect("nonempty").clone();
        self.leaf(&leaf_p, &trace, &path);
        let mut order: u128 = 1;
        for k in (0..path.len()).rev() {
            let p = nodes[k].clone();
            let (s, e) = p.target_cell().expect("not discrete");
            let vk = path[k];
            let cell: Vec<u32> = p.lab[s..e].to_vec();
            let mut tried: Vec<u32> = vec![vk];
            for &w in &cell {
                if w == vk {
                    continue;
                }
                let rw = self.orbits.find(w as usize);
                if tried.iter().any(|&t| self.orbits.find(t as usize) == rw) {
                    continue;
                }
                tried.push(w);
                let (c, h) = self.child(&p, w);
                let mut t: Vec<u64> = trace[..=k].to_vec();
                t.push(h);
                let mut pp: Vec<u32> = path[..k].to_vec();
                pp.push(w);
                if !self.prunable(&t) {
                    self.explore(&c, &mut t, &mut pp);
                }
            }
            let r = self.orbits.find(vk as usize);
            let size = cell
                .iter()
                .filter(|&&w| self.orbits.find(w as usize) == r)
                .count();
            order = order
                .checked_mul(size as u128)
                .expect("automorphism group order overflows u128");
        }
        let best = self.best.take().expect("search reached a leaf");
        let mut labelling = vec![0u32; n];
        for (i, &u) in best.lab.iter().enumerate() {
            labelling[u as usize] = i as u32;
        }
        let certificate = encode_certificate(self.g, &best);
        SearchResult {
            generators: std::mem::take(&mut self.gens),
            order,
            labelling,
            certificate,
        }
    }
}

fn encode_certificate(g: &ColouredGraph, best: &Leaf) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * best.edges.len());
    let push = |out: &mut Vec<u8>, x: u32| out.extend_from_slice(&x.to_le_bytes());
    push(&mut out, g.node_count() as u32);
    // colour of each canonical position, run-length encoded
    let mut runs: Vec<(u32, u32)> = Vec::new();
    for &u in &best.lab {
        let c = g.colours[u as usize];
        match runs.last_mut() {
            Some((col, len)) if *col == c => *len += 1,
            _ => runs.push((c, 1)),
        }
    }
    push(&mut out, runs.len() as u32);
    for (c, len) in runs {
        push(&mut out, c);
        push(&mut out, len);
    }
    push(&mut out, best.edges.len() as u32);
    for &(a, b) in &best.edges {
        push(&mut out, a);
        push(&mut out, b);
    }
    out
}

pub fn search(g: &ColouredGraph) -> SearchResult {
    if g.node_count() == 0 {
        return SearchResult {
            generators: Vec::new(),
            order: 1,
            labelling: Vec::new(),
            certificate: vec![0; 4],
        };
    }
    let mut s = Search {
        g,
        refiner: Refiner::new(g),
        first: None,
        best: None,
        gens: Vec::new(),
        orbits: UnionFind::new(g.node_count()),
    };
    s.run()
}
