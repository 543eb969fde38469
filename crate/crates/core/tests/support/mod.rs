#![allow(dead_code)]

use std::path::PathBuf;

use hatc_core::catalog::{read_group, CatalogGroup};
use hatc_core::cover::{check_lemma_nq, translation_action};
use hatc_core::homology::{minimal_admissible_covers, CoverOptions};
use hatc_core::io::read_graph;
use hatc_core::symmetry::{aut_group, Digraph, GraphAction};
use hatc_core::universal::{base_pairs, dedupe_pairs, RelevantPair};
use hatc_core::{Graph, PermGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
}

pub fn group(name: &str) -> CatalogGroup {
    let small = fixture(&format!("catalog/small/{name}.grp"));
    let path = if small.exists() {
        small
    } else {
        fixture(&format!("catalog/large/{name}.grp"))
    };
    read_group(path).unwrap()
}

pub fn holt() -> Graph {
    read_graph(fixture("graphs/holt.graph")).unwrap()
}

/// One pair per graph from the witnesses of a catalog group.
pub fn pairs_of(name: &str) -> Vec<RelevantPair> {
    let cg = group(name);
    let pairs = base_pairs(&cg.name, &cg.group)
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    dedupe_pairs(pairs)
        .unwrap()
        .into_iter()
        .map(|(_, p)| p)
        .collect()
}

/// The order-42 pair with its group PGL(2,7).
pub fn id1() -> RelevantPair {
    pairs_of("PGL2_7").remove(0)
}

/// The subgroup of an action generated by some of its group elements.
pub fn subaction(g: &Graph, a: &GraphAction, sub: &PermGroup) -> GraphAction {
    let (vps, dps): (Vec<_>, Vec<_>) = sub
        .generators()
        .iter()
        .map(|e| a.split(g, e).unwrap())
        .unzip();
    GraphAction::new(g, vps, dps, Some(sub.order())).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_simple_edges(n, &edges).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let e: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    Graph::from_simple_edges(n, &e).unwrap()
}

pub fn petersen() -> Graph {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((i + 5, (i + 2) % 5 + 5));
    }
    Graph::from_simple_edges(10, &e).unwrap()
}

/// A random connected derived cover of `base` with its translation group.
pub fn random_cover<R: Rng>(base: &Graph, rng: &mut R) -> Option<(Graph, GraphAction)> {
    use hatc_core::cover::{derived_cover, translation_action, SpanningTree, VoltageAssignment};
    let p = [2u32, 3][rng.gen_range(0..2)];
    let d = rng.gen_range(1..=2usize);
    let cot = SpanningTree::bfs(base).ok()?.cotree_darts(base);
    let designated: Vec<(usize, Vec<u32>)> = cot
        .iter()
        .map(|&x| (x, (0..d).map(|_| rng.gen_range(0..p)).collect()))
        .collect();
    let z = VoltageAssignment::new(base, p, d, &designated).ok()?;
    let (cover, _) = derived_cover(&z).ok()?;
    let t = translation_action(&cover, p, d).ok()?;
    Some((cover, t))
}

/// Small connected graphs of several shapes, simple and not.
pub fn graph_pool() -> Vec<Graph> {
    let mut pool: Vec<Graph> = (3..=12).map(cycle).collect();
    pool.extend((1..=8).map(|n| Graph::doubled_cycle(n).unwrap()));
    pool.extend([
        complete(4),
        complete(5),
        petersen(),
        holt(),
        Graph::four_semiedge_vertex(),
    ]);
    pool
}

/// Dart permutations commuting with `beg` and `inv` and preserving the arc
/// set, counted by backtracking over dart images.
pub fn brute_digraph_count(d: &Digraph) -> u128 {
    let g = &d.graph;
    let m = g.dart_count();
    fn go(
        x: usize,
        d: &Digraph,
        dmap: &mut Vec<Option<usize>>,
        vmap: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> u128 {
        let g = &d.graph;
        if x == g.dart_count() {
            return 1;
        }
        if dmap[x].is_some() {
            return go(x + 1, d, dmap, vmap, used);
        }
        let mut total = 0;
        for y in 0..g.dart_count() {
            if used[y] || d.is_arc(x) != d.is_arc(y) {
                continue;
            }
            let (ix, iy) = (g.inv(x), g.inv(y));
            if ix != x && (used[iy] || iy == y) || ix == x && iy != y {
                continue;
            }
            let (bx, by) = (g.beg(x), g.beg(y));
            let (ex, ey) = (g.beg(ix), g.beg(iy));
            let ok = |vmap: &Vec<Option<usize>>, u: usize, w: usize| {
                vmap[u].is_none_or(|t| t == w) && (vmap[u] == Some(w) || !vmap.contains(&Some(w)))
            };
            if !ok(vmap, bx, by) {
                continue;
            }
            let saved = vmap.clone();
            vmap[bx] = Some(by);
            if !ok(vmap, ex, ey) {
                *vmap = saved;
                continue;
            }
            vmap[ex] = Some(ey);
            dmap[x] = Some(y);
            dmap[ix] = Some(iy);
            used[y] = true;
            used[iy] = true;
            total += go(x + 1, d, dmap, vmap, used);
            used[y] = false;
            used[iy] = false;
            dmap[x] = None;
            dmap[ix] = None;
            *vmap = saved;
        }
        total
    }
    go(
        0,
        d,
        &mut vec![None; m],
        &mut vec![None; g.vertex_count()],
        &mut vec![false; m],
    )
}

/// Subgroups `N` of automorphism groups on which the three conditions are
/// compared: random subgroups of the full group and translation groups of
/// random derived covers.
pub fn subgroup_fixtures(seed: u64) -> Vec<(String, Graph, GraphAction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut pool = graph_pool();
    pool.push(id1().graph);
    for g in &pool {
        let aut = aut_group(g).unwrap();
        for k in 1..=3 {
            out.push((
                format!("{} vertices, random {k}", g.vertex_count()),
                g.clone(),
                aut.random_subgroup(g, k, &mut rng),
            ));
        }
        // a power of a random element is more often a small semiregular group
        let e = aut.random_subgroup(g, 1, &mut rng);
        let m = rng.gen_range(2..5);
        let (vp, dp) = (e.vertex_perms()[0].pow(m), e.dart_perms()[0].pow(m));
        out.push((
            format!("{} vertices, power {m}", g.vertex_count()),
            g.clone(),
            GraphAction::new(g, vec![vp], vec![dp], None).unwrap(),
        ));
        for _ in 0..2 {
            if let Some((c, t)) = random_cover(g, &mut rng) {
                out.push((format!("cover of {} vertices", g.vertex_count()), c, t));
            }
        }
    }
    out
}

/// Triples `(Γ, G, N)` with `N` normal in `G` and `Γ → Γ/N` a covering.
pub fn normal_fixtures(seed: u64) -> Vec<(String, Graph, GraphAction, GraphAction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut pool = graph_pool();
    pool.push(id1().graph);
    for g in &pool {
        let aut = aut_group(g).unwrap();
        let subs = [aut.clone(), aut.random_subgroup(g, 2, &mut rng)];
        for (si, a) in subs.iter().enumerate() {
            for _ in 0..6 {
                let e = a.group().random_element(&mut rng);
                let Ok(ncl) = a.group().normal_closure(&[e]) else {
                    continue;
                };
                let n = subaction(g, a, &ncl);
                if check_lemma_nq(g, &n).unwrap().covering {
                    out.push((
                        format!("{} vertices, subgroup {si}", g.vertex_count()),
                        g.clone(),
                        a.clone(),
                        n,
                    ));
                }
            }
        }
    }
    // translation groups are normal in lifted groups
    let p = id1();
    let opts = CoverOptions::default();
    for c in minimal_admissible_covers(&p.graph, &p.action, 42 * 7, &opts).unwrap() {
        let t = translation_action(&c.lift.cover, c.p, c.d).unwrap();
        out.push((
            format!("lift p={} d={}", c.p, c.d),
            c.lift.cover.clone(),
            c.lift.action.clone(),
            t,
        ));
    }
    out
}

/// What fails to transfer from `(Γ, G)` to `(Γ/N, G/N)`, if anything.
pub fn normal_quotient_mismatch(g: &Graph, a: &GraphAction, n: &GraphAction) -> Option<String> {
    use hatc_core::cover::{quotient, quotient_group_action};
    use hatc_core::symmetry::transitivity_profile;
    let (q, proj) = match quotient(g, n) {
        Ok(x) => x,
        Err(e) => return Some(e.to_string()),
    };
    let qa = match quotient_group_action(g, a, n, &proj) {
        Ok(x) => x,
        Err(e) => return Some(e.to_string()),
    };
    // faithful: the kernel of G on the quotient is exactly N
    if qa.order() * n.order() != a.order() {
        return Some(format!(
            "|G/N| = {} but |G| / |N| = {}",
            qa.order(),
            a.order() / n.order()
        ));
    }
    for v in 0..g.vertex_count() {
        let (up, down) = (
            a.vertex_stabiliser(v).order(),
            qa.vertex_stabiliser(proj.vertex_map()[v]).order(),
        );
        if up != down {
            return Some(format!("stabiliser orders {up} and {down} at vertex {v}"));
        }
    }
    let (up, down) = (transitivity_profile(g, a), transitivity_profile(&q, &qa));
    (up != down).then(|| format!("profiles {up:?} and {down:?}"))
}
