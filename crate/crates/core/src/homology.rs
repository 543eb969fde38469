//! The action of a graph group on first homology over GF(p), minimal
//! admissible elementary abelian covers, and lifting groups along them.
//!
//! Homology is taken with the fundamental-cycle basis of the breadth-first
//! spanning tree: basis vector `i` is the cycle closed by the `i`-th cotree
//! dart.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::cover::{derived_cover, vector_index, Projection, SpanningTree, VoltageAssignment};
use crate::error::CoverError;
use crate::gf::{annihilator, rref, Echelon, Field, Gf2, GfP, Matrix};
use crate::graph::Graph;
use crate::meataxe::{self, Module};
use crate::perm::Perm;
use crate::symmetry::{is_relevant_pair, GraphAction};

#[derive(Clone, Debug)]
enum Rep {
    Two(Module<Gf2>),
    Odd(Module<GfP>),
}

macro_rules! with_rep {
    ($rep:expr, $m:ident => $body:expr) => {
        match $rep {
            Rep::Two($m) => $body,
            Rep::Odd($m) => $body,
        }
    };
}

#[derive(Clone, Debug)]
pub struct HomologyModule {
    base: Graph,
    p: u32,
    tree: SpanningTree,
    cotree: Vec<usize>,
    rep: Rep,
}

// class of a dart in the cycle basis: (basis index, sign)
fn dart_classes(g: &Graph, cotree: &[usize]) -> Vec<Option<(usize, bool)>> {
    let mut cls = vec![None; g.dart_count()];
    for (i, &x) in cotree.iter().enumerate() {
        cls[x] = Some((i, true));
        cls[g.inv(x)] = Some((i, false));
    }
    cls
}

fn action_matrix<F: Field>(
    f: &F,
    g: &Graph,
    tree: &SpanningTree,
    cotree: &[usize],
    cls: &[Option<(usize, bool)>],
    dp: &Perm,
) -> Matrix<F> {
    let beta = cotree.len();
    let add_class = |row: &mut F::Row, y: usize, sign: bool| {
        if let Some((i, s)) = cls[y] {
            let c = if s == sign { 1 } else { f.neg(1) };
            let v = f.add(f.get(row, i), c);
            f.set(row, i, v);
        }
    };
    // psi(v): class of the image of the tree path from the root to v
    let mut psi = vec![f.zero_row(beta); g.vertex_count()];
    for &v in &tree.order[1..] {
        let x = tree.parent_dart[v].expect("non-root vertex");
        let mut row = psi[g.beg(x)].clone();
        add_class(&mut row, dp.apply(x), true);
        psi[v] = row;
    }
    let rows = cotree
        .iter()
        .map(|&x| {
            let mut row = psi[g.beg(x)].clone();
            add_class(&mut row, dp.apply(x), true);
            f.axpy(&mut row, f.neg(1), &psi[g.end(x)]);
            row
        })
        .collect();
    Matrix::from_rows(rows, beta)
}

fn build_module<F: Field>(
    f: F,
    g: &Graph,
    tree: &SpanningTree,
    cotree: &[usize],
    dps: &[Perm],
) -> Module<F> {
    let cls = dart_classes(g, cotree);
    let gens = dps
        .iter()
        .map(|dp| action_matrix(&f, g, tree, cotree, &cls, dp))
        .collect();
    Module::new(f, cotree.len(), gens)
}

/// The induced action on `H1(Γ; GF(p))`, one matrix per generator.
pub fn homology_rep(g: &Graph, a: &GraphAction, p: u32) -> Result<HomologyModule, CoverError> {
    if g.has_semiedges() {
        return Err(crate::error::GraphError::Semiedges.into());
    }
    if !crate::cover::is_prime(p) || p >= 1 << 16 {
        return Err(CoverError::InvalidVoltage(format!(
            "{p} is not a prime below 2^16"
        )));
    }
    let tree = SpanningTree::bfs(g)?;
    let cotree = tree.cotree_darts(g);
    let rep = if p == 2 {
        Rep::Two(build_module(Gf2, g, &tree, &cotree, a.dart_perms()))
    } else {
        Rep::Odd(build_module(GfP::new(p), g, &tree, &cotree, a.dart_perms()))
    };
    Ok(HomologyModule {
        base: g.clone(),
        p,
        tree,
        cotree,
        rep,
    })
}

/// A maximal invariant submodule, kept as the reduced echelon basis of its
/// annihilator (one row per quotient coordinate).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantKernel {
    pub p: u32,
    pub dim: usize,
    pub annihilator: Vec<Vec<u32>>,
}

impl InvariantKernel {
    pub fn codim(&self) -> usize {
        self.annihilator.len()
    }

    /// Reduced echelon basis of the kernel itself.
    pub fn basis(&self) -> Vec<Vec<u32>> {
        let f = GfP::new(self.p);
        let s: Vec<Vec<u32>> = self.annihilator.clone();
        rref(&f, &annihilator(&f, &s, self.dim), self.dim)
    }

    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.p.to_le_bytes());
        h.update((self.dim as u64).to_le_bytes());
        for row in &self.annihilator {
            for &c in row {
                h.update(c.to_le_bytes());
            }
        }
        hex::encode(&h.finalize()[..8])
    }

    /// Coordinates of basis cycle `i` in the quotient.
    pub fn voltage_of(&self, i: usize) -> Vec<u32> {
        self.annihilator.iter().map(|r| r[i]).collect()
    }
}

impl HomologyModule {
    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.cotree.len()
    }

    pub fn cotree_darts(&self) -> &[usize] {
        &self.cotree
    }

    pub fn generator_count(&self) -> usize {
        with_rep!(&self.rep, m => m.gens.len())
    }

    /// Entries of the matrix of generator `i`.
    pub fn matrix(&self, i: usize) -> Vec<Vec<u32>> {
        with_rep!(&self.rep, m => m.gens[i].entries(&m.field))
    }

    /// Matrix of an arbitrary dart permutation of the base graph.
    pub fn matrix_of(&self, dp: &Perm) -> Vec<Vec<u32>> {
        let cls = dart_classes(&self.base, &self.cotree);
        with_rep!(&self.rep, m => action_matrix(&m.field, &self.base, &self.tree, &self.cotree, &cls, dp).entries(&m.field))
    }

    pub fn generators_invertible(&self) -> bool {
        with_rep!(&self.rep, m => m.gens.iter().all(|g| g.rank(&m.field) == m.dim))
    }

    /// Compares the product of generator matrices along random words with
    /// the matrix of the product permutation. Returns the number of words
    /// checked.
    pub fn check_words(&self, a: &GraphAction, count: usize, seed: u64) -> Result<usize, usize> {
        let k = a.generator_count();
        if k == 0 {
            return Ok(0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cls = dart_classes(&self.base, &self.cotree);
        for w in 0..count {
            let len = rng.gen_range(1..=6);
            let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..k)).collect();
            let ok = with_rep!(&self.rep, m => {
                let f = &m.field;
                let mut perm = a.dart_perms()[word[0]].clone();
                let mut mat = m.gens[word[0]].clone();
                for &i in &word[1..] {
                    perm = perm.mul(&a.dart_perms()[i]);
                    mat = mat.mul(f, &m.gens[i]);
                }
                action_matrix(f, &self.base, &self.tree, &self.cotree, &cls, &perm) == mat
            });
            if !ok {
                return Err(w);
            }
        }
        Ok(count)
    }

    /// Maximal invariant submodules of codimension at most `max_codim`.
    pub fn maximal_invariant_submodules(
        &self,
        max_codim: usize,
        seed: u64,
    ) -> Vec<InvariantKernel> {
        let (p, dim) = (self.p, self.dim());
        let mut out: Vec<InvariantKernel> = with_rep!(&self.rep, m => {
            meataxe::maximal_submodules(m, max_codim, seed)
                .into_iter()
                .map(|k| InvariantKernel {
                    p,
                    dim,
                    annihilator: k.annihilator.iter().map(|r| m.field.row_entries(r)).collect(),
                })
                .collect()
        });
        out.sort();
        out
    }

    fn annihilator_rows<F: Field>(f: &F, k: &InvariantKernel) -> Vec<F::Row> {
        k.annihilator.iter().map(|r| f.row_from(r)).collect()
    }

    /// Index of the first generator not leaving the kernel invariant.
    pub fn violating_generator(&self, k: &InvariantKernel) -> Option<usize> {
        with_rep!(&self.rep, m => {
            let f = &m.field;
            let s = Self::annihilator_rows(f, k);
            let mut e = Echelon::new(*f, m.dim);
            s.iter().for_each(|r| { e.insert(r.clone()); });
            // K invariant under M exactly when ann(K) is invariant under M^T
            let dual = m.dual();
            dual.gens.iter().position(|gt| s.iter().any(|r| !e.contains(&f.vec_mat(r, gt))))
        })
    }

    /// Matrices of the action on the quotient by `k`, in the coordinates of
    /// `InvariantKernel::voltage_of`.
    pub fn quotient_action(&self, k: &InvariantKernel) -> Result<Vec<Vec<Vec<u32>>>, CoverError> {
        if let Some(i) = self.violating_generator(k) {
            return Err(CoverError::NotInvariant(i));
        }
        let e = k.codim();
        Ok(with_rep!(&self.rep, m => {
            let f = &m.field;
            let s = Self::annihilator_rows(f, k);
            let mut ech = Echelon::with_coordinates(*f, m.dim, e);
            s.iter().for_each(|r| { ech.insert_tracked(r.clone()); });
            // S M^T = R S, and the quotient acts by R^T
            m.dual().gens.iter().map(|gt| {
                let r: Vec<Vec<u32>> = s.iter().map(|row| {
                    let c = ech.coordinates(&f.vec_mat(row, gt)).expect("invariant");
                    (0..e).map(|j| f.get(&c, j)).collect()
                }).collect();
                (0..e).map(|i| (0..e).map(|j| r[j][i]).collect()).collect()
            }).collect()
        }))
    }

    /// Whether the quotient by `k` has no proper invariant subspace.
    pub fn quotient_is_irreducible(
        &self,
        k: &InvariantKernel,
        seed: u64,
    ) -> Result<bool, CoverError> {
        let mats = self.quotient_action(k)?;
        let e = k.codim();
        let f = GfP::new(self.p);
        let q = Module::new(
            f,
            e,
            mats.iter().map(|m| Matrix::from_entries(&f, m)).collect(),
        );
        Ok(e > 0
            && meataxe::minimal_submodules(&q, e, seed)
                .iter()
                .all(|s| s.len() == e))
    }

    /// The voltage assignment of the quotient map `H1 → H1/K`: each cotree
    /// dart carries the image of its fundamental cycle, tree darts zero.
    pub fn cover_from_kernel(&self, k: &InvariantKernel) -> Result<VoltageAssignment, CoverError> {
        if k.codim() == 0 {
            return Err(CoverError::TrivialQuotient);
        }
        if let Some(i) = self.violating_generator(k) {
            return Err(CoverError::NotInvariant(i));
        }
        let designated: Vec<(usize, Vec<u32>)> = self
            .cotree
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, k.voltage_of(i)))
            .collect();
        VoltageAssignment::new(&self.base, self.p, k.codim(), &designated)
    }
}

fn add_vec(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| (x + y) % p).collect()
}

fn sub_vec(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| (x + p - y) % p).collect()
}

// row vector times a d×d matrix over GF(p)
fn vec_times(p: u32, v: &[u32], m: &[Vec<u32>]) -> Vec<u32> {
    let d = m.len();
    (0..d)
        .map(|j| {
            (0..d).fold(0u64, |acc, i| {
                (acc + v[i] as u64 * m[i][j] as u64) % p as u64
            }) as u32
        })
        .collect()
}

// net voltages of the closed walks g(C_x) over the cotree darts, where g is
// given by its dart permutation (identity for the cycles themselves)
fn cycle_voltages(
    z: &VoltageAssignment,
    tree: &SpanningTree,
    cotree: &[usize],
    dp: Option<&Perm>,
) -> Vec<Vec<u32>> {
    let g = z.base();
    let (p, d) = (z.p(), z.d());
    let img = |x: usize| dp.map_or(x, |q| q.apply(x));
    let mut pot = vec![vec![0u32; d]; g.vertex_count()];
    for &v in &tree.order[1..] {
        let x = tree.parent_dart[v].expect("non-root");
        pot[v] = add_vec(p, &pot[g.beg(x)], z.voltage(img(x)));
    }
    cotree
        .iter()
        .map(|&x| {
            sub_vec(
                p,
                &add_vec(p, &pot[g.beg(x)], z.voltage(img(x))),
                &pot[g.end(x)],
            )
        })
        .collect()
}

/// The linear map `L` on GF(p)^d with `ν(g C) = ν(C) L` for every cycle,
/// if the dart permutation `dp` lifts.
fn voltage_map(
    z: &VoltageAssignment,
    tree: &SpanningTree,
    cotree: &[usize],
    dp: &Perm,
) -> Option<Vec<Vec<u32>>> {
    let (p, d) = (z.p(), z.d());
    let f = GfP::new(p);
    let src = cycle_voltages(z, tree, cotree, None);
    let dst = cycle_voltages(z, tree, cotree, Some(dp));
    // pick d cycles with independent voltages
    let mut e = Echelon::new(f, d);
    let mut chosen = Vec::new();
    for (i, v) in src.iter().enumerate() {
        if e.insert(v.clone()) {
            chosen.push(i);
        }
        if chosen.len() == d {
            break;
        }
    }
    if chosen.len() < d {
        return None;
    }
    let a = Matrix::from_entries(
        &f,
        &chosen.iter().map(|&i| src[i].clone()).collect::<Vec<_>>(),
    );
    let b = Matrix::from_entries(
        &f,
        &chosen.iter().map(|&i| dst[i].clone()).collect::<Vec<_>>(),
    );
    let l = a.inverse(&f)?.mul(&f, &b).entries(&f);
    src.iter()
        .zip(&dst)
        .all(|(s, t)| vec_times(p, s, &l) == *t)
        .then_some(l)
}

/// Lift of one automorphism along the derived cover:
/// `(u, a) ↦ (g u, a L + c(u))`.
fn lift_element(
    z: &VoltageAssignment,
    tree: &SpanningTree,
    l: &[Vec<u32>],
    vp: &Perm,
    dp: &Perm,
) -> Option<(Perm, Perm)> {
    let g = z.base();
    let (p, d) = (z.p(), z.d());
    let k = z.fibre_size();
    // c(end x) - c(beg x) = ζ(g x) - ζ(x) L on every dart
    let mut c = vec![vec![0u32; d]; g.vertex_count()];
    for &v in &tree.order[1..] {
        let x = tree.parent_dart[v].expect("non-root");
        let step = sub_vec(p, z.voltage(dp.apply(x)), &vec_times(p, z.voltage(x), l));
        c[v] = add_vec(p, &c[g.beg(x)], &step);
    }
    for x in 0..g.dart_count() {
        let step = sub_vec(p, z.voltage(dp.apply(x)), &vec_times(p, z.voltage(x), l));
        if sub_vec(p, &c[g.end(x)], &c[g.beg(x)]) != step {
            return None;
        }
    }
    let point = |base: usize, i: usize, shift: &[u32]| {
        let a = crate::cover::index_vector(i, p, d);
        base * k + vector_index(&add_vec(p, &vec_times(p, &a, l), shift), p)
    };
    let vimg = (0..g.vertex_count() * k)
        .map(|t| point(vp.apply(t / k), t % k, &c[t / k]))
        .collect();
    let dimg = (0..g.dart_count() * k)
        .map(|t| point(dp.apply(t / k), t % k, &c[g.beg(t / k)]))
        .collect();
    Some((Perm::from_images(vimg).ok()?, Perm::from_images(dimg).ok()?))
}

/// A group lifted to a derived cover.
#[derive(Clone, Debug)]
pub struct Lift {
    pub cover: Graph,
    pub projection: Projection,
    pub action: GraphAction,
    /// Generators of the lifted group that are lifts of the base
    /// generators, in order; the translations follow them.
    pub lifted_generators: usize,
}

/// Lifts `a` along the derived cover of `z`. The lifted group is generated
/// by one lift per generator together with the translations, so its order
/// is `p^d |G|`.
pub fn lift_group(g: &Graph, a: &GraphAction, z: &VoltageAssignment) -> Result<Lift, CoverError> {
    if z.base() != g {
        return Err(CoverError::Mismatch(
            "voltage assignment is on another graph".into(),
        ));
    }
    let (cover, projection) = derived_cover(z)?;
    let tree = SpanningTree::bfs(g)?;
    let cotree = tree.cotree_darts(g);
    let mut vps = Vec::new();
    let mut dps = Vec::new();
    for (i, (vp, dp)) in a.vertex_perms().iter().zip(a.dart_perms()).enumerate() {
        let l = voltage_map(z, &tree, &cotree, dp).ok_or(CoverError::NotInvariant(i))?;
        let (lv, ld) = lift_element(z, &tree, &l, vp, dp).ok_or(CoverError::NotInvariant(i))?;
        vps.push(lv);
        dps.push(ld);
    }
    let lifted_generators = vps.len();
    let t = crate::cover::translation_action(&cover, z.p(), z.d())?;
    vps.extend(t.vertex_perms().iter().cloned());
    dps.extend(t.dart_perms().iter().cloned());
    let order = a.order() * z.fibre_size() as u128;
    let action = GraphAction::new(&cover, vps, dps, Some(order))?;
    Ok(Lift {
        cover,
        projection,
        action,
        lifted_generators,
    })
}

#[derive(Clone, Debug, Default)]
pub struct CoverOptions {
    /// Restrict to these primes (all admissible primes when `None`).
    pub primes: Option<Vec<u32>>,
    /// Restrict to this quotient dimension.
    pub dim: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct AdmissibleCover {
    pub p: u32,
    pub d: usize,
    pub kernel: InvariantKernel,
    pub voltage: VoltageAssignment,
    pub lift: Lift,
}

impl AdmissibleCover {
    pub fn degree(&self) -> usize {
        self.voltage.fibre_size()
    }

    pub fn record(&self, base_id: &str) -> String {
        format!(
            "cover p={} d={} base_id={} kernel_hash={} |V|={} |G|={}",
            self.p,
            self.d,
            base_id,
            self.kernel.hash_hex(),
            self.lift.cover.vertex_count(),
            self.lift.action.order()
        )
    }
}

pub fn primes_up_to(n: usize) -> Vec<u32> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

/// Largest `d` with `p^d <= ratio`.
pub fn max_dim(p: u32, ratio: usize) -> usize {
    let mut d = 0;
    let mut q = p as usize;
    while q <= ratio {
        d += 1;
        q = q.saturating_mul(p as usize);
    }
    d
}

/// Minimal admissible elementary abelian covers with at most `max_order`
/// vertices, deduplicated by kernel and sorted by `(p, d, kernel)`.
pub fn minimal_admissible_covers(
    g: &Graph,
    a: &GraphAction,
    max_order: usize,
    opts: &CoverOptions,
) -> Result<Vec<AdmissibleCover>, CoverError> {
    let n = g.vertex_count();
    let ratio = max_order / n;
    let primes: Vec<u32> = primes_up_to(ratio)
        .into_iter()
        .filter(|p| opts.primes.as_ref().is_none_or(|ps| ps.contains(p)))
        .collect();
    let per_prime: Vec<Result<Vec<AdmissibleCover>, CoverError>> = primes
        .par_iter()
        .map(|&p| {
            let d_max = max_dim(p, ratio);
            let d_max = opts.dim.map_or(d_max, |d| d.min(d_max));
            let module = homology_rep(g, a, p)?;
            let mut out = Vec::new();
            for kernel in module.maximal_invariant_submodules(d_max, opts.seed) {
                let d = kernel.codim();
                if opts.dim.is_some_and(|want| want != d) {
                    continue;
                }
                let voltage = module.cover_from_kernel(&kernel)?;
                let lift = lift_group(g, a, &voltage)?;
                out.push(AdmissibleCover {
                    p,
                    d,
                    kernel,
                    voltage,
                    lift,
                });
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_prime {
        all.extend(r?);
    }
    all.sort_by(|x, y| (x.p, x.d, &x.kernel).cmp(&(y.p, y.d, &y.kernel)));
    all.dedup_by(|x, y| x.kernel == y.kernel);
    Ok(all)
}

/// Whether every lifted pair keeps the relevant-pair property.
pub fn all_relevant(covers: &[AdmissibleCover]) -> bool {
    covers
        .iter()
        .all(|c| is_relevant_pair(&c.lift.cover, &c.lift.action))
}
