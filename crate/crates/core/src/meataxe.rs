//! Invariant subspaces of matrix groups over prime fields.
//!
//! Modules are row spaces with generators acting from the right. The search
//! for small submodules first confines them to the kernel of `r(θ)^d` for
//! one random algebra element θ, where `r` collects the irreducible factors
//! of degree at most `d` of its characteristic polynomial. It then takes
//! the largest invariant subspace there, chops it into composition factors
//! and enumerates images of homomorphisms from each small factor, one per
//! line over the factor's endomorphism field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf::{annihilator, rref, Echelon, Field, GfP, Insert, Matrix};
use crate::poly;

/// A module given by its generator matrices (all `dim × dim`).
#[derive(Clone, Debug)]
pub struct Module<F: Field> {
    pub field: F,
    pub dim: usize,
    pub gens: Vec<Matrix<F>>,
}

impl<F: Field> Module<F> {
    pub fn new(field: F, dim: usize, gens: Vec<Matrix<F>>) -> Self {
        for m in &gens {
            assert!(m.cols == dim && m.row_count() == dim, "generator shape");
        }
        Module { field, dim, gens }
    }

    /// The dual module: the same invariant-subspace lattice, reversed,
    /// realised by transposed generators.
    pub fn dual(&self) -> Self {
        Module::new(
            self.field.clone(),
            self.dim,
            self.gens.iter().map(|m| m.transpose(&self.field)).collect(),
        )
    }

    pub fn is_invariant(&self, basis: &[F::Row]) -> bool {
        let mut e = Echelon::new(self.field.clone(), self.dim);
        for b in basis {
            e.insert(b.clone());
        }
        basis.iter().all(|b| {
            self.gens
                .iter()
                .all(|m| e.contains(&self.field.vec_mat(b, m)))
        })
    }

    /// The smallest invariant subspace containing `seeds`.
    pub fn spin(&self, seeds: &[F::Row]) -> Echelon<F> {
        let mut e = Echelon::new(self.field.clone(), self.dim);
        let mut queue: Vec<F::Row> = Vec::new();
        for s in seeds {
            if e.insert(s.clone()) {
                queue.push(s.clone());
            }
        }
        let mut i = 0;
        while i < queue.len() && e.dim() < self.dim {
            for m in &self.gens {
                let w = self.field.vec_mat(&queue[i], m);
                if e.insert(w.clone()) {
                    queue.push(w);
                }
            }
            i += 1;
        }
        e
    }

    /// Action on an invariant subspace with the given basis.
    pub fn restrict(&self, basis: &[F::Row]) -> Module<F> {
        let f = &self.field;
        let s = basis.len();
        let mut e = Echelon::with_coordinates(f.clone(), self.dim, s);
        for b in basis {
            assert!(e.insert(b.clone()), "basis is independent");
        }
        let gens = self
            .gens
            .iter()
            .map(|m| {
                let rows = basis
                    .iter()
                    .map(|b| {
                        e.coordinates(&f.vec_mat(b, m))
                            .expect("subspace is invariant")
                    })
                    .collect();
                Matrix::from_rows(rows, s)
            })
            .collect();
        Module::new(f.clone(), s, gens)
    }

    /// Action on the quotient by an invariant subspace; the quotient basis
    /// is the images of unit vectors off the pivot columns.
    pub fn quotient(&self, sub: &Echelon<F>) -> Module<F> {
        let f = &self.field;
        let mut is_pivot = vec![false; self.dim];
        sub.pivots().iter().for_each(|&p| is_pivot[p] = true);
        let free: Vec<usize> = (0..self.dim).filter(|&j| !is_pivot[j]).collect();
        let gens = self
            .gens
            .iter()
            .map(|m| {
                let rows = free
                    .iter()
                    .map(|&j| {
                        let mut v = m.rows[j].clone();
                        sub.reduce(&mut v);
                        let mut r = f.zero_row(free.len());
                        for (k, &jj) in free.iter().enumerate() {
                            let c = f.get(&v, jj);
                            if c != 0 {
                                f.set(&mut r, k, c);
                            }
                        }
                        r
                    })
                    .collect();
                Matrix::from_rows(rows, free.len())
            })
            .collect();
        Module::new(f.clone(), free.len(), gens)
    }

    /// A pseudo-random element of the enveloping algebra: a combination of
    /// the identity and a few short words in the generators.
    pub fn random_algebra_element(&self, rng: &mut ChaCha8Rng) -> Matrix<F> {
        let f = &self.field;
        let p = f.p();
        let n = self.dim;
        let mut theta = Matrix::identity(f, n).scaled(f, rng.gen_range(0..p));
        if self.gens.is_empty() {
            return theta;
        }
        for _ in 0..3 {
            let len = rng.gen_range(1..=2);
            let mut w = self.gens[rng.gen_range(0..self.gens.len())].clone();
            for _ in 1..len {
                w = w.mul(f, &self.gens[rng.gen_range(0..self.gens.len())]);
            }
            theta = theta.add(f, &w, rng.gen_range(1..p.max(2)));
        }
        theta
    }
}

fn scalar_field<F: Field>(f: &F) -> GfP {
    GfP::new(f.p())
}

/// Characteristic polynomial (monic, constant term first) by Krylov
/// sequences of unit vectors.
pub fn charpoly<F: Field>(f: &F, a: &Matrix<F>) -> poly::Poly {
    let n = a.cols;
    let sf = scalar_field(f);
    let mut e = Echelon::with_coordinates(f.clone(), n, 2 * n + 1);
    let mut result = vec![1];
    let mut used = 0;
    for start in 0..n {
        if e.dim() == n {
            break;
        }
        let mut v = f.unit_row(n, start);
        let block = used;
        loop {
            used += 1;
            match e.insert_tracked(v.clone()) {
                Insert::Independent => v = f.vec_mat(&v, a),
                Insert::Dependent(c) => {
                    let factor: poly::Poly = (block..used).map(|i| f.get(&c, i)).collect();
                    result = poly::mul(&sf, &result, &factor);
                    break;
                }
            }
        }
    }
    result
}

/// Basis of `{v : v * ms[i] = 0 for all i}`.
pub fn common_left_kernel<F: Field>(f: &F, n: usize, ms: &[&Matrix<F>]) -> Vec<F::Row> {
    let mut basis: Vec<F::Row> = (0..n).map(|i| f.unit_row(n, i)).collect();
    for m in ms {
        if basis.is_empty() {
            break;
        }
        let images = Matrix::from_rows(basis.iter().map(|b| f.vec_mat(b, m)).collect(), m.cols);
        let bm = Matrix::from_rows(basis.clone(), n);
        basis = images
            .left_kernel(f)
            .iter()
            .map(|c| f.vec_mat(c, &bm))
            .collect();
    }
    basis
}

pub enum Test<F: Field> {
    Irreducible,
    /// Basis of a proper non-zero invariant subspace.
    Reducible(Vec<F::Row>),
}

const ATTEMPTS: usize = 200;

/// Holt–Rees irreducibility test with Norton's criterion.
pub fn meataxe_test<F: Field>(m: &Module<F>, rng: &mut ChaCha8Rng) -> Test<F> {
    let f = &m.field;
    let n = m.dim;
    if n <= 1 {
        return Test::Irreducible;
    }
    let sf = scalar_field(f);
    let dual = m.dual();
    for _ in 0..ATTEMPTS {
        let theta = m.random_algebra_element(rng);
        let chi = charpoly(f, &theta);
        for g in poly::irreducible_factors(&sf, &chi, n, rng) {
            let deg = g.len() - 1;
            let gt = theta.eval_poly(f, &g);
            let null = gt.left_kernel(f);
            let s = m.spin(&null[..1]);
            if s.dim() < n {
                return Test::Reducible(s.rows().to_vec());
            }
            if null.len() == deg {
                let null_t = gt.transpose(f).left_kernel(f);
                let st = dual.spin(&null_t[..1]);
                if st.dim() < n {
                    return Test::Reducible(annihilator(f, st.rows(), n));
                }
                return Test::Irreducible;
            }
        }
    }
    // tiny modules: decide by exhaustion
    if (f.p() as f64).powi(n as i32) < 1e6 {
        let total = (f.p() as usize).pow(n as u32);
        for i in 1..total {
            let v = f.row_from(&crate::cover::index_vector(i, f.p(), n));
            let s = m.spin(&[v]);
            if s.dim() < n {
                return Test::Reducible(s.rows().to_vec());
            }
        }
        return Test::Irreducible;
    }
    panic!("irreducibility test undecided after {ATTEMPTS} algebra elements (dim {n})");
}

pub fn is_irreducible<F: Field>(m: &Module<F>, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    matches!(meataxe_test(m, &mut rng), Test::Irreducible)
}

/// Composition factors, in a submodule-first order.
pub fn composition_factors<F: Field>(m: &Module<F>, rng: &mut ChaCha8Rng) -> Vec<Module<F>> {
    if m.dim == 0 {
        return Vec::new();
    }
    match meataxe_test(m, rng) {
        Test::Irreducible => vec![m.clone()],
        Test::Reducible(basis) => {
            let mut e = Echelon::new(m.field.clone(), m.dim);
            for b in &basis {
                e.insert(b.clone());
            }
            let mut out = composition_factors(&m.restrict(e.rows()), rng);
            out.extend(composition_factors(&m.quotient(&e), rng));
            out
        }
    }
}

/// A vector spun out to a basis, with the word (parent, generator) that
/// produced each basis vector from an earlier one.
struct SpinWords<F: Field> {
    steps: Vec<Option<(usize, usize)>>,
    // image of basis vector k under generator i, in basis coordinates
    images: Vec<Vec<F::Row>>,
}

fn spin_words<F: Field>(m: &Module<F>, v: F::Row) -> SpinWords<F> {
    let f = &m.field;
    let mut e = Echelon::with_coordinates(f.clone(), m.dim, m.dim);
    let mut basis = vec![v.clone()];
    let mut steps = vec![None];
    e.insert_tracked(v);
    let mut i = 0;
    while i < basis.len() {
        for (gi, g) in m.gens.iter().enumerate() {
            let w = f.vec_mat(&basis[i], g);
            if !e.contains(&w) {
                e.insert_tracked(w.clone());
                basis.push(w);
                steps.push(Some((i, gi)));
            }
        }
        i += 1;
    }
    let t = basis.len();
    let images = basis
        .iter()
        .map(|b| {
            m.gens
                .iter()
                .map(|g| {
                    let c = e
                        .coordinates(&f.vec_mat(b, g))
                        .expect("spun space is invariant");
                    truncate(f, &c, t)
                })
                .collect()
        })
        .collect();
    SpinWords { steps, images }
}

fn truncate<F: Field>(f: &F, r: &F::Row, t: usize) -> F::Row {
    let mut out = f.zero_row(t);
    for j in 0..t {
        let c = f.get(r, j);
        if c != 0 {
            f.set(&mut out, j, c);
        }
    }
    out
}

/// Homomorphisms from an irreducible module into another module.
pub struct HomSpace<F: Field> {
    /// Images of the spin seed of the source, one per basis homomorphism.
    pub basis: Vec<F::Row>,
    /// Target matrices of the words that built the source's spin basis.
    pub words: Vec<Matrix<F>>,
}

impl<F: Field> HomSpace<F> {
    /// Image of the homomorphism sending the seed to `w`.
    pub fn image(&self, f: &F, w: &F::Row) -> Vec<F::Row> {
        self.words.iter().map(|m| f.vec_mat(w, m)).collect()
    }
}

/// `Hom(t, y)` for irreducible `t`: the seed image `w` must satisfy every
/// relation that the spin basis of `t` satisfies.
pub fn hom_space<F: Field>(t: &Module<F>, y: &Module<F>) -> HomSpace<F> {
    let f = &t.field;
    let sw = spin_words(t, f.unit_row(t.dim, 0));
    assert_eq!(sw.steps.len(), t.dim, "source module is irreducible");
    let mut words: Vec<Matrix<F>> = Vec::with_capacity(t.dim);
    for step in &sw.steps {
        let m = match step {
            None => Matrix::identity(f, y.dim),
            Some((k, g)) => words[*k].mul(f, &y.gens[*g]),
        };
        words.push(m);
    }
    let mut conditions = Vec::new();
    for k in 0..t.dim {
        for (gi, g) in y.gens.iter().enumerate() {
            let is_step = sw.steps.contains(&Some((k, gi)));
            if is_step {
                continue;
            }
            let mut c = words[k].mul(f, g);
            let coords = &sw.images[k][gi];
            for (l, word) in words.iter().enumerate() {
                let a = f.get(coords, l);
                if a != 0 {
                    c = c.add(f, word, f.neg(a));
                }
            }
            conditions.push(c);
        }
    }
    let refs: Vec<&Matrix<F>> = conditions.iter().collect();
    let basis = common_left_kernel(f, y.dim, &refs);
    HomSpace { basis, words }
}

fn isomorphic<F: Field>(a: &Module<F>, b: &Module<F>) -> bool {
    a.dim == b.dim && !hom_space(a, b).basis.is_empty()
}

/// Largest invariant subspace contained in the span of `basis`.
pub fn invariant_core<F: Field>(m: &Module<F>, basis: Vec<F::Row>) -> Vec<F::Row> {
    let f = &m.field;
    let mut basis = basis;
    loop {
        if basis.is_empty() {
            return basis;
        }
        let mut e = Echelon::new(f.clone(), m.dim);
        for b in &basis {
            e.insert(b.clone());
        }
        basis = e.rows().to_vec();
        let mut keep: Vec<F::Row> = (0..basis.len())
            .map(|i| f.unit_row(basis.len(), i))
            .collect();
        for g in &m.gens {
            if keep.is_empty() {
                break;
            }
            let residues = Matrix::from_rows(
                keep.iter()
                    .map(|c| {
                        let cb = f.vec_mat(c, &Matrix::from_rows(basis.clone(), m.dim));
                        let mut r = f.vec_mat(&cb, g);
                        e.reduce(&mut r);
                        r
                    })
                    .collect(),
                m.dim,
            );
            let km = Matrix::from_rows(keep.clone(), basis.len());
            keep = residues
                .left_kernel(f)
                .iter()
                .map(|c| f.vec_mat(c, &km))
                .collect();
        }
        if keep.len() == basis.len() {
            return basis;
        }
        let bm = Matrix::from_rows(basis.clone(), m.dim);
        basis = keep.iter().map(|c| f.vec_mat(c, &bm)).collect();
    }
}

/// Every minimal invariant subspace of dimension at most `max_dim`, each as
/// a reduced echelon basis; sorted.
pub fn minimal_submodules<F: Field>(m: &Module<F>, max_dim: usize, seed: u64) -> Vec<Vec<F::Row>> {
    let f = &m.field;
    let n = m.dim;
    if n == 0 || max_dim == 0 {
        return Vec::new();
    }
    let sf = scalar_field(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = m.random_algebra_element(&mut rng);
    let chi = charpoly(f, &theta);
    let small = poly::irreducible_factors(&sf, &chi, max_dim, &mut rng);
    if small.is_empty() {
        return Vec::new();
    }
    let r = small.iter().fold(vec![1], |acc, g| poly::mul(&sf, &acc, g));
    let rt = theta.eval_poly(f, &r).pow(f, max_dim as u64);
    let x = rt.left_kernel(f);
    let core = invariant_core(m, x);
    if core.is_empty() {
        return Vec::new();
    }
    let y = m.restrict(&core);
    let core_m = Matrix::from_rows(core.clone(), n);

    let mut types: Vec<Module<F>> = Vec::new();
    for c in composition_factors(&y, &mut rng) {
        if c.dim <= max_dim && !types.iter().any(|t| isomorphic(t, &c)) {
            types.push(c);
        }
    }
    let mut out = Vec::new();
    for t in &types {
        let hom = hom_space(t, &y);
        if hom.basis.is_empty() {
            continue;
        }
        let end = hom_space(t, t);
        for w in lines_over_endomorphisms(f, &hom, &end) {
            let img: Vec<F::Row> = hom
                .image(f, &w)
                .iter()
                .map(|v| f.vec_mat(v, &core_m))
                .collect();
            out.push(rref(f, &img, n));
        }
    }
    sort_subspaces(f, &mut out);
    out
}

/// One seed image per line of `Hom(t, y)` over `End(t)`.
fn lines_over_endomorphisms<F: Field>(f: &F, hom: &HomSpace<F>, end: &HomSpace<F>) -> Vec<F::Row> {
    // endomorphism e acts on seed images by w -> w * (sum_l a_l words_l),
    // with a the coordinates of e(seed) in the spin basis of t
    let ydim = hom.words.first().map_or(0, |m| m.cols);
    let tdim = end.words.len();
    let seed = f.unit_row(tdim, 0);
    let mut spin_basis = Echelon::with_coordinates(f.clone(), tdim, tdim);
    for w in &end.words {
        spin_basis.insert_tracked(f.vec_mat(&seed, w));
    }
    let act: Vec<Matrix<F>> = end
        .basis
        .iter()
        .map(|u| {
            let a = spin_basis
                .coordinates(u)
                .expect("endomorphism image lies in the module");
            let mut acc = Matrix::zero(f, ydim, ydim);
            for (l, word) in hom.words.iter().enumerate() {
                let c = f.get(&a, l);
                if c != 0 {
                    acc = acc.add(f, word, c);
                }
            }
            acc
        })
        .collect();
    let e = act.len();
    let mut span = Echelon::new(f.clone(), ydim);
    let mut ebasis: Vec<F::Row> = Vec::new();
    for h in &hom.basis {
        if span.contains(h) {
            continue;
        }
        for a in &act {
            span.insert(f.vec_mat(h, a));
        }
        ebasis.push(h.clone());
    }
    assert_eq!(span.dim(), hom.basis.len(), "hom space is an End-module");
    // h_i * a_j for every E-basis vector and endomorphism basis element
    let moved: Vec<Vec<F::Row>> = ebasis
        .iter()
        .map(|h| act.iter().map(|a| f.vec_mat(h, a)).collect())
        .collect();
    let p = f.p() as usize;
    let q = p.pow(e as u32);
    let m = ebasis.len();
    let mut out = Vec::new();
    for lead in 0..m {
        let tail = m - lead - 1;
        let count = q.pow(tail as u32);
        for mut code in 0..count {
            let mut w = ebasis[lead].clone();
            for moved_i in &moved[lead + 1..] {
                let mut c = code % q;
                code /= q;
                for mj in moved_i {
                    let lambda = (c % p) as u32;
                    c /= p;
                    if lambda != 0 {
                        f.axpy(&mut w, lambda, mj);
                    }
                }
            }
            out.push(w);
        }
    }
    out
}

pub fn sort_subspaces<F: Field>(f: &F, spaces: &mut Vec<Vec<F::Row>>) {
    let key = |s: &Vec<F::Row>| s.iter().map(|r| f.row_entries(r)).collect::<Vec<_>>();
    spaces.sort_by_cached_key(key);
    spaces.dedup();
}

/// A maximal invariant subspace, stored through its annihilator in the dual.
#[derive(Clone, Debug)]
pub struct MaximalSubmodule<F: Field> {
    /// Reduced echelon basis of the annihilator; its row count is the
    /// codimension.
    pub annihilator: Vec<F::Row>,
    dim: usize,
}

impl<F: Field> MaximalSubmodule<F> {
    pub fn codim(&self) -> usize {
        self.annihilator.len()
    }

    pub fn ambient(&self) -> usize {
        self.dim
    }

    /// Reduced echelon basis of the subspace itself.
    pub fn basis(&self, f: &F) -> Vec<F::Row> {
        rref(f, &annihilator(f, &self.annihilator, self.dim), self.dim)
    }

    /// Coordinates of `v` in the quotient `GF(p)^n / K ≅ GF(p)^codim`.
    pub fn project(&self, f: &F, v: &F::Row) -> Vec<u32> {
        let n = self.dim;
        self.annihilator
            .iter()
            .map(|s| (0..n).fold(0u32, |acc, j| f.add(acc, f.mul(f.get(v, j), f.get(s, j)))))
            .collect()
    }
}

/// Every maximal invariant subspace of codimension at most `max_codim`,
/// sorted by annihilator.
pub fn maximal_submodules<F: Field>(
    m: &Module<F>,
    max_codim: usize,
    seed: u64,
) -> Vec<MaximalSubmodule<F>> {
    minimal_submodules(&m.dual(), max_codim, seed)
        .into_iter()
        .map(|annihilator| MaximalSubmodule {
            annihilator,
            dim: m.dim,
        })
        .collect()
}
