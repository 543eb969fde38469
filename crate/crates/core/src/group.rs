//! Permutation groups backed by a stabiliser chain.
//!
//! Chains store Schreier vectors rather than explicit transversals so that
//! groups acting on tens of thousands of points stay cheap. Two builders
//! exist. The deterministic one closes Schreier generators level by level
//! and is used when the order is unknown. When the order is known (catalog
//! entries and lifted groups) a seeded random builder sifts
//! product-replacement elements until the product of basic orbit lengths
//! reaches it; that product is always a lower bound for the order, so
//! reaching it certifies the chain.

use std::collections::{HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GroupError;
use crate::perm::Perm;

const NOT_IN_ORBIT: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;
const DERIVED_DEPTH_CAP: usize = 64;
const RANDOM_SIFT_PATIENCE: usize = 400;

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    gens: Vec<Perm>,
    inv_gens: Vec<Perm>,
    // sv[x] = index of the generator s with x = parent^s
    sv: Vec<u32>,
    orbit: Vec<u32>,
    checked: HashSet<(u32, u32)>,
}

impl Level {
    fn new(degree: usize, base: usize) -> Self {
        let mut sv = vec![NOT_IN_ORBIT; degree];
        sv[base] = ROOT;
        Level {
            base,
            gens: Vec::new(),
            inv_gens: Vec::new(),
            sv,
            orbit: vec![base as u32],
            checked: HashSet::new(),
        }
    }

    fn in_orbit(&self, x: usize) -> bool {
        self.sv[x] != NOT_IN_ORBIT
    }

    /// Adds a generator, extending the orbit without disturbing the Schreier
    /// tree of points already present.
    fn push_gen(&mut self, g: Perm) {
        self.inv_gens.push(g.inverse());
        self.gens.push(g);
        let mut queue: VecDeque<usize> = VecDeque::new();
        let newest = self.gens.len() - 1;
        for i in 0..self.orbit.len() {
            let x = self.orbit[i] as usize;
            let y = self.gens[newest].apply(x);
            if self.sv[y] == NOT_IN_ORBIT {
                self.sv[y] = newest as u32;
                self.orbit.push(y as u32);
                queue.push_back(y);
            }
        }
        while let Some(x) = queue.pop_front() {
            for (s, g) in self.gens.iter().enumerate() {
                let y = g.apply(x);
                if self.sv[y] == NOT_IN_ORBIT {
                    self.sv[y] = s as u32;
                    self.orbit.push(y as u32);
                    queue.push_back(y);
                }
            }
        }
    }

    /// Generator indices along the tree path from the base to `x`.
    fn path(&self, mut x: usize) -> Vec<usize> {
        let mut path = Vec::new();
        while self.sv[x] != ROOT {
            let s = self.sv[x] as usize;
            path.push(s);
            x = self.inv_gens[s].apply(x);
        }
        path.reverse();
        path
    }

    /// Transversal element mapping the base to `x`.
    fn transversal(&self, x: usize, degree: usize) -> Perm {
        self.path(x)
            .into_iter()
            .fold(Perm::identity(degree), |acc, s| acc.mul(&self.gens[s]))
    }

    /// Right-multiplies `g` by the inverse transversal element of `x`.
    fn strip(&self, g: &mut [u32], mut x: usize) {
        while self.sv[x] != ROOT {
            let s = self.sv[x] as usize;
            let inv = self.inv_gens[s].raw();
            for v in g.iter_mut() {
                *v = inv[*v as usize];
            }
            x = inv[x] as usize;
        }
    }
}

/// A base and strong generating set, with Schreier vectors per level.
#[derive(Clone, Debug)]
pub struct Chain {
    degree: usize,
    levels: Vec<Level>,
}

impl Chain {
    fn with_prefix(degree: usize, prefix: &[usize]) -> Self {
        Chain {
            degree,
            levels: prefix.iter().map(|&b| Level::new(degree, b)).collect(),
        }
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> u128 {
        self.order_from(0)
    }

    fn order_from(&self, start: usize) -> u128 {
        self.levels[start..]
            .iter()
            .try_fold(1u128, |acc, l| acc.checked_mul(l.orbit.len() as u128))
            .expect("group order overflows u128")
    }

    /// Sifts `g` from level `start`; returns the residue and the level at
    /// which sifting stopped (`levels.len()` if it passed every level).
    pub fn sift(&self, g: &Perm, start: usize) -> (Perm, usize) {
        let mut images = g.raw().to_vec();
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let x = images[level.base] as usize;
            if !level.in_orbit(x) {
                return (Perm::from_u32_unchecked(images), i);
            }
            level.strip(&mut images, x);
        }
        (Perm::from_u32_unchecked(images), self.levels.len())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (r, _) = self.sift(g, 0);
        r.is_identity()
    }

    /// Adds a sift residue that stopped at `level` to levels `from..=level`.
    fn absorb(&mut self, residue: Perm, from: usize, level: usize) {
        if level == self.levels.len() {
            let b = residue.first_moved().expect("residue is not the identity");
            self.levels.push(Level::new(self.degree, b));
        }
        for l in from..=level {
            self.levels[l].push_gen(residue.clone());
        }
    }

    /// Closes Schreier generators until the chain is a valid BSGS.
    fn complete(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let l = i - 1;
            let mut grown = None;
            'scan: for oi in 0.. {
                if oi >= self.levels[l].orbit.len() {
                    break;
                }
                let x = self.levels[l].orbit[oi];
                for s in 0..self.levels[l].gens.len() {
                    if self.levels[l].checked.contains(&(x, s as u32)) {
                        continue;
                    }
                    let g = self.levels[l]
                        .transversal(x as usize, self.degree)
                        .mul(&self.levels[l].gens[s]);
                    let (r, j) = self.sift(&g, l);
                    self.levels[l].checked.insert((x, s as u32));
                    if !r.is_identity() {
                        self.absorb(r, l + 1, j);
                        grown = Some(j);
                        break 'scan;
                    }
                }
            }
            match grown {
                Some(j) => i = j + 1,
                None => i -= 1,
            }
        }
    }

    fn deterministic(degree: usize, gens: &[Perm], prefix: &[usize]) -> Self {
        let mut chain = Chain::with_prefix(degree, prefix);
        for g in gens {
            chain.add_generator(g);
        }
        chain
    }

    /// Extends a complete chain by one more generator of the group.
    fn add_generator(&mut self, g: &Perm) {
        let (r, j) = self.sift(g, 0);
        if !r.is_identity() {
            // the residue differs from g by an element already in the chain
            self.absorb(r, 0, j);
            self.complete();
        }
    }

    fn randomized(
        degree: usize,
        gens: &[Perm],
        prefix: &[usize],
        order: u128,
        seed: u64,
    ) -> Result<Self, GroupError> {
        let mut chain = Chain::with_prefix(degree, prefix);
        let useful: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        if useful.is_empty() {
            return if order == 1 {
                Ok(chain)
            } else {
                Err(GroupError::OrderMismatch {
                    declared: order,
                    computed: 1,
                })
            };
        }
        for g in &useful {
            let (r, j) = chain.sift(g, 0);
            if !r.is_identity() {
                chain.absorb(r, 0, j);
            }
        }
        let mut pr = ProductReplacement::new(&useful, seed);
        let mut misses = 0;
        while chain.order() < order {
            let (r, j) = chain.sift(&pr.next_element(), 0);
            if r.is_identity() {
                misses += 1;
                if misses > RANDOM_SIFT_PATIENCE {
                    return Err(GroupError::OrderMismatch {
                        declared: order,
                        computed: chain.order(),
                    });
                }
            } else {
                misses = 0;
                chain.absorb(r, 0, j);
            }
        }
        if chain.order() != order {
            return Err(GroupError::OrderMismatch {
                declared: order,
                computed: chain.order(),
            });
        }
        Ok(chain)
    }

    /// The chain of the stabiliser of the first `k` base points.
    fn tail(&self, k: usize) -> Chain {
        Chain {
            degree: self.degree,
            levels: self.levels[k..].to_vec(),
        }
    }

    /// All elements; intended for small groups only.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let reps: Vec<Perm> = level
                .orbit
                .iter()
                .map(|&x| level.transversal(x as usize, self.degree))
                .collect();
            let mut next = Vec::with_capacity(out.len() * reps.len());
            for h in &out {
                for u in &reps {
                    next.push(h.mul(u));
                }
            }
            out = next;
        }
        out
    }
}

/// Seeded product-replacement generator of random group elements.
pub struct ProductReplacement {
    slots: Vec<Perm>,
    acc: Perm,
    rng: ChaCha8Rng,
}

impl ProductReplacement {
    pub fn new(gens: &[Perm], seed: u64) -> Self {
        assert!(!gens.is_empty());
        let mut slots: Vec<Perm> = gens.to_vec();
        while slots.len() < 10 {
            slots.push(gens[slots.len() % gens.len()].clone());
        }
        let acc = Perm::identity(gens[0].degree());
        let mut pr = ProductReplacement {
            slots,
            acc,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        for _ in 0..50 {
            pr.next_element();
        }
        pr
    }

    pub fn next_element(&mut self) -> Perm {
        let n = self.slots.len();
        let i = self.rng.gen_range(0..n);
        let mut j = self.rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let other = if self.rng.gen_bool(0.5) {
            self.slots[j].clone()
        } else {
            self.slots[j].inverse()
        };
        self.slots[i] = if self.rng.gen_bool(0.5) {
            self.slots[i].mul(&other)
        } else {
            other.mul(&self.slots[i])
        };
        self.acc = self.acc.mul(&self.slots[i]);
        self.acc.clone()
    }
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    known_order: Option<u128>,
    chain: OnceLock<Arc<Chain>>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<Self, GroupError> {
        for g in &gens {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch {
                    expected: degree,
                    got: g.degree(),
                });
            }
        }
        Ok(PermGroup {
            degree,
            gens,
            known_order: None,
            chain: OnceLock::new(),
        })
    }

    /// A group whose order is known in advance; the chain is built randomly
    /// and checked against `order`.
    pub fn with_order(degree: usize, gens: Vec<Perm>, order: u128) -> Result<Self, GroupError> {
        let g = PermGroup::new(degree, gens)?;
        let chain = Chain::randomized(degree, &g.gens, &[], order, 0)?;
        let _ = g.chain.set(Arc::new(chain));
        Ok(PermGroup {
            known_order: Some(order),
            ..g
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, Vec::new()).expect("no generators")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn chain(&self) -> &Chain {
        self.chain
            .get_or_init(|| Arc::new(Chain::deterministic(self.degree, &self.gens, &[])))
    }

    /// A chain whose base starts with `prefix`.
    pub fn chain_with_prefix(&self, prefix: &[usize]) -> Chain {
        match self.known_order {
            Some(order) => Chain::randomized(self.degree, &self.gens, prefix, order, 1)
                .expect("order was verified at construction"),
            None => Chain::deterministic(self.degree, &self.gens, prefix),
        }
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(Perm::is_identity)
    }

    pub fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    pub fn orbit(&self, p: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[p] = true;
        let mut out = vec![p];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for g in &self.gens {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Orbit index of every point; orbits are numbered by least element.
    pub fn orbit_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.degree];
        let mut next = 0;
        for s in 0..self.degree {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for g in &self.gens {
                    let y = g.apply(x);
                    if label[y] == usize::MAX {
                        label[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let labels = self.orbit_labels();
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); count];
        for (x, &l) in labels.iter().enumerate() {
            out[l].push(x);
        }
        out
    }

    pub fn point_stabiliser(&self, p: usize) -> PermGroup {
        let chain = self.chain_with_prefix(&[p]);
        let tail = chain.tail(1);
        let gens = chain
            .levels
            .get(1)
            .map(|l| l.gens.clone())
            .unwrap_or_default();
        let order = tail.levels.iter().map(|l| l.orbit.len() as u128).product();
        let out = PermGroup {
            degree: self.degree,
            gens,
            known_order: Some(order),
            chain: OnceLock::new(),
        };
        let _ = out.chain.set(Arc::new(tail));
        out
    }

    pub fn is_member(&self, g: &Perm) -> Result<bool, GroupError> {
        if g.degree() != self.degree {
            return Err(GroupError::DegreeMismatch {
                expected: self.degree,
                got: g.degree(),
            });
        }
        Ok(self.chain().contains(g))
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.is_member(g).unwrap_or(false)
    }

    /// True iff every orbit meeting `points` has length `|N|`.
    pub fn is_semiregular(&self, points: &[usize]) -> bool {
        let n = self.order();
        let mut done = vec![false; self.degree];
        for &p in points {
            if done[p] {
                continue;
            }
            let orbit = self.orbit(p);
            if orbit.len() as u128 != n {
                return false;
            }
            for x in orbit {
                done[x] = true;
            }
        }
        true
    }

    pub fn is_abelian(&self) -> bool {
        self.gens
            .iter()
            .enumerate()
            .all(|(i, a)| self.gens[i + 1..].iter().all(|b| a.mul(b) == b.mul(a)))
    }

    pub fn elements(&self) -> Vec<Perm> {
        self.chain().elements()
    }

    pub fn is_dihedral_8(&self) -> bool {
        if self.order() != 8 || self.is_abelian() {
            return false;
        }
        self.elements()
            .iter()
            .filter(|g| !g.is_identity() && g.mul(g).is_identity())
            .count()
            > 1
    }

    pub fn is_elementary_abelian(&self) -> bool {
        if !self.is_abelian() {
            return false;
        }
        let n = self.order();
        if n == 1 {
            return true;
        }
        let p = smallest_prime_factor(n);
        let mut m = n;
        while m.is_multiple_of(p) {
            m /= p;
        }
        m == 1
            && self
                .gens
                .iter()
                .all(|g| g.is_identity() || g.order() as u128 == p)
    }

    /// Smallest normal subgroup containing `s`.
    pub fn normal_closure(&self, s: &[Perm]) -> Result<PermGroup, GroupError> {
        for x in s {
            if !self.is_member(x)? {
                return Err(GroupError::NotMember);
            }
        }
        let mut chain = Chain::with_prefix(self.degree, &[]);
        let mut gens: Vec<Perm> = Vec::new();
        let mut queue: VecDeque<Perm> = s.iter().filter(|x| !x.is_identity()).cloned().collect();
        while let Some(x) = queue.pop_front() {
            if chain.contains(&x) {
                continue;
            }
            chain.add_generator(&x);
            for g in &self.gens {
                queue.push_back(x.conjugate(g));
            }
            gens.push(x);
        }
        let out = PermGroup {
            degree: self.degree,
            gens,
            known_order: None,
            chain: OnceLock::new(),
        };
        let _ = out.chain.set(Arc::new(chain));
        Ok(out)
    }

    pub fn derived_subgroup(&self) -> PermGroup {
        let mut comms = Vec::new();
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i + 1..] {
                comms.push(a.commutator(b));
            }
        }
        self.normal_closure(&comms)
            .expect("commutators lie in the group")
    }

    pub fn is_solvable(&self) -> Result<bool, GroupError> {
        let mut h = self.clone();
        for _ in 0..DERIVED_DEPTH_CAP {
            if h.order() == 1 {
                return Ok(true);
            }
            let d = h.derived_subgroup();
            if d.order() == h.order() {
                return Ok(false);
            }
            h = d;
        }
        Err(GroupError::DerivedDepth(DERIVED_DEPTH_CAP))
    }

    /// Uniformly distributed element drawn from the chain.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        let chain = self.chain();
        let mut g = Perm::identity(self.degree);
        for level in chain.levels.iter().rev() {
            let x = level.orbit[rng.gen_range(0..level.orbit.len())] as usize;
            g = g.mul(&level.transversal(x, self.degree));
        }
        g
    }

    /// Subgroup generated by `gens`, which must lie in this group.
    pub fn subgroup(&self, gens: Vec<Perm>) -> Result<PermGroup, GroupError> {
        for g in &gens {
            if !self.is_member(g)? {
                return Err(GroupError::NotMember);
            }
        }
        PermGroup::new(self.degree, gens)
    }
}

pub(crate) fn smallest_prime_factor(n: u128) -> u128 {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Perm {
        Perm::from_cycles(n, cycles).unwrap()
    }

    fn s4() -> PermGroup {
        PermGroup::new(4, vec![cyc(4, &[&[0, 1]]), cyc(4, &[&[0, 1, 2, 3]])]).unwrap()
    }

    fn a5() -> PermGroup {
        PermGroup::new(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]]), cyc(5, &[&[2, 3, 4]])]).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(s4().order(), 24);
        assert_eq!(a5().order(), 60);
        assert_eq!(PermGroup::trivial(3).order(), 1);
    }

    #[test]
    fn random_builder_agrees() {
        let g = a5();
        let r = PermGroup::with_order(5, g.generators().to_vec(), 60).unwrap();
        assert_eq!(r.order(), 60);
        assert!(PermGroup::with_order(5, g.generators().to_vec(), 120).is_err());
    }

    #[test]
    fn orbits_and_stabiliser() {
        let t = PermGroup::trivial(4);
        assert_eq!(t.orbit(2), vec![2]);
        let c5 = PermGroup::new(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert_eq!(c5.orbit(0), vec![0, 1, 2, 3, 4]);
        assert_eq!(s4().point_stabiliser(0).order(), 6);
        assert_eq!(c5.point_stabiliser(3).order(), 1);
        let st = s4().point_stabiliser(2);
        assert!(st.generators().iter().all(|g| g.fixes(2)));
    }

    #[test]
    fn membership() {
        let c3 = PermGroup::new(3, vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        assert!(c3.is_member(&Perm::identity(3)).unwrap());
        assert!(!c3.is_member(&cyc(3, &[&[0, 1]])).unwrap());
        assert!(c3.is_member(&Perm::identity(4)).is_err());
    }

    #[test]
    fn semiregularity() {
        assert!(PermGroup::trivial(3).is_semiregular(&[0, 1, 2]));
        let v = PermGroup::new(4, vec![cyc(4, &[&[0, 1], &[2, 3]])]).unwrap();
        assert!(v.is_semiregular(&[0, 1, 2, 3]));
        let t = PermGroup::new(3, vec![cyc(3, &[&[0, 1]])]).unwrap();
        assert!(!t.is_semiregular(&[0, 1, 2]));
    }

    #[test]
    fn solvability() {
        assert!(s4().is_solvable().unwrap());
        assert!(!a5().is_solvable().unwrap());
    }

    #[test]
    fn structure_predicates() {
        let d4 = PermGroup::new(4, vec![cyc(4, &[&[0, 1, 2, 3]]), cyc(4, &[&[0, 2]])]).unwrap();
        assert!(d4.is_dihedral_8());
        // Q8 in its regular representation: i = (0 1 2 3)(4 5 6 7), j = (0 4 2 6)(1 7 3 5)
        let q8 = PermGroup::new(
            8,
            vec![
                cyc(8, &[&[0, 1, 2, 3], &[4, 5, 6, 7]]),
                cyc(8, &[&[0, 4, 2, 6], &[1, 7, 3, 5]]),
            ],
        )
        .unwrap();
        assert_eq!(q8.order(), 8);
        assert!(!q8.is_dihedral_8());
        let e8 = PermGroup::new(
            6,
            vec![cyc(6, &[&[0, 1]]), cyc(6, &[&[2, 3]]), cyc(6, &[&[4, 5]])],
        )
        .unwrap();
        assert!(!e8.is_dihedral_8());
        assert!(e8.is_elementary_abelian());
        assert!(PermGroup::trivial(2).is_elementary_abelian());
        let z4 = PermGroup::new(4, vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        assert!(!z4.is_elementary_abelian());
        let klein = PermGroup::new(
            4,
            vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])],
        )
        .unwrap();
        assert!(klein.is_elementary_abelian());
    }

    #[test]
    fn normal_closures() {
        let g = s4();
        assert_eq!(g.normal_closure(&[Perm::identity(4)]).unwrap().order(), 1);
        assert_eq!(
            g.normal_closure(&[cyc(4, &[&[0, 1], &[2, 3]])])
                .unwrap()
                .order(),
            4
        );
        assert_eq!(
            a5().normal_closure(&[cyc(5, &[&[0, 1, 2]])])
                .unwrap()
                .order(),
            60
        );
        let c3 = PermGroup::new(3, vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        assert!(c3.normal_closure(&[cyc(3, &[&[0, 1]])]).is_err());
    }

    #[test]
    fn elements_enumerate_group() {
        let e = s4().elements();
        assert_eq!(e.len(), 24);
        let set: HashSet<_> = e.into_iter().collect();
        assert_eq!(set.len(), 24);
    }
}
