//! Linear algebra over prime fields.
//!
//! Rows are the unit of work. GF(2) rows are bit-packed so that row
//! operations run a word at a time; other primes (below 2^16) store one
//! `u32` per entry. Matrices act on row vectors from the right, matching the
//! right action of permutation groups.

use std::fmt::Debug;
use std::hash::Hash;

pub trait Field: Clone + Debug + Send + Sync + 'static {
    type Row: Clone + Debug + PartialEq + Eq + Hash + Ord + Send + Sync;

    fn p(&self) -> u32;
    fn zero_row(&self, n: usize) -> Self::Row;
    fn len(&self, r: &Self::Row) -> usize;
    fn get(&self, r: &Self::Row, j: usize) -> u32;
    fn set(&self, r: &mut Self::Row, j: usize, v: u32);
    /// `dst += c * src`
    fn axpy(&self, dst: &mut Self::Row, c: u32, src: &Self::Row);
    fn scale(&self, r: &mut Self::Row, c: u32);
    fn first_nonzero(&self, r: &Self::Row) -> Option<usize>;
    /// `v * m` for a row vector `v` of length `m.rows()`.
    fn vec_mat(&self, v: &Self::Row, m: &Matrix<Self>) -> Self::Row;

    fn is_zero(&self, r: &Self::Row) -> bool {
        self.first_nonzero(r).is_none()
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p() {
            s - self.p()
        } else {
            s
        }
    }

    fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p() - a
        }
    }

    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p() as u64) as u32
    }

    fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        self.pow(a, self.p() as u64 - 2)
    }

    fn row_from(&self, entries: &[u32]) -> Self::Row {
        let mut r = self.zero_row(entries.len());
        for (j, &v) in entries.iter().enumerate() {
            if v % self.p() != 0 {
                self.set(&mut r, j, v % self.p());
            }
        }
        r
    }

    fn row_entries(&self, r: &Self::Row) -> Vec<u32> {
        (0..self.len(r)).map(|j| self.get(r, j)).collect()
    }

    fn unit_row(&self, n: usize, j: usize) -> Self::Row {
        let mut r = self.zero_row(n);
        self.set(&mut r, j, 1);
        r
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Gf2;

impl Field for Gf2 {
    type Row = BitRow;

    fn p(&self) -> u32 {
        2
    }

    fn zero_row(&self, n: usize) -> BitRow {
        BitRow {
            len: n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn len(&self, r: &BitRow) -> usize {
        r.len
    }

    #[inline]
    fn get(&self, r: &BitRow, j: usize) -> u32 {
        ((r.words[j / 64] >> (j % 64)) & 1) as u32
    }

    fn set(&self, r: &mut BitRow, j: usize, v: u32) {
        let bit = 1u64 << (j % 64);
        if v & 1 == 1 {
            r.words[j / 64] |= bit;
        } else {
            r.words[j / 64] &= !bit;
        }
    }

    #[inline]
    fn axpy(&self, dst: &mut BitRow, c: u32, src: &BitRow) {
        if c & 1 == 1 {
            for (d, s) in dst.words.iter_mut().zip(&src.words) {
                *d ^= s;
            }
        }
    }

    fn scale(&self, r: &mut BitRow, c: u32) {
        if c & 1 == 0 {
            r.words.iter_mut().for_each(|w| *w = 0);
        }
    }

    fn first_nonzero(&self, r: &BitRow) -> Option<usize> {
        r.words
            .iter()
            .position(|&w| w != 0)
            .map(|i| i * 64 + r.words[i].trailing_zeros() as usize)
    }

    fn vec_mat(&self, v: &BitRow, m: &Matrix<Self>) -> BitRow {
        let mut out = self.zero_row(m.cols);
        for (i, &w) in v.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                let r = &m.rows[i * 64 + b];
                for (d, s) in out.words.iter_mut().zip(&r.words) {
                    *d ^= s;
                }
            }
        }
        out
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    fn neg(&self, a: u32) -> u32 {
        a
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        a & b
    }

    fn inv(&self, a: u32) -> u32 {
        assert!(a == 1, "inverse of zero");
        1
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GfP {
    p: u32,
}

impl GfP {
    pub fn new(p: u32) -> Self {
        assert!((2..(1 << 16)).contains(&p), "prime {p} out of range");
        GfP { p }
    }
}

impl Field for GfP {
    type Row = Vec<u32>;

    fn p(&self) -> u32 {
        self.p
    }

    fn zero_row(&self, n: usize) -> Vec<u32> {
        vec![0; n]
    }

    fn len(&self, r: &Vec<u32>) -> usize {
        r.len()
    }

    #[inline]
    fn get(&self, r: &Vec<u32>, j: usize) -> u32 {
        r[j]
    }

    fn set(&self, r: &mut Vec<u32>, j: usize, v: u32) {
        r[j] = v % self.p;
    }

    #[inline]
    fn axpy(&self, dst: &mut Vec<u32>, c: u32, src: &Vec<u32>) {
        if c == 0 {
            return;
        }
        let p = self.p as u64;
        let c = c as u64;
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = ((*d as u64 + c * s as u64) % p) as u32;
            }
        }
    }

    fn scale(&self, r: &mut Vec<u32>, c: u32) {
        for x in r.iter_mut() {
            *x = self.mul(*x, c);
        }
    }

    fn first_nonzero(&self, r: &Vec<u32>) -> Option<usize> {
        r.iter().position(|&x| x != 0)
    }

    fn vec_mat(&self, v: &Vec<u32>, m: &Matrix<Self>) -> Vec<u32> {
        // products are below 2^32, so a u64 accumulator holds 2^32 terms
        let mut acc = vec![0u64; m.cols];
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as u64;
            for (a, &x) in acc.iter_mut().zip(&m.rows[i]) {
                *a += c * x as u64;
            }
        }
        let p = self.p as u64;
        acc.into_iter().map(|a| (a % p) as u32).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Matrix<F: Field> {
    pub rows: Vec<F::Row>,
    pub cols: usize,
}

impl<F: Field> PartialEq for Matrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cols == other.cols && self.rows == other.rows
    }
}

impl<F: Field> Eq for Matrix<F> {}

impl<F: Field> Matrix<F> {
    pub fn zero(f: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            rows: (0..rows).map(|_| f.zero_row(cols)).collect(),
            cols,
        }
    }

    pub fn identity(f: &F, n: usize) -> Self {
        Matrix {
            rows: (0..n).map(|i| f.unit_row(n, i)).collect(),
            cols: n,
        }
    }

    pub fn from_rows(rows: Vec<F::Row>, cols: usize) -> Self {
        Matrix { rows, cols }
    }

    pub fn from_entries(f: &F, entries: &[Vec<u32>]) -> Self {
        let cols = entries.first().map_or(0, Vec::len);
        Matrix {
            rows: entries.iter().map(|e| f.row_from(e)).collect(),
            cols,
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, f: &F, i: usize, j: usize) -> u32 {
        f.get(&self.rows[i], j)
    }

    pub fn entries(&self, f: &F) -> Vec<Vec<u32>> {
        self.rows.iter().map(|r| f.row_entries(r)).collect()
    }

    pub fn mul(&self, f: &F, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.rows.len(), "matrix shapes do not compose");
        Matrix {
            rows: self.rows.iter().map(|r| f.vec_mat(r, other)).collect(),
            cols: other.cols,
        }
    }

    pub fn add(&self, f: &F, other: &Matrix<F>, c: u32) -> Matrix<F> {
        let mut out = self.clone();
        for (r, s) in out.rows.iter_mut().zip(&other.rows) {
            f.axpy(r, c, s);
        }
        out
    }

    pub fn add_scalar(&self, f: &F, c: u32) -> Matrix<F> {
        let mut out = self.clone();
        for i in 0..out.rows.len() {
            let v = f.add(f.get(&out.rows[i], i), c);
            f.set(&mut out.rows[i], i, v);
        }
        out
    }

    pub fn scaled(&self, f: &F, c: u32) -> Matrix<F> {
        let mut out = self.clone();
        out.rows.iter_mut().for_each(|r| f.scale(r, c));
        out
    }

    pub fn transpose(&self, f: &F) -> Matrix<F> {
        let mut out = Matrix::zero(f, self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in 0..self.cols {
                let v = f.get(r, j);
                if v != 0 {
                    f.set(&mut out.rows[j], i, v);
                }
            }
        }
        out
    }

    pub fn is_identity(&self, f: &F) -> bool {
        self.rows.len() == self.cols && *self == Matrix::identity(f, self.cols)
    }

    pub fn pow(&self, f: &F, mut e: u64) -> Matrix<F> {
        let mut base = self.clone();
        let mut acc = Matrix::identity(f, self.cols);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            base = base.mul(f, &base);
            e >>= 1;
        }
        acc
    }

    /// `poly(self)` for coefficients listed from the constant term up.
    pub fn eval_poly(&self, f: &F, poly: &[u32]) -> Matrix<F> {
        let n = self.cols;
        let mut acc = Matrix::zero(f, n, n);
        for &c in poly.iter().rev() {
            acc = acc.mul(f, self).add_scalar(f, c);
        }
        acc
    }

    pub fn rank(&self, f: &F) -> usize {
        let mut e = Echelon::new(f.clone(), self.cols);
        self.rows.iter().filter(|r| e.insert((*r).clone())).count()
    }

    /// Vectors `v` with `v * self = 0`.
    pub fn left_kernel(&self, f: &F) -> Vec<F::Row> {
        let mut e = Echelon::with_coordinates(f.clone(), self.cols, self.rows.len());
        let mut out = Vec::new();
        for r in &self.rows {
            if let Insert::Dependent(coords) = e.insert_tracked(r.clone()) {
                out.push(coords);
            }
        }
        out
    }

    pub fn inverse(&self, f: &F) -> Option<Matrix<F>> {
        let n = self.cols;
        if self.rows.len() != n {
            return None;
        }
        let mut e = Echelon::with_coordinates(f.clone(), n, n);
        for r in &self.rows {
            if let Insert::Dependent(_) = e.insert_tracked(r.clone()) {
                return None;
            }
        }
        // coordinates of the unit vectors in terms of the rows
        let rows = (0..n)
            .map(|j| e.coordinates(&f.unit_row(n, j)).expect("full rank"))
            .collect();
        Some(Matrix { rows, cols: n })
    }
}

/// Outcome of inserting a vector into an echelon basis.
pub enum Insert<R> {
    Independent,
    /// The combination of previously inserted vectors that reproduces the
    /// inserted one, negated minus the new one: a kernel vector.
    Dependent(R),
}

/// Semi-echelon basis: every stored row has a pivot entry equal to 1 and
/// later rows vanish at earlier pivots, so reducing in insertion order
/// clears every pivot column.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    f: F,
    n: usize,
    rows: Vec<F::Row>,
    pivots: Vec<usize>,
    // optional: each stored row as a combination of inserted vectors
    coords: Option<(usize, Vec<F::Row>)>,
    inserted: usize,
}

impl<F: Field> Echelon<F> {
    pub fn new(f: F, n: usize) -> Self {
        Echelon {
            f,
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
            coords: None,
            inserted: 0,
        }
    }

    /// Tracks coordinates for up to `capacity` inserted vectors.
    pub fn with_coordinates(f: F, n: usize, capacity: usize) -> Self {
        Echelon {
            f,
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
            coords: Some((capacity, Vec::new())),
            inserted: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[F::Row] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn field(&self) -> &F {
        &self.f
    }

    /// Reduces `v` in place; returns the coefficients used per stored row.
    pub fn reduce(&self, v: &mut F::Row) -> Vec<u32> {
        let mut used = vec![0; self.rows.len()];
        for (k, (r, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let c = self.f.get(v, p);
            if c != 0 {
                self.f.axpy(v, self.f.neg(c), r);
                used[k] = c;
            }
        }
        used
    }

    pub fn contains(&self, v: &F::Row) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        self.f.is_zero(&w)
    }

    pub fn insert(&mut self, v: F::Row) -> bool {
        matches!(self.insert_tracked(v), Insert::Independent)
    }

    pub fn insert_tracked(&mut self, mut v: F::Row) -> Insert<F::Row> {
        let idx = self.inserted;
        self.inserted += 1;
        let used = self.reduce(&mut v);
        let mut combo = None;
        if let Some((cap, coords)) = &self.coords {
            assert!(idx < *cap, "coordinate capacity exceeded");
            let mut c = self.f.unit_row(*cap, idx);
            for (k, &u) in used.iter().enumerate() {
                if u != 0 {
                    self.f.axpy(&mut c, self.f.neg(u), &coords[k]);
                }
            }
            combo = Some(c);
        }
        match self.f.first_nonzero(&v) {
            None => Insert::Dependent(combo.unwrap_or_else(|| self.f.zero_row(0))),
            Some(p) => {
                let s = self.f.inv(self.f.get(&v, p));
                self.f.scale(&mut v, s);
                if let (Some((_, coords)), Some(mut c)) = (self.coords.as_mut(), combo) {
                    self.f.scale(&mut c, s);
                    coords.push(c);
                }
                self.rows.push(v);
                self.pivots.push(p);
                Insert::Independent
            }
        }
    }

    /// Coordinates of `v` in terms of the inserted vectors, if `v` lies in
    /// their span. Requires coordinate tracking.
    pub fn coordinates(&self, v: &F::Row) -> Option<F::Row> {
        let (cap, coords) = self.coords.as_ref().expect("coordinate tracking enabled");
        let mut w = v.clone();
        let used = self.reduce(&mut w);
        if !self.f.is_zero(&w) {
            return None;
        }
        let mut c = self.f.zero_row(*cap);
        for (k, &u) in used.iter().enumerate() {
            self.f.axpy(&mut c, u, &coords[k]);
        }
        Some(c)
    }

    /// Reduced row echelon form, rows sorted by pivot.
    pub fn rref(&self) -> Vec<F::Row> {
        rref(&self.f, &self.rows, self.n)
    }
}

/// Reduced row echelon basis of the span of `rows`.
pub fn rref<F: Field>(f: &F, rows: &[F::Row], n: usize) -> Vec<F::Row> {
    let mut e = Echelon::new(f.clone(), n);
    for r in rows {
        e.insert(r.clone());
    }
    let mut order: Vec<usize> = (0..e.rows.len()).collect();
    order.sort_by_key(|&k| e.pivots[k]);
    let mut out: Vec<F::Row> = order.iter().map(|&k| e.rows[k].clone()).collect();
    let pivots: Vec<usize> = order.iter().map(|&k| e.pivots[k]).collect();
    for i in (0..out.len()).rev() {
        let (head, tail) = out.split_at_mut(i + 1);
        let _ = tail;
        for j in 0..i {
            let c = f.get(&head[j], pivots[i]);
            if c != 0 {
                let ri = head[i].clone();
                f.axpy(&mut head[j], f.neg(c), &ri);
            }
        }
    }
    out
}

/// Basis of `{v : v * s^T = 0}`, the annihilator of the row space of `s`.
pub fn annihilator<F: Field>(f: &F, s: &[F::Row], n: usize) -> Vec<F::Row> {
    let m = Matrix::<F>::from_rows(s.to_vec(), n).transpose(f);
    m.left_kernel(f)
}
