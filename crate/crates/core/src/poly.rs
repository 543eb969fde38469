//! Univariate polynomials over GF(p) and their factorisation.
//!
//! Coefficients run from the constant term upwards and are kept trimmed, so
//! the zero polynomial is the empty vector.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::gf::{Field, GfP};

pub type Poly = Vec<u32>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn x_poly() -> Poly {
    vec![0, 1]
}

pub fn sub(f: &GfP, a: &[u32], b: &[u32]) -> Poly {
    let n = a.len().max(b.len());
    let at = |v: &[u32], i: usize| v.get(i).copied().unwrap_or(0);
    trim((0..n).map(|i| f.sub(at(a, i), at(b, i))).collect())
}

pub fn add(f: &GfP, a: &[u32], b: &[u32]) -> Poly {
    let n = a.len().max(b.len());
    let at = |v: &[u32], i: usize| v.get(i).copied().unwrap_or(0);
    trim((0..n).map(|i| f.add(at(a, i), at(b, i))).collect())
}

pub fn mul(f: &GfP, a: &[u32], b: &[u32]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p = f.p() as u64;
    let mut acc = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] = (acc[i + j] + x as u64 * y as u64) % p;
        }
    }
    trim(acc.into_iter().map(|c| c as u32).collect())
}

/// Quotient and remainder; panics on division by zero.
pub fn divrem(f: &GfP, a: &[u32], b: &[u32]) -> (Poly, Poly) {
    let db = degree(b).expect("division by zero polynomial");
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lead_inv = f.inv(b[db]);
    let mut q = vec![0; r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        q[dr - db] = c;
        for (j, &bj) in b[..=db].iter().enumerate() {
            r[dr - db + j] = f.sub(r[dr - db + j], f.mul(c, bj));
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(f: &GfP, a: &[u32], b: &[u32]) -> Poly {
    divrem(f, a, b).1
}

pub fn monic(f: &GfP, a: &[u32]) -> Poly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let s = f.inv(a[d]);
            a[..=d].iter().map(|&c| f.mul(c, s)).collect()
        }
    }
}

pub fn gcd(f: &GfP, a: &[u32], b: &[u32]) -> Poly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, &a)
}

pub fn mulmod(f: &GfP, a: &[u32], b: &[u32], m: &[u32]) -> Poly {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod(f: &GfP, a: &[u32], mut e: u128, m: &[u32]) -> Poly {
    let mut base = rem(f, a, m);
    let mut acc = rem(f, &[1], m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &base, m);
        }
        base = mulmod(f, &base, &base, m);
        e >>= 1;
    }
    acc
}

pub fn derivative(f: &GfP, a: &[u32]) -> Poly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, (i as u64 % f.p() as u64) as u32))
            .collect(),
    )
}

pub fn is_one(a: &[u32]) -> bool {
    a == [1]
}

// a(x) = b(x^p) over GF(p), so the p-th root is b (coefficients fixed by
// Frobenius on the prime field)
fn pth_root(f: &GfP, a: &[u32]) -> Poly {
    let p = f.p() as usize;
    trim(a.iter().step_by(p).copied().collect())
}

/// Square-free decomposition: pairs `(g, m)` with `a = lead * prod g^m`.
pub fn squarefree(f: &GfP, a: &[u32]) -> Vec<(Poly, usize)> {
    let a = monic(f, a);
    if degree(&a).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut c = gcd(f, &a, &derivative(f, &a));
    let mut w = divrem(f, &a, &c).0;
    let mut i = 1;
    while !is_one(&w) {
        let y = gcd(f, &w, &c);
        let z = divrem(f, &w, &y).0;
        if degree(&z).unwrap_or(0) > 0 {
            out.push((monic(f, &z), i));
        }
        i += 1;
        c = divrem(f, &c, &y).0;
        w = y;
    }
    if degree(&c).unwrap_or(0) > 0 {
        let root = pth_root(f, &c);
        for (g, m) in squarefree(f, &root) {
            out.push((g, m * f.p() as usize));
        }
    }
    out
}

/// Distinct-degree split of a square-free monic polynomial, stopping at
/// degree `max_deg`: pairs `(product of all irreducible factors of degree i, i)`.
fn distinct_degree(f: &GfP, a: &[u32], max_deg: usize) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut g = monic(f, a);
    let x = x_poly();
    let mut h = rem(f, &x, &g);
    let mut i = 0;
    while degree(&g).unwrap_or(0) > 0 && i < max_deg {
        i += 1;
        let dg = degree(&g).unwrap();
        if dg < 2 * i {
            // what is left is irreducible
            if dg <= max_deg {
                out.push((g.clone(), dg));
            }
            break;
        }
        h = powmod(f, &h, f.p() as u128, &g);
        let t = gcd(f, &g, &sub(f, &h, &x));
        if !is_one(&t) {
            out.push((t.clone(), i));
            g = divrem(f, &g, &t).0;
            h = rem(f, &h, &g);
        }
    }
    out
}

/// Splits a product of distinct irreducibles of degree `d` (Cantor–Zassenhaus).
fn equal_degree(f: &GfP, a: &[u32], d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = degree(a).unwrap_or(0);
    if n == d {
        return vec![monic(f, a)];
    }
    loop {
        let r: Poly = trim((0..n).map(|_| rng.gen_range(0..f.p())).collect());
        if degree(&r).unwrap_or(0) == 0 {
            continue;
        }
        let s = if f.p() == 2 {
            // trace map r + r^2 + ... + r^(2^(d-1))
            let mut acc = r.clone();
            let mut t = r.clone();
            for _ in 1..d {
                t = mulmod(f, &t, &t, a);
                acc = add(f, &acc, &t);
            }
            acc
        } else {
            // r^((p^d - 1)/2) as (r * r^p * ... * r^(p^(d-1)))^((p-1)/2)
            let mut t = rem(f, &r, a);
            let mut norm = t.clone();
            for _ in 1..d {
                t = powmod(f, &t, f.p() as u128, a);
                norm = mulmod(f, &norm, &t, a);
            }
            sub(f, &powmod(f, &norm, (f.p() as u128 - 1) / 2, a), &[1])
        };
        let g = gcd(f, a, &s);
        let dg = degree(&g).unwrap_or(0);
        if dg > 0 && dg < n {
            let mut out = equal_degree(f, &g, d, rng);
            out.extend(equal_degree(f, &divrem(f, a, &g).0, d, rng));
            return out;
        }
    }
}

/// Distinct monic irreducible factors of `a` of degree at most `max_deg`,
/// sorted by degree then coefficients.
pub fn irreducible_factors(f: &GfP, a: &[u32], max_deg: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let mut out = Vec::new();
    for (g, _) in squarefree(f, a) {
        for (t, d) in distinct_degree(f, &g, max_deg) {
            out.extend(equal_degree(f, &t, d, rng));
        }
    }
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out.dedup();
    out
}

/// Full factorisation into monic irreducibles with multiplicities.
pub fn factor(f: &GfP, a: &[u32], rng: &mut ChaCha8Rng) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    for (g, m) in squarefree(f, a) {
        let n = degree(&g).unwrap_or(0);
        for (t, d) in distinct_degree(f, &g, n) {
            for h in equal_degree(f, &t, d, rng) {
                out.push((h, m));
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn product(f: &GfP, parts: &[(Poly, usize)]) -> Poly {
        let mut acc = vec![1];
        for (g, m) in parts {
            for _ in 0..*m {
                acc = mul(f, &acc, g);
            }
        }
        acc
    }

    #[test]
    fn division_identity() {
        let f = GfP::new(7);
        let a = vec![3, 0, 5, 1, 6];
        let b = vec![2, 1, 3];
        let (q, r) = divrem(&f, &a, &b);
        assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
        assert!(degree(&r).unwrap_or(0) < 2);
    }

    #[test]
    fn factorisations_multiply_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [2u32, 3, 5, 13] {
            let f = GfP::new(p);
            for _ in 0..20 {
                let n = rng.gen_range(1..12);
                let mut a: Poly = (0..n).map(|_| rng.gen_range(0..p)).collect();
                a.push(1);
                let parts = factor(&f, &a, &mut rng);
                assert_eq!(product(&f, &parts), a, "p={p}");
                for (g, _) in &parts {
                    // irreducible: no factors of smaller degree
                    let d = degree(g).unwrap();
                    assert_eq!(irreducible_factors(&f, g, d, &mut rng), vec![g.clone()]);
                }
            }
        }
    }

    #[test]
    fn squares_and_pth_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = GfP::new(2);
        // (x+1)^4 (x^2+x+1)
        let a = mul(
            &f,
            &mul(&f, &[1, 1], &[1, 1]),
            &mul(&f, &mul(&f, &[1, 1], &[1, 1]), &[1, 1, 1]),
        );
        assert_eq!(
            factor(&f, &a, &mut rng),
            vec![(vec![1, 1], 4), (vec![1, 1, 1], 1)]
        );
        assert_eq!(irreducible_factors(&f, &a, 1, &mut rng), vec![vec![1, 1]]);
    }
}
