#![allow(dead_code)]

use hatc_core::gf::{rref, Field, GfP, Matrix};
use hatc_core::meataxe::Module;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Every subspace of GF(p)^n, as reduced echelon bases (entries).
pub fn all_subspaces(p: u32, n: usize) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let pivots: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
        // free positions: (row, column) right of the row's pivot, off pivot columns
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| {
                ((pc + 1)..n)
                    .filter(|c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let total = (p as usize).pow(free.len() as u32);
        for mut code in 0..total {
            let mut rows = vec![vec![0u32; n]; pivots.len()];
            for (r, &pc) in pivots.iter().enumerate() {
                rows[r][pc] = 1;
            }
            for &(r, c) in &free {
                rows[r][c] = (code % p as usize) as u32;
                code /= p as usize;
            }
            out.push(rows);
        }
    }
    out
}

fn invariant(p: u32, gens: &[Vec<Vec<u32>>], space: &[Vec<u32>], n: usize) -> bool {
    let f = GfP::new(p);
    let rows: Vec<Vec<u32>> = space.to_vec();
    let base = rref(&f, &rows, n).len();
    gens.iter().all(|g| {
        let gm = Matrix::from_entries(&f, g);
        let mut all = rows.clone();
        all.extend(rows.iter().map(|r| f.vec_mat(r, &gm)));
        rref(&f, &all, n).len() == base
    })
}

fn contained(f: &GfP, a: &[Vec<u32>], b: &[Vec<u32>], n: usize) -> bool {
    let mut all = b.to_vec();
    all.extend_from_slice(a);
    rref(f, &all, n).len() == b.len()
}

/// Maximal proper invariant subspaces of codimension at most `d`, by
/// exhaustion.
pub fn brute_maximal(p: u32, n: usize, gens: &[Vec<Vec<u32>>], d: usize) -> Vec<Vec<Vec<u32>>> {
    let f = GfP::new(p);
    let inv: Vec<Vec<Vec<u32>>> = all_subspaces(p, n)
        .into_iter()
        .filter(|s| invariant(p, gens, s, n))
        .collect();
    let mut out: Vec<Vec<Vec<u32>>> = inv
        .iter()
        .filter(|s| s.len() < n && n - s.len() <= d)
        .filter(|s| {
            !inv.iter()
                .any(|t| t.len() > s.len() && t.len() < n && contained(&f, s, t, n))
        })
        .cloned()
        .collect();
    out.sort();
    out
}

fn random_invertible(p: u32, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    let f = GfP::new(p);
    loop {
        let m: Vec<Vec<u32>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(0..p)).collect())
            .collect();
        if Matrix::from_entries(&f, &m).rank(&f) == n {
            return m;
        }
    }
}

fn block_diag(a: &[Vec<u32>], b: &[Vec<u32>], glue: Option<&[Vec<u32>]>) -> Vec<Vec<u32>> {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![0; n + m]; n + m];
    for i in 0..n {
        out[i][..n].copy_from_slice(&a[i]);
        if let Some(g) = glue {
            out[i][n..].copy_from_slice(&g[i]);
        }
    }
    for i in 0..m {
        out[n + i][n..].copy_from_slice(&b[i]);
    }
    out
}

fn perm_matrix(images: &[usize]) -> Vec<Vec<u32>> {
    let n = images.len();
    (0..n)
        .map(|i| (0..n).map(|j| (images[i] == j) as u32).collect())
        .collect()
}

/// A random module of dimension 1..=4 over GF(p): random matrix groups,
/// permutation modules, block triangular and repeated-block shapes.
pub fn random_module(p: u32, rng: &mut ChaCha8Rng) -> (usize, Vec<Vec<Vec<u32>>>) {
    let n = rng.gen_range(1..=4usize);
    let k = rng.gen_range(1..=2usize);
    let gens: Vec<Vec<Vec<u32>>> = match rng.gen_range(0..4) {
        0 => (0..k).map(|_| random_invertible(p, n, rng)).collect(),
        1 => (0..k)
            .map(|_| {
                let mut images: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    images.swap(i, rng.gen_range(0..=i));
                }
                perm_matrix(&images)
            })
            .collect(),
        2 if n >= 2 => {
            let a_dim = rng.gen_range(1..n);
            (0..k)
                .map(|_| {
                    let a = random_invertible(p, a_dim, rng);
                    let b = random_invertible(p, n - a_dim, rng);
                    let glue: Vec<Vec<u32>> = (0..a_dim)
                        .map(|_| (0..n - a_dim).map(|_| rng.gen_range(0..p)).collect())
                        .collect();
                    block_diag(&a, &b, Some(&glue))
                })
                .collect()
        }
        3 if n % 2 == 0 => (0..k)
            .map(|_| {
                let a = random_invertible(p, n / 2, rng);
                block_diag(&a, &a, None)
            })
            .collect(),
        _ => (0..k).map(|_| random_invertible(p, n, rng)).collect(),
    };
    (n, gens)
}

pub fn module_maximal<F: Field>(
    f: F,
    n: usize,
    gens: &[Vec<Vec<u32>>],
    d: usize,
) -> Vec<Vec<Vec<u32>>> {
    let m = Module::new(
        f.clone(),
        n,
        gens.iter().map(|g| Matrix::from_entries(&f, g)).collect(),
    );
    let mut out: Vec<Vec<Vec<u32>>> = hatc_core::meataxe::maximal_submodules(&m, d, 0)
        .iter()
        .map(|k| k.basis(&f).iter().map(|r| f.row_entries(r)).collect())
        .collect();
    out.sort();
    out
}
