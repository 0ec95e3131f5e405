//! Slow, independent references used by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use hk_core::Trinomial;

/// Rank of a dense matrix over `F_p` by plain Gauss-Jordan elimination.
pub fn dense_rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let inv = |a: u64| -> u64 {
        let (mut r, mut b, mut e) = (1u64, a % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, piv);
        let s = inv(rows[rank][c]);
        for v in rows[rank].iter_mut() {
            *v = *v * s % p;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] % p != 0 {
                let k = row[c];
                for (v, &w) in row.iter_mut().zip(&pivot_row) {
                    *v = (*v + p * p - k * w % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// All exponent vectors in `[0, q)^m`, in lexicographic order of the
/// vectors themselves.
pub fn box_vectors(q: u64, m: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..q).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    out
}

/// `dim S / (f, x^[q])` from a dense matrix whose rows are `f * mu` for
/// every box monomial `mu`, truncated to the box.
pub fn dense_hk(f: &Trinomial, q: u64) -> u64 {
    let m = f.nvars();
    let vecs = box_vectors(q, m);
    let index: HashMap<Vec<u64>, usize> = vecs
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let terms: Vec<(u64, Vec<u64>)> = f
        .terms()
        .iter()
        .map(|t| {
            (
                t.coeff as u64,
                t.mon.exponents().iter().map(|&e| e as u64).collect(),
            )
        })
        .collect();
    let p = f.p() as u64;
    let rows: Vec<Vec<u64>> = vecs
        .iter()
        .map(|mu| {
            let mut row = vec![0u64; vecs.len()];
            for (c, e) in &terms {
                let prod: Vec<u64> = mu.iter().zip(e).map(|(a, b)| a + b).collect();
                if let Some(&j) = index.get(&prod) {
                    row[j] = (row[j] + c) % p;
                }
            }
            row
        })
        .collect();
    vecs.len() as u64 - dense_rank(rows, p) as u64
}

/// `C(n, k)` exactly, from Pascal's triangle.
pub fn pascal(nmax: usize) -> Vec<Vec<u128>> {
    let mut t = vec![vec![1u128]];
    for n in 1..=nmax {
        let prev = &t[n - 1];
        let mut row = vec![1u128; n + 1];
        for k in 1..n {
            row[k] = prev[k - 1] + prev[k];
        }
        t.push(row);
    }
    t
}

/// `C(n, k)` for small arguments, zero outside `0 <= k <= n`.
pub fn binom_i128(n: i64, k: i64) -> i128 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) as i128 / (i + 1) as i128;
    }
    r
}
