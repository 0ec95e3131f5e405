//! Sparse matrices over `F_p` and exact rank.
//!
//! Two backends sit behind [`rank_fp`]:
//!
//! * `p = 2`: rows are packed into `u64` words and reduced by XOR. Pivot
//!   columns are taken least-filled first.
//! * `p > 2`: sparse row elimination. Columns are again visited least-filled
//!   first, and the pivot row for a column is the sparsest candidate, which
//!   keeps fill low on the 3-nonzeros-per-column matrices built here.

use std::collections::BTreeMap;

use crate::error::{HkError, Result};
use crate::field::PrimeField;

/// Row/column indexed sparse matrix with entries in `F_p`.
///
/// Entries are kept in a `BTreeMap` keyed by `(row, col)`; zero values are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseFpMatrix {
    nrows: usize,
    ncols: usize,
    p: u32,
    entries: BTreeMap<(u32, u32), u32>,
}

impl SparseFpMatrix {
    pub fn new(nrows: usize, ncols: usize, p: u32) -> Self {
        Self {
            nrows,
            ncols,
            p,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        p: u32,
        triplets: impl IntoIterator<Item = (usize, usize, u32)>,
    ) -> Result<Self> {
        let mut m = Self::new(nrows, ncols, p);
        for (r, c, v) in triplets {
            m.add(r, c, v)?;
        }
        Ok(m)
    }

    pub fn identity(n: usize, p: u32) -> Self {
        let mut m = Self::new(n, n, p);
        for i in 0..n {
            m.entries.insert((i as u32, i as u32), 1 % p);
        }
        m.entries.retain(|_, v| *v != 0);
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries
            .get(&(r as u32, c as u32))
            .copied()
            .unwrap_or(0)
    }

    /// Overwrite an entry. Storing zero removes it.
    pub fn set(&mut self, r: usize, c: usize, v: u32) -> Result<()> {
        self.check(r, c)?;
        let v = v % self.p;
        if v == 0 {
            self.entries.remove(&(r as u32, c as u32));
        } else {
            self.entries.insert((r as u32, c as u32), v);
        }
        Ok(())
    }

    /// Add `v` to an entry.
    pub fn add(&mut self, r: usize, c: usize, v: u32) -> Result<()> {
        let cur = self.get(r, c) as u64;
        let new = ((cur + (v % self.p) as u64) % self.p as u64) as u32;
        self.set(r, c, new)
    }

    fn check(&self, r: usize, c: usize) -> Result<()> {
        if r >= self.nrows || c >= self.ncols {
            return Err(HkError::InvalidArgument(format!(
                "entry ({r}, {c}) outside a {}x{} matrix",
                self.nrows, self.ncols
            )));
        }
        Ok(())
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.entries
            .iter()
            .map(|(&(r, c), &v)| (r as usize, c as usize, v))
    }

    /// Nonzeros of column `c`, ascending by row.
    pub fn column(&self, c: usize) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = self
            .triplets()
            .filter(|&(_, cc, _)| cc == c)
            .map(|(r, _, v)| (r, v))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.ncols];
        for &(_, c) in self.entries.keys() {
            counts[c as usize] += 1;
        }
        counts
    }

    /// Restrict to the given rows (in the given order).
    pub fn select_rows(&self, rows: &[usize]) -> SparseFpMatrix {
        let mut pos = vec![usize::MAX; self.nrows];
        for (i, &r) in rows.iter().enumerate() {
            pos[r] = i;
        }
        let mut out = SparseFpMatrix::new(rows.len(), self.ncols, self.p);
        for (r, c, v) in self.triplets() {
            if pos[r] != usize::MAX {
                out.entries.insert((pos[r] as u32, c as u32), v);
            }
        }
        out
    }

    /// `[self | rhs]` with `rhs` given densely.
    pub fn augment(&self, rhs: &[u32]) -> SparseFpMatrix {
        assert_eq!(rhs.len(), self.nrows, "rhs length");
        let mut out = self.clone();
        out.ncols += 1;
        for (r, &v) in rhs.iter().enumerate() {
            if v % self.p != 0 {
                out.entries
                    .insert((r as u32, self.ncols as u32), v % self.p);
            }
        }
        out
    }

    fn sparse_rows(&self) -> Vec<Vec<(u32, u32)>> {
        let mut rows = vec![Vec::new(); self.nrows];
        for (&(r, c), &v) in &self.entries {
            rows[r as usize].push((c, v));
        }
        rows
    }
}

/// Exact rank of `m` over `F_p`.
pub fn rank_fp(m: &SparseFpMatrix) -> usize {
    if m.nnz() == 0 {
        return 0;
    }
    if m.p == 2 {
        rank_gf2(m)
    } else {
        rank_sparse(
            m,
            PrimeField::new(m.p as u64).expect("matrix modulus is prime"),
        )
    }
}

/// `true` iff `m x = rhs` has a solution.
pub fn is_consistent(m: &SparseFpMatrix, rhs: &[u32]) -> bool {
    rank_fp(m) == rank_fp(&m.augment(rhs))
}

// Columns sorted by fill, ties by index.
fn column_order(m: &SparseFpMatrix) -> Vec<usize> {
    let counts = m.column_counts();
    let mut order: Vec<usize> = (0..m.ncols).filter(|&c| counts[c] > 0).collect();
    order.sort_by_key(|&c| (counts[c], c));
    order
}

fn rank_gf2(m: &SparseFpMatrix) -> usize {
    // Permute columns so that word position follows pivot preference.
    let order = column_order(m);
    let mut slot = vec![usize::MAX; m.ncols];
    for (i, &c) in order.iter().enumerate() {
        slot[c] = i;
    }
    let words = order.len().div_ceil(64);
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(m.nrows);
    for sparse in m.sparse_rows() {
        if sparse.is_empty() {
            continue;
        }
        let mut bits = vec![0u64; words];
        for (c, _) in sparse {
            let s = slot[c as usize];
            bits[s / 64] |= 1 << (s % 64);
        }
        rows.push(bits);
    }

    let mut rank = 0;
    for col in 0..order.len() {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot = &head[rank];
        for row in tail.iter_mut() {
            if row[w] & b != 0 {
                for (x, y) in row[w..].iter_mut().zip(&pivot[w..]) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn rank_sparse(m: &SparseFpMatrix, field: PrimeField) -> usize {
    let mut rows: Vec<Vec<(u32, u32)>> = m.sparse_rows();
    let mut active: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
    // column -> rows that (may) touch it; refreshed lazily
    let mut touching: Vec<Vec<u32>> = vec![Vec::new(); m.ncols];
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            touching[c as usize].push(r as u32);
        }
    }

    let mut rank = 0;
    for col in column_order(m) {
        let c = col as u32;
        let mut cands: Vec<usize> = touching[col]
            .iter()
            .map(|&r| r as usize)
            .filter(|&r| active[r] && entry(&rows[r], c) != 0)
            .collect();
        cands.sort_unstable();
        cands.dedup();
        let Some(&piv) = cands.iter().min_by_key(|&&r| (rows[r].len(), r)) else {
            continue;
        };
        active[piv] = false;
        rank += 1;
        let pivot = std::mem::take(&mut rows[piv]);
        let inv = field.inv(entry(&pivot, c));
        for &r in cands.iter().filter(|&&r| r != piv) {
            let factor = field.mul(entry(&rows[r], c), inv);
            let merged = axpy(&rows[r], &pivot, field.neg(factor), field);
            for &(cc, _) in &merged {
                if entry(&rows[r], cc) == 0 {
                    touching[cc as usize].push(r as u32);
                }
            }
            rows[r] = merged;
            if rows[r].is_empty() {
                active[r] = false;
            }
        }
    }
    rank
}

fn entry(row: &[(u32, u32)], c: u32) -> u32 {
    row.binary_search_by_key(&c, |&(cc, _)| cc)
        .map_or(0, |i| row[i].1)
}

// x + a*y on sorted sparse rows
fn axpy(x: &[(u32, u32)], y: &[(u32, u32)], a: u32, field: PrimeField) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i]);
            i += 1;
        } else if take_y {
            let v = field.mul(a, y[j].1);
            if v != 0 {
                out.push((y[j].0, v));
            }
            j += 1;
        } else {
            let v = field.add(x[i].1, field.mul(a, y[j].1));
            if v != 0 {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank_fp(&SparseFpMatrix::new(4, 4, 2)), 0);
        assert_eq!(rank_fp(&SparseFpMatrix::identity(5, 2)), 5);
        assert_eq!(rank_fp(&SparseFpMatrix::identity(5, 7)), 5);
        let one = SparseFpMatrix::from_triplets(4, 4, 2, [(3, 0, 1)]).unwrap();
        assert_eq!(rank_fp(&one), 1);
    }

    #[test]
    fn rank_dependent_rows() {
        // rows (1,2,3), (2,4,6), (0,1,1) over F_7: rank 2
        let m = SparseFpMatrix::from_triplets(
            3,
            3,
            7,
            [
                (0, 0, 1),
                (0, 1, 2),
                (0, 2, 3),
                (1, 0, 2),
                (1, 1, 4),
                (1, 2, 6),
                (2, 1, 1),
                (2, 2, 1),
            ],
        )
        .unwrap();
        assert_eq!(rank_fp(&m), 2);
        // same pattern over F_2: rows (1,0,1), 0, (0,1,1) -> rank 2
        let m2 = SparseFpMatrix::from_triplets(
            3,
            3,
            2,
            [
                (0, 0, 1),
                (0, 1, 2),
                (0, 2, 3),
                (1, 0, 2),
                (1, 1, 4),
                (1, 2, 6),
                (2, 1, 1),
                (2, 2, 1),
            ],
        )
        .unwrap();
        assert_eq!(rank_fp(&m2), 2);
    }

    #[test]
    fn consistency() {
        let m = SparseFpMatrix::from_triplets(2, 1, 3, [(0, 0, 1), (1, 0, 1)]).unwrap();
        assert!(is_consistent(&m, &[2, 2]));
        assert!(!is_consistent(&m, &[1, 0]));
        assert!(is_consistent(&SparseFpMatrix::new(2, 2, 3), &[0, 0]));
        assert!(!is_consistent(&SparseFpMatrix::new(2, 2, 3), &[0, 1]));
    }

    #[test]
    fn entries_are_reduced() {
        let mut m = SparseFpMatrix::new(2, 2, 3);
        m.add(0, 0, 2).unwrap();
        m.add(0, 0, 1).unwrap();
        assert_eq!(m.nnz(), 0);
        assert!(m.set(2, 0, 1).is_err());
        m.set(1, 1, 5).unwrap();
        assert_eq!(m.get(1, 1), 2);
        assert_eq!(m.column(1), vec![(1, 2)]);
    }
}
