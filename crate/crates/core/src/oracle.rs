//! Ground truth for the Hilbert-Kunz function.
//!
//! `HK(n) = dim_k S/((f) + (x_1^q, ..., x_m^q))` with `q = p^n`. The quotient
//! `S/(x^[q])` has the box monomials (all exponents `< q`) as a basis, and
//! the image of multiplication by `f` is exactly `((f) + x^[q]) / x^[q]`, so
//! `HK(n) = q^m - rank(g -> f*g)`.
//!
//! The rank is found by ordered elimination over the deglex-sorted basis.
//! With trailing pivots, the column of a basis monomial `mu` has its
//! smallest entry at `mu*[1]` whenever that product stays in the box, and
//! `mu -> mu*[1]` is injective; those columns are already in echelon form
//! and are never materialised. Only the remaining columns (where
//! `mu*[1]` leaves the box) are reduced explicitly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{HkError, Result};
use crate::monomial::Monomial;
use crate::sparse::SparseFpMatrix;
use crate::trinomial::Trinomial;

/// Default cap on the number of basis monomials `q^m`.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Which monomial of a reduced row becomes its pivot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PivotOrder {
    /// The deglex-smallest monomial. A pivot `A` is then congruent mod
    /// `(f) + x^[q]` to a combination of strictly larger monomials.
    #[default]
    Trailing,
    /// The deglex-largest monomial.
    Leading,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub budget: u64,
    pub pivot: PivotOrder,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            pivot: PivotOrder::Trailing,
        }
    }
}

/// The monomials of `S/(x_1^q, ..., x_m^q)`, enumerated in mixed radix
/// base `q`: the exponent of `x_i` is digit `i`, and `x_{m-1}` is the most
/// significant digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrobeniusBox {
    pub p: u32,
    pub n: u32,
    pub q: u64,
    pub m: usize,
}

impl FrobeniusBox {
    pub fn new(p: u32, n: u32, m: usize) -> Result<Self> {
        let q = (p as u64)
            .checked_pow(n)
            .ok_or_else(|| HkError::InvalidArgument(format!("{p}^{n} overflows")))?;
        Ok(Self { p, n, q, m })
    }

    /// A box with side `q` directly (used where only `q` matters).
    pub fn with_side(q: u64, m: usize) -> Self {
        Self { p: 0, n: 0, q, m }
    }

    /// `q^m`, saturating at `u128::MAX`.
    pub fn size_u128(&self) -> u128 {
        (self.q as u128)
            .checked_pow(self.m as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn check_budget(&self, budget: u64) -> Result<usize> {
        let size = self.size_u128();
        if size > budget as u128 || size >= (1u128 << 31) {
            return Err(HkError::BudgetExceeded {
                required: size,
                budget,
            });
        }
        Ok(size as usize)
    }

    pub fn index(&self, mon: &Monomial) -> Option<usize> {
        let mut idx: u64 = 0;
        for &e in mon.exponents().iter().rev() {
            if e as u64 >= self.q {
                return None;
            }
            idx = idx * self.q + e as u64;
        }
        Some(idx as usize)
    }

    pub fn monomial(&self, mut idx: usize) -> Monomial {
        let q = self.q as usize;
        let mut e = Vec::with_capacity(self.m);
        for _ in 0..self.m {
            e.push((idx % q) as u32);
            idx /= q;
        }
        Monomial::new(e)
    }

    pub fn contains(&self, mon: &Monomial) -> bool {
        mon.exponents().iter().all(|&e| (e as u64) < self.q)
    }
}

// Multiplication by a fixed monomial on box indices.
#[derive(Clone, Debug)]
struct Shift {
    exps: Vec<u64>,
    offset: usize,
}

impl Shift {
    fn new(bx: &FrobeniusBox, mon: &Monomial) -> Self {
        let exps: Vec<u64> = mon.exponents().iter().map(|&e| e as u64).collect();
        let mut offset = 0u64;
        let mut place = 1u64;
        for &e in &exps {
            offset = offset.saturating_add(e.saturating_mul(place));
            place = place.saturating_mul(bx.q);
        }
        Self {
            exps,
            offset: offset as usize,
        }
    }

    #[inline]
    fn apply(&self, q: u64, idx: usize) -> Option<usize> {
        let mut rest = idx as u64;
        for &e in &self.exps {
            if rest % q + e >= q {
                return None;
            }
            rest /= q;
        }
        Some(idx + self.offset)
    }
}

/// Matrix of `g -> f*g` on the basis of `S/(x^[q])`; column and row indices
/// are box indices.
pub fn build_mult_matrix(f: &Trinomial, bx: &FrobeniusBox) -> Result<SparseFpMatrix> {
    if f.nvars() != bx.m {
        return Err(HkError::DimensionMismatch {
            expected: bx.m,
            found: f.nvars(),
        });
    }
    let n = bx.check_budget(u64::MAX)?;
    let shifts: Vec<Shift> = (0..3).map(|t| Shift::new(bx, f.mon(t))).collect();
    let mut trip = Vec::with_capacity(3 * n);
    for col in 0..n {
        for (t, s) in shifts.iter().enumerate() {
            if let Some(row) = s.apply(bx.q, col) {
                trip.push((row, col, f.coeff(t)));
            }
        }
    }
    SparseFpMatrix::from_triplets(n, n, f.p(), trip)
}

/// Outcome of the ordered elimination of the image of multiplication by `f`.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub bx: FrobeniusBox,
    pub rank: u64,
    /// `is_pivot[i]` for box index `i`.
    is_pivot: Vec<bool>,
}

impl Elimination {
    pub fn colength(&self) -> u64 {
        self.is_pivot.len() as u64 - self.rank
    }

    pub fn is_pivot(&self, mon: &Monomial) -> bool {
        self.bx.index(mon).is_some_and(|i| self.is_pivot[i])
    }

    /// Box monomials that are never pivots, in deglex order.
    pub fn standard_monomials(&self) -> Vec<Monomial> {
        let mut out: Vec<Monomial> = (0..self.is_pivot.len())
            .filter(|&i| !self.is_pivot[i])
            .map(|i| self.bx.monomial(i))
            .collect();
        out.sort();
        out
    }

    pub fn pivot_monomials(&self) -> Vec<Monomial> {
        let mut out: Vec<Monomial> = (0..self.is_pivot.len())
            .filter(|&i| self.is_pivot[i])
            .map(|i| self.bx.monomial(i))
            .collect();
        out.sort();
        out
    }
}

const EMPTY: u32 = u32::MAX;
const STORED: u32 = 1 << 31;

pub fn eliminate(f: &Trinomial, n: u32, cfg: &OracleConfig) -> Result<Elimination> {
    if n == 0 {
        return Err(HkError::InvalidArgument(
            "Frobenius level must be >= 1".into(),
        ));
    }
    let bx = FrobeniusBox::new(f.p(), n, f.nvars())?;
    let size = bx.check_budget(cfg.budget)?;
    let field = f.field();
    let q = bx.q;

    // key[i]: position of box index i in pivot preference order.
    let key = pivot_keys(&bx, size, cfg.pivot);
    let key_term = match cfg.pivot {
        PivotOrder::Trailing => 0,
        PivotOrder::Leading => 2,
    };
    let others: Vec<usize> = (0..3).filter(|&t| t != key_term).collect();
    let shifts: Vec<Shift> = (0..3).map(|t| Shift::new(&bx, f.mon(t))).collect();
    let key_inv = field.inv(f.coeff(key_term));

    // slot[key] = EMPTY | box index of an implicit column | STORED | id
    let mut slot = vec![EMPTY; size];
    let mut rank: u64 = 0;
    let mut leftovers = Vec::new();
    for col in 0..size {
        match shifts[key_term].apply(q, col) {
            Some(row) => {
                slot[key[row] as usize] = col as u32;
                rank += 1;
            }
            None => leftovers.push(col),
        }
    }

    let mut stored: Vec<Vec<(u32, u32)>> = Vec::new();
    let mut work: BTreeMap<u32, u32> = BTreeMap::new();
    for col in leftovers {
        work.clear();
        for &t in &others {
            if let Some(row) = shifts[t].apply(q, col) {
                sub_into(&mut work, key[row], field.neg(f.coeff(t)), field);
            }
        }
        while let Some((k, c)) = work.pop_first() {
            let s = slot[k as usize];
            if s == EMPTY {
                let inv = field.inv(c);
                let mut v = Vec::with_capacity(work.len() + 1);
                v.push((k, 1));
                v.extend(work.iter().map(|(&kk, &vv)| (kk, field.mul(vv, inv))));
                slot[k as usize] = STORED | stored.len() as u32;
                stored.push(v);
                rank += 1;
                break;
            } else if s & STORED != 0 {
                let v = &stored[(s & !STORED) as usize];
                for &(kk, vv) in &v[1..] {
                    sub_into(&mut work, kk, field.mul(c, vv), field);
                }
            } else {
                let nu = s as usize;
                let factor = field.mul(c, key_inv);
                for &t in &others {
                    if let Some(row) = shifts[t].apply(q, nu) {
                        sub_into(&mut work, key[row], field.mul(factor, f.coeff(t)), field);
                    }
                }
            }
        }
    }

    let mut is_pivot = vec![false; size];
    for (i, p) in is_pivot.iter_mut().enumerate() {
        *p = slot[key[i] as usize] != EMPTY;
    }
    Ok(Elimination { bx, rank, is_pivot })
}

// work[k] -= v
fn sub_into(work: &mut BTreeMap<u32, u32>, k: u32, v: u32, field: crate::field::PrimeField) {
    if v == 0 {
        return;
    }
    use std::collections::btree_map::Entry;
    match work.entry(k) {
        Entry::Vacant(e) => {
            e.insert(field.neg(v));
        }
        Entry::Occupied(mut e) => {
            let nv = field.sub(*e.get(), v);
            if nv == 0 {
                e.remove();
            } else {
                *e.get_mut() = nv;
            }
        }
    }
}

// Deglex position of every box index (or its reverse for leading pivots).
// Within one degree, deglex agrees with the base-q index order, so a stable
// counting sort by degree suffices.
fn pivot_keys(bx: &FrobeniusBox, size: usize, order: PivotOrder) -> Vec<u32> {
    let q = bx.q;
    let mut degree = vec![0u32; size];
    for (i, d) in degree.iter_mut().enumerate() {
        let mut rest = i as u64;
        let mut s = 0u64;
        for _ in 0..bx.m {
            s += rest % q;
            rest /= q;
        }
        *d = s as u32;
    }
    let maxdeg = (q as usize - 1) * bx.m;
    let mut start = vec![0u32; maxdeg + 2];
    for &d in &degree {
        start[d as usize + 1] += 1;
    }
    for d in 1..start.len() {
        start[d] += start[d - 1];
    }
    let mut key = vec![0u32; size];
    for (i, &d) in degree.iter().enumerate() {
        key[i] = start[d as usize];
        start[d as usize] += 1;
    }
    if order == PivotOrder::Leading {
        let last = size as u32 - 1;
        for k in &mut key {
            *k = last - *k;
        }
    }
    key
}

/// `HK(n)` with the default budget.
pub fn colength(f: &Trinomial, n: u32) -> Result<u64> {
    colength_with(f, n, &OracleConfig::default())
}

pub fn colength_with(f: &Trinomial, n: u32, cfg: &OracleConfig) -> Result<u64> {
    Ok(eliminate(f, n, cfg)?.colength())
}

/// Box monomials outside the pivot set of the ordered elimination.
pub fn standard_monomials(f: &Trinomial, n: u32, cfg: &OracleConfig) -> Result<Vec<Monomial>> {
    Ok(eliminate(f, n, cfg)?.standard_monomials())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HkPoint {
    pub n: u32,
    pub q: u64,
    pub hk: u64,
}

/// Exact values `(n, HK(n))` for one trinomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HkSeries {
    pub p: u32,
    pub poly: String,
    pub nvars: usize,
    pub points: Vec<HkPoint>,
    /// Set when the run stopped early at the budget.
    pub truncated: bool,
}

pub fn hk_series(f: &Trinomial, n_max: u32, cfg: &OracleConfig) -> Result<HkSeries> {
    if n_max == 0 {
        return Err(HkError::InvalidArgument("n_max must be >= 1".into()));
    }
    let mut points = Vec::new();
    let mut truncated = false;
    for n in 1..=n_max {
        match colength_with(f, n, cfg) {
            Ok(hk) => points.push(HkPoint {
                n,
                q: (f.p() as u64).pow(n),
                hk,
            }),
            Err(HkError::BudgetExceeded { required, budget }) => {
                log::info!("{f}: stopping at n = {n}, basis {required} exceeds budget {budget}");
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(HkSeries {
        p: f.p(),
        poly: f.to_string(),
        nvars: f.nvars(),
        points,
        truncated,
    })
}
