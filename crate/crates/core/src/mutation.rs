//! Membership of a monomial `A` in `A_c + J` through the three mutation
//! conditions.
//!
//! A mutant of `A` is `A * [1]^e1 * [2]^e2 * [3]^e3` reached by repeatedly
//! rewriting one factor `tau` of the current monomial with the other two
//! terms of `f` (`tau = -(tau' + tau'')` modulo `f`), so every mutant
//! satisfies `e1 + e2 + e3 = 0`. A Laurent monomial is *convergent* when it
//! leaves the Frobenius box: it has a negative exponent or one `>= q`.
//!
//! Condition (iii) asks for scalars `c_D` with
//! `f * sum(c_D D) = b*A + (terms we do not constrain)`. Like terms are
//! merged by monomial value, so descriptors that evaluate to the same
//! monomial share one row. A row is left unconstrained when its value is a
//! box monomial strictly above `A` in deglex; those rows form the `A_c`
//! part, and every row of the shape `A*[3]^k/([1]^i [2]^j)` is among them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HkError, Result};
use crate::monomial::{LaurentMonomial, Monomial};
use crate::oracle::{eliminate, OracleConfig, PivotOrder};
use crate::sparse::{is_consistent, SparseFpMatrix};
use crate::trinomial::{classify_variables, laurent_apply, Trinomial};

/// `A * [1]^e1 * [2]^e2 * [3]^e3` with its value cached.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MutantDescriptor {
    pub exps: [i64; 3],
    pub value: LaurentMonomial,
}

impl MutantDescriptor {
    pub fn new(base: &LaurentMonomial, f: &Trinomial, exps: [i64; 3]) -> Self {
        Self {
            exps,
            value: laurent_apply(base, f, exps[0], exps[1], exps[2]),
        }
    }

    /// Shift one term exponent by `delta`, updating the value.
    pub fn shifted(&self, f: &Trinomial, term: usize, delta: i64) -> Self {
        let mut exps = self.exps;
        exps[term] += delta;
        Self {
            exps,
            value: self.value.mul_pow(f.mon(term), delta),
        }
    }

    /// Sort key of the orders on columns and rows: `(e3, e2, e1)`.
    #[inline]
    pub fn order_key(&self) -> (i64, i64, i64) {
        (self.exps[2], self.exps[1], self.exps[0])
    }

    /// Lowest-terms form has only `[3]` factors on the multiplying side:
    /// `A * [3]^k / ([1]^i [2]^j)` with `k > 0`.
    pub fn is_pure_three_lift(&self) -> bool {
        self.exps[2] > 0 && self.exps[0] <= 0 && self.exps[1] <= 0
    }
}

impl fmt::Display for MutantDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A[1]^{}[2]^{}[3]^{} = {}",
            self.exps[0], self.exps[1], self.exps[2], self.value
        )
    }
}

pub fn is_convergent(v: &LaurentMonomial, q: u64) -> bool {
    !v.in_box(q)
}

/// Truncated index sets of the condition (iii) system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutantSets {
    pub base: Monomial,
    pub q: u64,
    pub depth: usize,
    /// Non-convergent mutants reached with fewer than `depth` rewrites.
    pub b_set: Vec<MutantDescriptor>,
    /// `B / tau` for `B` in `b_set` and `tau | B`, ascending by order key.
    pub a_set: Vec<MutantDescriptor>,
    /// `D * tau` for `D` in `a_set`, ascending by order key.
    pub e_set: Vec<MutantDescriptor>,
    /// `e_set` minus box monomials strictly above the base.
    pub l_set: Vec<MutantDescriptor>,
    /// No rewrite of `b_set` produces a new non-convergent mutant.
    pub saturated: bool,
}

pub fn generate_mutant_sets(
    a: &Monomial,
    f: &Trinomial,
    q: u64,
    depth: usize,
) -> Result<MutantSets> {
    if depth < 1 {
        return Err(HkError::InvalidArgument("depth must be >= 1".into()));
    }
    let base = a.to_laurent();
    let mut sets = MutantSets {
        base: a.clone(),
        q,
        depth,
        b_set: Vec::new(),
        a_set: Vec::new(),
        e_set: Vec::new(),
        l_set: Vec::new(),
        saturated: true,
    };
    if is_convergent(&base, q) {
        return Ok(sets);
    }

    let mut seen: HashMap<LaurentMonomial, ()> = HashMap::new();
    let root = MutantDescriptor::new(&base, f, [0, 0, 0]);
    seen.insert(root.value.clone(), ());
    let mut frontier = vec![root];
    let mut level = 0;
    loop {
        let mut next = Vec::new();
        for b in &frontier {
            for tau in 0..3 {
                if !divides(f.mon(tau), &b.value) {
                    continue;
                }
                for other in (0..3).filter(|&t| t != tau) {
                    let m = b.shifted(f, tau, -1).shifted(f, other, 1);
                    if !is_convergent(&m.value, q) && !seen.contains_key(&m.value) {
                        seen.insert(m.value.clone(), ());
                        next.push(m);
                    }
                }
            }
        }
        sets.b_set.append(&mut frontier);
        level += 1;
        if next.is_empty() {
            sets.saturated = true;
            break;
        }
        if level == depth {
            sets.saturated = false;
            break;
        }
        frontier = next;
    }

    let mut a_map: BTreeMap<Vec<i64>, MutantDescriptor> = BTreeMap::new();
    for b in &sets.b_set {
        for tau in 0..3 {
            if divides(f.mon(tau), &b.value) {
                let d = b.shifted(f, tau, -1);
                a_map.entry(d.value.exponents().to_vec()).or_insert(d);
            }
        }
    }
    sets.a_set = sorted_by_key(a_map.into_values());

    let mut e_map: BTreeMap<Vec<i64>, MutantDescriptor> = BTreeMap::new();
    for d in &sets.a_set {
        for tau in 0..3 {
            let e = d.shifted(f, tau, 1);
            e_map.entry(e.value.exponents().to_vec()).or_insert(e);
        }
    }
    sets.e_set = sorted_by_key(e_map.into_values());
    sets.l_set = sets
        .e_set
        .iter()
        .filter(|e| !is_free_row(&e.value, a, q))
        .cloned()
        .collect();
    Ok(sets)
}

fn sorted_by_key(it: impl Iterator<Item = MutantDescriptor>) -> Vec<MutantDescriptor> {
    let mut v: Vec<MutantDescriptor> = it.collect();
    v.sort_by(|x, y| {
        x.order_key()
            .cmp(&y.order_key())
            .then_with(|| x.value.cmp(&y.value))
    });
    v
}

// A box monomial strictly above the base: part of A_c, left unconstrained.
fn is_free_row(v: &LaurentMonomial, base: &Monomial, q: u64) -> bool {
    v.in_box(q) && v.to_monomial().is_some_and(|m| m > *base)
}

fn divides(d: &Monomial, v: &LaurentMonomial) -> bool {
    d.exponents()
        .iter()
        .zip(v.exponents())
        .all(|(&a, &b)| a as i64 <= b)
}

/// Right-hand side pattern of one row of the condition (iii) system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RhsEntry {
    /// The row of `A`: must be nonzero.
    Target,
    /// A non-convergent row other than `A`: must vanish.
    Zero,
    /// A convergent row: unconstrained.
    Free,
}

/// The `{0,1}` system (entries are the term coefficients of `f`).
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub matrix: SparseFpMatrix,
    /// Columns ascending in `(e3, e2, e1)`.
    pub cols: Vec<MutantDescriptor>,
    /// Rows descending in `(e3, e2, e1)`.
    pub rows: Vec<MutantDescriptor>,
    pub rhs: Vec<RhsEntry>,
}

pub fn assemble_system(a: &Monomial, f: &Trinomial, sets: &MutantSets) -> Result<AssembledSystem> {
    if &sets.base != a {
        return Err(HkError::InvalidArgument(format!(
            "mutant sets were generated for {}, not {a}",
            sets.base
        )));
    }
    let mut rows = sets.l_set.clone();
    rows.reverse();
    let row_of: HashMap<&LaurentMonomial, usize> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (&r.value, i))
        .collect();
    let base = a.to_laurent();
    let rhs = rows
        .iter()
        .map(|r| {
            if r.value == base {
                RhsEntry::Target
            } else if is_convergent(&r.value, sets.q) {
                RhsEntry::Free
            } else {
                RhsEntry::Zero
            }
        })
        .collect();
    let mut matrix = SparseFpMatrix::new(rows.len(), sets.a_set.len(), f.p());
    for (j, d) in sets.a_set.iter().enumerate() {
        for tau in 0..3 {
            let v = d.value.mul_pow(f.mon(tau), 1);
            if let Some(&i) = row_of.get(&v) {
                matrix.add(i, j, f.coeff(tau))?;
            }
        }
    }
    Ok(AssembledSystem {
        matrix,
        cols: sets.a_set.clone(),
        rows,
        rhs,
    })
}

impl AssembledSystem {
    /// Solvable with `e_A = 1`, zero on the other non-convergent rows and
    /// the convergent rows left free.
    pub fn is_solvable(&self) -> bool {
        let constrained: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.rhs[i] != RhsEntry::Free)
            .collect();
        if !constrained.iter().any(|&i| self.rhs[i] == RhsEntry::Target) {
            return false;
        }
        let sub = self.matrix.select_rows(&constrained);
        let b: Vec<u32> = constrained
            .iter()
            .map(|&i| u32::from(self.rhs[i] == RhsEntry::Target))
            .collect();
        is_consistent(&sub, &b)
    }
}

/// Rows of the system split by their smallest nonzero column.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RowSplit {
    /// `c1[i]`: smallest column with a nonzero entry in row `i`.
    pub c1: Vec<Option<usize>>,
    /// Rows sharing `c1` with a smaller row.
    pub r_set: Vec<usize>,
    pub s_set: Vec<usize>,
    /// Rows without nonzero entries, in neither set.
    pub empty: Vec<usize>,
}

pub fn select_c1_and_split(sys: &AssembledSystem) -> RowSplit {
    let mut c1: Vec<Option<usize>> = vec![None; sys.rows.len()];
    for (r, c, _) in sys.matrix.triplets() {
        if c1[r].is_none_or(|cur| c < cur) {
            c1[r] = Some(c);
        }
    }
    // rows are stored in decreasing order, so the smallest row of a group
    // is the one with the largest index
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (i, c) in c1.iter().enumerate() {
        if let Some(c) = c {
            let e = owner.entry(*c).or_insert(i);
            *e = (*e).max(i);
        }
    }
    let mut split = RowSplit {
        c1: c1.clone(),
        ..Default::default()
    };
    for (i, c) in c1.iter().enumerate() {
        match c {
            None => {
                log::debug!("row {} has no nonzero entry", sys.rows[i]);
                split.empty.push(i);
            }
            Some(c) if owner[c] == i => split.s_set.push(i),
            Some(_) => split.r_set.push(i),
        }
    }
    split
}

pub fn check_condition_i(a: &Monomial, f: &Trinomial) -> bool {
    f.mon(0).divides(a)
}

/// Least `M >= 1` such that `A * [1]^(M-1) / [d]^M` has no negative
/// exponent and `A * ([1]/[d])^M` is convergent, where `[d]` is term
/// `den` (1 for `[2]`, 2 for `[3]`).
pub fn ratio_walk(a: &Monomial, f: &Trinomial, den: usize, q: u64) -> Option<u32> {
    let base = a.to_laurent();
    let limit = q + f.max_degree() + 2;
    let mut cur = base; // A * ([1]/[d])^(M-1)
    for m in 1..=limit {
        let pre = cur.mul_pow(f.mon(den), -1);
        let next = pre.mul_pow(f.mon(0), 1);
        if pre.is_nonnegative() && is_convergent(&next, q) {
            return Some(m as u32);
        }
        cur = next;
    }
    None
}

/// The least `M` of condition (ii), if the condition holds.
pub fn check_condition_ii(a: &Monomial, f: &Trinomial, q: u64) -> Option<u32> {
    if f.mon(0).divides(a) || !f.mon(1).divides(a) {
        return None;
    }
    if classify_variables(f).extra.is_empty() {
        return None;
    }
    ratio_walk(a, f, 1, q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    InViaI,
    InViaII,
    InViaIII,
    NotIn,
    Undetermined,
}

impl Verdict {
    pub fn is_member(self) -> bool {
        matches!(self, Verdict::InViaI | Verdict::InViaII | Verdict::InViaIII)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::InViaI => "InViaI",
            Verdict::InViaII => "InViaII",
            Verdict::InViaIII => "InViaIII",
            Verdict::NotIn => "NotIn",
            Verdict::Undetermined => "Undetermined",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Verdict {
    type Err = HkError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "InViaI" => Verdict::InViaI,
            "InViaII" => Verdict::InViaII,
            "InViaIII" => Verdict::InViaIII,
            "NotIn" => Verdict::NotIn,
            "Undetermined" => Verdict::Undetermined,
            _ => return Err(HkError::InvalidArgument(format!("unknown verdict `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub verdict: Verdict,
    /// `M` for condition (ii); a system summary for (iii).
    pub witness: Option<String>,
}

pub fn classify_monomial(a: &Monomial, f: &Trinomial, q: u64, depth: usize) -> Result<Membership> {
    if !a.to_laurent().in_box(q) {
        return Err(HkError::InvalidArgument(format!(
            "{a} is not a box monomial for q = {q}"
        )));
    }
    if check_condition_i(a, f) {
        return Ok(Membership {
            verdict: Verdict::InViaI,
            witness: None,
        });
    }
    if let Some(m) = check_condition_ii(a, f, q) {
        return Ok(Membership {
            verdict: Verdict::InViaII,
            witness: Some(format!("M={m}")),
        });
    }
    if !f.mon(1).divides(a) && !f.mon(2).divides(a) {
        return Ok(Membership {
            verdict: Verdict::NotIn,
            witness: None,
        });
    }
    let (solvable, sys, sets) = solve_at(a, f, q, depth)?;
    let stable = if sets.saturated {
        solvable
    } else {
        solve_at(a, f, q, depth + 2)?.0
    };
    let summary = format!(
        "rows={} cols={} depth={}{}",
        sys.rows.len(),
        sys.cols.len(),
        depth,
        if sets.saturated { " saturated" } else { "" }
    );
    let verdict = match (solvable, stable) {
        (true, true) => Verdict::InViaIII,
        (false, false) => Verdict::NotIn,
        _ => Verdict::Undetermined,
    };
    Ok(Membership {
        verdict,
        witness: Some(summary),
    })
}

fn solve_at(
    a: &Monomial,
    f: &Trinomial,
    q: u64,
    depth: usize,
) -> Result<(bool, AssembledSystem, MutantSets)> {
    let sets = generate_mutant_sets(a, f, q, depth)?;
    let sys = assemble_system(a, f, &sets)?;
    Ok((sys.is_solvable(), sys, sets))
}

/// Verdicts for every box monomial, in deglex order.
pub fn classify_box(f: &Trinomial, q: u64, depth: usize) -> Result<Vec<(Monomial, Membership)>> {
    let m = f.nvars();
    let size = (q as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if size > (1 << 24) {
        return Err(HkError::BudgetExceeded {
            required: size,
            budget: 1 << 24,
        });
    }
    let bx = crate::oracle::FrobeniusBox::with_side(q, m);
    let mut mons: Vec<Monomial> = (0..size as usize).map(|i| bx.monomial(i)).collect();
    mons.sort();
    mons.into_par_iter()
        .map(|a| classify_monomial(&a, f, q, depth).map(|v| (a, v)))
        .collect()
}

/// Classifier verdicts compared with the oracle's trailing-pivot
/// elimination.
#[derive(Clone, Debug)]
pub struct Reconciliation {
    pub poly: String,
    pub n: u32,
    pub q: u64,
    pub size: u64,
    pub colength: u64,
    pub counts: BTreeMap<Verdict, u64>,
    /// Monomials whose determined verdict disagrees with the oracle.
    pub diffs: Vec<(Monomial, Verdict)>,
}

impl Reconciliation {
    pub fn members(&self) -> u64 {
        [Verdict::InViaI, Verdict::InViaII, Verdict::InViaIII]
            .iter()
            .map(|v| self.counts.get(v).copied().unwrap_or(0))
            .sum()
    }

    pub fn count(&self, v: Verdict) -> u64 {
        self.counts.get(&v).copied().unwrap_or(0)
    }

    /// Determined counts exceed what the oracle allows.
    pub fn count_contradiction(&self) -> bool {
        self.members() > self.size - self.colength || self.count(Verdict::NotIn) > self.colength
    }

    pub fn undetermined_fraction(&self) -> f64 {
        self.count(Verdict::Undetermined) as f64 / self.size as f64
    }
}

pub fn reconcile(f: &Trinomial, n: u32, depth: usize) -> Result<Reconciliation> {
    let cfg = OracleConfig {
        pivot: PivotOrder::Trailing,
        ..Default::default()
    };
    let elim = eliminate(f, n, &cfg)?;
    let q = elim.bx.q;
    let verdicts = classify_box(f, q, depth)?;
    let mut counts = BTreeMap::new();
    let mut diffs = Vec::new();
    for (a, mem) in &verdicts {
        *counts.entry(mem.verdict).or_insert(0) += 1;
        if mem.verdict != Verdict::Undetermined && mem.verdict.is_member() != elim.is_pivot(a) {
            diffs.push((a.clone(), mem.verdict));
        }
    }
    Ok(Reconciliation {
        poly: f.to_string(),
        n,
        q,
        size: verdicts.len() as u64,
        colength: elim.colength(),
        counts,
        diffs,
    })
}
