//! The reduced system `B_{A,f} Y = e` for a monomial `A`.
//!
//! Rows and columns are mutants written as descriptors `(e1, e2, e3)` of
//! `A * [1]^e1 * [2]^e2 * [3]^e3`:
//!
//! | index                  | descriptor            |
//! |------------------------|-----------------------|
//! | Case III row           | `(1, -1, 0)`          |
//! | 31-row `(m, x)`        | `(m, x, -(m+x))`      |
//! | 21-row `(m, y)`        | `(m, -(m+y), y)`      |
//! | 31-column `(a, b)`     | `(a, b, -(a+b))`      |
//! | 21-column `(a, b)`     | `(a, -(a+b), b)`      |
//! | mixed column `(a, b)`  | `(a+b, -a, -b)`       |
//!
//! Columns are the convergent members of the truncated index grid. The
//! integers `M31`, `M21` and the row intervals `[a_m, b_m]`, `[p_m, q_m]`
//! come from walks of `A` and are what groups monomials into classes.
//! The interval endpoints are recovered by direct simulation of the
//! mutator walks, since no closed form is available.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{binom_mod_p, PrimeField};
use crate::monomial::{LaurentMonomial, Monomial};
use crate::mutation::{check_condition_i, check_condition_ii, is_convergent, ratio_walk};
use crate::oracle::{eliminate, FrobeniusBox, OracleConfig};
use crate::sparse::{is_consistent, SparseFpMatrix};
use crate::trinomial::{laurent_apply, Trinomial};

/// Default truncation bound for `m`, `x`, `y`, `a` and `b`.
pub const DEFAULT_BOUND: u32 = 12;
/// Extra truncation used to detect unstable verdicts.
pub const STABILITY_DELTA: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RowIndex {
    /// `A [-2]/[1]`.
    CaseIII,
    /// `A ([-3]/[1])^m [-3]/[2]` for `0 <= m < M31`.
    F31Low { m: u32 },
    /// `A ([-3]/[1])^m ([-3]/[2])^x` for `m >= M31`, `x` in `[a_m, b_m]`.
    F31High { m: u32, x: u32 },
    /// `A ([-2]/[1])^m [-2]/[3]` for `1 <= m < M21`.
    F21Low { m: u32 },
    /// `A ([-2]/[1])^m ([-2]/[3])^y` for `m >= M21`, `y` in `[p_m, q_m]`.
    F21High { m: u32, y: u32 },
}

impl RowIndex {
    pub fn descriptor(&self) -> [i64; 3] {
        match *self {
            RowIndex::CaseIII => [1, -1, 0],
            RowIndex::F31Low { m } => d31(m, 1),
            RowIndex::F31High { m, x } => d31(m, x),
            RowIndex::F21Low { m } => d21(m, 1),
            RowIndex::F21High { m, y } => d21(m, y),
        }
    }

    /// Solvability group: 0 for (i), 1 for (ii), 2 for (iii), 3 for (iv),
    /// paired with `m` for the per-`m` groups.
    pub fn group(&self) -> (u8, u32) {
        match *self {
            RowIndex::CaseIII | RowIndex::F31Low { .. } => (0, 0),
            RowIndex::F31High { m, .. } => (1, m),
            RowIndex::F21Low { .. } => (2, 0),
            RowIndex::F21High { m, .. } => (3, m),
        }
    }
}

fn d31(m: u32, x: u32) -> [i64; 3] {
    let (m, x) = (m as i64, x as i64);
    [m, x, -(m + x)]
}

fn d21(m: u32, y: u32) -> [i64; 3] {
    let (m, y) = (m as i64, y as i64);
    [m, -(m + y), y]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ColIndex {
    /// `A [-3]^(a+b) / ([1]^a [2]^b)`, `b >= 1`.
    Col31 { a: u32, b: u32 },
    /// `A [-2]^(a+b) / ([1]^a [3]^b)`, `b >= 1`.
    Col21 { a: u32, b: u32 },
    /// `A [-2]^a [-3]^b / [1]^(a+b)`, `a + b >= 1`.
    Mixed { a: u32, b: u32 },
}

impl ColIndex {
    pub fn descriptor(&self) -> [i64; 3] {
        match *self {
            ColIndex::Col31 { a, b } => {
                let (a, b) = (a as i64, b as i64);
                [a, b, -(a + b)]
            }
            ColIndex::Col21 { a, b } => {
                let (a, b) = (a as i64, b as i64);
                [a, -(a + b), b]
            }
            ColIndex::Mixed { a, b } => {
                let (a, b) = (a as i64, b as i64);
                [a + b, -a, -b]
            }
        }
    }

    /// Every column of the truncated grid, shapes de-duplicated.
    pub fn grid(bound: u32) -> Vec<ColIndex> {
        let mut out = Vec::new();
        for a in 0..=bound {
            for b in 0..=bound {
                if b >= 1 {
                    out.push(ColIndex::Col31 { a, b });
                    out.push(ColIndex::Col21 { a, b });
                }
                if a + b >= 1 {
                    out.push(ColIndex::Mixed { a, b });
                }
            }
        }
        out
    }
}

impl fmt::Display for ColIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColIndex::Col31 { a, b } => write!(f, "31:{a},{b}"),
            ColIndex::Col21 { a, b } => write!(f, "21:{a},{b}"),
            ColIndex::Mixed { a, b } => write!(f, "mx:{a},{b}"),
        }
    }
}

fn order_key(d: [i64; 3]) -> (i64, i64, i64) {
    (d[2], d[1], d[0])
}

/// Inputs of [`entry_of`] besides the indices. `None` stands for a walk
/// that never converges, treated as an infinite `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EntryContext {
    pub m31: Option<u32>,
    pub m21: Option<u32>,
    pub p: u32,
}

fn below(m: u32, bound: Option<u32>) -> bool {
    bound.is_none_or(|b| m < b)
}

/// Entry of `B_{A,f}` at `(row, col)`, reduced mod `p`.
pub fn entry_of(row: &RowIndex, col: &ColIndex, ctx: &EntryContext) -> u32 {
    let field = PrimeField::new(ctx.p as u64).expect("prime modulus");
    let signed = |sign_exp: i64, n: i64, k: i64| -> u32 {
        let c = binom_mod_p(n, k, ctx.p);
        if c == 0 {
            0
        } else {
            field.mul(field.sign(sign_exp), c)
        }
    };
    // own-family entry shared by Case I and Case II
    let own = |m: u32, x: u32, a: u32, b: u32| -> u32 {
        if a <= m && b >= x {
            binom_mod_p((b - x) as i64, (m - a) as i64, ctx.p)
        } else {
            0
        }
    };
    // (-1)^(a+b-m) C(a+b-m-1, a) when b != 0 and m < M
    let cross = |m: u32, a: u32, b: u32, mbound: Option<u32>| -> u32 {
        if !below(m, mbound) || b == 0 {
            0
        } else {
            let (m, a, b) = (m as i64, a as i64, b as i64);
            signed(a + b - m, a + b - m - 1, a)
        }
    };
    match *row {
        RowIndex::CaseIII => match *col {
            ColIndex::Mixed { a, b } => {
                let (a, b) = (a as i64, b as i64);
                signed(a + b + 1, a + b, a)
            }
            _ => 0,
        },
        RowIndex::F31Low { m } | RowIndex::F31High { m, .. } => {
            let x = match *row {
                RowIndex::F31High { x, .. } => x,
                _ => 1,
            };
            match *col {
                ColIndex::Col31 { a, b } => own(m, x, a, b),
                ColIndex::Mixed { a, b } => cross(m, a, b, ctx.m31),
                ColIndex::Col21 { .. } => 0,
            }
        }
        RowIndex::F21Low { m } | RowIndex::F21High { m, .. } => {
            let y = match *row {
                RowIndex::F21High { y, .. } => y,
                _ => 1,
            };
            match *col {
                ColIndex::Col21 { a, b } => own(m, y, a, b),
                // the mixed column read as A[-3]^a'[-2]^b'/[1]^(a'+b')
                ColIndex::Mixed { a, b } => cross(m, b, a, ctx.m21),
                ColIndex::Col31 { .. } => 0,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ratio31or21 {
    /// `M_A(-3/1)`: walk by `[1]/[3]`.
    ThreeOverOne,
    /// `M_A(-2/1)`: walk by `[1]/[2]`.
    TwoOverOne,
}

pub fn compute_m_ratio(a: &Monomial, f: &Trinomial, which: Ratio31or21, q: u64) -> Option<u32> {
    match which {
        Ratio31or21::ThreeOverOne => ratio_walk(a, f, 2, q),
        Ratio31or21::TwoOverOne => ratio_walk(a, f, 1, q),
    }
}

/// `(m, lo, hi)`: for fixed `m`, the smallest and largest `x` in
/// `1..=bound` at which the mutator walk is a box monomial.
pub type Interval = (u32, u32, u32);

// x such that A [1]^m [2]^(x-1) / [3]^(m+x) is a box monomial (31), or
// A [1]^m [3]^(y-1) / [2]^(m+y) (21).
fn mutator_interval(
    a: &LaurentMonomial,
    f: &Trinomial,
    q: u64,
    which: Ratio31or21,
    m: u32,
    bound: u32,
) -> Option<(u32, u32)> {
    let (grow, shrink) = match which {
        Ratio31or21::ThreeOverOne => (1, 2),
        Ratio31or21::TwoOverOne => (2, 1),
    };
    let hits: Vec<u32> = (1..=bound)
        .filter(|&x| {
            let mut e = [0i64; 3];
            e[0] = m as i64;
            e[grow] = x as i64 - 1;
            e[shrink] = -((m + x) as i64);
            laurent_apply(a, f, e[0], e[1], e[2]).in_box(q)
        })
        .collect();
    Some((*hits.first()?, *hits.last()?))
}

/// The integers attached to `A` at a given truncation: `M31`, `M21` and
/// the interval endpoints. Together with the set of grid columns that are
/// not convergent they determine the truncated system completely.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassKey {
    pub m31: Option<u32>,
    pub m21: Option<u32>,
    pub intervals31: Vec<Interval>,
    pub intervals21: Vec<Interval>,
    /// Grid columns dropped because their value is a box monomial.
    pub excluded_columns: Vec<ColIndex>,
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<u32>| v.map_or("-".to_string(), |v| v.to_string());
        let iv = |v: &[Interval]| {
            v.iter()
                .map(|(m, lo, hi)| format!("{m}:[{lo},{hi}]"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(
            f,
            "M31={} M21={} ab={{{}}} pq={{{}}} excl={{{}}}",
            opt(self.m31),
            opt(self.m21),
            iv(&self.intervals31),
            iv(&self.intervals21),
            self.excluded_columns
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        )
    }
}

pub fn class_key(a: &Monomial, f: &Trinomial, q: u64, bound: u32) -> ClassKey {
    let m31 = compute_m_ratio(a, f, Ratio31or21::ThreeOverOne, q);
    let m21 = compute_m_ratio(a, f, Ratio31or21::TwoOverOne, q);
    let base = a.to_laurent();
    let intervals = |mm: Option<u32>, which| -> Vec<Interval> {
        let Some(mm) = mm else { return Vec::new() };
        (mm.max(1)..=bound)
            .filter_map(|m| {
                mutator_interval(&base, f, q, which, m, bound).map(|(lo, hi)| (m, lo, hi))
            })
            .collect()
    };
    let excluded_columns = ColIndex::grid(bound)
        .into_iter()
        .filter(|c| {
            let d = c.descriptor();
            !is_convergent(&laurent_apply(&base, f, d[0], d[1], d[2]), q)
        })
        .collect();
    ClassKey {
        m31,
        m21,
        intervals31: intervals(m31, Ratio31or21::ThreeOverOne),
        intervals21: intervals(m21, Ratio31or21::TwoOverOne),
        excluded_columns,
    }
}

/// Rows in emission order: descending in `(e3, e2, e1)`, with the Case III
/// row (which carries `e_A`) last.
pub fn enumerate_rows(key: &ClassKey, bound: u32) -> Vec<RowIndex> {
    let mut rows = Vec::new();
    if let Some(m31) = key.m31 {
        rows.extend((0..m31.min(bound + 1)).map(|m| RowIndex::F31Low { m }));
        for &(m, lo, hi) in &key.intervals31 {
            rows.extend((lo..=hi).map(|x| RowIndex::F31High { m, x }));
        }
    }
    if let Some(m21) = key.m21 {
        rows.extend((1..m21.min(bound + 1)).map(|m| RowIndex::F21Low { m }));
        for &(m, lo, hi) in &key.intervals21 {
            rows.extend((lo..=hi).map(|y| RowIndex::F21High { m, y }));
        }
    }
    rows.sort_by(|r, s| {
        order_key(s.descriptor())
            .cmp(&order_key(r.descriptor()))
            .then(r.cmp(s))
    });
    rows.push(RowIndex::CaseIII);
    rows
}

#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub base: Monomial,
    pub f: Trinomial,
    pub q: u64,
    pub bound: u32,
    pub key: ClassKey,
    pub rows: Vec<RowIndex>,
    /// Ascending in `(e3, e2, e1)`.
    pub cols: Vec<ColIndex>,
    pub matrix: SparseFpMatrix,
    /// `[0, ..., 0, e_A]`.
    pub e_vector: Vec<u32>,
    pub ctx: EntryContext,
}

pub fn build_reduced_system(a: &Monomial, f: &Trinomial, q: u64, bound: u32) -> ReducedSystem {
    let key = class_key(a, f, q, bound);
    build_from_key(a, f, q, bound, key)
}

fn build_from_key(a: &Monomial, f: &Trinomial, q: u64, bound: u32, key: ClassKey) -> ReducedSystem {
    let rows = enumerate_rows(&key, bound);
    let mut cols: Vec<ColIndex> = ColIndex::grid(bound)
        .into_iter()
        .filter(|c| key.excluded_columns.binary_search(c).is_err())
        .collect();
    cols.sort_by(|c, d| {
        order_key(c.descriptor())
            .cmp(&order_key(d.descriptor()))
            .then(c.cmp(d))
    });
    let ctx = EntryContext {
        m31: key.m31,
        m21: key.m21,
        p: f.p(),
    };
    let mut matrix = SparseFpMatrix::new(rows.len(), cols.len(), f.p());
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            let v = entry_of(r, c, &ctx);
            if v != 0 {
                matrix.set(i, j, v).expect("index in range");
            }
        }
    }
    let mut e_vector = vec![0; rows.len()];
    *e_vector.last_mut().expect("Case III row") = 1;
    ReducedSystem {
        base: a.clone(),
        f: f.clone(),
        q,
        bound,
        key,
        rows,
        cols,
        matrix,
        e_vector,
        ctx,
    }
}

impl ReducedSystem {
    /// Row indices per solvability group, in group order.
    pub fn groups(&self) -> BTreeMap<(u8, u32), Vec<usize>> {
        let mut g: BTreeMap<(u8, u32), Vec<usize>> = BTreeMap::new();
        for (i, r) in self.rows.iter().enumerate() {
            g.entry(r.group()).or_default().push(i);
        }
        g
    }

    /// Every group subsystem consistent at this truncation.
    pub fn is_solvable(&self) -> bool {
        self.groups().values().all(|rows| {
            let sub = self.matrix.select_rows(rows);
            let rhs: Vec<u32> = rows.iter().map(|&i| self.e_vector[i]).collect();
            is_consistent(&sub, &rhs)
        })
    }

    /// Verdict here and at `bound + STABILITY_DELTA`.
    pub fn decide(&self) -> Solvability {
        let wider = build_reduced_system(&self.base, &self.f, self.q, self.bound + STABILITY_DELTA);
        match (self.is_solvable(), wider.is_solvable()) {
            (true, true) => Solvability::Solvable,
            (false, false) => Solvability::Unsolvable,
            _ => Solvability::Unstable,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Solvability {
    Solvable,
    Unsolvable,
    Unstable,
}

pub fn decide_solvability(sys: &ReducedSystem) -> Solvability {
    sys.decide()
}

/// How a box monomial was handled by [`count_unsolvable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    ViaI,
    ViaII,
    /// Neither `[2]` nor `[3]` divides `A`.
    NoDivisor,
    System(Solvability),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePoint {
    pub m: u32,
    pub count: u64,
    pub class_total: u64,
}

impl SequencePoint {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.count, self.class_total)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSummary {
    pub key: ClassKey,
    pub size: u64,
    pub unsolvable: u64,
    pub unstable: u64,
    /// Unsolvable counts with the truncation bound set to `m`.
    pub sequence: Vec<SequencePoint>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub monomials: u64,
    pub via_i: u64,
    pub via_ii: u64,
    pub no_divisor: u64,
    pub solvable: u64,
    pub unsolvable: u64,
    pub unstable: u64,
    /// `no_divisor + unsolvable`: the count this pipeline attributes to
    /// `HK(n)`.
    pub predicted_colength: u64,
    pub oracle_colength: u64,
    /// Monomials where the pipeline and the oracle's standard set disagree
    /// (unstable ones excluded).
    pub diffs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnsolvableReport {
    pub poly: String,
    pub p: u32,
    pub n: u32,
    pub bound: u32,
    pub classes: Vec<ClassSummary>,
    pub totals: Totals,
}

pub fn stage_of(a: &Monomial, f: &Trinomial, q: u64, bound: u32) -> Stage {
    if check_condition_i(a, f) {
        Stage::ViaI
    } else if check_condition_ii(a, f, q).is_some() {
        Stage::ViaII
    } else if !f.mon(1).divides(a) && !f.mon(2).divides(a) {
        Stage::NoDivisor
    } else {
        Stage::System(build_reduced_system(a, f, q, bound).decide())
    }
}

pub fn count_unsolvable(
    f: &Trinomial,
    n: u32,
    bound: u32,
    budget: u64,
) -> Result<UnsolvableReport> {
    let elim = eliminate(
        f,
        n,
        &OracleConfig {
            budget,
            ..Default::default()
        },
    )?;
    let bx: FrobeniusBox = elim.bx;
    let q = bx.q;
    let size = bx.size_u128() as usize;
    let mut mons: Vec<Monomial> = (0..size).map(|i| bx.monomial(i)).collect();
    mons.sort();

    struct Row {
        mon: Monomial,
        stage: Stage,
        key: Option<ClassKey>,
        seq: Vec<bool>,
    }
    let rows: Vec<Row> = mons
        .into_par_iter()
        .map(|a| {
            let stage = stage_of(&a, f, q, bound);
            let (key, seq) = match stage {
                Stage::System(_) => (
                    Some(class_key(&a, f, q, bound)),
                    (1..=bound)
                        .map(|m| !build_reduced_system(&a, f, q, m).is_solvable())
                        .collect(),
                ),
                _ => (None, Vec::new()),
            };
            Row {
                mon: a,
                stage,
                key,
                seq,
            }
        })
        .collect();

    let mut totals = Totals {
        monomials: rows.len() as u64,
        oracle_colength: elim.colength(),
        ..Default::default()
    };
    let mut classes: BTreeMap<ClassKey, ClassSummary> = BTreeMap::new();
    for r in &rows {
        let predicted_standard = match r.stage {
            Stage::ViaI => {
                totals.via_i += 1;
                Some(false)
            }
            Stage::ViaII => {
                totals.via_ii += 1;
                Some(false)
            }
            Stage::NoDivisor => {
                totals.no_divisor += 1;
                Some(true)
            }
            Stage::System(s) => {
                let key = r.key.clone().expect("system stage has a key");
                let c = classes.entry(key.clone()).or_insert_with(|| ClassSummary {
                    key,
                    size: 0,
                    unsolvable: 0,
                    unstable: 0,
                    sequence: (1..=bound)
                        .map(|m| SequencePoint {
                            m,
                            count: 0,
                            class_total: 0,
                        })
                        .collect(),
                });
                c.size += 1;
                for (pt, &uns) in c.sequence.iter_mut().zip(&r.seq) {
                    pt.count += u64::from(uns);
                }
                match s {
                    Solvability::Solvable => {
                        totals.solvable += 1;
                        Some(false)
                    }
                    Solvability::Unsolvable => {
                        totals.unsolvable += 1;
                        c.unsolvable += 1;
                        Some(true)
                    }
                    Solvability::Unstable => {
                        totals.unstable += 1;
                        c.unstable += 1;
                        None
                    }
                }
            }
        };
        if let Some(std) = predicted_standard {
            if std == elim.is_pivot(&r.mon) {
                totals.diffs.push(format!(
                    "{}: pipeline={} oracle={}",
                    r.mon,
                    if std { "standard" } else { "member" },
                    if std { "member" } else { "standard" }
                ));
            }
        }
    }
    for c in classes.values_mut() {
        for pt in &mut c.sequence {
            pt.class_total = c.size;
        }
    }
    totals.predicted_colength = totals.no_divisor + totals.unsolvable;
    Ok(UnsolvableReport {
        poly: f.to_string(),
        p: f.p(),
        n,
        bound,
        classes: classes.into_values().collect(),
        totals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trinomial::parse_trinomial;

    fn mon(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    fn ctx(m31: u32, m21: u32, p: u32) -> EntryContext {
        EntryContext {
            m31: Some(m31),
            m21: Some(m21),
            p,
        }
    }

    #[test]
    fn entry_examples() {
        let c = ctx(3, 3, 2);
        // Case I, m=1, x=1, column (1,2): C(1, 0)
        assert_eq!(
            entry_of(
                &RowIndex::F31High { m: 1, x: 1 },
                &ColIndex::Col31 { a: 1, b: 2 },
                &c
            ),
            1
        );
        // Case III, column (0,0): -C(0,0) = -1
        assert_eq!(
            entry_of(&RowIndex::CaseIII, &ColIndex::Mixed { a: 0, b: 0 }, &c),
            1
        );
        assert_eq!(
            entry_of(
                &RowIndex::CaseIII,
                &ColIndex::Mixed { a: 0, b: 0 },
                &ctx(3, 3, 5)
            ),
            4
        );
        // m >= M31 kills the mixed columns
        for a in 0..5 {
            for b in 0..5 {
                assert_eq!(
                    entry_of(
                        &RowIndex::F31High { m: 3, x: 2 },
                        &ColIndex::Mixed { a, b },
                        &c
                    ),
                    0
                );
            }
        }
        // cross-family zeros
        assert_eq!(
            entry_of(
                &RowIndex::F31Low { m: 0 },
                &ColIndex::Col21 { a: 0, b: 1 },
                &c
            ),
            0
        );
        assert_eq!(
            entry_of(
                &RowIndex::F21Low { m: 1 },
                &ColIndex::Col31 { a: 0, b: 1 },
                &c
            ),
            0
        );
        assert_eq!(
            entry_of(&RowIndex::CaseIII, &ColIndex::Col31 { a: 1, b: 1 }, &c),
            0
        );
    }

    #[test]
    fn row_count_formula() {
        let key = ClassKey {
            m31: Some(1),
            m21: Some(3),
            intervals31: vec![(1, 2, 4), (2, 1, 1)],
            intervals21: vec![(3, 1, 2)],
            excluded_columns: vec![],
        };
        let rows = enumerate_rows(&key, 6);
        // 1 + M31 + (M21 - 1) + (3 + 1) + 2
        assert_eq!(rows.len(), 1 + 1 + 2 + 4 + 2);
        assert_eq!(
            rows.iter()
                .filter(|r| matches!(r, RowIndex::F31Low { .. }))
                .count(),
            1
        );
        assert_eq!(rows.last(), Some(&RowIndex::CaseIII));
    }

    #[test]
    fn m_ratio_walks() {
        // f = x0 + x1 + x2: [1]=x0, [3]=x2. A = x2^2, q = 4
        //   M=1: A/[3] = x2 >= 0, A*[1]/[3] = x0*x2 in box
        //   M=2: A*[1]/[3]^2 = x0 >= 0, A*([1]/[3])^2 = x0^2 in box
        //   M=3: A*[1]^2/[3]^3 = x0^2*x2^-1 < 0, and never recovers
        let f = parse_trinomial("x0 + x1 + x2", 2).unwrap();
        assert_eq!(
            compute_m_ratio(&mon(&[0, 0, 2]), &f, Ratio31or21::ThreeOverOne, 4),
            None
        );
        // A = x0^2*x2^2: M=2 reaches x0^4, convergent, and A*[1]/[3]^2 = x0^3 >= 0
        assert_eq!(
            compute_m_ratio(&mon(&[2, 0, 2]), &f, Ratio31or21::ThreeOverOne, 4),
            Some(2)
        );
        // A = x0^3*x2: one step gives x0^4
        assert_eq!(
            compute_m_ratio(&mon(&[3, 0, 1]), &f, Ratio31or21::ThreeOverOne, 4),
            Some(1)
        );
        // larger box delays convergence
        let a = mon(&[1, 0, 3]);
        let m4 = compute_m_ratio(&a, &f, Ratio31or21::ThreeOverOne, 4);
        let m8 = compute_m_ratio(&a, &f, Ratio31or21::ThreeOverOne, 8);
        assert_eq!(m4, Some(3));
        assert!(m8.is_none_or(|m| m >= 3));
    }

    #[test]
    fn regeneration_and_zero_blocks() {
        let f = parse_trinomial("x0^2 + x0*x1 + x1^3", 2).unwrap();
        for a in [mon(&[0, 3]), mon(&[1, 3]), mon(&[3, 3]), mon(&[1, 1])] {
            let sys = build_reduced_system(&a, &f, 4, 6);
            for (i, r) in sys.rows.iter().enumerate() {
                for (j, c) in sys.cols.iter().enumerate() {
                    assert_eq!(sys.matrix.get(i, j), entry_of(r, c, &sys.ctx));
                    let case_i = matches!(r, RowIndex::F31Low { .. } | RowIndex::F31High { .. });
                    let case_ii = matches!(r, RowIndex::F21Low { .. } | RowIndex::F21High { .. });
                    if case_i && matches!(c, ColIndex::Col21 { .. }) {
                        assert_eq!(sys.matrix.get(i, j), 0);
                    }
                    if case_ii && matches!(c, ColIndex::Col31 { .. }) {
                        assert_eq!(sys.matrix.get(i, j), 0);
                    }
                }
            }
            assert_eq!(*sys.e_vector.last().unwrap(), 1);
            assert_eq!(sys.e_vector.iter().filter(|&&v| v != 0).count(), 1);
        }
    }

    #[test]
    fn trivial_solvability_cases() {
        let f = parse_trinomial("x0^2 + x0*x1 + x1^3", 2).unwrap();
        let mut sys = build_reduced_system(&mon(&[1, 3]), &f, 4, 4);
        sys.matrix = SparseFpMatrix::new(sys.rows.len(), sys.cols.len(), 2);
        assert!(!sys.is_solvable());
        sys.e_vector.iter_mut().for_each(|v| *v = 0);
        assert!(sys.is_solvable());
    }

    #[test]
    fn class_keys_determine_systems() {
        let f = parse_trinomial("x0^2 + x0*x1 + x1^3", 2).unwrap();
        let q = 4;
        let bx = FrobeniusBox::with_side(q, 2);
        let mut seen: BTreeMap<ClassKey, ReducedSystem> = BTreeMap::new();
        for i in 0..16 {
            let a = bx.monomial(i);
            let sys = build_reduced_system(&a, &f, q, 5);
            assert_eq!(sys.key, class_key(&a, &f, q, 5));
            if let Some(prev) = seen.get(&sys.key) {
                assert_eq!(prev.rows, sys.rows);
                assert_eq!(prev.cols, sys.cols);
                assert_eq!(prev.matrix, sys.matrix);
            } else {
                seen.insert(sys.key.clone(), sys);
            }
        }
    }

    #[test]
    fn count_report_is_consistent() {
        let f = parse_trinomial("x0^2 + x0*x1 + x1^3", 2).unwrap();
        let rep = count_unsolvable(&f, 2, 6, 1 << 20).unwrap();
        let t = &rep.totals;
        assert_eq!(t.monomials, 16);
        assert_eq!(
            t.via_i + t.via_ii + t.no_divisor + t.solvable + t.unsolvable + t.unstable,
            16
        );
        assert!(t.predicted_colength <= 16);
        let class_sum: u64 = rep.classes.iter().map(|c| c.size).sum();
        assert_eq!(class_sum, t.solvable + t.unsolvable + t.unstable);
        for c in &rep.classes {
            assert_eq!(c.sequence.len(), 6);
            assert!(c
                .sequence
                .iter()
                .all(|p| p.class_total == c.size && p.count <= c.size));
            if c.unsolvable == 0 && c.unstable == 0 {
                assert_eq!(c.sequence.last().unwrap().count, 0);
            }
        }
    }
}
