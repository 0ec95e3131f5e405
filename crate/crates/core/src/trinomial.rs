//! Trinomials over `F_p`: parsing, canonical term order and the
//! classification of variables by their degrees in the three terms.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{HkError, Result};
use crate::field::PrimeField;
use crate::monomial::{LaurentMonomial, Monomial};

/// A nonzero scalar times a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: u32,
    pub mon: Monomial,
}

/// `f = [1] + [2] + [3]` with `[1] < [2] < [3]` under deglex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trinomial {
    field: PrimeField,
    terms: [Term; 3],
}

impl Trinomial {
    /// Build from three terms in any order. Terms are sorted so that
    /// `t1 < t2 < t3`.
    pub fn from_terms(field: PrimeField, terms: Vec<Term>) -> Result<Self> {
        if terms.len() != 3 {
            return Err(HkError::TermCount(terms.len()));
        }
        let m = terms[0].mon.nvars();
        for t in &terms {
            if t.mon.nvars() != m {
                return Err(HkError::DimensionMismatch {
                    expected: m,
                    found: t.mon.nvars(),
                });
            }
            if t.mon.is_one() {
                return Err(HkError::ConstantTerm);
            }
            if t.coeff % field.p() == 0 {
                return Err(HkError::ZeroCoefficient {
                    term: t.mon.to_string(),
                    p: field.p(),
                });
            }
        }
        let mut terms = terms;
        terms.sort_by(|a, b| a.mon.cmp(&b.mon));
        if terms[0].mon == terms[1].mon || terms[1].mon == terms[2].mon {
            return Err(HkError::TermCount(2));
        }
        for t in &mut terms {
            t.coeff %= field.p();
        }
        let [t1, t2, t3]: [Term; 3] = terms.try_into().expect("three terms");
        Ok(Self {
            field,
            terms: [t1, t2, t3],
        })
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.field.p()
    }

    /// Number of ambient variables.
    #[inline]
    pub fn nvars(&self) -> usize {
        self.terms[0].mon.nvars()
    }

    /// Terms in increasing order: index 0 is `[1]`, index 2 is `[3]`.
    #[inline]
    pub fn terms(&self) -> &[Term; 3] {
        &self.terms
    }

    #[inline]
    pub fn mon(&self, idx: usize) -> &Monomial {
        &self.terms[idx].mon
    }

    #[inline]
    pub fn coeff(&self, idx: usize) -> u32 {
        self.terms[idx].coeff
    }

    pub fn max_degree(&self) -> u64 {
        self.terms.iter().map(|t| t.mon.degree()).max().unwrap_or(0)
    }

    /// Relabel variables: variable `perm[i]` of `self` becomes variable `i`.
    pub fn permute_vars(&self, perm: &[usize]) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff,
                mon: t.mon.permuted(perm),
            })
            .collect();
        Self::from_terms(self.field, terms)
    }
}

impl fmt::Display for Trinomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if t.coeff != 1 {
                write!(f, "{}*", t.coeff)?;
            }
            write!(f, "{}", t.mon)?;
        }
        Ok(())
    }
}

/// Parse `term (+ term)*` where a term is `*`-separated integers and
/// factors `x<idx>[^exp]`. The ambient variable count is the largest index
/// used plus one.
pub fn parse_trinomial(text: &str, p: u64) -> Result<Trinomial> {
    parse_trinomial_in(text, p, None)
}

/// As [`parse_trinomial`], with an explicit ambient variable count.
pub fn parse_trinomial_in(text: &str, p: u64, nvars: Option<usize>) -> Result<Trinomial> {
    let field = PrimeField::new(p)?;
    let raw = Parser::new(text).terms()?;
    let max_var = raw
        .iter()
        .flat_map(|t| t.exps.keys().copied())
        .max()
        .map_or(0, |v| v + 1);
    let m = match nvars {
        Some(m) if m < max_var => {
            return Err(HkError::DimensionMismatch {
                expected: m,
                found: max_var,
            })
        }
        Some(m) => m,
        None => max_var,
    };
    if m == 0 {
        return Err(HkError::ConstantTerm);
    }
    // merge like terms after reducing coefficients
    let mut merged: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
    for t in &raw {
        let mut exps = vec![0u32; m];
        for (&v, &e) in &t.exps {
            exps[v] = e;
        }
        let mon = Monomial::new(exps.clone());
        if mon.is_one() {
            return Err(HkError::ConstantTerm);
        }
        let c = t.coeff.rem_euclid(p as i64);
        if c == 0 {
            return Err(HkError::ZeroCoefficient {
                term: t.text.clone(),
                p: field.p(),
            });
        }
        *merged.entry(exps).or_insert(0) += c;
    }
    let terms: Vec<Term> = merged
        .into_iter()
        .filter_map(|(e, c)| {
            let c = field.reduce_i64(c);
            (c != 0).then(|| Term {
                coeff: c,
                mon: Monomial::new(e),
            })
        })
        .collect();
    Trinomial::from_terms(field, terms)
}

/// Reads a monomial in the form printed by `Monomial`'s `Display`
/// (`x0^2*x1`, or `1`).
pub fn parse_monomial(text: &str, nvars: usize) -> Result<Monomial> {
    let mut parser = Parser::new(text);
    let t = parser.term()?;
    if parser.peek().is_some() {
        return parser.err("trailing input after monomial");
    }
    if t.coeff != 1 {
        return Err(HkError::Parse {
            pos: 0,
            msg: format!("`{text}` has a coefficient"),
        });
    }
    let mut exps = vec![0u32; nvars];
    for (&v, &e) in &t.exps {
        if v >= nvars {
            return Err(HkError::DimensionMismatch {
                expected: nvars,
                found: v + 1,
            });
        }
        exps[v] = e;
    }
    Ok(Monomial::new(exps))
}

struct RawTerm {
    coeff: i64,
    exps: BTreeMap<usize, u32>,
    text: String,
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(HkError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        self.src[start..self.pos]
            .parse()
            .or_else(|_| self.err("number out of range"))
    }

    fn terms(mut self) -> Result<Vec<RawTerm>> {
        let mut out = vec![self.term()?];
        while let Some(c) = self.peek() {
            if c != b'+' {
                return self.err(format!("unexpected `{}`", c as char));
            }
            self.pos += 1;
            out.push(self.term()?);
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<RawTerm> {
        self.skip_ws();
        let start = self.pos;
        let mut coeff: i64 = 1;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            coeff = -1;
        }
        let mut exps = BTreeMap::new();
        loop {
            match self.peek() {
                Some(b'x') => {
                    self.pos += 1;
                    let idx = self.number()? as usize;
                    let mut e = 1u64;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        e = self.number()?;
                    }
                    let e = u32::try_from(e).or_else(|_| self.err("exponent out of range"))?;
                    *exps.entry(idx).or_insert(0u32) += e;
                }
                Some(c) if c.is_ascii_digit() => {
                    let n = self.number()?;
                    let n = i64::try_from(n).or_else(|_| self.err("coefficient out of range"))?;
                    coeff = coeff
                        .checked_mul(n)
                        .map_or_else(|| self.err("coefficient out of range"), Ok)?;
                }
                _ => return self.err("expected a coefficient or a variable"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        exps.retain(|_, e| *e > 0);
        Ok(RawTerm {
            coeff,
            exps,
            text: self.src[start..self.pos].trim().to_string(),
        })
    }
}

/// Partition of the variables occurring in `f` into extra variables (in
/// `[3]` only) and negative/zero/positive difference variables, judged by
/// the sign of `deg_[2](v) - deg_[1](v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableClassification {
    /// `E_q, ..., E_1`: non-increasing degree in `f`.
    pub extra: Vec<usize>,
    pub negative: Vec<usize>,
    pub zero: Vec<usize>,
    pub positive: Vec<usize>,
    /// Relabelling that makes the classes contiguous in the order
    /// `E, N, Z, P`; `permutation[i]` is the original index of new variable
    /// `i`. Variables absent from `f` come last.
    pub permutation: Vec<usize>,
}

pub fn classify_variables(f: &Trinomial) -> VariableClassification {
    let m = f.nvars();
    let deg = |t: usize, v: usize| f.mon(t).exponents()[v] as i64;
    let mut extra = Vec::new();
    let mut negative = Vec::new();
    let mut zero = Vec::new();
    let mut positive = Vec::new();
    let mut absent = Vec::new();
    for v in 0..m {
        let (d1, d2, d3) = (deg(0, v), deg(1, v), deg(2, v));
        if d1 == 0 && d2 == 0 {
            if d3 > 0 {
                extra.push(v);
            } else {
                absent.push(v);
            }
            continue;
        }
        match (d2 - d1).signum() {
            -1 => negative.push(v),
            0 => zero.push(v),
            _ => positive.push(v),
        }
    }
    extra.sort_by(|&a, &b| deg(2, b).cmp(&deg(2, a)).then(a.cmp(&b)));
    let permutation = extra
        .iter()
        .chain(&negative)
        .chain(&zero)
        .chain(&positive)
        .chain(&absent)
        .copied()
        .collect();
    VariableClassification {
        extra,
        negative,
        zero,
        positive,
        permutation,
    }
}

/// Exponent vector of `A * [1]^i * [2]^j * [3]^k`.
pub fn laurent_apply(
    a: &LaurentMonomial,
    f: &Trinomial,
    i: i64,
    j: i64,
    k: i64,
) -> LaurentMonomial {
    a.mul_pow(f.mon(0), i)
        .mul_pow(f.mon(1), j)
        .mul_pow(f.mon(2), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mon(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn parse_orders_terms() {
        let f = parse_trinomial("x0^2 + x0*x1 + x1^2", 2).unwrap();
        assert_eq!(f.mon(0), &mon(&[2, 0]));
        assert_eq!(f.mon(1), &mon(&[1, 1]));
        assert_eq!(f.mon(2), &mon(&[0, 2]));

        let g = parse_trinomial("x2 + x0 + x1", 2).unwrap();
        assert_eq!(g.mon(0), &mon(&[1, 0, 0]));
        assert_eq!(g.mon(1), &mon(&[0, 1, 0]));
        assert_eq!(g.mon(2), &mon(&[0, 0, 1]));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_trinomial("x0^2 + 3*x0*x1 + x1^2", 3),
            Err(HkError::ZeroCoefficient { .. })
        ));
        assert!(matches!(
            parse_trinomial("x0 + x1", 2),
            Err(HkError::TermCount(2))
        ));
        assert!(matches!(
            parse_trinomial("x0 + x1 + x0 + x2", 3),
            Err(HkError::TermCount(3)) | Ok(_)
        ));
        // x0 + x0 merges to 2*x0 = 0 mod 2
        assert!(matches!(
            parse_trinomial("x0 + x0 + x1 + x2", 2),
            Err(HkError::TermCount(2))
        ));
        assert!(matches!(
            parse_trinomial("x0 + x1 + 1", 2),
            Err(HkError::ConstantTerm)
        ));
        assert!(matches!(
            parse_trinomial("x0 + x1 + x2", 4),
            Err(HkError::NotPrime(4))
        ));
        assert!(matches!(
            parse_trinomial("x0 + + x1", 2),
            Err(HkError::Parse { .. })
        ));
        assert!(matches!(
            parse_trinomial("x0 + y + x1", 2),
            Err(HkError::Parse { .. })
        ));
        assert!(parse_trinomial_in("x0 + x1 + x2", 2, Some(2)).is_err());
    }

    #[test]
    fn parse_coefficients_and_whitespace() {
        let f = parse_trinomial(" 4 * x0 ^ 2 + 2*x0*x1 +x1*x1*x1", 3).unwrap();
        assert_eq!(f.coeff(0), 1);
        assert_eq!(f.coeff(1), 2);
        assert_eq!(f.mon(2), &mon(&[0, 3]));
        let g = parse_trinomial("x0 + x1 + x2", 2).unwrap();
        assert_eq!(g.to_string(), "x0 + x1 + x2");
        let h = parse_trinomial_in("x0 + x1 + x0*x1", 2, Some(3)).unwrap();
        assert_eq!(h.nvars(), 3);
    }

    #[test]
    fn classification_examples() {
        let c = classify_variables(&parse_trinomial("x0^2 + x0*x1 + x1^2", 2).unwrap());
        assert!(c.extra.is_empty());
        assert_eq!(c.negative, vec![0]);
        assert_eq!(c.positive, vec![1]);

        let c = classify_variables(&parse_trinomial("x0 + x1 + x2", 2).unwrap());
        assert_eq!(c.extra, vec![2]);
        assert_eq!(c.negative, vec![0]);
        assert_eq!(c.positive, vec![1]);

        let c = classify_variables(&parse_trinomial("x0^2 + x0*x1 + x0*x2", 2).unwrap());
        assert_eq!(c.extra, vec![2]);
        assert_eq!(c.negative, vec![0]);
        assert_eq!(c.positive, vec![1]);
        assert_eq!(c.permutation, vec![2, 0, 1]);

        let c = classify_variables(
            &parse_trinomial_in("x0*x1 + x1*x2 + x2^3*x3^2*x4", 2, Some(6)).unwrap(),
        );
        assert_eq!(c.extra, vec![3, 4]);
        assert_eq!(c.zero, vec![1]);
        assert_eq!(c.permutation.len(), 6);
        assert_eq!(c.permutation[5], 5);
    }

    #[test]
    fn laurent_examples() {
        let f = parse_trinomial("x0^2 + x0*x1 + x1^2", 2).unwrap();
        let a = mon(&[1, 1]).to_laurent();
        assert_eq!(laurent_apply(&a, &f, 0, 0, 0), a);
        assert_eq!(laurent_apply(&a, &f, 1, -1, 0).exponents(), &[2, 0]);
        let one = mon(&[0, 0]).to_laurent();
        assert_eq!(laurent_apply(&one, &f, 0, 0, -1).exponents(), &[0, -2]);
    }

    fn term_text(e: &[u32]) -> String {
        mon(e).to_string()
    }

    proptest! {
        #[test]
        fn laurent_action_is_invertible(
            a in prop::collection::vec(-5i64..5, 2),
            i in -4i64..4, j in -4i64..4, k in -4i64..4,
        ) {
            let f = parse_trinomial("x0^2 + x0*x1 + x1^3", 2).unwrap();
            let a = LaurentMonomial::new(a);
            let b = laurent_apply(&a, &f, i, j, k);
            prop_assert_eq!(laurent_apply(&b, &f, -i, -j, -k), a);
        }

        #[test]
        fn classification_ignores_term_order(
            e in prop::collection::vec(prop::collection::vec(0u32..3, 3), 3),
            perm in Just([0usize, 1, 2]).prop_shuffle(),
        ) {
            let texts: Vec<String> = e.iter().map(|v| term_text(v)).collect();
            let fwd = texts.join(" + ");
            let shuffled = perm.iter().map(|&i| texts[i].clone()).collect::<Vec<_>>().join(" + ");
            let a = parse_trinomial_in(&fwd, 2, Some(3));
            let b = parse_trinomial_in(&shuffled, 2, Some(3));
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(&a, &b);
                    let ca = classify_variables(&a);
                    let mut support: Vec<usize> = ca.extra.iter().chain(&ca.negative).chain(&ca.zero).chain(&ca.positive).copied().collect();
                    support.sort();
                    let expect: Vec<usize> = (0..3).filter(|&v| (0..3).any(|t| a.mon(t).exponents()[v] > 0)).collect();
                    prop_assert_eq!(support, expect);
                    prop_assert_eq!(ca, classify_variables(&b));
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "parse outcome depends on term order"),
            }
        }
    }
}
