//! Monomials, Laurent monomials and the degree-lexicographic order.
//!
//! Variables are `x0, ..., x{m-1}`; later variables are larger, so the
//! order on variables is `x0 < x1 < ... < x{m-1}`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{HkError, Result};

/// A monomial `x0^e0 * ... * x{m-1}^e{m-1}` stored as its exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn one(m: usize) -> Self {
        Self(vec![0; m])
    }

    pub fn var(m: usize, i: usize, e: u32) -> Self {
        let mut v = vec![0; m];
        v[i] = e;
        Self(v)
    }

    #[inline]
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Componentwise divisibility `self | other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn to_laurent(&self) -> LaurentMonomial {
        LaurentMonomial(self.0.iter().map(|&e| e as i64).collect())
    }

    /// Same exponent vector with variables relabelled: position `i` of the
    /// result holds the exponent of variable `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Monomial {
        Monomial(perm.iter().map(|&j| self.0[j]).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_exponents(f, self.0.iter().map(|&e| e as i64))
    }
}

/// Degree first, then the exponent of the largest variable, then the next.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| deglex_unchecked(&self.0, &other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compare two monomials under the degree-lexicographic order.
pub fn deglex_compare(a: &Monomial, b: &Monomial) -> Result<Ordering> {
    if a.nvars() != b.nvars() {
        return Err(HkError::DimensionMismatch {
            expected: a.nvars(),
            found: b.nvars(),
        });
    }
    Ok(deglex_unchecked(&a.0, &b.0))
}

fn deglex_unchecked(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

/// An exponent vector with integer (possibly negative) entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentMonomial(Vec<i64>);

impl LaurentMonomial {
    pub fn new(exponents: Vec<i64>) -> Self {
        Self(exponents)
    }

    #[inline]
    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    /// Exponents all in `[0, q)`, i.e. a nonzero element of `S/(x^[q])`.
    pub fn in_box(&self, q: u64) -> bool {
        self.0.iter().all(|&e| e >= 0 && (e as u64) < q)
    }

    /// The monomial, if no exponent is negative.
    pub fn to_monomial(&self) -> Option<Monomial> {
        if self.is_nonnegative() {
            Some(Monomial(self.0.iter().map(|&e| e as u32).collect()))
        } else {
            None
        }
    }

    /// `self * mon^k` for an integer power `k`.
    pub fn mul_pow(&self, mon: &Monomial, k: i64) -> LaurentMonomial {
        LaurentMonomial(
            self.0
                .iter()
                .zip(mon.exponents())
                .map(|(&a, &b)| a + k * b as i64)
                .collect(),
        )
    }
}

impl fmt::Display for LaurentMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_exponents(f, self.0.iter().copied())
    }
}

fn write_exponents(f: &mut fmt::Formatter<'_>, exps: impl Iterator<Item = i64>) -> fmt::Result {
    let mut first = true;
    for (i, e) in exps.enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "x{i}")?;
        } else {
            write!(f, "x{i}^{e}")?;
        }
    }
    if first {
        f.write_str("1")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mon(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn deglex_examples() {
        assert_eq!(
            deglex_compare(&mon(&[2, 0]), &mon(&[1, 1])).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            deglex_compare(&mon(&[3, 0]), &mon(&[0, 2])).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            deglex_compare(&mon(&[1, 1]), &mon(&[1, 1])).unwrap(),
            Ordering::Equal
        );
        assert!(deglex_compare(&mon(&[1]), &mon(&[1, 1])).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(mon(&[0, 0]).to_string(), "1");
        assert_eq!(mon(&[2, 1]).to_string(), "x0^2*x1");
        assert_eq!(LaurentMonomial::new(vec![0, -2]).to_string(), "x1^-2");
    }

    proptest! {
        #[test]
        fn deglex_is_a_total_order(
            a in prop::collection::vec(0u32..6, 3),
            b in prop::collection::vec(0u32..6, 3),
            c in prop::collection::vec(0u32..6, 3),
        ) {
            let (a, b, c) = (mon(&a), mon(&b), mon(&c));
            let ab = deglex_compare(&a, &b).unwrap();
            prop_assert_eq!(ab.reverse(), deglex_compare(&b, &a).unwrap());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            if ab != Ordering::Greater && deglex_compare(&b, &c).unwrap() != Ordering::Greater {
                prop_assert_ne!(deglex_compare(&a, &c).unwrap(), Ordering::Greater);
            }
            // multiplicative
            prop_assert_eq!(deglex_compare(&a.mul(&c), &b.mul(&c)).unwrap(), ab);
        }
    }
}
