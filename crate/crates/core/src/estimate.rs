//! Hilbert-Kunz multiplicity estimates from a finite `HK(n)` series and a
//! rationality probe by continued fractions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{HkError, Result};
use crate::oracle::HkPoint;

/// `rho` never exceeds this in the tail bound.
pub fn rho_cap() -> BigRational {
    BigRational::new(9.into(), 10.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Estimate {
    /// `(n, HK(n) / p^(n d))`.
    pub values: Vec<(u32, BigRational)>,
    pub estimate: BigRational,
    /// `|d_n| / (1 - rho)`.
    pub band: BigRational,
    pub converged: bool,
}

impl Estimate {
    pub fn interval(&self) -> (BigRational, BigRational) {
        (&self.estimate - &self.band, &self.estimate + &self.band)
    }
}

/// `d` is the dimension of the hypersurface, usually `nvars - 1`.
pub fn estimate_multiplicity(points: &[HkPoint], p: u32, d: u32) -> Result<Estimate> {
    if points.len() < 3 {
        return Err(HkError::InvalidArgument(format!(
            "need at least 3 values of HK(n), got {}",
            points.len()
        )));
    }
    let values: Vec<(u32, BigRational)> = points
        .iter()
        .map(|pt| {
            let den = num_traits::pow(BigInt::from(p), (pt.n * d) as usize);
            (pt.n, BigRational::new(BigInt::from(pt.hk), den))
        })
        .collect();
    estimate_from_ratios(values)
}

/// As [`estimate_multiplicity`], from the normalised values `r_n` directly.
pub fn estimate_from_ratios(mut values: Vec<(u32, BigRational)>) -> Result<Estimate> {
    if values.len() < 3 {
        return Err(HkError::InvalidArgument(format!(
            "need at least 3 values of HK(n), got {}",
            values.len()
        )));
    }
    values.sort_by_key(|v| v.0);
    if values.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(HkError::InvalidArgument("repeated n in series".into()));
    }
    let k = values.len();
    let dn = &values[k - 1].1 - &values[k - 2].1;
    let dprev = &values[k - 2].1 - &values[k - 3].1;
    let (a, b) = (dn.abs(), dprev.abs());
    let rho = if b.is_zero() {
        if a.is_zero() {
            BigRational::zero()
        } else {
            rho_cap()
        }
    } else {
        (&a / &b).min(rho_cap())
    };
    let band = &a / (BigRational::one() - rho);
    let converged = a < b || (a.is_zero() && b.is_zero());
    Ok(Estimate {
        estimate: values[k - 1].1.clone(),
        values,
        band,
        converged,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub num: BigInt,
    pub den: BigInt,
    /// `|x - num/den|`, exact.
    pub distance: BigRational,
    pub within_band: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    ConsistentWithRational,
    NoSmallRational,
    Inconclusive,
}

impl ProbeVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbeVerdict::ConsistentWithRational => "consistent_with_rational",
            ProbeVerdict::NoSmallRational => "no_small_rational",
            ProbeVerdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for ProbeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProbeVerdict {
    type Err = HkError;
    fn from_str(s: &str) -> Result<Self> {
        [
            ProbeVerdict::ConsistentWithRational,
            ProbeVerdict::NoSmallRational,
            ProbeVerdict::Inconclusive,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
        .ok_or_else(|| HkError::InvalidArgument(format!("unknown probe verdict {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probe {
    /// Convergents and semiconvergents with denominator at most `q_max`,
    /// by increasing denominator.
    pub candidates: Vec<Candidate>,
    pub verdict: ProbeVerdict,
}

impl Probe {
    /// Smallest-denominator candidate inside the band.
    pub fn best(&self) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.within_band)
    }
}

fn partial_quotients(x: &BigRational) -> Vec<BigInt> {
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    let mut out = Vec::new();
    while !den.is_zero() {
        let a = num_integer::Integer::div_floor(&num, &den);
        let r = &num - &a * &den;
        out.push(a);
        num = den;
        den = r;
    }
    out
}

/// Searches `x` for small-denominator rationals within `band`.
///
/// Any `a/b` with `b <= q_max` inside the band forces a best approximation
/// of the first kind inside it too, and those are all convergents or
/// semiconvergents, so the enumeration is exhaustive for the verdict.
pub fn rationality_probe(
    x: &BigRational,
    band: &BigRational,
    q_max: u64,
    converged: bool,
) -> Result<Probe> {
    if q_max < 1 {
        return Err(HkError::InvalidArgument("q_max must be at least 1".into()));
    }
    let qmax = BigInt::from(q_max);
    let quotients = partial_quotients(x);
    let mut found: Vec<(BigInt, BigInt)> = Vec::new();
    // h_{k-2}, h_{k-1}, likewise k
    let (mut h2, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k2, mut k1) = (BigInt::one(), BigInt::zero());
    for (i, a) in quotients.iter().enumerate() {
        if i > 0 {
            // semiconvergents (j h_{k-1} + h_{k-2}) / (j k_{k-1} + k_{k-2}),
            // a/2 <= j < a; smaller j are never best approximations
            let mut j: BigInt = (a + 1u32) / 2u32;
            while &j < a {
                let k = &j * &k1 + &k2;
                if k > qmax {
                    break;
                }
                found.push((&j * &h1 + &h2, k));
                j += 1;
            }
        }
        let h = a * &h1 + &h2;
        let k = a * &k1 + &k2;
        if k > qmax {
            break;
        }
        found.push((h.clone(), k.clone()));
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
    }
    let mut candidates: Vec<Candidate> = found
        .into_iter()
        .filter(|(_, k)| k.is_positive() && *k <= qmax)
        .map(|(h, k)| {
            let distance = (x - BigRational::new(h.clone(), k.clone())).abs();
            let within_band = distance <= *band;
            Candidate {
                num: h,
                den: k,
                distance,
                within_band,
            }
        })
        .collect();
    candidates.sort_by(|a, b| a.den.cmp(&b.den).then(a.distance.cmp(&b.distance)));
    candidates.dedup_by(|a, b| a.num == b.num && a.den == b.den);
    let verdict = if candidates.iter().any(|c| c.within_band) {
        ProbeVerdict::ConsistentWithRational
    } else if converged {
        ProbeVerdict::NoSmallRational
    } else {
        ProbeVerdict::Inconclusive
    };
    Ok(Probe {
        candidates,
        verdict,
    })
}

/// `x` as a float, for display and sorting only.
pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
