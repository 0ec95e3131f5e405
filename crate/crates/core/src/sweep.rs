//! Batch runs over a family of trinomials.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HkError, Result};
use crate::estimate::{estimate_multiplicity, rationality_probe, ProbeVerdict};
use crate::formats::{parse_rational, ReportDocument};
use crate::monomial::Monomial;
use crate::oracle::{hk_series, OracleConfig, DEFAULT_BUDGET};
use crate::trinomial::{parse_trinomial_in, Trinomial};

/// All monic trinomials in `vars` variables of degree at most `max_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub vars: usize,
    pub max_degree: u32,
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_p() -> u64 {
    2
}

fn default_q_max() -> u64 {
    100
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default = "default_p")]
    pub p: u64,
    pub n_max: u32,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_q_max")]
    pub q_max: u64,
    /// Dimension used to normalise `HK(n)`; defaults to `nvars - 1`.
    #[serde(default)]
    pub d: Option<u32>,
    #[serde(default)]
    pub polys: Vec<String>,
    #[serde(default)]
    pub generator: Option<Generator>,
}

impl SweepSpec {
    pub fn from_reader<R: Read>(r: R) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_reader(r)?;
        if spec.polys.is_empty() == spec.generator.is_none() {
            return Err(HkError::InvalidArgument(
                "a sweep needs exactly one of `polys` and `generator`".into(),
            ));
        }
        if spec.n_max == 0 {
            return Err(HkError::InvalidArgument("n_max must be >= 1".into()));
        }
        Ok(spec)
    }

    /// Members in file order, or in generation order. Unparseable entries
    /// are logged and dropped.
    pub fn members(&self) -> Result<Vec<Trinomial>> {
        if let Some(g) = &self.generator {
            return generate_family(g.vars, g.max_degree, self.p);
        }
        Ok(self
            .polys
            .iter()
            .filter_map(|s| match parse_trinomial_in(s, self.p, None) {
                Ok(f) => Some(f),
                Err(e) => {
                    log::warn!("skipping `{s}`: {e}");
                    None
                }
            })
            .collect())
    }
}

/// Every 3-subset of non-constant monomials of degree `<= max_degree`,
/// taken in deglex order, with unit coefficients.
pub fn generate_family(vars: usize, max_degree: u32, p: u64) -> Result<Vec<Trinomial>> {
    if vars == 0 || max_degree == 0 {
        return Err(HkError::InvalidArgument(
            "generator needs vars >= 1 and max_degree >= 1".into(),
        ));
    }
    let mut mons: Vec<Monomial> = Vec::new();
    let mut exps = vec![0u32; vars];
    loop {
        let deg: u32 = exps.iter().sum();
        if deg >= 1 && deg <= max_degree {
            mons.push(Monomial::new(exps.clone()));
        }
        // odometer over [0, max_degree]^vars
        let mut i = 0;
        while i < vars && exps[i] == max_degree {
            exps[i] = 0;
            i += 1;
        }
        if i == vars {
            break;
        }
        exps[i] += 1;
    }
    mons.sort();
    let mut out = Vec::new();
    for i in 0..mons.len() {
        for j in i + 1..mons.len() {
            for k in j + 1..mons.len() {
                let text = format!("{} + {} + {}", mons[i], mons[j], mons[k]);
                out.push(parse_trinomial_in(&text, p, Some(vars))?);
            }
        }
    }
    Ok(out)
}

pub fn run_member(f: &Trinomial, spec: &SweepSpec) -> Result<ReportDocument> {
    let cfg = OracleConfig {
        budget: spec.budget,
        ..Default::default()
    };
    let series = hk_series(f, spec.n_max, &cfg)?;
    let d = spec.d.unwrap_or(f.nvars() as u32 - 1);
    let est = estimate_multiplicity(&series.points, f.p(), d)?;
    let probe = rationality_probe(&est.estimate, &est.band, spec.q_max, est.converged)?;
    Ok(ReportDocument::new(&series, d, &est, &probe))
}

/// One report per member that ran to completion, in member order
/// whatever the thread count.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ReportDocument>> {
    let members = spec.members()?;
    let reports: Vec<Option<ReportDocument>> = members
        .par_iter()
        .map(|f| match run_member(f, spec) {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!("skipping {f}: {e}");
                None
            }
        })
        .collect();
    Ok(reports.into_iter().flatten().collect())
}

fn verdict_rank(v: ProbeVerdict) -> u8 {
    match v {
        ProbeVerdict::NoSmallRational => 0,
        ProbeVerdict::Inconclusive => 1,
        ProbeVerdict::ConsistentWithRational => 2,
    }
}

/// Header `poly,points,truncated,estimate,estimate_approx,band,converged,verdict,best`,
/// rows by verdict, then band, then polynomial.
pub fn write_summary_csv<W: Write>(reports: &[ReportDocument], w: W) -> Result<()> {
    let mut keyed = reports
        .iter()
        .map(|r| Ok((verdict_rank(r.verdict), parse_rational(&r.band)?, r)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| (a.0, &a.1, &a.2.poly).cmp(&(b.0, &b.1, &b.2.poly)));
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "poly",
        "points",
        "truncated",
        "estimate",
        "estimate_approx",
        "band",
        "converged",
        "verdict",
        "best",
    ])?;
    for (_, _, r) in keyed {
        let best = r
            .candidates
            .iter()
            .find(|c| c.within_band)
            .map_or(String::new(), |c| format!("{}/{}", c.num, c.den));
        out.write_record([
            r.poly.clone(),
            r.values.len().to_string(),
            r.truncated.to_string(),
            r.estimate.clone(),
            format!("{:.9}", r.estimate_approx),
            r.band.clone(),
            r.converged.to_string(),
            r.verdict.to_string(),
            best,
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_sizes() {
        // 9 monomials of degree 1..=3 in two variables
        assert_eq!(generate_family(2, 3, 2).unwrap().len(), 84);
        assert_eq!(generate_family(2, 1, 2).unwrap().len(), 0);
        assert_eq!(generate_family(3, 1, 2).unwrap().len(), 1);
    }

    #[test]
    fn spec_requires_one_source() {
        let both =
            r#"{"p":2,"n_max":3,"polys":["x0+x1+x2"],"generator":{"vars":2,"max_degree":2}}"#;
        assert!(SweepSpec::from_reader(both.as_bytes()).is_err());
        let none = r#"{"p":2,"n_max":3}"#;
        assert!(SweepSpec::from_reader(none.as_bytes()).is_err());
    }

    #[test]
    fn bad_members_are_skipped() {
        let text = r#"{"p":2,"n_max":3,"polys":["x0^2 + x0*x1 + x1^2","x0 + x0","x0 + x1 + x2"]}"#;
        let spec = SweepSpec::from_reader(text.as_bytes()).unwrap();
        let reports = run_sweep(&spec).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].poly, "x0^2 + x0*x1 + x1^2");
        let mut buf = Vec::new();
        write_summary_csv(&reports, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
    }
}
