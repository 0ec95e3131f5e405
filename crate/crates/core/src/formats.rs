//! JSON and CSV encodings. Exact integers and rationals are written as
//! strings so no reader rounds them through a float.

use std::io::{Read, Write};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{HkError, Result};
use crate::estimate::{Candidate, Estimate, Probe, ProbeVerdict};
use crate::monomial::Monomial;
use crate::mutation::{Membership, Verdict};
use crate::oracle::{HkPoint, HkSeries};
use crate::reduced::{ClassKey, SequencePoint, Totals, UnsolvableReport};
use crate::trinomial::parse_monomial;

fn parse_u64(s: &str, what: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| HkError::InvalidArgument(format!("bad {what} `{s}`")))
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim()
        .parse()
        .map_err(|_| HkError::InvalidArgument(format!("bad rational `{s}`")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub n: u32,
    pub q: String,
    pub hk: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDocument {
    pub p: u32,
    pub poly: String,
    pub nvars: usize,
    pub points: Vec<PointRecord>,
    pub truncated: bool,
}

impl From<&HkSeries> for SeriesDocument {
    fn from(s: &HkSeries) -> Self {
        SeriesDocument {
            p: s.p,
            poly: s.poly.clone(),
            nvars: s.nvars,
            points: s
                .points
                .iter()
                .map(|pt| PointRecord {
                    n: pt.n,
                    q: pt.q.to_string(),
                    hk: pt.hk.to_string(),
                })
                .collect(),
            truncated: s.truncated,
        }
    }
}

impl SeriesDocument {
    pub fn to_series(&self) -> Result<HkSeries> {
        Ok(HkSeries {
            p: self.p,
            poly: self.poly.clone(),
            nvars: self.nvars,
            points: self
                .points
                .iter()
                .map(|r| {
                    Ok(HkPoint {
                        n: r.n,
                        q: parse_u64(&r.q, "q")?,
                        hk: parse_u64(&r.hk, "hk")?,
                    })
                })
                .collect::<Result<_>>()?,
            truncated: self.truncated,
        })
    }
}

pub fn write_series_json<W: Write>(s: &HkSeries, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, &SeriesDocument::from(s))?;
    Ok(())
}

pub fn read_series_json<R: Read>(r: R) -> Result<HkSeries> {
    serde_json::from_reader::<_, SeriesDocument>(r)?.to_series()
}

/// Header `n,q,hk`.
pub fn write_series_csv<W: Write>(points: &[HkPoint], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "q", "hk"])?;
    for pt in points {
        out.write_record([pt.n.to_string(), pt.q.to_string(), pt.hk.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_series_csv<R: Read>(r: R) -> Result<Vec<HkPoint>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(HkError::InvalidArgument(format!(
                "expected 3 fields, got {}",
                rec.len()
            )));
        }
        out.push(HkPoint {
            n: parse_u64(&rec[0], "n")? as u32,
            q: parse_u64(&rec[1], "q")?,
            hk: parse_u64(&rec[2], "hk")?,
        });
    }
    Ok(out)
}

/// Header `monomial,verdict,witness`; an absent witness is an empty field.
pub fn write_verdicts_csv<W: Write>(rows: &[(Monomial, Membership)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["monomial", "verdict", "witness"])?;
    for (a, m) in rows {
        out.write_record([
            a.to_string().as_str(),
            m.verdict.as_str(),
            m.witness.as_deref().unwrap_or(""),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_verdicts_csv<R: Read>(r: R, nvars: usize) -> Result<Vec<(Monomial, Membership)>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let mon = parse_monomial(&rec[0], nvars)?;
        let verdict: Verdict = rec[1].parse()?;
        let witness = (!rec[2].is_empty()).then(|| rec[2].to_string());
        out.push((mon, Membership { verdict, witness }));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub m: u32,
    pub count: u64,
    pub class_total: u64,
    /// `count/class_total`, reduced.
    pub ratio: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub key: ClassKey,
    pub label: String,
    pub size: u64,
    pub unsolvable: u64,
    pub unstable: u64,
    pub sequence: Vec<SequenceRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassesDocument {
    pub poly: String,
    pub p: u32,
    pub n: u32,
    pub bound: u32,
    /// Interval endpoints come from simulated walks, not a closed form.
    pub note: String,
    pub classes: Vec<ClassRecord>,
    pub totals: Totals,
}

impl From<&UnsolvableReport> for ClassesDocument {
    fn from(r: &UnsolvableReport) -> Self {
        ClassesDocument {
            poly: r.poly.clone(),
            p: r.p,
            n: r.n,
            bound: r.bound,
            note: "counts under reconstructed interval endpoints".into(),
            classes: r
                .classes
                .iter()
                .map(|c| ClassRecord {
                    key: c.key.clone(),
                    label: c.key.to_string(),
                    size: c.size,
                    unsolvable: c.unsolvable,
                    unstable: c.unstable,
                    sequence: c
                        .sequence
                        .iter()
                        .map(|pt: &SequencePoint| SequenceRecord {
                            m: pt.m,
                            count: pt.count,
                            class_total: pt.class_total,
                            ratio: pt.ratio().to_string(),
                        })
                        .collect(),
                })
                .collect(),
            totals: r.totals.clone(),
        }
    }
}

pub fn write_classes_json<W: Write>(r: &UnsolvableReport, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, &ClassesDocument::from(r))?;
    Ok(())
}

pub fn read_classes_json<R: Read>(r: R) -> Result<ClassesDocument> {
    Ok(serde_json::from_reader(r)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub num: String,
    pub den: String,
    pub distance: String,
    pub within_band: bool,
}

impl From<&Candidate> for CandidateRecord {
    fn from(c: &Candidate) -> Self {
        CandidateRecord {
            num: c.num.to_string(),
            den: c.den.to_string(),
            distance: c.distance.to_string(),
            within_band: c.within_band,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub n: u32,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub poly: String,
    pub p: u32,
    pub d: u32,
    pub estimate: String,
    /// Float rendering of `estimate`, for reading only.
    pub estimate_approx: f64,
    pub band: String,
    pub converged: bool,
    pub candidates: Vec<CandidateRecord>,
    pub verdict: ProbeVerdict,
    pub values: Vec<ValueRecord>,
    pub truncated: bool,
}

impl ReportDocument {
    pub fn new(series: &HkSeries, d: u32, est: &Estimate, probe: &Probe) -> Self {
        ReportDocument {
            poly: series.poly.clone(),
            p: series.p,
            d,
            estimate: est.estimate.to_string(),
            estimate_approx: crate::estimate::to_f64(&est.estimate),
            band: est.band.to_string(),
            converged: est.converged,
            candidates: probe.candidates.iter().map(CandidateRecord::from).collect(),
            verdict: probe.verdict,
            values: est
                .values
                .iter()
                .map(|(n, v)| ValueRecord {
                    n: *n,
                    value: v.to_string(),
                })
                .collect(),
            truncated: series.truncated,
        }
    }

    pub fn estimate(&self) -> Result<BigRational> {
        parse_rational(&self.estimate)
    }

    pub fn band(&self) -> Result<BigRational> {
        parse_rational(&self.band)
    }
}

pub fn write_report_json<W: Write>(r: &ReportDocument, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, r)?;
    Ok(())
}

pub fn read_report_json<R: Read>(r: R) -> Result<ReportDocument> {
    Ok(serde_json::from_reader(r)?)
}
