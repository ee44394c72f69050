//! Degree sequences: validation, summary statistics, child sequences and
//! finite-n diagnostics for the hub/variance hypotheses.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts `N_i` of vertices with `i` children. Zero counts are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCounts", into = "RawCounts")]
pub struct DegreeSequence {
    counts: BTreeMap<u64, u64>,
}

#[derive(Serialize, Deserialize)]
struct RawCounts {
    counts: BTreeMap<u64, u64>,
}

impl TryFrom<RawCounts> for DegreeSequence {
    type Error = Error;
    fn try_from(raw: RawCounts) -> Result<Self> {
        validate(&raw.counts)
    }
}

impl From<DegreeSequence> for RawCounts {
    fn from(ds: DegreeSequence) -> Self {
        RawCounts { counts: ds.counts }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub num_vertices: u64,
    pub num_edges: u64,
    pub sigma2: u64,
    pub max_degree: u64,
    pub child_sequence: Vec<u64>,
}

/// Checks the tree constraint `sum N_i = 1 + sum i N_i`.
pub fn validate(counts: &BTreeMap<u64, u64>) -> Result<DegreeSequence> {
    let counts: BTreeMap<u64, u64> = counts
        .iter()
        .filter(|(_, &n)| n > 0)
        .map(|(&i, &n)| (i, n))
        .collect();
    if counts.is_empty() {
        return Err(Error::Empty);
    }
    let vertices: u64 = counts.values().sum();
    let rhs: u64 = 1 + counts.iter().map(|(&i, &n)| i * n).sum::<u64>();
    if vertices != rhs {
        return Err(Error::ConstraintViolation { vertices, rhs });
    }
    Ok(DegreeSequence { counts })
}

impl DegreeSequence {
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Self> {
        validate(&pairs.iter().copied().collect())
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn count(&self, i: u64) -> u64 {
        self.counts.get(&i).copied().unwrap_or(0)
    }

    pub fn num_vertices(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn num_edges(&self) -> u64 {
        self.num_vertices() - 1
    }

    pub fn max_degree(&self) -> u64 {
        *self.counts.keys().next_back().expect("nonempty")
    }

    /// `sum (i-1)^2 N_i`.
    pub fn centered_square_sum(&self) -> f64 {
        self.counts
            .iter()
            .map(|(&i, &n)| {
                let d = i as f64 - 1.0;
                d * d * n as f64
            })
            .sum()
    }

    /// The child multiset in a fixed (non-increasing) order.
    pub fn child_multiset(&self) -> Vec<u64> {
        child_sequence(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["i", "count"])?;
        for (i, n) in &self.counts {
            wr.write_record([i.to_string(), n.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut counts = BTreeMap::new();
        for rec in rd.deserialize() {
            let (i, n): (u64, u64) = rec?;
            *counts.entry(i).or_insert(0) += n;
        }
        validate(&counts)
    }
}

pub fn stats(ds: &DegreeSequence) -> DegreeStats {
    let sigma2 = ds.counts.iter().map(|(&i, &n)| i * i.saturating_sub(1) * n).sum();
    DegreeStats {
        num_vertices: ds.num_vertices(),
        num_edges: ds.num_edges(),
        sigma2,
        max_degree: ds.max_degree(),
        child_sequence: child_sequence(ds),
    }
}

/// `d(1) >= d(2) >= ... >= d(V)`.
pub fn child_sequence(ds: &DegreeSequence) -> Vec<u64> {
    let mut out = Vec::with_capacity(ds.num_vertices() as usize);
    for (&i, &n) in ds.counts.iter().rev() {
        out.extend(std::iter::repeat_n(i, n as usize));
    }
    out
}

/// Rebuilds counts from any arrangement of a child multiset.
pub fn from_child_counts(children: &[u64]) -> Result<DegreeSequence> {
    let mut counts = BTreeMap::new();
    for &k in children {
        *counts.entry(k).or_insert(0) += 1;
    }
    validate(&counts)
}

pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaParams {
    pub sigma: f64,
    pub betas: Vec<f64>,
    pub normalized: bool,
    pub condition_b: bool,
    pub condition_a4: bool,
    pub divergent_beta: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ThetaOptions {
    pub strict: bool,
    /// Marks a parameter family whose beta sum diverges.
    pub divergent_beta: bool,
}

pub fn theta_check(sigma: f64, betas: &[f64], opts: ThetaOptions) -> Result<ThetaParams> {
    let bad = |x: f64| x.is_nan() || x < 0.0;
    if bad(sigma) || betas.iter().any(|&b| bad(b)) {
        return Err(Error::Invalid("sigma and betas must be nonnegative".into()));
    }
    let mut betas = betas.to_vec();
    betas.sort_by(|a, b| b.total_cmp(a));
    let total = sigma * sigma + betas.iter().map(|b| b * b).sum::<f64>();
    let normalized = (total - 1.0).abs() <= NORMALIZATION_TOL;
    if opts.strict && !normalized {
        return Err(Error::NotNormalized(total));
    }
    let beta_sum_finite = !opts.divergent_beta && betas.iter().sum::<f64>().is_finite();
    Ok(ThetaParams {
        sigma,
        betas,
        normalized,
        condition_b: sigma > 0.0 && beta_sum_finite,
        condition_a4: sigma > 0.0 || opts.divergent_beta,
        divergent_beta: opts.divergent_beta,
    })
}

impl ThetaParams {
    pub fn brownian() -> Self {
        theta_check(1.0, &[], ThetaOptions::default()).expect("valid")
    }

    pub fn recheck(&self, strict: bool) -> Result<ThetaParams> {
        theta_check(
            self.sigma,
            &self.betas,
            ThetaOptions { strict, divergent_beta: self.divergent_beta },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisRow {
    pub num_vertices: u64,
    pub b_n: f64,
    /// `d(i)/b_n` for `i <= 10`.
    pub hub_ratios: Vec<f64>,
    pub variance_ratio: f64,
    pub size_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub rows: Vec<HypothesisRow>,
    pub size: Verdict,
    pub hubs: Verdict,
    pub variance: Verdict,
    pub unbounded_variation: Verdict,
    pub finite_hubs: Verdict,
    /// `variance_ratio - sum hub_ratios^2` at the largest n.
    pub sigma2_hat: f64,
}

fn stabilizing(series: &[f64]) -> Verdict {
    if series.len() < 3 {
        return Verdict::Inconclusive;
    }
    let first = (series[1] - series[0]).abs();
    let last = (series[series.len() - 1] - series[series.len() - 2]).abs();
    if last <= first + 1e-12 {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    }
}

/// Tabulates finite-n ratios for a family of sequences; makes no limit claim.
pub fn hypothesis_report(family: &[(DegreeSequence, f64)]) -> Result<HypothesisReport> {
    if family.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: family.len() });
    }
    let rows: Vec<HypothesisRow> = family
        .iter()
        .map(|(ds, b)| {
            let d = top_children(ds, 10);
            HypothesisRow {
                num_vertices: ds.num_vertices(),
                b_n: *b,
                hub_ratios: d.iter().map(|&k| k as f64 / b).collect(),
                variance_ratio: ds.centered_square_sum() / (b * b),
                size_ratio: ds.num_vertices() as f64 / b,
            }
        })
        .collect();

    let size = if rows.windows(2).all(|w| w[1].num_vertices > w[0].num_vertices) {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    let hubs = {
        let verdicts: Vec<Verdict> = (0..10)
            .map(|i| {
                let s: Vec<f64> = rows.iter().map(|r| r.hub_ratios.get(i).copied().unwrap_or(0.0)).collect();
                stabilizing(&s)
            })
            .collect();
        if verdicts.iter().all(|v| *v == Verdict::Consistent) {
            Verdict::Consistent
        } else {
            Verdict::Inconclusive
        }
    };
    let variance = stabilizing(&rows.iter().map(|r| r.variance_ratio).collect::<Vec<_>>());
    let last = rows.last().expect("nonempty");
    let sigma2_hat = last.variance_ratio - last.hub_ratios.iter().map(|x| x * x).sum::<f64>();
    let unbounded_variation = if sigma2_hat > 1e-3 {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    };
    let finite_hubs = if sigma2_hat > 1e-3 && hubs == Verdict::Consistent {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    };
    Ok(HypothesisReport {
        rows,
        size,
        hubs,
        variance,
        unbounded_variation,
        finite_hubs,
        sigma2_hat,
    })
}

fn top_children(ds: &DegreeSequence, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    for (&i, &n) in ds.counts.iter().rev() {
        for _ in 0..n {
            if out.len() == k {
                return out;
            }
            out.push(i);
        }
    }
    out
}
