use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::builders::{build_degree_sequence, BuilderKind};
use super::stats::{ks_two_sample, KsResult};
use crate::degree_sequence::{theta_check, DegreeSequence, ThetaOptions, ThetaParams};
use crate::error::{Error, Result};
use crate::excursion::{
    ei_bridge, frag_from_excursion, h_exc, index_distance, truncation_level, vervaat, GridPath,
};
use crate::fragmentation::{forest_components, integer_frag, l1_distance, RankedMasses};
use crate::lamination::{face_masses, lamination_at};
use crate::plane_tree::{graph_distance, height_process, to_lukasiewicz};
use crate::sampler::{attach_weights, sample_tree, uniform_edge_order, uniform_vertices, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Lukasiewicz,
    Heights,
    Fragmentation,
    Masses,
    Lamination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSpec {
    pub sigma: f64,
    #[serde(default)]
    pub betas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DsSource {
    Builder { builder: BuilderKind, n: u64 },
    File { ds_path: PathBuf, b_n: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub source: DsSource,
    pub theta: ThetaSpec,
    #[serde(default = "default_m")]
    pub m: usize,
    pub samples: usize,
    pub seeds: Vec<u64>,
    /// Fragmentation / lamination times `t`.
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Multiplier of `b_n` used as `a_n`.
    #[serde(default = "one")]
    pub a_n_factor: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

fn default_m() -> usize {
    crate::excursion::DEFAULT_GRID
}
fn default_times() -> Vec<f64> {
    vec![1.0]
}
fn one() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    0.01
}

impl ExperimentConfig {
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn theta(&self) -> Result<ThetaParams> {
        theta_check(self.theta.sigma, &self.theta.betas, ThetaOptions { strict: true, divergent_beta: false })
    }

    pub fn degree_sequence(&self, theta: &ThetaParams) -> Result<(DegreeSequence, f64)> {
        match &self.source {
            DsSource::Builder { builder, n } => build_degree_sequence(*builder, *n, theta),
            DsSource::File { ds_path, b_n } => {
                let s = std::fs::read_to_string(ds_path)?;
                Ok((DegreeSequence::from_json(&s)?, *b_n))
            }
        }
    }
}

/// Names of the compared statistics, in the order returned by the samplers.
pub fn statistic_names(kind: ExperimentKind, times: &[f64]) -> Vec<String> {
    match kind {
        ExperimentKind::Lukasiewicz => vec!["path_at_half".into()],
        ExperimentKind::Heights => vec!["height_uniform".into()],
        ExperimentKind::Fragmentation | ExperimentKind::Masses => {
            times.iter().map(|t| format!("largest_mass_t{t}")).collect()
        }
        ExperimentKind::Lamination => vec!["dist_root_u1".into(), "dist_u1_u2".into()],
    }
}

/// Statistics of one sampled tree and, for `Masses`, `(gap, bound)` per time.
pub type DiscreteSample = (Vec<f64>, Vec<(f64, f64)>);

/// Scaled discrete statistics of one sampled tree. For `Masses` the second
/// element lists, per time, the ℓ¹ gap between face masses and component
/// masses together with its bound.
pub fn discrete_statistics(
    kind: ExperimentKind,
    ds: &DegreeSequence,
    b_n: f64,
    theta: &ThetaParams,
    times: &[f64],
    a_n_factor: f64,
    seed: Seed,
) -> DiscreteSample {
    let tree = sample_tree(ds, seed.derive(10));
    let v = tree.len() as f64;
    let height_scale = theta.sigma * theta.sigma / 2.0 * b_n / v;
    let a_n = a_n_factor * b_n;
    match kind {
        ExperimentKind::Lukasiewicz => {
            let w = to_lukasiewicz(&tree);
            (vec![w.values[tree.len() / 2] as f64 / b_n], vec![])
        }
        ExperimentKind::Heights => {
            let h = height_process(&tree);
            let (vs, _) = uniform_vertices(&tree, 1, seed.derive(11));
            (vec![height_scale * h[vs[0]] as f64], vec![])
        }
        ExperimentKind::Fragmentation => {
            let w = attach_weights(&tree, seed.derive(12));
            let out = times
                .iter()
                .map(|&t| {
                    let s = 1.0 - t * a_n / v;
                    forest_components(&tree, &w, s).get(0) / v
                })
                .collect();
            (out, vec![])
        }
        ExperimentKind::Masses => {
            let order = uniform_edge_order(&tree, seed.derive(13));
            let mut stats = Vec::new();
            let mut gaps = Vec::new();
            for &t in times {
                let tt = t * a_n;
                let faces = face_masses(&lamination_at(&tree, &order, tt)).expect("tree chords do not cross");
                let comps = integer_frag(&tree, &order, tt).scaled(1.0 / v);
                stats.push(faces.get(0));
                gaps.push((l1_distance(&faces, &comps), 2.0 * (tt.floor() + 1.0) / v));
            }
            (stats, gaps)
        }
        ExperimentKind::Lamination => {
            let (vs, _) = uniform_vertices(&tree, 2, seed.derive(14));
            let mut rng = seed.derive(15).rng();
            let (a, b) = if rng.random::<bool>() { (vs[0], vs[1]) } else { (vs[1], vs[0]) };
            let r0 = graph_distance(&tree, 0, a) as f64;
            let r1 = graph_distance(&tree, a, b) as f64;
            (vec![height_scale * r0, height_scale * r1], vec![])
        }
    }
}

fn continuum_excursion(theta: &ThetaParams, m: usize, seed: Seed) -> GridPath {
    let k = truncation_level(theta, m);
    let x = ei_bridge(theta, k, m, seed.derive(20));
    vervaat(&x).expect("bridge endpoints are 0").0
}

/// Continuum counterparts of [`discrete_statistics`].
pub fn continuum_statistics(
    kind: ExperimentKind,
    theta: &ThetaParams,
    m: usize,
    times: &[f64],
    seed: Seed,
) -> Vec<f64> {
    let x = continuum_excursion(theta, m, seed);
    match kind {
        ExperimentKind::Lukasiewicz => vec![x.values[m / 2]],
        ExperimentKind::Heights => {
            let (h, _) = h_exc(&x);
            let u: f64 = seed.derive(21).rng().random();
            vec![h.step_at(u)]
        }
        ExperimentKind::Fragmentation | ExperimentKind::Masses => {
            times.iter().map(|&t| frag_from_excursion(&x, t).get(0)).collect()
        }
        ExperimentKind::Lamination => {
            let (h, _) = h_exc(&x);
            let mut rng = seed.derive(22).rng();
            let (u1, u2): (f64, f64) = (rng.random(), rng.random());
            let i1 = ((u1 * m as f64).floor() as usize).min(m);
            let i2 = ((u2 * m as f64).floor() as usize).min(m);
            vec![index_distance(&h, 0, i1), index_distance(&h, i1, i2)]
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Comparison {
    pub statistic: String,
    pub seed: u64,
    pub ks: KsResult,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCheck {
    pub seed: u64,
    pub time: f64,
    pub max_ratio: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config_hash: String,
    pub versions: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
    pub config: ExperimentConfig,
    pub num_vertices: u64,
    pub b_n: f64,
    pub truncation: usize,
    pub comparisons: Vec<Comparison>,
    pub bounds: Vec<BoundCheck>,
    pub passed: bool,
}

pub fn versions() -> BTreeMap<String, String> {
    let v = env!("CARGO_PKG_VERSION").to_string();
    ["degree_sequence", "plane_tree", "sampler", "fragmentation", "excursion", "lamination", "harness"]
        .iter()
        .map(|m| (m.to_string(), v.clone()))
        .collect()
}

pub fn tolerances(alpha: f64) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("ks_alpha".to_string(), alpha),
        ("theta_normalization".to_string(), crate::degree_sequence::NORMALIZATION_TOL),
        ("grid_eps".to_string(), crate::excursion::GRID_EPS),
    ])
}

fn cached_continuum(
    cfg: &ExperimentConfig,
    theta: &ThetaParams,
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let compute = || -> Vec<Vec<f64>> {
        (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| continuum_statistics(cfg.kind, theta, cfg.m, &cfg.times, Seed::new(seed, 1).replica(i)))
            .collect()
    };
    let Some(dir) = &cfg.cache_dir else {
        return Ok(compute());
    };
    let key = serde_json::to_vec(&(cfg.kind, &cfg.theta, cfg.m, k, seed, cfg.samples, &cfg.times))?;
    let name: String = Sha256::digest(&key).iter().take(12).map(|b| format!("{b:02x}")).collect();
    let path = dir.join(format!("continuum-{name}.json"));
    if let Ok(s) = std::fs::read_to_string(&path) {
        if let Ok(v) = serde_json::from_str(&s) {
            return Ok(v);
        }
    }
    let v = compute();
    std::fs::create_dir_all(dir)?;
    std::fs::write(&path, serde_json::to_string(&v)?)?;
    Ok(v)
}

/// Runs every seed of the experiment and, if an output directory is set,
/// writes `report.json` and `samples.csv` there.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.samples < 10 || cfg.seeds.is_empty() {
        return Err(Error::TooFewSamples { needed: 10, got: cfg.samples });
    }
    let theta = cfg.theta()?;
    let (ds, b_n) = cfg.degree_sequence(&theta)?;
    let k = truncation_level(&theta, cfg.m);
    let names = statistic_names(cfg.kind, &cfg.times);
    let mut comparisons = Vec::new();
    let mut bounds = Vec::new();
    let mut rows = Vec::new();
    for &seed in &cfg.seeds {
        let discrete: Vec<DiscreteSample> = (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| {
                discrete_statistics(cfg.kind, &ds, b_n, &theta, &cfg.times, cfg.a_n_factor, Seed::new(seed, 0).replica(i))
            })
            .collect();
        let continuum = cached_continuum(cfg, &theta, k, seed)?;
        for (c, name) in names.iter().enumerate() {
            let a: Vec<f64> = discrete.iter().map(|d| d.0[c]).collect();
            let b: Vec<f64> = continuum.iter().map(|d| d[c]).collect();
            let ks = ks_two_sample(&a, &b)?;
            comparisons.push(Comparison { statistic: name.clone(), seed, ks, passed: ks.p_value > cfg.alpha });
            for (i, (x, y)) in a.iter().zip(&b).enumerate() {
                rows.push(format!("{seed},{name},{i},{x:e},{y:e}"));
            }
        }
        if cfg.kind == ExperimentKind::Masses {
            for (j, &t) in cfg.times.iter().enumerate() {
                let max_ratio = discrete.iter().map(|d| d.1[j].0 / d.1[j].1).fold(0.0, f64::max);
                bounds.push(BoundCheck { seed, time: t, max_ratio, passed: max_ratio <= 1.0 });
            }
        }
    }
    let passed = comparisons.iter().all(|c| c.passed) && bounds.iter().all(|b| b.passed);
    let report = ExperimentReport {
        config_hash: cfg.hash(),
        versions: versions(),
        tolerances: tolerances(cfg.alpha),
        config: cfg.clone(),
        num_vertices: ds.num_vertices(),
        b_n,
        truncation: k,
        comparisons,
        bounds,
        passed,
    };
    if let Some(dir) = &cfg.output_dir {
        write_outputs(dir, &report, &rows)?;
    }
    Ok(report)
}

fn write_outputs(dir: &Path, report: &ExperimentReport, rows: &[String]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let report_path = dir.join("report.json");
    let samples_path = dir.join("samples.csv");
    let result = (|| -> Result<()> {
        std::fs::write(&report_path, serde_json::to_string_pretty(report)?)?;
        let mut s = String::from("seed,statistic,index,discrete,continuum\n");
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        std::fs::write(&samples_path, s)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&report_path);
        let _ = std::fs::remove_file(&samples_path);
    }
    result
}

/// Ranked masses of the continuum fragmentation at the given times.
pub fn continuum_masses(x: &GridPath, times: &[f64]) -> Vec<RankedMasses> {
    times.iter().map(|&t| frag_from_excursion(x, t)).collect()
}
