//! Grid representations of exchangeable-increment bridges, their Vervaat
//! excursions, the reflected height process and the associated
//! fragmentation and tree metric.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::degree_sequence::ThetaParams;
use crate::error::{Error, Result};
use crate::fragmentation::RankedMasses;
use crate::plane_tree::{assemble_splits, four_point_splits, ReducedTree};
use crate::sampler::Seed;

pub const DEFAULT_GRID: usize = 1 << 14;
/// Threshold for return times and constancy detection.
pub const GRID_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    /// First grid index whose value includes the jump.
    pub index: usize,
    pub size: f64,
    pub rank: usize,
    /// Exact jump time in `[0,1)`.
    pub location: f64,
}

/// Values at `k/m` for `k = 0..=m`, with annotated jumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    pub m: usize,
    pub values: Vec<f64>,
    pub jumps: Vec<Jump>,
}

impl GridPath {
    pub fn new(values: Vec<f64>) -> Self {
        let m = values.len() - 1;
        GridPath { m, values, jumps: Vec::new() }
    }

    /// Samples a function of `s in [0,1]` at `k/m`.
    pub fn from_fn<F: Fn(f64) -> f64>(m: usize, f: F) -> Self {
        Self::new((0..=m).map(|k| f(k as f64 / m as f64)).collect())
    }

    pub fn index_of(&self, x: f64) -> usize {
        ((x * self.m as f64).round().max(0.0) as usize).min(self.m)
    }

    /// Value at the grid point nearest to `x`.
    pub fn at(&self, x: f64) -> f64 {
        self.values[self.index_of(x)]
    }

    /// Value of the step function `s -> values[floor(s m)]`.
    pub fn step_at(&self, x: f64) -> f64 {
        let k = ((x * self.m as f64).floor().max(0.0) as usize).min(self.m);
        self.values[k]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["s", "value"])?;
        for (k, v) in self.values.iter().enumerate() {
            wr.write_record([format!("{}", k as f64 / self.m as f64), format!("{v:e}")])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn jumps_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.jumps)?)
    }
}

/// Reflection of the excursion after the jump of rank `rank`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectedProcess {
    pub rank: usize,
    pub start: usize,
    pub end: usize,
    /// Values on `start..=end`.
    pub values: Vec<f64>,
}

/// Brownian bridge on `k/m`: Gaussian random walk minus its linear interpolant.
pub fn brownian_bridge(m: usize, seed: Seed) -> GridPath {
    assert!(m >= 1);
    let mut rng = seed.rng();
    let sd = 1.0 / (m as f64).sqrt();
    let mut values = Vec::with_capacity(m + 1);
    let mut b = 0.0;
    values.push(0.0);
    for _ in 0..m {
        let z: f64 = rng.sample(StandardNormal);
        b += sd * z;
        values.push(b);
    }
    let end = values[m];
    for (k, v) in values.iter_mut().enumerate() {
        *v -= end * k as f64 / m as f64;
    }
    values[m] = 0.0;
    GridPath::new(values)
}

/// Smallest `K` with `sum_{i>K} beta_i < 1/m`.
pub fn truncation_level(theta: &ThetaParams, m: usize) -> usize {
    let total: f64 = theta.betas.iter().sum();
    let mut tail = total;
    for (k, b) in theta.betas.iter().enumerate() {
        if tail < 1.0 / m as f64 {
            return k;
        }
        tail -= b;
    }
    theta.betas.len()
}

/// `X(t) = sigma B(t) + sum_{i<=K} beta_i (1{U_i <= t} - t)` on the grid.
///
/// Jump `i` is snapped to step `ceil(U_i m)`, which carries exactly `beta_i`
/// and nothing else, so `X(j-)` is the grid value before the jump. The other
/// steps carry Gaussian noise of variance `sigma^2/m` plus a common drift
/// closing the bridge.
pub fn ei_bridge(theta: &ThetaParams, k: usize, m: usize, seed: Seed) -> GridPath {
    assert!(k <= theta.betas.len() && m >= 1);
    let mut rng = seed.derive(2).rng();
    let mut jumps = Vec::with_capacity(k);
    let mut step_jump = vec![0.0; m + 1];
    for (i, &beta) in theta.betas[..k].iter().enumerate() {
        let u: f64 = 1.0 - rng.random::<f64>();
        let index = ((u * m as f64).ceil() as usize).clamp(1, m);
        step_jump[index] += beta;
        jumps.push(Jump { index, size: beta, rank: i + 1, location: u });
    }
    let mut inc = vec![0.0; m + 1];
    let mut noise_rng = seed.derive(1).rng();
    let sd = theta.sigma / (m as f64).sqrt();
    let mut free = 0usize;
    let mut total = 0.0;
    for kk in 1..=m {
        if step_jump[kk] > 0.0 {
            inc[kk] = step_jump[kk];
        } else {
            let z: f64 = noise_rng.sample(StandardNormal);
            inc[kk] = sd * z;
            free += 1;
        }
        total += inc[kk];
    }
    if free > 0 {
        let drift = total / free as f64;
        for kk in 1..=m {
            if step_jump[kk] == 0.0 {
                inc[kk] -= drift;
            }
        }
    }
    let mut values = Vec::with_capacity(m + 1);
    let mut x = 0.0;
    values.push(0.0);
    for &d in &inc[1..] {
        x += d;
        values.push(x);
    }
    values[m] = 0.0;
    jumps.sort_by_key(|j| j.index);
    GridPath { m, values, jumps }
}

/// Cyclic rotation at the first grid argmin.
pub fn vervaat(x: &GridPath) -> Result<(GridPath, usize)> {
    let m = x.m;
    let (a, b) = (x.values[0], x.values[m]);
    if a.abs() > GRID_EPS || b.abs() > GRID_EPS {
        return Err(Error::NotABridge(a, b));
    }
    let mut rho = 0;
    for k in 1..m {
        if x.values[k] < x.values[rho] {
            rho = k;
        }
    }
    let base = x.values[rho];
    let mut values = Vec::with_capacity(m + 1);
    for k in 0..m {
        values.push(x.values[(k + rho) % m] - base);
    }
    values.push(0.0);
    let shift = rho as f64 / m as f64;
    let mut jumps: Vec<Jump> = x
        .jumps
        .iter()
        .map(|j| {
            let mut index = (j.index + m - rho) % m;
            if index == 0 {
                index = m;
            }
            Jump { index, location: (j.location - shift).rem_euclid(1.0), ..j.clone() }
        })
        .collect();
    jumps.sort_by_key(|j| j.index);
    Ok((GridPath { m, values, jumps }, rho))
}

/// `H = X - sum_i R_i` with `R_i(u) = inf_{[t_i,u]} X - X(t_i-)` on `[t_i, T_i)`.
pub fn h_exc(xexc: &GridPath) -> (GridPath, Vec<ReflectedProcess>) {
    let m = xexc.m;
    let x = &xexc.values;
    let mut h = x.clone();
    // Left limits X(k-) at the jump indices.
    let mut left = x.clone();
    for j in &xexc.jumps {
        left[j.index.min(m)] -= j.size;
    }
    let mut reflected = Vec::with_capacity(xexc.jumps.len());
    for j in &xexc.jumps {
        let start = j.index;
        if start >= m {
            reflected.push(ReflectedProcess { rank: j.rank, start, end: start, values: vec![j.size] });
            continue;
        }
        let base = x[start] - j.size;
        let mut values = Vec::new();
        let mut running = f64::INFINITY;
        let mut k = start;
        loop {
            if k > start && (left[k] <= base + GRID_EPS || k == m) {
                values.push(0.0);
                break;
            }
            running = running.min(if k == start { x[k] } else { left[k] });
            let r = if k == start { j.size } else { (running - base).clamp(0.0, j.size) };
            values.push(r);
            h[k] -= r;
            k += 1;
        }
        reflected.push(ReflectedProcess { rank: j.rank, start, end: k, values });
    }
    (GridPath { m, values: h, jumps: Vec::new() }, reflected)
}

/// Ranked lengths of the constancy intervals of the running infimum of
/// `g(s) - t s`.
pub fn frag_from_excursion(g: &GridPath, t: f64) -> RankedMasses {
    let m = g.m;
    let mf = m as f64;
    let mut inf = g.values[0];
    let mut last = 0usize;
    let mut lengths = Vec::new();
    for k in 1..=m {
        let y = g.values[k] - t * k as f64 / mf;
        if y < inf - GRID_EPS {
            lengths.push(k - last);
            last = k;
        }
        if y < inf {
            inf = y;
        }
    }
    if m > last {
        lengths.push(m - last);
    }
    RankedMasses::new(lengths.into_iter().map(|l| l as f64 / mf).collect())
}

/// `r_f(x,y) = f(x) + f(y) - 2 inf_{[x,y]} f` at the nearest grid points.
pub fn tree_distance(f: &GridPath, x: f64, y: f64) -> f64 {
    index_distance(f, f.index_of(x), f.index_of(y))
}

pub fn index_distance(f: &GridPath, a: usize, b: usize) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let min = f.values[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min);
    f.values[a] + f.values[b] - 2.0 * min
}

/// Distance matrix of the root (grid point 0) and `points` under `r_f`.
pub fn distance_matrix(f: &GridPath, points: &[f64]) -> Vec<Vec<f64>> {
    let mut idx = vec![0];
    idx.extend(points.iter().map(|&x| f.index_of(x)));
    idx.iter()
        .map(|&a| idx.iter().map(|&b| index_distance(f, a, b)).collect())
        .collect()
}

/// Tree spanned by the root and `points` under `r_f`, from four-point splits
/// exceeding `tol`. Pass points in increasing order for the plane order to
/// follow the lexicographic order of the continuum tree.
pub fn continuum_reduced_tree(f: &GridPath, points: &[f64], tol: f64) -> Result<ReducedTree> {
    if points.len() > 12 {
        return Err(Error::Invalid("at most 12 points".into()));
    }
    reduced_tree_from_distances(&distance_matrix(f, points), tol)
}

pub fn reduced_tree_from_distances(dist: &[Vec<f64>], tol: f64) -> Result<ReducedTree> {
    let splits = four_point_splits(dist);
    assemble_splits(dist.len() - 1, &splits.positive(tol))
}
