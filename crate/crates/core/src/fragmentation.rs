//! Edge-deletion fragmentation of plane trees.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::plane_tree::{prim_order, LatticePath, PlaneTree};
use crate::sampler::EdgeWeights;

/// Non-increasing finite list of positive masses.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RankedMasses {
    pub values: Vec<f64>,
}

impl RankedMasses {
    /// Sorts non-increasing and drops zeros.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.retain(|&x| x != 0.0);
        values.sort_by(|a, b| b.total_cmp(a));
        RankedMasses { values }
    }

    pub fn from_sizes(sizes: &[usize]) -> Self {
        Self::new(sizes.iter().map(|&s| s as f64).collect())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        RankedMasses { values: self.values.iter().map(|x| x * factor).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `j`-th largest entry (0-based), 0 past the support.
    pub fn get(&self, j: usize) -> f64 {
        self.values.get(j).copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn top(&self, k: usize) -> Vec<f64> {
        (0..k).map(|j| self.get(j)).collect()
    }
}

pub fn l1_distance(a: &RankedMasses, b: &RankedMasses) -> f64 {
    let n = a.len().max(b.len());
    (0..n).map(|j| (a.get(j) - b.get(j)).abs()).sum()
}

/// `max_j |a_j - b_j|` with zero padding.
pub fn sup_distance(a: &RankedMasses, b: &RankedMasses) -> f64 {
    let n = a.len().max(b.len());
    (0..n).map(|j| (a.get(j) - b.get(j)).abs()).fold(0.0, f64::max)
}

/// Component sizes when only the edges with `keep(child)` are retained.
fn component_sizes<F: Fn(usize) -> bool>(tree: &PlaneTree, keep: F) -> Vec<usize> {
    let n = tree.len();
    let mut acc = vec![1usize; n];
    let mut out = Vec::new();
    for v in (1..n).rev() {
        if keep(v) {
            let p = tree.parent(v).unwrap();
            acc[p] += acc[v];
        } else {
            out.push(acc[v]);
        }
    }
    out.push(acc[0]);
    out
}

/// Ranked component sizes of the forest keeping edges with `w <= s`.
pub fn forest_components(tree: &PlaneTree, weights: &EdgeWeights, s: f64) -> RankedMasses {
    RankedMasses::from_sizes(&component_sizes(tree, |v| weights.get(v) <= s))
}

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }

    /// Merges the sets of `a` and `b`; returns `(smaller root, larger root)`
    /// before the merge, or `None` if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] > self.size[rb] || (self.size[ra] == self.size[rb] && ra < rb) {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[ra] = rb;
        self.size[rb] += self.size[ra];
        Some((ra, rb))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeEvent {
    pub weight: f64,
    pub smaller_root: usize,
    pub larger_root: usize,
    pub size_a: usize,
    pub size_b: usize,
    pub merged_size: usize,
}

/// Coalescence history of the forests `f(s)` as `s` increases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeLog {
    pub num_vertices: usize,
    pub events: Vec<MergeEvent>,
}

pub fn build_merge_log(tree: &PlaneTree, weights: &EdgeWeights) -> MergeLog {
    let n = tree.len();
    let mut edges: Vec<usize> = (1..n).collect();
    edges.sort_by(|&a, &b| weights.get(a).total_cmp(&weights.get(b)));
    let mut ds = DisjointSet::new(n);
    let mut events = Vec::with_capacity(n.saturating_sub(1));
    for v in edges {
        let p = tree.parent(v).unwrap();
        let (sa, sb) = (ds.size_of(v), ds.size_of(p));
        let (small, large) = ds.union(v, p).expect("tree edges join distinct components");
        let (size_a, size_b) = if sa <= sb { (sa, sb) } else { (sb, sa) };
        events.push(MergeEvent {
            weight: weights.get(v),
            smaller_root: small,
            larger_root: large,
            size_a,
            size_b,
            merged_size: sa + sb,
        });
    }
    MergeLog { num_vertices: n, events }
}

impl MergeLog {
    /// Ranked sizes of `f(s)`.
    pub fn sizes_at(&self, s: f64) -> RankedMasses {
        let mut multiset: BTreeMap<usize, usize> = BTreeMap::new();
        multiset.insert(1, self.num_vertices);
        let remove = |m: &mut BTreeMap<usize, usize>, k: usize| {
            let c = m.get_mut(&k).expect("size present");
            *c -= 1;
            if *c == 0 {
                m.remove(&k);
            }
        };
        for e in self.events.iter().take_while(|e| e.weight <= s) {
            remove(&mut multiset, e.size_a);
            remove(&mut multiset, e.size_b);
            *multiset.entry(e.merged_size).or_insert(0) += 1;
        }
        let mut values = Vec::new();
        for (&size, &count) in multiset.iter().rev() {
            values.extend(std::iter::repeat_n(size as f64, count));
        }
        RankedMasses { values }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["weight", "size_a", "size_b"])?;
        for e in &self.events {
            wr.write_record([format!("{:e}", e.weight), e.size_a.to_string(), e.size_b.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// `F_n(u)`: ranked sizes of `f(1 - u)`.
pub fn frag_process_query(log: &MergeLog, u: f64) -> RankedMasses {
    log.sizes_at(1.0 - u)
}

/// Writes `(u, top-k sizes)` rows for each `u`.
pub fn write_trajectory<W: Write>(log: &MergeLog, us: &[f64], k: usize, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec!["u".to_string()];
    header.extend((1..=k).map(|j| format!("m{j}")));
    wr.write_record(&header)?;
    for &u in us {
        let m = frag_process_query(log, u);
        let mut row = vec![format!("{u}")];
        row.extend(m.top(k).iter().map(|x| format!("{x}")));
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

/// Ranked sizes after deleting the first `floor(t) ∧ (ζ-1)` edges of `edge_order`.
pub fn integer_frag(tree: &PlaneTree, edge_order: &[usize], t: f64) -> RankedMasses {
    let k = removed_count(tree, t);
    let mut removed = vec![false; tree.len()];
    for &v in &edge_order[..k] {
        removed[v] = true;
    }
    RankedMasses::from_sizes(&component_sizes(tree, |v| !removed[v]))
}

pub(crate) fn removed_count(tree: &PlaneTree, t: f64) -> usize {
    let e = tree.len() - 1;
    if t <= 0.0 {
        0
    } else {
        (t.floor() as usize).min(e)
    }
}

/// `W^(s)` along the Prim order of the full tree, with `k_s` children kept.
pub fn prim_exploration(tree: &PlaneTree, weights: &EdgeWeights, s: f64) -> Result<LatticePath> {
    let order = prim_order(tree, weights)?;
    Ok(LatticePath::from_increments(order.iter().map(|&v| {
        tree.children(v).iter().filter(|&&c| weights.get(c) <= s).count() as i64 - 1
    })))
}

/// Ranked lengths of the index intervals on which the running minimum is
/// constant. Each interval runs from one strict new minimum to the next; the
/// part after the last new minimum counts if nonempty.
pub fn excursion_lengths(path: &LatticePath) -> RankedMasses {
    let v = &path.values;
    let mut lengths = Vec::new();
    let mut last = 0usize;
    let mut min = v[0];
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x < min {
            min = x;
            lengths.push(i - last);
            last = i;
        }
    }
    if v.len() - 1 > last {
        lengths.push(v.len() - 1 - last);
    }
    RankedMasses::from_sizes(&lengths)
}
