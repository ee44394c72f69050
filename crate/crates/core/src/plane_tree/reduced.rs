use std::collections::BTreeMap;

use serde::Serialize;

use super::PlaneTree;
use crate::error::{Error, Result};

/// Tree spanned by the root and `q` marked points, with edge lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedTree {
    #[serde(serialize_with = "ser_shape")]
    pub shape: PlaneTree,
    /// Length of the edge above each vertex; entry 0 (root) is 0.
    pub edge_lengths: Vec<f64>,
    /// Labels carried by each vertex. The root carries 0; marked point `k`
    /// (1-based) carries `k`.
    pub labels: Vec<Vec<usize>>,
    pub q: usize,
}

fn ser_shape<S: serde::Serializer>(t: &PlaneTree, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.parent_array().serialize(s)
}

impl ReducedTree {
    /// True when the leaves are exactly the `q` marked points, one label each.
    pub fn has_exact_leaves(&self) -> bool {
        let n = self.shape.len();
        let mut leaves = 0;
        for v in 0..n {
            let is_leaf = v != 0 && self.shape.num_children(v) == 0;
            let marked: Vec<usize> = self.labels[v].iter().copied().filter(|&l| l != 0).collect();
            if is_leaf {
                if marked.len() != 1 {
                    return false;
                }
                leaves += 1;
            } else if !marked.is_empty() {
                return false;
            }
        }
        leaves == self.q
    }

    /// Leaf labels in lexicographic order of the shape.
    pub fn leaves_in_order(&self) -> Vec<usize> {
        (1..self.shape.len())
            .filter(|&v| self.shape.num_children(v) == 0)
            .collect()
    }

    pub fn vertex_of_label(&self) -> Vec<usize> {
        let mut at = vec![usize::MAX; self.q + 1];
        for (v, ls) in self.labels.iter().enumerate() {
            for &l in ls {
                at[l] = v;
            }
        }
        at
    }

    /// Distances between labels `0..=q`.
    pub fn label_distances(&self) -> Vec<Vec<f64>> {
        let at = self.vertex_of_label();
        let n = self.shape.len();
        let depth = self.shape.depths();
        let mut height = vec![0.0; n];
        for v in 1..n {
            height[v] = height[self.shape.parent(v).unwrap()] + self.edge_lengths[v];
        }
        let lca = |mut a: usize, mut b: usize| {
            while depth[a] > depth[b] {
                a = self.shape.parent(a).unwrap();
            }
            while depth[b] > depth[a] {
                b = self.shape.parent(b).unwrap();
            }
            while a != b {
                a = self.shape.parent(a).unwrap();
                b = self.shape.parent(b).unwrap();
            }
            a
        };
        let q = self.q;
        let mut d = vec![vec![0.0; q + 1]; q + 1];
        for i in 0..=q {
            for j in 0..i {
                let (a, b) = (at[i], at[j]);
                let c = lca(a, b);
                let x = height[a] + height[b] - 2.0 * height[c];
                d[i][j] = x;
                d[j][i] = x;
            }
        }
        d
    }

    /// Edge lengths keyed by the set of labels below the edge (bit `k` for label `k`).
    pub fn split_lengths(&self) -> BTreeMap<u64, f64> {
        let n = self.shape.len();
        let mut below = vec![0u64; n];
        for v in (0..n).rev() {
            for &l in &self.labels[v] {
                if l != 0 {
                    below[v] |= 1 << l;
                }
            }
            if let Some(p) = self.shape.parent(v) {
                below[p] |= below[v];
            }
        }
        (1..n).map(|v| (below[v], self.edge_lengths[v])).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edge_lengths.iter().sum()
    }
}

/// Graph distance between two vertices.
pub fn graph_distance(tree: &PlaneTree, mut a: usize, mut b: usize) -> usize {
    let mut d = 0;
    while a != b {
        if a > b {
            a = tree.parent(a).unwrap();
        } else {
            b = tree.parent(b).unwrap();
        }
        d += 1;
    }
    d
}

/// Reduced tree spanned by the root and the `marked` vertices (in the given
/// order; marked vertex `k` gets label `k + 1`). Duplicates collapse onto one
/// vertex carrying several labels.
pub fn reduce(tree: &PlaneTree, marked: &[usize]) -> ReducedTree {
    let n = tree.len();
    let depth = tree.depths();
    let lca = |mut a: usize, mut b: usize| {
        while depth[a] > depth[b] {
            a = tree.parent(a).unwrap();
        }
        while depth[b] > depth[a] {
            b = tree.parent(b).unwrap();
        }
        while a != b {
            a = tree.parent(a).unwrap();
            b = tree.parent(b).unwrap();
        }
        a
    };
    let mut sorted: Vec<usize> = marked.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut kept: Vec<usize> = vec![0];
    kept.extend_from_slice(&sorted);
    for w in sorted.windows(2) {
        kept.push(lca(w[0], w[1]));
    }
    kept.sort_unstable();
    kept.dedup();

    let mut is_kept = vec![false; n];
    for &v in &kept {
        is_kept[v] = true;
    }
    let index: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut children = vec![Vec::new(); kept.len()];
    let mut length = vec![0.0; kept.len()];
    for (i, &v) in kept.iter().enumerate().skip(1) {
        let mut a = tree.parent(v).unwrap();
        while !is_kept[a] {
            a = tree.parent(a).unwrap();
        }
        children[index[&a]].push(i);
        length[i] = (depth[v] - depth[a]) as f64;
    }
    let (shape, new_index) = PlaneTree::from_children(&children, 0).expect("kept set forms a tree");
    let mut edge_lengths = vec![0.0; kept.len()];
    let mut labels = vec![Vec::new(); kept.len()];
    for i in 0..kept.len() {
        edge_lengths[new_index[i]] = length[i];
    }
    labels[0].push(0);
    for (k, &v) in marked.iter().enumerate() {
        labels[new_index[index[&v]]].push(k + 1);
    }
    ReducedTree { shape, edge_lengths, labels, q: marked.len() }
}

/// Four-point split values `g(ω)` for every `ω ⊆ {0..=q}`, indexed by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct Splits {
    pub q: usize,
    pub values: Vec<f64>,
}

impl Splits {
    pub fn get(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }

    /// Splits with `g > tol`, keyed by the side not containing 0.
    pub fn positive(&self, tol: f64) -> BTreeMap<u64, f64> {
        let full = (1u64 << (self.q + 1)) - 1;
        (0..=full)
            .filter(|m| m & 1 == 0 && *m != 0)
            .filter_map(|m| {
                let g = self.values[m as usize];
                (g > tol).then_some((m, g))
            })
            .collect()
    }
}

/// `g(ω) = min f(x1,x2;y1,y2)` over `x ∈ ω`, `y ∉ ω`, from a distance matrix on `{0..=q}`.
pub fn four_point_splits(dist: &[Vec<f64>]) -> Splits {
    let n = dist.len();
    assert!((1..=20).contains(&n), "distance matrix size out of range");
    let full = (1usize << n) - 1;
    let mut values = vec![0.0; full + 1];
    let mut inside = Vec::with_capacity(n);
    let mut outside = Vec::with_capacity(n);
    for mask in 1..full {
        if mask & 1 == 1 {
            continue;
        }
        inside.clear();
        outside.clear();
        for i in 0..n {
            if mask >> i & 1 == 1 {
                inside.push(i);
            } else {
                outside.push(i);
            }
        }
        let mut best = f64::INFINITY;
        for (a, &x1) in inside.iter().enumerate() {
            for &x2 in &inside[a..] {
                for (b, &y1) in outside.iter().enumerate() {
                    for &y2 in &outside[b..] {
                        let f = (dist[x1][y1] + dist[x1][y2] + dist[x2][y1] + dist[x2][y2]) / 4.0
                            - (dist[x1][x2] + dist[y1][y2]) / 2.0;
                        if f < best {
                            best = f;
                        }
                    }
                }
            }
        }
        values[mask] = best;
        values[full ^ mask] = best;
    }
    Splits { q: n - 1, values }
}

/// Four-point splits of the graph metric on the root and `marked` vertices.
pub fn discrete_splits(tree: &PlaneTree, marked: &[usize]) -> Splits {
    let mut pts = vec![0];
    pts.extend_from_slice(marked);
    let dist: Vec<Vec<f64>> = pts
        .iter()
        .map(|&a| pts.iter().map(|&b| graph_distance(tree, a, b) as f64).collect())
        .collect();
    four_point_splits(&dist)
}

/// Assembles a laminar family of splits (sides not containing label 0) into
/// a tree. Children are ordered by their smallest label.
pub fn assemble_splits(q: usize, splits: &BTreeMap<u64, f64>) -> Result<ReducedTree> {
    let mut parts: Vec<(u64, f64)> = splits.iter().map(|(&m, &g)| (m, g)).collect();
    for i in 0..parts.len() {
        for j in 0..i {
            let (a, b) = (parts[i].0, parts[j].0);
            let inter = a & b;
            if inter != 0 && inter != a && inter != b {
                return Err(Error::NotLaminar);
            }
        }
    }
    parts.sort_by_key(|&(m, _)| (m.count_ones(), m));
    let s = parts.len();
    // Vertex 0 is the root; vertex i + 1 sits below split i.
    let mut parent = vec![0usize; s + 1];
    for i in 0..s {
        parent[i + 1] = (i + 1..s)
            .find(|&j| parts[j].0 & parts[i].0 == parts[i].0)
            .map_or(0, |j| j + 1);
    }
    let mut labels = vec![Vec::new(); s + 1];
    labels[0].push(0);
    for l in 1..=q {
        let v = (0..s).find(|&i| parts[i].0 >> l & 1 == 1).map_or(0, |i| i + 1);
        labels[v].push(l);
    }
    let min_label = |v: usize| -> u32 {
        if v == 0 {
            0
        } else {
            parts[v - 1].0.trailing_zeros()
        }
    };
    let mut children = vec![Vec::new(); s + 1];
    for v in 1..=s {
        children[parent[v]].push(v);
    }
    for c in children.iter_mut() {
        c.sort_by_key(|&v| min_label(v));
    }
    let (shape, new_index) = PlaneTree::from_children(&children, 0)?;
    let mut edge_lengths = vec![0.0; s + 1];
    let mut new_labels = vec![Vec::new(); s + 1];
    for v in 0..=s {
        if v > 0 {
            edge_lengths[new_index[v]] = parts[v - 1].1;
        }
        new_labels[new_index[v]] = labels[v].clone();
    }
    Ok(ReducedTree { shape, edge_lengths, labels: new_labels, q })
}
