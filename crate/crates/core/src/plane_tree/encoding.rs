use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{LatticePath, PlaneTree};
use crate::error::Result;
use crate::sampler::EdgeWeights;

pub fn to_lukasiewicz(tree: &PlaneTree) -> LatticePath {
    LatticePath::from_increments((0..tree.len()).map(|v| tree.num_children(v) as i64 - 1))
}

/// Depth-first order visiting children right to left.
pub fn reverse_lex_order(tree: &PlaneTree) -> Vec<usize> {
    let mut order = Vec::with_capacity(tree.len());
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend_from_slice(tree.children(v));
    }
    order
}

pub fn reverse_lukasiewicz(tree: &PlaneTree) -> LatticePath {
    LatticePath::from_increments(
        reverse_lex_order(tree).into_iter().map(|v| tree.num_children(v) as i64 - 1),
    )
}

#[derive(Clone, Copy, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Prim order of the vertices: repeatedly cross the cheapest frontier edge.
pub fn prim_order(tree: &PlaneTree, weights: &EdgeWeights) -> Result<Vec<usize>> {
    weights.check_distinct()?;
    let mut order = Vec::with_capacity(tree.len());
    let mut heap = BinaryHeap::new();
    order.push(tree.root());
    for &c in tree.children(tree.root()) {
        heap.push(Reverse(Key(weights.get(c), c)));
    }
    while let Some(Reverse(Key(_, v))) = heap.pop() {
        order.push(v);
        for &c in tree.children(v) {
            heap.push(Reverse(Key(weights.get(c), c)));
        }
    }
    Ok(order)
}

pub fn prim_path(tree: &PlaneTree, weights: &EdgeWeights) -> Result<(LatticePath, Vec<usize>)> {
    let order = prim_order(tree, weights)?;
    let path =
        LatticePath::from_increments(order.iter().map(|&v| tree.num_children(v) as i64 - 1));
    Ok((path, order))
}

/// `H(i) = |u(i)|` followed by a final 0.
pub fn height_process(tree: &PlaneTree) -> Vec<i64> {
    let mut h: Vec<i64> = tree.depths().into_iter().map(|d| d as i64).collect();
    h.push(0);
    h
}

/// First and last contour visit times of each vertex.
pub fn contour_visits(tree: &PlaneTree) -> Vec<(usize, usize)> {
    let depth = tree.depths();
    let size = tree.subtree_sizes();
    (0..tree.len())
        .map(|v| {
            let first = 2 * v - depth[v];
            (first, first + 2 * (size[v] - 1))
        })
        .collect()
}

/// Contour on times `0..=2ζ`, with the last two values 0.
pub fn contour(tree: &PlaneTree) -> Vec<i64> {
    let n = tree.len();
    let depth = tree.depths();
    let mut c = Vec::with_capacity(2 * n + 1);
    c.push(0i64);
    let mut cur = 0i64;
    for &d in &depth[1..] {
        let target = d as i64 - 1;
        while cur > target {
            cur -= 1;
            c.push(cur);
        }
        cur += 1;
        c.push(cur);
    }
    while cur > 0 {
        cur -= 1;
        c.push(cur);
    }
    c.push(0);
    c.push(0);
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchCounts {
    pub left: i64,
    pub right: i64,
    pub total: i64,
}

/// Numbers of vertices hanging off the ancestral line of each vertex, to the
/// left and to the right.
pub fn branch_counts(tree: &PlaneTree) -> Vec<BranchCounts> {
    let n = tree.len();
    let mut out = vec![BranchCounts { left: 0, right: 0, total: 0 }; n];
    for v in 0..n {
        let kids = tree.children(v);
        let k = kids.len() as i64;
        let base = out[v];
        for (j, &c) in kids.iter().enumerate() {
            let j = j as i64;
            let left = base.left + j;
            let right = base.right + (k - 1 - j);
            out[c] = BranchCounts { left, right, total: left + right };
        }
    }
    out
}
