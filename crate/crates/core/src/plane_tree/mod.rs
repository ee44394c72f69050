//! Rooted plane trees stored in lexicographic (depth-first) order, and their
//! integer encodings.

mod encoding;
mod modified;
mod reduced;

pub use encoding::{
    branch_counts, contour, contour_visits, height_process, prim_order, prim_path,
    reverse_lex_order, reverse_lukasiewicz, to_lukasiewicz, BranchCounts,
};
pub use modified::{default_hub_count, modified_lukasiewicz, JumpRecord};
pub use reduced::{
    assemble_splits, discrete_splits, four_point_splits, graph_distance, reduce, ReducedTree,
    Splits,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::degree_sequence::{validate, DegreeSequence};
use crate::error::{Error, Result};

pub const NO_PARENT: usize = usize::MAX;

/// Vertex `0` is the root and vertices are numbered in lexicographic order,
/// so `parent[v] < v` for every non-root `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneTree {
    parent: Vec<usize>,
    child_start: Vec<usize>,
    child_list: Vec<usize>,
}

/// Integer path `values[0..=L]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    pub values: Vec<i64>,
}

impl LatticePath {
    pub fn new(values: Vec<i64>) -> Self {
        LatticePath { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn increments(&self) -> impl Iterator<Item = i64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// Path with `values[0] = 0` and the given increments.
    pub fn from_increments<I: IntoIterator<Item = i64>>(incs: I) -> Self {
        let mut values = vec![0i64];
        let mut cur = 0i64;
        for x in incs {
            cur += x;
            values.push(cur);
        }
        LatticePath { values }
    }

    /// Checks the excursion invariants: starts at 0, steps >= -1, stays >= 0
    /// until the last index where it equals -1.
    pub fn check_excursion(&self) -> Result<()> {
        let v = &self.values;
        if v.len() < 2 {
            return Err(Error::NotExcursion("path too short".into()));
        }
        if v[0] != 0 {
            return Err(Error::NotExcursion("does not start at 0".into()));
        }
        let last = v.len() - 1;
        for i in 0..last {
            if v[i + 1] - v[i] < -1 {
                return Err(Error::NotExcursion(format!("step below -1 at {i}")));
            }
            if v[i] < 0 {
                return Err(Error::NotExcursion(format!("negative at {i}")));
            }
        }
        if v[last] != -1 {
            return Err(Error::NotExcursion(format!("ends at {}", v[last])));
        }
        Ok(())
    }
}

impl PlaneTree {
    /// Builds the tree whose `i`-th vertex in lexicographic order has
    /// `counts[i]` children.
    pub fn from_child_counts(counts: &[usize]) -> Result<Self> {
        let n = counts.len();
        if n == 0 {
            return Err(Error::NotExcursion("empty word".into()));
        }
        let mut w: i64 = 0;
        for (i, &k) in counts.iter().enumerate() {
            w += k as i64 - 1;
            if w < 0 && i + 1 < n {
                return Err(Error::NotExcursion(format!("hits -1 early at {}", i + 1)));
            }
        }
        if w != -1 {
            return Err(Error::NotExcursion(format!("ends at {w}")));
        }
        let mut parent = vec![NO_PARENT; n];
        // (vertex, remaining children)
        let mut stack: Vec<(usize, usize)> = Vec::new();
        if counts[0] > 0 {
            stack.push((0, counts[0]));
        }
        for v in 1..n {
            let top = stack.last_mut().expect("excursion keeps the stack nonempty");
            parent[v] = top.0;
            top.1 -= 1;
            if top.1 == 0 {
                stack.pop();
            }
            if counts[v] > 0 {
                stack.push((v, counts[v]));
            }
        }
        Ok(Self::from_lex_parents(parent, counts))
    }

    fn from_lex_parents(parent: Vec<usize>, counts: &[usize]) -> Self {
        let n = parent.len();
        let mut child_start = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for &k in counts {
            child_start.push(acc);
            acc += k;
        }
        child_start.push(acc);
        let mut fill = child_start.clone();
        let mut child_list = vec![0; acc];
        for (v, &p) in parent.iter().enumerate().skip(1) {
            child_list[fill[p]] = v;
            fill[p] += 1;
        }
        PlaneTree { parent, child_start, child_list }
    }

    pub fn from_lukasiewicz(path: &LatticePath) -> Result<Self> {
        path.check_excursion()?;
        let counts: Vec<usize> = path.increments().map(|x| (x + 1) as usize).collect();
        Self::from_child_counts(&counts)
    }

    /// Builds a tree from arbitrary labels: `children[v]` lists the children
    /// of `v` left to right. Returns the tree and the map old label -> lex index.
    pub fn from_children(children: &[Vec<usize>], root: usize) -> Result<(Self, Vec<usize>)> {
        let n = children.len();
        let mut new_index = vec![NO_PARENT; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if v >= n || new_index[v] != NO_PARENT {
                return Err(Error::Invalid("children lists do not form a tree".into()));
            }
            new_index[v] = order.len();
            order.push(v);
            for &c in children[v].iter().rev() {
                stack.push(c);
            }
        }
        if order.len() != n {
            return Err(Error::Invalid("children lists do not span all vertices".into()));
        }
        let counts: Vec<usize> = order.iter().map(|&v| children[v].len()).collect();
        let tree = Self::from_child_counts(&counts)?;
        Ok((tree, new_index))
    }

    /// Parent array in lex labels; siblings are ordered by index.
    pub fn from_parent_array(parent: &[Option<usize>]) -> Result<Self> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut root = None;
        for (v, p) in parent.iter().enumerate() {
            match p {
                None if root.is_none() => root = Some(v),
                None => return Err(Error::Invalid("more than one root".into())),
                Some(p) if *p < n => children[*p].push(v),
                Some(_) => return Err(Error::Invalid("parent out of range".into())),
            }
        }
        let root = root.ok_or_else(|| Error::Invalid("no root".into()))?;
        Ok(Self::from_children(&children, root)?.0)
    }

    pub fn single_vertex() -> Self {
        Self::from_child_counts(&[0]).expect("valid")
    }

    pub fn path(n: usize) -> Self {
        let mut counts = vec![1; n];
        counts[n - 1] = 0;
        Self::from_child_counts(&counts).expect("valid")
    }

    pub fn star(leaves: usize) -> Self {
        let mut counts = vec![0; leaves + 1];
        counts[0] = leaves;
        Self::from_child_counts(&counts).expect("valid")
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        let p = self.parent[v];
        (p != NO_PARENT).then_some(p)
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.child_list[self.child_start[v]..self.child_start[v + 1]]
    }

    pub fn num_children(&self, v: usize) -> usize {
        self.child_start[v + 1] - self.child_start[v]
    }

    pub fn child_counts(&self) -> Vec<usize> {
        (0..self.len()).map(|v| self.num_children(v)).collect()
    }

    pub fn parent_array(&self) -> Vec<Option<usize>> {
        (0..self.len()).map(|v| self.parent(v)).collect()
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.len()];
        for v in 1..self.len() {
            d[v] = d[self.parent[v]] + 1;
        }
        d
    }

    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut s = vec![1; self.len()];
        for v in (1..self.len()).rev() {
            s[self.parent[v]] += s[v];
        }
        s
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        let mut counts = BTreeMap::new();
        for v in 0..self.len() {
            *counts.entry(self.num_children(v) as u64).or_insert(0) += 1;
        }
        validate(&counts).expect("a tree satisfies the constraint")
    }

    /// Canonical CSV: comma-separated Lukasiewicz increments, no newline.
    pub fn to_csv(&self) -> String {
        let parts: Vec<String> = (0..self.len())
            .map(|v| (self.num_children(v) as i64 - 1).to_string())
            .collect();
        parts.join(",")
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        let incs: Vec<i64> = s
            .trim()
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Invalid(format!("bad increment: {e}")))?;
        Self::from_lukasiewicz(&LatticePath::from_increments(incs))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ParentArray { parent: self.parent_array() })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let pa: ParentArray = serde_json::from_str(s)?;
        Self::from_parent_array(&pa.parent)
    }
}

#[derive(Serialize, Deserialize)]
struct ParentArray {
    parent: Vec<Option<usize>>,
}
