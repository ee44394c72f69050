use serde::Serialize;

use super::{to_lukasiewicz, LatticePath, PlaneTree};
use crate::degree_sequence::DegreeSequence;
use crate::error::{Error, Result};

/// Reflection window of one large-degree vertex in the lexicographic path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JumpRecord {
    /// Rank among the selected vertices, starting at 1.
    pub rank: usize,
    /// Degree `d(rank)` of the vertex.
    pub degree: usize,
    /// Path index at which the jump is visible: `W(t_loc) - W(t_loc - 1) = degree - 1`.
    pub t_loc: usize,
    /// First index after `t_loc` where `W - W(t_loc - 1) = -1`.
    pub return_loc: usize,
    /// `R(u) = min_{t_loc <= s <= u} W(s) - W(t_loc - 1)` for `u` in `t_loc..=return_loc`.
    pub reflected: Vec<i64>,
}

/// `#{i : d(i) >= sqrt(b_n)}` capped at `floor(sqrt(b_n))`.
pub fn default_hub_count(ds: &DegreeSequence, b_n: f64) -> usize {
    let root_b = b_n.max(0.0).sqrt();
    let cap = root_b.floor() as usize;
    let big: u64 = ds
        .counts()
        .iter()
        .filter(|(&i, _)| i as f64 >= root_b)
        .map(|(_, &n)| n)
        .sum();
    (big as usize).min(cap)
}

/// Lexicographic path with the reflections of the `hubs` largest degrees
/// removed. The subtraction acts on the half-open windows `[t_loc, return_loc)`.
pub fn modified_lukasiewicz(
    tree: &PlaneTree,
    ds: &DegreeSequence,
    hubs: usize,
) -> Result<(LatticePath, Vec<JumpRecord>)> {
    if tree.degree_sequence() != *ds {
        return Err(Error::DegreeMismatch);
    }
    if hubs > tree.len() {
        return Err(Error::Invalid(format!("hub count {hubs} exceeds the tree size")));
    }
    let w = to_lukasiewicz(tree);
    let mut g = w.values.clone();
    let mut chosen: Vec<usize> = (0..tree.len()).collect();
    chosen.sort_by(|&a, &b| tree.num_children(b).cmp(&tree.num_children(a)).then(a.cmp(&b)));
    chosen.truncate(hubs);

    let mut records = Vec::with_capacity(hubs);
    for (r, &v) in chosen.iter().enumerate() {
        let t_loc = v + 1;
        let base = w.values[v];
        let mut reflected = Vec::new();
        let mut running = i64::MAX;
        let mut u = t_loc;
        loop {
            running = running.min(w.values[u]);
            let val = running - base;
            reflected.push(val);
            if w.values[u] - base == -1 {
                break;
            }
            g[u] -= val;
            u += 1;
        }
        records.push(JumpRecord {
            rank: r + 1,
            degree: tree.num_children(v),
            t_loc,
            return_loc: u,
            reflected,
        });
    }
    Ok((LatticePath::new(g), records))
}
