#![allow(dead_code)]

use rand::Rng;
use tgds::degree_sequence::from_child_counts;
use tgds::plane_tree::PlaneTree;
use tgds::sampler::{sample_tree, Seed};

/// Lex child counts of the 7-vertex example tree.
pub const SEVEN_COUNTS: [usize; 7] = [2, 2, 0, 1, 0, 1, 0];

pub fn seven_tree() -> PlaneTree {
    PlaneTree::from_child_counts(&SEVEN_COUNTS).unwrap()
}

/// Uniform tree with a random degree sequence on `n` vertices: the `n - 1`
/// child slots are thrown uniformly on the vertices.
pub fn random_tree(n: usize, seed: Seed) -> PlaneTree {
    let mut rng = seed.derive(1).rng();
    let mut counts = vec![0u64; n];
    for _ in 1..n {
        counts[rng.random_range(0..n)] += 1;
    }
    let ds = from_child_counts(&counts).unwrap();
    sample_tree(&ds, seed.derive(2))
}

/// Every plane tree with `n` vertices, from their lexicographic child-count words.
pub fn all_trees(n: usize) -> Vec<PlaneTree> {
    fn rec(n: usize, word: &mut Vec<usize>, w: i64, out: &mut Vec<PlaneTree>) {
        if word.len() == n {
            if w == -1 {
                out.push(PlaneTree::from_child_counts(word).unwrap());
            }
            return;
        }
        let left = (n - word.len()) as i64;
        for k in 0..n {
            let next = w + k as i64 - 1;
            let last = word.len() + 1 == n;
            if (!last && next < 0) || next + 1 > left - 1 {
                continue;
            }
            word.push(k);
            rec(n, word, next, out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), 0, &mut out);
    out
}

/// Number of removed edges ending at a leaf among the first `k` of `order`.
pub fn removed_leaf_edges(tree: &PlaneTree, order: &[usize], k: usize) -> usize {
    order[..k].iter().filter(|&&v| tree.num_children(v) == 0).count()
}
