//! Uniform trees with a given degree sequence, exhaustive enumeration, and
//! random edge marks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::degree_sequence::{child_sequence, DegreeSequence};
use crate::error::{Error, Result};
use crate::plane_tree::PlaneTree;

/// Identical `(master, stream)` pairs produce identical random output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Seed {
    pub fn new(master: u64, stream: u64) -> Self {
        Seed { master, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.master);
        r.set_stream(self.stream);
        r
    }

    /// Independent seed for a named sub-task of the same replica.
    pub fn derive(&self, tag: u64) -> Seed {
        Seed { master: splitmix(self.master ^ splitmix(tag)), stream: self.stream }
    }

    /// Seed for replica `i`.
    pub fn replica(&self, i: u64) -> Seed {
        Seed { master: self.master, stream: self.stream.wrapping_mul(1 << 32).wrapping_add(i) }
    }
}

/// Edge marks in `[0,1]`, keyed by the child endpoint of each edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeights {
    w: Vec<f64>,
}

impl EdgeWeights {
    /// `w[i]` is the weight of the edge above vertex `i + 1`.
    pub fn new(w: Vec<f64>) -> Self {
        EdgeWeights { w }
    }

    pub fn get(&self, child: usize) -> f64 {
        self.w[child - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn check_distinct(&self) -> Result<()> {
        if has_duplicates(&self.w) {
            Err(Error::DuplicateWeights)
        } else {
            Ok(())
        }
    }

    pub fn to_csv(&self) -> String {
        keyed_csv(&self.w)
    }
}

/// Exponential clocks, keyed by child endpoint like [`EdgeWeights`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpClocks {
    gamma: Vec<f64>,
}

impl ExpClocks {
    pub fn new(gamma: Vec<f64>) -> Self {
        ExpClocks { gamma }
    }

    pub fn get(&self, child: usize) -> f64 {
        self.gamma[child - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.gamma
    }

    pub fn to_csv(&self) -> String {
        keyed_csv(&self.gamma)
    }
}

fn keyed_csv(w: &[f64]) -> String {
    let mut s = String::from("child,value\n");
    for (i, x) in w.iter().enumerate() {
        s.push_str(&format!("{},{:e}\n", i + 1, x));
    }
    s
}

fn has_duplicates(w: &[f64]) -> bool {
    let mut s = w.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).any(|p| p[0] == p[1])
}

/// Index `k` such that rotating `incs` to start at `k` gives an excursion.
/// `incs` must sum to -1.
pub fn cycle_lemma_rotation(incs: &[i64]) -> usize {
    let mut s = 0i64;
    let mut best = i64::MAX;
    let mut arg = 0;
    for (i, &x) in incs.iter().enumerate() {
        s += x;
        if s < best {
            best = s;
            arg = i + 1;
        }
    }
    arg % incs.len()
}

/// Uniform tree with degree sequence `ds`: shuffle the child multiset,
/// rotate it into an excursion, decode.
pub fn sample_tree(ds: &DegreeSequence, seed: Seed) -> PlaneTree {
    let mut counts: Vec<usize> = child_sequence(ds).into_iter().map(|k| k as usize).collect();
    let mut rng = seed.rng();
    counts.shuffle(&mut rng);
    let incs: Vec<i64> = counts.iter().map(|&k| k as i64 - 1).collect();
    let k = cycle_lemma_rotation(&incs);
    counts.rotate_left(k);
    PlaneTree::from_child_counts(&counts).expect("cycle lemma yields an excursion")
}

/// All plane trees with degree sequence `ds`, in lexicographic order of
/// their child-count words.
pub fn enumerate_trees(ds: &DegreeSequence) -> Result<Vec<PlaneTree>> {
    let v = ds.num_vertices();
    if v > 14 {
        return Err(Error::TooLarge(v));
    }
    let kinds: Vec<(usize, usize)> =
        ds.counts().iter().map(|(&i, &n)| (i as usize, n as usize)).collect();
    let mut remaining: Vec<usize> = kinds.iter().map(|k| k.1).collect();
    let mut word = Vec::with_capacity(v as usize);
    let mut out = Vec::new();
    fn rec(
        kinds: &[(usize, usize)],
        remaining: &mut [usize],
        word: &mut Vec<usize>,
        w: i64,
        total: usize,
        out: &mut Vec<PlaneTree>,
    ) {
        if word.len() == total {
            out.push(PlaneTree::from_child_counts(word).expect("valid by construction"));
            return;
        }
        for j in 0..kinds.len() {
            if remaining[j] == 0 {
                continue;
            }
            let next = w + kinds[j].0 as i64 - 1;
            let last = word.len() + 1 == total;
            if (last && next != -1) || (!last && next < 0) {
                continue;
            }
            remaining[j] -= 1;
            word.push(kinds[j].0);
            rec(kinds, remaining, word, next, total, out);
            word.pop();
            remaining[j] += 1;
        }
    }
    rec(&kinds, &mut remaining, &mut word, 0, v as usize, &mut out);
    Ok(out)
}

/// `(1/V) V! / prod N_i!`.
pub fn tree_count(ds: &DegreeSequence) -> f64 {
    let ln_fact = |n: u64| (1..=n).map(|k| (k as f64).ln()).sum::<f64>();
    let v = ds.num_vertices();
    let mut l = ln_fact(v) - (v as f64).ln();
    for &n in ds.counts().values() {
        l -= ln_fact(n);
    }
    l.exp()
}

fn distinct_draws<F: FnMut(&mut ChaCha8Rng) -> f64>(n: usize, seed: Seed, mut draw: F) -> Vec<f64> {
    let mut rng = seed.rng();
    let mut w: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
    while has_duplicates(&w) {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| w[a].total_cmp(&w[b]));
        for p in idx.windows(2) {
            if w[p[0]] == w[p[1]] {
                w[p[1]] = draw(&mut rng);
            }
        }
    }
    w
}

/// i.i.d. uniform weights, one per edge.
pub fn attach_weights(tree: &PlaneTree, seed: Seed) -> EdgeWeights {
    EdgeWeights::new(distinct_draws(tree.len().saturating_sub(1), seed, |r| r.random::<f64>()))
}

/// i.i.d. Exp(1) clocks, one per edge.
pub fn exp_clocks(tree: &PlaneTree, seed: Seed) -> ExpClocks {
    ExpClocks::new(distinct_draws(tree.len().saturating_sub(1), seed, |r| {
        let x: f64 = r.sample(Exp1);
        x
    }))
}

/// Uniform permutation of the edges (as child endpoints).
pub fn uniform_edge_order(tree: &PlaneTree, seed: Seed) -> Vec<usize> {
    let mut order: Vec<usize> = (1..tree.len()).collect();
    order.shuffle(&mut seed.rng());
    order
}

/// Returns the `floor(V U_(k))`-th vertices for the order statistics
/// `U_(1) <= ... <= U_(q)` of `q` uniforms, together with those statistics.
pub fn uniform_vertices(tree: &PlaneTree, q: usize, seed: Seed) -> (Vec<usize>, Vec<f64>) {
    let mut rng = seed.rng();
    let mut u: Vec<f64> = (0..q).map(|_| rng.random::<f64>()).collect();
    u.sort_by(f64::total_cmp);
    let n = tree.len();
    let v = u.iter().map(|&x| ((n as f64 * x).floor() as usize).min(n - 1)).collect();
    (v, u)
}
