#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use tgds::degree_sequence::DegreeSequence;
use tgds::plane_tree::{
    branch_counts, contour, contour_visits, default_hub_count, discrete_splits, graph_distance, height_process,
    modified_lukasiewicz, prim_path, reduce, reverse_lukasiewicz, to_lukasiewicz, LatticePath, PlaneTree,
};
use tgds::sampler::{EdgeWeights, Seed};
use tgds::Error;

use common::{seven_tree, random_tree};

/// Recursive decoder: each vertex takes its child count from the word, then
/// its subtrees in order.
fn decode_parents(word: &[usize]) -> Vec<Option<usize>> {
    fn rec(word: &[usize], pos: &mut usize, parent: Option<usize>, out: &mut Vec<Option<usize>>) {
        let me = *pos;
        out.push(parent);
        *pos += 1;
        for _ in 0..word[me] {
            rec(word, pos, Some(me), out);
        }
    }
    let mut out = Vec::new();
    rec(word, &mut 0, None, &mut out);
    out
}

/// Prim by scanning every frontier edge at each step.
fn prim_scan(tree: &PlaneTree, w: &EdgeWeights) -> Vec<usize> {
    let n = tree.len();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut order = vec![0];
    while order.len() < n {
        let next = (1..n)
            .filter(|&v| !seen[v] && seen[tree.parent(v).unwrap()])
            .min_by(|&a, &b| w.get(a).total_cmp(&w.get(b)))
            .unwrap();
        seen[next] = true;
        order.push(next);
    }
    order
}

/// Contour by walking the tree.
fn contour_walk(tree: &PlaneTree) -> Vec<i64> {
    fn rec(tree: &PlaneTree, v: usize, h: i64, out: &mut Vec<i64>) {
        for &c in tree.children(v) {
            out.push(h + 1);
            rec(tree, c, h + 1, out);
            out.push(h);
        }
    }
    let mut out = vec![0];
    rec(tree, 0, 0, &mut out);
    out
}

/// `R(v)`: younger siblings of `v` and of all its ancestors.
fn right_count(tree: &PlaneTree, mut v: usize) -> i64 {
    let mut r = 0;
    while let Some(p) = tree.parent(v) {
        let sibs = tree.children(p);
        let pos = sibs.iter().position(|&c| c == v).unwrap();
        r += (sibs.len() - 1 - pos) as i64;
        v = p;
    }
    r
}

/// Direct subtraction of the reflections of the `hubs` largest degrees.
fn modified_oracle(tree: &PlaneTree, hubs: usize) -> Vec<i64> {
    let w = to_lukasiewicz(tree).values;
    let mut g = w.clone();
    let mut vs: Vec<usize> = (0..tree.len()).collect();
    vs.sort_by_key(|&v| (std::cmp::Reverse(tree.num_children(v)), v));
    for &v in &vs[..hubs] {
        let end = (v + 1..w.len()).find(|&u| w[u] == w[v] - 1).unwrap();
        for u in v + 1..end {
            let m = w[v + 1..=u].iter().min().unwrap();
            g[u] -= m - w[v];
        }
    }
    g
}

#[test]
fn lukasiewicz_examples() {
    let star = PlaneTree::from_lukasiewicz(&LatticePath::new(vec![0, 2, 1, 0, -1])).unwrap();
    assert_eq!(star, PlaneTree::star(3));
    let path = PlaneTree::from_lukasiewicz(&LatticePath::new(vec![0, 0, 0, -1])).unwrap();
    assert_eq!(path, PlaneTree::path(3));
    let t7 = PlaneTree::from_lukasiewicz(&LatticePath::new(vec![0, 1, 2, 1, 1, 0, 0, -1])).unwrap();
    assert_eq!(t7.parent_array(), decode_parents(&common::SEVEN_COUNTS));
    assert_eq!(to_lukasiewicz(&t7).values, vec![0, 1, 2, 1, 1, 0, 0, -1]);
}

#[test]
fn lukasiewicz_rejects_non_excursions() {
    for bad in [vec![0, -1, 0, -1], vec![0, 1, 0], vec![1, 0, -1], vec![0, 2, 0, -1]] {
        let err = PlaneTree::from_lukasiewicz(&LatticePath::new(bad)).unwrap_err();
        assert!(matches!(err, Error::NotExcursion(_)));
    }
}

#[test]
fn reverse_lukasiewicz_examples() {
    assert_eq!(reverse_lukasiewicz(&PlaneTree::path(3)).values, vec![0, 0, 0, -1]);
    assert_eq!(reverse_lukasiewicz(&PlaneTree::star(3)).values, vec![0, 2, 1, 0, -1]);
    assert_eq!(reverse_lukasiewicz(&seven_tree()).values, vec![0, 1, 1, 0, 1, 1, 0, -1]);
}

#[test]
fn prim_examples() {
    let path = PlaneTree::path(4);
    let w = EdgeWeights::new(vec![0.9, 0.1, 0.5]);
    assert_eq!(prim_path(&path, &w).unwrap().0.values, vec![0, 0, 0, 0, -1]);
    let star = PlaneTree::star(3);
    let (p, order) = prim_path(&star, &EdgeWeights::new(vec![0.7, 0.2, 0.4])).unwrap();
    assert_eq!(p.values, vec![0, 2, 1, 0, -1]);
    assert_eq!(order, vec![0, 2, 3, 1]);

    // Root -> right child (vertex 5) cheapest.
    let t7 = seven_tree();
    let w = EdgeWeights::new(vec![0.5, 0.3, 0.6, 0.2, 0.1, 0.4]);
    let (p, order) = prim_path(&t7, &w).unwrap();
    assert_eq!(order, prim_scan(&t7, &w));
    assert_eq!(order, vec![0, 5, 6, 1, 2, 3, 4]);
    assert_eq!(p.values, vec![0, 1, 1, 0, 1, 0, 0, -1]);
}

#[test]
fn prim_rejects_duplicate_weights() {
    let w = EdgeWeights::new(vec![0.5, 0.5, 0.1]);
    assert!(matches!(prim_path(&PlaneTree::star(3), &w), Err(Error::DuplicateWeights)));
}

#[test]
fn height_examples() {
    assert_eq!(height_process(&PlaneTree::path(4)), vec![0, 1, 2, 3, 0]);
    assert_eq!(height_process(&PlaneTree::star(3)), vec![0, 1, 1, 1, 0]);
    assert_eq!(height_process(&seven_tree()), vec![0, 1, 2, 2, 3, 1, 2, 0]);
}

#[test]
fn contour_examples() {
    let mut t7 = vec![0, 1, 2, 1, 2, 3, 2, 1, 0, 1, 2, 1, 0];
    t7.extend([0, 0]);
    assert_eq!(contour(&seven_tree()), t7);
    assert_eq!(contour(&PlaneTree::path(4)), vec![0, 1, 2, 3, 2, 1, 0, 0, 0]);
    assert_eq!(contour(&PlaneTree::star(3)), vec![0, 1, 0, 1, 0, 1, 0, 0, 0]);
}

#[test]
fn branch_count_examples() {
    for t in [PlaneTree::star(3), seven_tree(), PlaneTree::path(5)] {
        let b = branch_counts(&t);
        assert_eq!((b[0].left, b[0].right, b[0].total), (0, 0, 0));
    }
    let star = branch_counts(&PlaneTree::star(3));
    assert_eq!(star[2].right, 1);
    assert_eq!(branch_counts(&seven_tree())[4].right, 1);
}

#[test]
fn modified_examples() {
    let t7 = seven_tree();
    let ds = t7.degree_sequence();
    assert_eq!(modified_lukasiewicz(&t7, &ds, 0).unwrap().0, to_lukasiewicz(&t7));
    let star = PlaneTree::star(3);
    let (g, rec) = modified_lukasiewicz(&star, &star.degree_sequence(), 1).unwrap();
    assert_eq!(g.values, vec![0, 0, 0, 0, -1]);
    assert_eq!(rec[0].reflected, vec![2, 1, 0, -1]);
    // Two degree-2 vertices (0 and 1); the leftmost, the root, is chosen.
    let (g, rec) = modified_lukasiewicz(&t7, &ds, 1).unwrap();
    assert_eq!(g.values, modified_oracle(&t7, 1));
    assert_eq!(g.values, vec![0, 0, 1, 0, 0, 0, 0, -1]);
    assert_eq!((rec[0].t_loc, rec[0].return_loc, rec[0].degree), (1, 7, 2));
    let (g, _) = modified_lukasiewicz(&t7, &ds, 2).unwrap();
    assert_eq!(g.values, modified_oracle(&t7, 2));
}

#[test]
fn modified_rejects_mismatch() {
    let ds = DegreeSequence::from_pairs(&[(0, 2), (2, 1)]).unwrap();
    assert!(matches!(modified_lukasiewicz(&seven_tree(), &ds, 1), Err(Error::DegreeMismatch)));
}

#[test]
fn default_hub_policy() {
    // Degrees >= sqrt(b) = 3: one vertex of degree 4; cap floor(3) = 3.
    let ds = DegreeSequence::from_pairs(&[(0, 5), (2, 1), (4, 1)]).unwrap();
    assert_eq!(default_hub_count(&ds, 9.0), 1);
    let ds = DegreeSequence::from_pairs(&[(0, 13), (4, 4)]).unwrap();
    assert_eq!(default_hub_count(&ds, 4.0), 2);
}

#[test]
fn reduce_examples() {
    let rt = reduce(&PlaneTree::star(3), &[1, 2, 3]);
    assert_eq!(rt.shape, PlaneTree::star(3));
    assert_eq!(rt.edge_lengths, vec![0.0, 1.0, 1.0, 1.0]);
    assert!(rt.has_exact_leaves());

    let t7 = seven_tree();
    let rt = reduce(&t7, &[4]);
    assert_eq!(rt.shape, PlaneTree::path(2));
    assert_eq!(rt.edge_lengths, vec![0.0, 3.0]);

    let rt = reduce(&t7, &[2, 4]);
    assert_eq!(rt.shape.child_counts(), vec![1, 2, 0, 0]);
    assert_eq!(rt.edge_lengths, vec![0.0, 1.0, 1.0, 2.0]);
    assert_eq!(rt.labels, vec![vec![0], vec![], vec![1], vec![2]]);
}

#[test]
fn reduce_with_internal_mark_is_flagged() {
    let t7 = seven_tree();
    let rt = reduce(&t7, &[1, 4]);
    assert!(!rt.has_exact_leaves());
    assert_eq!(rt.labels[1], vec![1]);
}

#[test]
fn discrete_split_examples() {
    let t7 = seven_tree();
    let s = discrete_splits(&t7, &[2, 4]);
    assert_eq!(s.get(0b111), 0.0);
    assert_eq!(s.get(0b110), 1.0);
    assert_eq!(s.get(0b010), 1.0);
    assert_eq!(s.get(0b100), 2.0);
    let s = discrete_splits(&PlaneTree::star(3), &[1, 2, 3]);
    assert_eq!(s.get(0b0010), 1.0);
    assert_eq!(s.get(0b0110), 0.0);
}

#[test]
fn serialization_roundtrip() {
    let t7 = seven_tree();
    assert_eq!(t7.to_csv(), "1,1,-1,0,-1,0,-1");
    assert_eq!(PlaneTree::from_csv(&t7.to_csv()).unwrap(), t7);
    assert_eq!(t7.to_json().unwrap(), r#"{"parent":[null,0,1,1,3,0,5]}"#);
    assert_eq!(PlaneTree::from_json(&t7.to_json().unwrap()).unwrap(), t7);
    assert!(PlaneTree::from_json(r#"{"parent":[null,null]}"#).is_err());
}

#[test]
fn from_children_relabels() {
    // Root 2 with children 0 then 1.
    let (t, map) = PlaneTree::from_children(&[vec![], vec![], vec![0, 1]], 2).unwrap();
    assert_eq!(t, PlaneTree::star(2));
    assert_eq!(map, vec![1, 2, 0]);
}

fn arb_tree() -> impl Strategy<Value = PlaneTree> {
    (1usize..300, any::<u64>()).prop_map(|(n, s)| random_tree(n, Seed::new(s, 0)))
}

proptest! {
    #[test]
    fn roundtrips(t in arb_tree()) {
        let w = to_lukasiewicz(&t);
        prop_assert!(w.check_excursion().is_ok());
        prop_assert_eq!(&PlaneTree::from_lukasiewicz(&w).unwrap(), &t);
        prop_assert_eq!(PlaneTree::from_csv(&t.to_csv()).unwrap(), t.clone());
        prop_assert_eq!(PlaneTree::from_json(&t.to_json().unwrap()).unwrap(), t.clone());
        prop_assert_eq!(t.parent_array(), decode_parents(&t.child_counts()));
    }

    #[test]
    fn reverse_path_same_increments(t in arb_tree()) {
        let mut a: Vec<i64> = to_lukasiewicz(&t).increments().collect();
        let mut b: Vec<i64> = reverse_lukasiewicz(&t).increments().collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        prop_assert!(reverse_lukasiewicz(&t).check_excursion().is_ok());
    }

    #[test]
    fn right_counts_match_path(t in arb_tree()) {
        let w = to_lukasiewicz(&t);
        let b = branch_counts(&t);
        for v in 0..t.len() {
            prop_assert_eq!(b[v].right, right_count(&t, v));
            prop_assert_eq!(b[v].right, w.values[v]);
            prop_assert_eq!(b[v].total, b[v].left + b[v].right);
        }
    }

    #[test]
    fn prim_matches_scan(t in arb_tree(), s in any::<u64>()) {
        let w = tgds::sampler::attach_weights(&t, Seed::new(s, 1));
        let (p, order) = prim_path(&t, &w).unwrap();
        prop_assert_eq!(&order, &prim_scan(&t, &w));
        prop_assert!(p.check_excursion().is_ok());
    }

    #[test]
    fn contour_properties(t in arb_tree()) {
        let c = contour(&t);
        let n = t.len();
        prop_assert_eq!(c.len(), 2 * n + 1);
        let walk = contour_walk(&t);
        prop_assert_eq!(&c[..walk.len()], &walk[..]);
        let ups = c[..2 * n - 1].windows(2).filter(|w| w[1] == w[0] + 1).count();
        let downs = c[..2 * n - 1].windows(2).filter(|w| w[1] == w[0] - 1).count();
        prop_assert_eq!((ups, downs), (n - 1, n - 1));
        let h = height_process(&t);
        for (v, &(g, d)) in contour_visits(&t).iter().enumerate() {
            prop_assert_eq!(c[g], h[v]);
            prop_assert_eq!(c[d], h[v]);
        }
    }

    #[test]
    fn modified_invariants(t in arb_tree(), hubs in 0usize..6) {
        let hubs = hubs.min(t.len());
        let (g, recs) = modified_lukasiewicz(&t, &t.degree_sequence(), hubs).unwrap();
        let w = to_lukasiewicz(&t);
        prop_assert_eq!(&g.values, &modified_oracle(&t, hubs));
        let mut covered = vec![false; w.values.len()];
        for r in &recs {
            for u in r.t_loc..r.return_loc {
                covered[u] = true;
            }
            if r.degree == 0 {
                continue;
            }
            let body = &r.reflected[..r.reflected.len() - 1];
            prop_assert!(body.windows(2).all(|p| p[1] <= p[0]));
            prop_assert!(body.iter().all(|&x| x >= 0 && x < r.degree as i64));
            prop_assert_eq!(body[0], r.degree as i64 - 1);
        }
        for i in 0..w.values.len() {
            prop_assert!(g.values[i] <= w.values[i]);
            if !covered[i] {
                prop_assert_eq!(g.values[i], w.values[i]);
            }
        }
    }

    #[test]
    fn reduce_matches_splits(t in arb_tree(), s in any::<u64>(), q in 1usize..6) {
        let mut rng = Seed::new(s, 2).rng();
        use rand::Rng;
        let mut marked: Vec<usize> = (0..q).map(|_| rng.random_range(0..t.len())).collect();
        marked.sort_unstable();
        marked.dedup();
        marked.retain(|&v| v != 0);
        prop_assume!(!marked.is_empty());
        let rt = reduce(&t, &marked);
        let splits = discrete_splits(&t, &marked).positive(0.5);
        let lengths = rt.split_lengths();
        prop_assert_eq!(&lengths, &splits);
        // Union of root-to-marked geodesics.
        let mut edges = BTreeSet::new();
        for &m in &marked {
            let mut v = m;
            while v != 0 {
                edges.insert(v);
                v = t.parent(v).unwrap();
            }
        }
        prop_assert_eq!(rt.total_length(), edges.len() as f64);
        let d = rt.label_distances();
        for (i, &a) in marked.iter().enumerate() {
            prop_assert_eq!(d[0][i + 1], graph_distance(&t, 0, a) as f64);
        }
    }
}
