#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rand::Rng;
use tgds::degree_sequence::{theta_check, ThetaOptions, ThetaParams};
use tgds::excursion::{
    brownian_bridge, continuum_reduced_tree, distance_matrix, ei_bridge, frag_from_excursion, h_exc,
    reduced_tree_from_distances, tree_distance, truncation_level, vervaat, GridPath,
};
use tgds::harness::ks_two_sample;
use tgds::sampler::Seed;
use tgds::Error;

fn theta(sigma: f64, betas: &[f64]) -> ThetaParams {
    theta_check(sigma, betas, ThetaOptions::default()).unwrap()
}

fn three_hub_theta() -> ThetaParams {
    let r = 7f64.sqrt();
    theta(1.0 / r, &[2.0 / r, 1.0 / r, 1.0 / r])
}

fn excursion(th: &ThetaParams, m: usize, seed: Seed) -> GridPath {
    vervaat(&ei_bridge(th, th.betas.len(), m, seed)).unwrap().0
}

/// `2h min(s, 1-s)` on the grid.
fn tent(h: f64, m: usize) -> GridPath {
    GridPath::from_fn(m, |s| 2.0 * h * s.min(1.0 - s))
}

/// Grid indices where the running infimum of `g(s) - t s` strictly drops.
fn drop_points(g: &GridPath, t: f64) -> Vec<usize> {
    let m = g.m as f64;
    let mut inf = g.values[0];
    let mut out = Vec::new();
    for (k, &v) in g.values.iter().enumerate().skip(1) {
        let y = v - t * k as f64 / m;
        if y < inf - 1e-12 {
            out.push(k);
        }
        inf = inf.min(y);
    }
    out
}

#[test]
fn bridge_endpoints_and_variance() {
    assert_eq!(brownian_bridge(1, Seed::new(1, 0)).values, vec![0.0, 0.0]);
    let b = brownian_bridge(1000, Seed::new(1, 1));
    assert_eq!((b.values[0], b.values[1000]), (0.0, 0.0));
    let n = 10_000;
    let var = (0..n)
        .map(|r| brownian_bridge(64, Seed::new(2, 0).replica(r)).values[32].powi(2))
        .sum::<f64>()
        / n as f64;
    assert!((0.23..=0.27).contains(&var), "{var}");
}

#[test]
fn ei_bridge_without_jumps_is_brownian() {
    let x = ei_bridge(&ThetaParams::brownian(), 0, 64, Seed::new(3, 0));
    assert!(x.jumps.is_empty());
    assert_eq!((x.values[0], x.values[64]), (0.0, 0.0));
    let n = 10_000;
    let var = (0..n)
        .map(|r| ei_bridge(&ThetaParams::brownian(), 0, 64, Seed::new(3, 1).replica(r)).values[32].powi(2))
        .sum::<f64>()
        / n as f64;
    assert!((0.23..=0.27).contains(&var), "{var}");
}

#[test]
fn single_jump_bridge_closed_form() {
    let m = 1000;
    let th = theta(0.0, &[1.0]);
    for r in 0..20 {
        let x = ei_bridge(&th, 1, m, Seed::new(4, r));
        assert_eq!(x.jumps.len(), 1);
        let j = &x.jumps[0];
        assert_eq!(j.size, 1.0);
        assert_eq!(j.index, (j.location * m as f64).ceil() as usize);
        for (k, &v) in x.values.iter().enumerate() {
            let t = k as f64 / m as f64;
            let exact = if j.location <= t { 1.0 } else { 0.0 } - t;
            assert!((v - exact).abs() <= 2.0 / m as f64, "k = {k}");
        }
    }
}

#[test]
fn three_hub_theta_records_its_jumps() {
    let th = three_hub_theta();
    let x = ei_bridge(&th, 3, 1 << 14, Seed::new(5, 0));
    let mut sizes: Vec<f64> = x.jumps.iter().map(|j| j.size).collect();
    sizes.sort_by(|a, b| b.total_cmp(a));
    let r = 7f64.sqrt();
    assert_eq!(sizes, vec![2.0 / r, 1.0 / r, 1.0 / r]);
    assert!(x.jumps.windows(2).all(|p| p[0].index <= p[1].index));
    assert_eq!(truncation_level(&th, 1 << 14), 3);
}

#[test]
fn vervaat_examples() {
    let t = tent(0.5, 100);
    let (v, rho) = vervaat(&t).unwrap();
    assert_eq!(rho, 0);
    assert_eq!(v.values, t.values);

    let m = 500;
    let th = theta(0.0, &[1.0]);
    for r in 0..20 {
        let x = ei_bridge(&th, 1, m, Seed::new(6, r));
        let (v, rho) = vervaat(&x).unwrap();
        assert_eq!(rho, x.jumps[0].index - 1);
        // Sawtooth: the jump comes first, then a linear descent.
        assert_eq!(v.values[0], 0.0);
        for k in 1..=m {
            let exact = 1.0 - (k - 1) as f64 / (m - 1) as f64;
            assert!((v.values[k] - exact).abs() < 1e-9, "k = {k}");
        }
        assert_eq!(v.jumps[0].index, 1);
    }
    assert!(matches!(vervaat(&GridPath::new(vec![0.0, 1.0])), Err(Error::NotABridge(..))));
}

#[test]
fn h_exc_examples() {
    let t = tent(1.0, 64);
    let (h, r) = h_exc(&t);
    assert!(r.is_empty());
    assert_eq!(h.values, t.values);

    let x = excursion(&theta(0.6, &[0.8]), 4096, Seed::new(7, 0));
    let (h, r) = h_exc(&x);
    let j = &x.jumps[0];
    assert_eq!(r[0].values[0], 0.8);
    assert!((h.values[j.index] - (x.values[j.index] - 0.8)).abs() < 1e-12);
}

#[test]
fn h_exc_three_hub_theta() {
    let th = three_hub_theta();
    for s in 0..5 {
        let x = excursion(&th, 1 << 14, Seed::new(8, s));
        let (h, refl) = h_exc(&x);
        assert!(h.values.iter().all(|v| v.is_finite()));
        assert_eq!((h.values[0], h.values[1 << 14]), (0.0, 0.0));
        assert!(h.min() >= -1e-9);
        for (r, j) in refl.iter().zip(&x.jumps) {
            assert!(r.values.iter().all(|&v| (0.0..=j.size).contains(&v)));
        }
    }
}

#[test]
fn frag_from_excursion_examples() {
    let g = tent(1.0, 1000);
    assert_eq!(frag_from_excursion(&g, 0.0).values, vec![1.0]);
    for h in [0.5, 1.0, 2.0] {
        for t in [0.1, 0.5, 0.9] {
            let t = t * 2.0 * h;
            let m = 4000;
            let f = frag_from_excursion(&tent(h, m), t);
            // g(s) - t s returns to 0 at s = 2h / (2h + t), then strictly decreases.
            let first = 2.0 * h / (2.0 * h + t);
            assert!((f.values[0] - first).abs() <= 2.0 / m as f64, "h {h} t {t}");
            assert!(f.values[1..].iter().all(|&x| x <= 2.0 / m as f64));
        }
    }
    let f = frag_from_excursion(&tent(1.0, 1000), 1000.0);
    assert!(f.values.iter().all(|&x| x <= 2.0 / 1000.0));
}

#[test]
fn tree_distance_examples() {
    let g = tent(1.0, 1000);
    assert_eq!(tree_distance(&g, 0.3, 0.3), 0.0);
    assert_eq!(tree_distance(&g, 0.0, 1.0), 0.0);
    assert!((tree_distance(&g, 0.25, 0.5) - 0.5).abs() < 1e-12);
}

#[test]
fn continuum_reduced_tree_examples() {
    let g = tent(1.0, 1000);
    let rt = continuum_reduced_tree(&g, &[0.4], 1e-9).unwrap();
    assert_eq!(rt.shape.len(), 2);
    assert!((rt.edge_lengths[1] - 0.8).abs() < 1e-12);

    // Heights 0.3 and 0.6 on the rising slope.
    let rt = continuum_reduced_tree(&g, &[0.15, 0.3], 1e-9).unwrap();
    assert_eq!(rt.shape.child_counts(), vec![1, 1, 0]);
    assert!((rt.edge_lengths[1] - 0.3).abs() < 1e-12);
    assert!((rt.edge_lengths[2] - 0.3).abs() < 1e-12);

    assert!(continuum_reduced_tree(&g, &[0.01; 13], 1e-9).is_err());
}

#[test]
fn four_leaf_tree_reconstruction() {
    // Vertices: 0 root, 1 = a, 2..=5 leaves 1..4, 6 = b.
    let parent = [usize::MAX, 0, 1, 6, 6, 0, 1];
    let len = [0.0, 2.0, 1.0, 1.0, 2.0, 4.0, 3.0];
    let depth = |mut v: usize| {
        let mut d = 0.0;
        while v != 0 {
            d += len[v];
            v = parent[v];
        }
        d
    };
    let ancestors = |mut v: usize| {
        let mut a = vec![v];
        while v != 0 {
            v = parent[v];
            a.push(v);
        }
        a
    };
    let pts = [0, 2, 3, 4, 5];
    let dist: Vec<Vec<f64>> = pts
        .iter()
        .map(|&a| {
            pts.iter()
                .map(|&b| {
                    let aa = ancestors(a);
                    let lca = *ancestors(b).iter().find(|x| aa.contains(x)).unwrap();
                    depth(a) + depth(b) - 2.0 * depth(lca)
                })
                .collect()
        })
        .collect();
    let rt = reduced_tree_from_distances(&dist, 1e-9).unwrap();
    assert_eq!(rt.label_distances(), dist);
    assert_eq!(rt.total_length(), 13.0);
    let mut lengths: Vec<f64> = rt.edge_lengths[1..].to_vec();
    lengths.sort_by(f64::total_cmp);
    assert_eq!(lengths, vec![1.0, 1.0, 2.0, 2.0, 3.0, 4.0]);
}

#[test]
fn distance_marginals_are_exchangeable() {
    let x = |r: u64| excursion(&ThetaParams::brownian(), 1024, Seed::new(9, 0).replica(r));
    let pair = |r: u64, a: usize, b: usize| {
        let g = x(r);
        let mut rng = Seed::new(9, 1).replica(r).rng();
        let u: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        distance_matrix(&g, &u)[a][b]
    };
    let d12: Vec<f64> = (0..1000).map(|r| pair(r, 1, 2)).collect();
    let d23: Vec<f64> = (1000..2000).map(|r| pair(r, 2, 3)).collect();
    let d01: Vec<f64> = (2000..3000).map(|r| pair(r, 0, 1)).collect();
    let d03: Vec<f64> = (3000..4000).map(|r| pair(r, 0, 3)).collect();
    assert!(ks_two_sample(&d12, &d23).unwrap().p_value > 0.01);
    assert!(ks_two_sample(&d01, &d03).unwrap().p_value > 0.01);
}

fn arb_theta() -> impl Strategy<Value = ThetaParams> {
    (0.05f64..1.0, prop::collection::vec(0.01f64..1.0, 0..5)).prop_map(|(s, b)| {
        let norm = (s * s + b.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let b: Vec<f64> = b.iter().map(|x| x / norm).collect();
        theta(s / norm, &b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vervaat_properties(th in arb_theta(), s in any::<u64>()) {
        let x = ei_bridge(&th, th.betas.len(), 2048, Seed::new(s, 0));
        let (v, _) = vervaat(&x).unwrap();
        prop_assert_eq!(v.values[0], 0.0);
        prop_assert_eq!(v.values[2048], 0.0);
        prop_assert!(v.min() >= -1e-12);
        prop_assert_eq!(vervaat(&v).unwrap().0, v.clone());
        for j in &v.jumps {
            prop_assert!((v.values[j.index] - v.values[j.index - 1] - j.size).abs() < 1e-9);
        }
    }

    #[test]
    fn reflected_processes(th in arb_theta(), s in any::<u64>()) {
        let x = excursion(&th, 2048, Seed::new(s, 0));
        let (h, refl) = h_exc(&x);
        let mut covered = vec![false; 2049];
        for (r, j) in refl.iter().zip(&x.jumps) {
            prop_assert!((r.values[0] - j.size).abs() < 1e-9);
            prop_assert!(r.values.windows(2).all(|p| p[1] <= p[0]));
            prop_assert!(r.values.iter().all(|&v| v >= 0.0 && v <= j.size));
            // Direct evaluation of inf_[t_i, u] X - X(t_i-) with left limits.
            let base = x.values[r.start] - j.size;
            for (o, &v) in r.values.iter().enumerate().take(r.values.len() - 1).skip(1) {
                let u = r.start + o;
                let inf = (r.start..=u)
                    .map(|l| {
                        let jumped: f64 = x.jumps.iter().filter(|jj| jj.index == l && l > r.start).map(|jj| jj.size).sum();
                        x.values[l] - jumped
                    })
                    .fold(f64::INFINITY, f64::min);
                prop_assert!((v - (inf - base).clamp(0.0, j.size)).abs() < 1e-12);
            }
            for c in covered.iter_mut().take(r.end).skip(r.start) {
                *c = true;
            }
        }
        prop_assert!(h.min() >= -1e-9);
        for k in 0..=2048 {
            prop_assert!(h.values[k] <= x.values[k] + 1e-12);
            if !covered[k] {
                prop_assert_eq!(h.values[k], x.values[k]);
            }
        }
    }

    #[test]
    fn frag_masses_refine(th in arb_theta(), s in any::<u64>(), t in 0.0f64..5.0, dt in 0.0f64..5.0) {
        let x = excursion(&th, 2048, Seed::new(s, 0));
        let (h, _) = h_exc(&x);
        for g in [&x, &h] {
            let f = frag_from_excursion(g, t);
            prop_assert!(f.values.windows(2).all(|p| p[0] >= p[1]));
            prop_assert!(f.sum() <= 1.0 + 2.0 / 2048.0);
            let coarse = drop_points(g, t);
            let fine = drop_points(g, t + dt);
            prop_assert!(coarse.iter().all(|k| fine.contains(k)));
        }
    }

    #[test]
    fn reduced_tree_reproduces_distances(s in any::<u64>(), q in 1usize..8) {
        let x = excursion(&ThetaParams::brownian(), 4096, Seed::new(s, 0));
        let mut rng = Seed::new(s, 1).rng();
        let mut pts: Vec<f64> = (0..q).map(|_| (rng.random_range(1..4096) as f64) / 4096.0).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let tol = 1e-9;
        let rt = continuum_reduced_tree(&x, &pts, tol).unwrap();
        let want = distance_matrix(&x, &pts);
        let got = rt.label_distances();
        for a in 0..want.len() {
            for b in 0..want.len() {
                prop_assert!((got[a][b] - want[a][b]).abs() <= 4.0 * tol);
            }
        }
    }
}
