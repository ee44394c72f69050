//! Chords in the closed unit disk, laminations of trees and excursions,
//! face masses, Hausdorff and process distances, SVG rendering.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::excursion::GridPath;
use crate::fragmentation::{removed_count, RankedMasses};
use crate::plane_tree::{contour_visits, PlaneTree, ReducedTree};
use crate::sampler::{ExpClocks, Seed};

/// Segment between the circle points at angles `a <= b` (clockwise turns from 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub a: f64,
    pub b: f64,
}

pub type Point = (f64, f64);

/// `e^{-2 pi i theta}`.
pub fn circle_point(theta: f64) -> Point {
    let x = 2.0 * PI * theta;
    (x.cos(), -x.sin())
}

impl Chord {
    pub fn new(a: f64, b: f64) -> Self {
        if a <= b {
            Chord { a, b }
        } else {
            Chord { a: b, b: a }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn endpoints(&self) -> (Point, Point) {
        (circle_point(self.a), circle_point(self.b))
    }

    /// Crossing in the open disk: endpoints strictly interleave.
    pub fn crosses(&self, o: &Chord) -> bool {
        (self.a < o.a && o.a < self.b && self.b < o.b) || (o.a < self.a && self.a < o.b && o.b < self.b)
    }

    /// Largest distance from a point of the chord to the circle.
    pub fn depth(&self) -> f64 {
        1.0 - (PI * (self.b - self.a)).cos().abs()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Lamination {
    pub chords: Vec<Chord>,
}

impl Lamination {
    pub fn new(chords: Vec<Chord>) -> Self {
        Lamination { chords }
    }

    pub fn circle() -> Self {
        Lamination::default()
    }

    /// Nondegenerate distinct chords sorted by `(a asc, b desc)`.
    fn proper_chords(&self) -> Vec<Chord> {
        let mut c: Vec<Chord> = self.chords.iter().copied().filter(|c| !c.is_degenerate()).collect();
        c.sort_by(|x, y| x.a.total_cmp(&y.a).then(y.b.total_cmp(&x.b)));
        c.dedup();
        c
    }

    pub fn check_noncrossing(&self) -> Result<()> {
        sweep(&self.proper_chords()).map(|_| ())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["a", "b"])?;
        for c in &self.chords {
            wr.write_record([format!("{:e}", c.a), format!("{:e}", c.b)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Stack sweep over chords sorted by `(a asc, b desc)`. Returns the face
/// masses: one per chord (the face just inside it) and the outer face last.
fn sweep(chords: &[Chord]) -> Result<Vec<f64>> {
    let mut masses = vec![0.0; chords.len() + 1];
    let mut stack: Vec<usize> = Vec::new();
    let mut outer = 1.0;
    for (i, c) in chords.iter().enumerate() {
        while let Some(&top) = stack.last() {
            if chords[top].b <= c.a {
                stack.pop();
            } else {
                break;
            }
        }
        let span = c.b - c.a;
        match stack.last() {
            Some(&top) => {
                let t = chords[top];
                if c.b > t.b {
                    return Err(Error::CrossingChords(t.a, t.b, c.a, c.b));
                }
                masses[top] -= span;
            }
            None => outer -= span,
        }
        masses[i] += span;
        stack.push(i);
    }
    masses[chords.len()] = outer;
    Ok(masses)
}

/// Ranked masses of the faces of the disk cut by the chords.
pub fn face_masses(l: &Lamination) -> Result<RankedMasses> {
    Ok(RankedMasses::new(sweep(&l.proper_chords())?))
}

/// Number of faces (nondegenerate distinct chords plus one).
pub fn face_count(l: &Lamination) -> Result<usize> {
    let c = l.proper_chords();
    sweep(&c)?;
    Ok(c.len() + 1)
}

/// Chord of each edge, indexed by child endpoint minus one.
pub fn chords_from_tree(tree: &PlaneTree) -> Vec<Chord> {
    let visits = contour_visits(tree);
    let two_z = 2.0 * tree.len() as f64;
    (1..tree.len())
        .map(|v| {
            let (g, d) = visits[v];
            Chord::new(g as f64 / two_z, d as f64 / two_z)
        })
        .collect()
}

/// Chords of the first `floor(t) ∧ (ζ-1)` edges of `edge_order`.
pub fn lamination_at(tree: &PlaneTree, edge_order: &[usize], t: f64) -> Lamination {
    let chords = chords_from_tree(tree);
    let k = removed_count(tree, t);
    Lamination::new(edge_order[..k].iter().map(|&v| chords[v - 1]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LamEvent {
    pub time: f64,
    pub chord: Chord,
}

/// Chord events sorted by time.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LamEventList {
    pub events: Vec<LamEvent>,
}

impl LamEventList {
    pub fn new(mut events: Vec<LamEvent>) -> Self {
        events.sort_by(|x, y| x.time.total_cmp(&y.time));
        LamEventList { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Lamination at time `t` (events with time `<= t`).
    pub fn at(&self, t: f64) -> Lamination {
        Lamination::new(self.events.iter().take_while(|e| e.time <= t).map(|e| e.chord).collect())
    }

    pub fn scale_time(&self, factor: f64) -> Self {
        LamEventList {
            events: self.events.iter().map(|e| LamEvent { time: e.time * factor, chord: e.chord }).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["time", "a", "b"])?;
        for e in &self.events {
            wr.write_record([format!("{:e}", e.time), format!("{:e}", e.chord.a), format!("{:e}", e.chord.b)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Edge `k` of the order appears at time `k` (1-based).
pub fn integer_lamination_process(tree: &PlaneTree, edge_order: &[usize]) -> LamEventList {
    let chords = chords_from_tree(tree);
    LamEventList::new(
        edge_order
            .iter()
            .enumerate()
            .map(|(k, &v)| LamEvent { time: (k + 1) as f64, chord: chords[v - 1] })
            .collect(),
    )
}

/// Edge `e` appears at its clock time.
pub fn dynamic_lamination(tree: &PlaneTree, clocks: &ExpClocks) -> LamEventList {
    let chords = chords_from_tree(tree);
    LamEventList::new(
        (1..tree.len())
            .map(|v| LamEvent { time: clocks.get(v), chord: chords[v - 1] })
            .collect(),
    )
}

/// Leaf positions `(i, j)` such that the edge above each vertex separates
/// leaves `i+1..=j` (in lexicographic leaf order) from the rest.
fn edge_arc_pairs(rt: &ReducedTree) -> Vec<(usize, usize)> {
    let n = rt.shape.len();
    let mut pos = vec![usize::MAX; n];
    let mut count = 0;
    for (v, p) in pos.iter_mut().enumerate().skip(1) {
        if rt.shape.num_children(v) == 0 {
            count += 1;
            *p = count;
        }
    }
    let mut lo = vec![usize::MAX; n];
    let mut hi = vec![0usize; n];
    for v in (1..n).rev() {
        if pos[v] != usize::MAX {
            lo[v] = lo[v].min(pos[v]);
            hi[v] = hi[v].max(pos[v]);
        }
        if let Some(p) = rt.shape.parent(v) {
            lo[p] = lo[p].min(lo[v]);
            hi[p] = hi[p].max(hi[v]);
        }
    }
    (1..n).map(|v| (lo[v] - 1, hi[v])).collect()
}

fn arc_midpoint(arcs: &[f64], i: usize) -> f64 {
    let next = if i + 1 < arcs.len() { arcs[i + 1] } else { 1.0 };
    (arcs[i] + next) / 2.0
}

/// Canonical reduced lamination: each edge's chord joins the midpoints of the
/// two arcs delimiting the leaves below it; edge `e` appears at an
/// Exp(`length(e)`) time. Circle only unless the leaves are exactly the `q`
/// marked points.
pub fn reduced_lamination(rt: &ReducedTree, arcs: &[f64], seed: Seed) -> (Lamination, LamEventList) {
    if !rt.has_exact_leaves() || arcs.len() != rt.q + 1 {
        return (Lamination::circle(), LamEventList::default());
    }
    let pairs = edge_arc_pairs(rt);
    let mut rng = seed.rng();
    let mut chords = Vec::with_capacity(pairs.len());
    let mut events = Vec::with_capacity(pairs.len());
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let c = Chord::new(arc_midpoint(arcs, i), arc_midpoint(arcs, j));
        chords.push(c);
        let rate = rt.edge_lengths[k + 1];
        let time = if rate > 0.0 {
            Exp::new(rate).expect("positive rate").sample(&mut rng)
        } else {
            f64::INFINITY
        };
        events.push(LamEvent { time, chord: c });
    }
    (Lamination::new(chords), LamEventList::new(events))
}

/// Checks the reduced-lamination condition: a chord joins the open arcs `i`
/// and `j` iff some edge separates leaves `i+1..=j` from the rest.
pub fn satisfies_split_condition(l: &Lamination, rt: &ReducedTree, arcs: &[f64]) -> bool {
    let arc_of = |x: f64| -> Option<usize> {
        if arcs.contains(&x) {
            return None;
        }
        arcs.iter().rposition(|&a| a < x)
    };
    let mut from_chords = Vec::new();
    for c in &l.chords {
        match (arc_of(c.a), arc_of(c.b)) {
            (Some(i), Some(j)) if i != j => from_chords.push((i.min(j), i.max(j))),
            _ => return false,
        }
    }
    let mut from_edges = edge_arc_pairs(rt);
    from_chords.sort_unstable();
    from_chords.dedup();
    from_edges.sort_unstable();
    from_edges.dedup();
    from_chords == from_edges
}

/// `q` uniform angles sorted, with `0` prepended.
pub fn arc_points(q: usize, seed: Seed) -> Vec<f64> {
    let mut rng = seed.rng();
    let mut a: Vec<f64> = (0..q).map(|_| rng.random::<f64>()).collect();
    a.sort_by(f64::total_cmp);
    a.insert(0, 0.0);
    a
}

/// `max_j |e^{-2 pi i a_j} - e^{-2 pi i j/q}|` over `j = 1..=q`.
pub fn max_arc_deviation(arcs: &[f64]) -> f64 {
    let q = arcs.len() - 1;
    (1..=q)
        .map(|j| {
            let (x, y) = circle_point(arcs[j]);
            let (u, v) = circle_point(j as f64 / q as f64);
            ((x - u).powi(2) + (y - v).powi(2)).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Range-minimum table over grid values.
struct SparseMin {
    levels: Vec<Vec<f64>>,
}

impl SparseMin {
    fn new(v: &[f64]) -> Self {
        let mut levels = vec![v.to_vec()];
        let mut w = 1;
        while 2 * w <= v.len() {
            let prev = levels.last().unwrap();
            let next: Vec<f64> = (0..prev.len() - w).map(|i| prev[i].min(prev[i + w])).collect();
            levels.push(next);
            w *= 2;
        }
        SparseMin { levels }
    }

    /// Minimum over `lo..=hi`.
    fn min(&self, lo: usize, hi: usize) -> f64 {
        let len = hi - lo + 1;
        let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        self.levels[k][lo].min(self.levels[k][hi + 1 - (1 << k)])
    }
}

/// Largest `k <= i` with `v[k] < y`.
fn last_below(t: &SparseMin, i: usize, y: f64) -> Option<usize> {
    if t.min(0, i) >= y {
        return None;
    }
    let (mut lo, mut hi) = (0, i);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if t.min(mid, i) < y {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Some(lo)
}

/// Smallest `k >= i` with `v[k] < y`.
fn first_below(t: &SparseMin, i: usize, end: usize, y: f64) -> Option<usize> {
    if t.min(i, end) >= y {
        return None;
    }
    let (mut lo, mut hi) = (i, end);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if t.min(i, mid) < y {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

/// Chords of a Poisson process with intensity `(d-g)^{-1} dx dy ds` on the
/// region under the piecewise-linear interpolant of `f`, times `[0, horizon]`.
/// The intensity is capped at `m`.
pub fn poisson_lamination(f: &GridPath, horizon: f64, seed: Seed) -> LamEventList {
    let m = f.m;
    let mf = m as f64;
    let top = f.values.iter().copied().fold(0.0, f64::max);
    if horizon <= 0.0 || top <= 0.0 {
        return LamEventList::default();
    }
    let table = SparseMin::new(&f.values);
    let mut rng = seed.rng();
    let mean = mf * top * horizon;
    let n = Poisson::new(mean).expect("positive mean").sample(&mut rng) as u64;
    let mut events = Vec::new();
    for _ in 0..n {
        let x: f64 = rng.random();
        let y: f64 = rng.random::<f64>() * top;
        let s: f64 = rng.random::<f64>() * horizon;
        let accept: f64 = rng.random();
        let pos = x * mf;
        let i = (pos.floor() as usize).min(m - 1);
        let fx = f.values[i] + (f.values[i + 1] - f.values[i]) * (pos - i as f64);
        if y >= fx || y <= 0.0 {
            continue;
        }
        let k = last_below(&table, i, y).expect("f(0) = 0 lies below y");
        let g = (k as f64 + (y - f.values[k]) / (f.values[k + 1] - f.values[k])) / mf;
        let k = first_below(&table, i + 1, m, y).expect("f(1) = 0 lies below y");
        let d = (k as f64 - (y - f.values[k]) / (f.values[k - 1] - f.values[k])) / mf;
        let rate = (1.0 / (d - g)).min(mf);
        if accept * mf < rate {
            events.push(LamEvent { time: s, chord: Chord::new(g, d) });
        }
    }
    LamEventList::new(events)
}

/// `T * integral of (d-g)^{-1}` for a tent of height `h`.
pub fn tent_expected_count(h: f64, horizon: f64) -> f64 {
    h * horizon
}

fn segment_distance(p: Point, s: (Point, Point)) -> f64 {
    let ((ax, ay), (bx, by)) = s;
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - ax) * dx + (p.1 - ay) * dy) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (ax + t * dx, ay + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// `sup_{p in from} d(p, circle ∪ to)` with chords sampled at spacing `tol/2`,
/// stopping early once `cap` is exceeded.
fn directed(from: &[Chord], to: &[Chord], tol: f64, cap: f64) -> f64 {
    let segs: Vec<(Point, Point)> = to.iter().filter(|c| !c.is_degenerate()).map(|c| c.endpoints()).collect();
    let mut best: f64 = 0.0;
    // A chord present in both sets is at distance 0 from itself.
    for c in from.iter().filter(|c| !c.is_degenerate() && !to.contains(c)) {
        if c.depth() <= best {
            continue;
        }
        let (p, q) = c.endpoints();
        let len = ((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt();
        let n = (len / (tol / 2.0)).ceil().max(1.0) as usize;
        for k in 0..=n {
            let t = k as f64 / n as f64;
            let pt = (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1));
            let mut d = 1.0 - (pt.0 * pt.0 + pt.1 * pt.1).sqrt();
            for s in &segs {
                if d <= best {
                    break;
                }
                d = d.min(segment_distance(pt, *s));
            }
            best = best.max(d);
            if best > cap {
                return best;
            }
        }
    }
    best
}

/// Hausdorff distance between `circle ∪ L1` and `circle ∪ L2`, accurate to `tol`.
pub fn hausdorff(l1: &Lamination, l2: &Lamination, tol: f64) -> f64 {
    hausdorff_capped(&l1.chords, &l2.chords, tol, f64::INFINITY)
}

fn hausdorff_capped(a: &[Chord], b: &[Chord], tol: f64, cap: f64) -> f64 {
    let x = directed(a, b, tol, cap);
    if x > cap {
        return x;
    }
    x.max(directed(b, a, tol, cap))
}

/// Min over monotone alignments of the events of `max(time distortion,
/// Hausdorff mismatch)`. Unmatched events cost the depth of their chord.
/// Events after `horizon` may serve as partners and are otherwise free.
pub fn process_distance(p1: &LamEventList, p2: &LamEventList, horizon: f64, tol: f64) -> f64 {
    let e1 = &p1.events;
    let e2 = &p2.events;
    let skip = |e: &LamEvent| if e.time > horizon { 0.0 } else { e.chord.depth() };
    // Events far past the horizon can never matter.
    let reach = |list: &[LamEvent], limit: f64| list.iter().take_while(|e| e.time <= limit).count();
    let bound_all = {
        let a: f64 = e1.iter().filter(|e| e.time <= horizon).map(skip).fold(0.0, f64::max);
        let b: f64 = e2.iter().filter(|e| e.time <= horizon).map(skip).fold(0.0, f64::max);
        a.max(b)
    };
    let n1 = reach(e1, horizon + bound_all);
    let n2 = reach(e2, horizon + bound_all);
    let (e1, e2) = (&e1[..n1], &e2[..n2]);
    let pair_cost = |a: &LamEvent, b: &LamEvent, cap: f64| -> f64 {
        if a.time > horizon && b.time > horizon {
            return 0.0;
        }
        let dt = (a.time - b.time).abs();
        if dt > cap {
            return dt;
        }
        if a.chord == b.chord {
            return dt;
        }
        dt.max(hausdorff_capped(&[a.chord], &[b.chord], tol, cap))
    };
    // Upper bound from the index-wise alignment.
    let mut upper: f64 = 0.0;
    for k in 0..n1.max(n2) {
        let c = match (e1.get(k), e2.get(k)) {
            (Some(a), Some(b)) => pair_cost(a, b, f64::INFINITY),
            (Some(a), None) => skip(a),
            (None, Some(b)) => skip(b),
            (None, None) => 0.0,
        };
        upper = upper.max(c);
    }
    let upper = upper.min(bound_all);
    let inf = f64::INFINITY;
    let mut prev = vec![inf; n2 + 1];
    prev[0] = 0.0;
    for j in 1..=n2 {
        prev[j] = prev[j - 1].max(skip(&e2[j - 1]));
    }
    for i in 1..=n1 {
        let mut cur = vec![inf; n2 + 1];
        cur[0] = prev[0].max(skip(&e1[i - 1]));
        for j in 1..=n2 {
            let mut best = prev[j].max(skip(&e1[i - 1])).min(cur[j - 1].max(skip(&e2[j - 1])));
            let base = prev[j - 1];
            if base < best.min(upper + 1e-12) {
                let c = pair_cost(&e1[i - 1], &e2[j - 1], best.min(upper + 1e-12));
                best = best.min(base.max(c));
            }
            cur[j] = best;
        }
        prev = cur;
    }
    prev[n2].min(upper)
}

fn svg_header(s: &mut String) {
    s.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 2.2\" width=\"512\" height=\"512\">\n");
}

/// Unit circle with chords; optional ticks at the given angles.
pub fn lamination_svg(l: &Lamination, ticks: &[f64]) -> String {
    let mut s = String::new();
    svg_header(&mut s);
    s.push_str("<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"black\" stroke-width=\"0.005\"/>\n");
    for c in l.chords.iter().filter(|c| !c.is_degenerate()) {
        let ((x1, y1), (x2, y2)) = c.endpoints();
        // SVG's y axis points down.
        let _ = writeln!(
            s,
            "<line x1=\"{x1:.6}\" y1=\"{:.6}\" x2=\"{x2:.6}\" y2=\"{:.6}\" stroke=\"black\" stroke-width=\"0.003\"/>",
            -y1, -y2
        );
    }
    for &t in ticks {
        let (x, y) = circle_point(t);
        let _ = writeln!(
            s,
            "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"red\" stroke-width=\"0.005\"/>",
            0.97 * x, -0.97 * y, 1.03 * x, -1.03 * y
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Tree drawn with leaves spread left to right and depth downwards.
pub fn tree_svg(tree: &PlaneTree) -> String {
    let n = tree.len();
    let depth = tree.depths();
    let maxd = depth.iter().copied().max().unwrap_or(0).max(1) as f64;
    let leaves = (0..n).filter(|&v| tree.num_children(v) == 0).count().max(1) as f64;
    let mut x = vec![0.0; n];
    let mut next = 0.0;
    for v in (0..n).rev() {
        if tree.num_children(v) == 0 {
            x[v] = next;
        } else {
            let k = tree.children(v);
            x[v] = (x[k[0]] + x[k[k.len() - 1]]) / 2.0;
        }
        if tree.num_children(v) == 0 {
            next += 1.0;
        }
    }
    let px = |v: usize| -1.0 + 2.0 * (leaves - 1.0 - x[v] + 0.5) / leaves;
    let py = |v: usize| -1.0 + 2.0 * depth[v] as f64 / maxd;
    let mut s = String::new();
    svg_header(&mut s);
    for v in 1..n {
        let p = tree.parent(v).unwrap();
        let _ = writeln!(
            s,
            "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"black\" stroke-width=\"0.004\"/>",
            px(p), py(p), px(v), py(v)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg<P: AsRef<Path>>(path: P, svg: &str) -> Result<()> {
    std::fs::write(path, svg)?;
    Ok(())
}
