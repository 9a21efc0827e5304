//! Constructing cylinder graphs from curves, and the standard families:
//! `φ_n`, the chamber graphs of the FLTZ stop, and sampled braid loops.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use super::{cross, on_segment, CylinderGraph, Edge, GraphError, Pt};
use crate::rational::{q, qi, Q};

/// Assembles a graph from straight segments, polylines and circles, splitting every curve at
/// every contact with another curve and merging overlapping pieces.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    r_minus: Q,
    r_plus: Q,
    curves: Vec<(Vec<Pt>, bool)>,
    nodes: Vec<Pt>,
    marked: Option<Pt>,
}

impl GraphBuilder {
    pub fn new(r_minus: Q, r_plus: Q) -> Self {
        GraphBuilder { r_minus, r_plus, curves: Vec::new(), nodes: Vec::new(), marked: None }
    }

    /// The noncontractible circle `r = c`.
    pub fn circle(&mut self, r: Q) -> &mut Self {
        self.curves.push((vec![Pt::new(r.clone(), Q::zero()), Pt::new(r, Q::one())], true));
        self
    }

    pub fn segment(&mut self, a: Pt, b: Pt) -> &mut Self {
        self.curves.push((vec![a, b], false));
        self
    }

    pub fn polyline(&mut self, points: Vec<Pt>) -> &mut Self {
        self.curves.push((points, false));
        self
    }

    /// A closed polyline; its last point must agree with the first on the cylinder.
    pub fn closed_polyline(&mut self, points: Vec<Pt>) -> &mut Self {
        self.curves.push((points, true));
        self
    }

    /// Forces a vertex at `p`.
    pub fn node(&mut self, p: Pt) -> &mut Self {
        self.nodes.push(p);
        self
    }

    pub fn marked(&mut self, p: Pt) -> &mut Self {
        self.marked = Some(p);
        self
    }

    pub fn build(&self) -> Result<CylinderGraph, GraphError> {
        let mut forced: BTreeSet<Pt> = self.nodes.iter().map(Pt::reduced).collect();
        if let Some(m) = &self.marked {
            forced.insert(m.reduced());
        }
        let mut segs: Vec<(Pt, Pt)> = Vec::new();
        for (points, closed) in &self.curves {
            if points.len() < 2 {
                if let Some(p) = points.first() {
                    forced.insert(p.reduced());
                }
                continue;
            }
            if !closed {
                forced.insert(points[0].reduced());
                forced.insert(points[points.len() - 1].reduced());
            } else if !points[0].same_on_cylinder(&points[points.len() - 1]) {
                return Err(GraphError::InvalidParameter("closed polyline does not close up".into()));
            }
            for w in points.windows(2) {
                if w[0] != w[1] {
                    segs.push((w[0].clone(), w[1].clone()));
                }
            }
        }
        let mut cuts: Vec<Vec<Q>> = vec![vec![Q::zero(), Q::one()]; segs.len()];
        for i in 0..segs.len() {
            for j in i..segs.len() {
                for k in translates(&segs[i], &segs[j]) {
                    if i == j && k == 0 {
                        continue;
                    }
                    let kq = Q::from_integer(k.into());
                    let (a, b) = (segs[j].0.shifted(&kq), segs[j].1.shifted(&kq));
                    let (ci, cj) = contact_params(&segs[i].0, &segs[i].1, &a, &b);
                    cuts[i].extend(ci);
                    cuts[j].extend(cj);
                }
            }
            for p in &forced {
                let (lo, hi) = q_range(&segs[i]);
                let mut k = (&lo - &p.q).ceil();
                while &p.q + &k <= hi {
                    let c = p.shifted(&k);
                    if on_segment(&c, &segs[i].0, &segs[i].1) {
                        cuts[i].push(param_on(&segs[i].0, &segs[i].1, &c));
                    }
                    k += Q::one();
                }
            }
        }
        // Split into pieces and merge duplicates.
        let mut pieces: BTreeSet<(Pt, Pt)> = BTreeSet::new();
        for (s, c) in segs.iter().zip(cuts.iter_mut()) {
            c.sort();
            c.dedup();
            for w in c.windows(2) {
                let (a, b) = (point_at(&s.0, &s.1, &w[0]), point_at(&s.0, &s.1, &w[1]));
                pieces.insert(canonical(a, b));
            }
        }
        let pieces: Vec<(Pt, Pt)> = pieces.into_iter().collect();
        let mut incidence: BTreeMap<Pt, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, (a, b)) in pieces.iter().enumerate() {
            incidence.entry(a.reduced()).or_default().push((i, 0));
            incidence.entry(b.reduced()).or_default().push((i, 1));
        }
        let mut vertex_set: BTreeSet<Pt> = incidence.iter().filter(|(_, l)| l.len() != 2).map(|(p, _)| p.clone()).collect();
        for p in &forced {
            vertex_set.insert(p.clone());
        }
        let mut visited = vec![false; pieces.len()];
        let mut edges: Vec<(Pt, Pt, Vec<Pt>)> = Vec::new();
        let walk = |start: &Pt, first: (usize, usize), visited: &mut Vec<bool>, vertex_set: &BTreeSet<Pt>| {
            let mut poly = vec![start.clone()];
            let (mut piece, mut end) = first;
            loop {
                visited[piece] = true;
                let (a, b) = &pieces[piece];
                let (from, to) = if end == 0 { (a, b) } else { (b, a) };
                let cur = poly.last().unwrap().clone();
                let shift = &cur.q - &from.q;
                let next = to.shifted(&shift);
                poly.push(next.clone());
                let key = next.reduced();
                if vertex_set.contains(&key) {
                    return (key, poly);
                }
                let other = incidence[&key].iter().find(|&&(p, e)| !(p == piece && e == 1 - end)).copied().expect("degree-2 point");
                piece = other.0;
                end = other.1;
                if visited[piece] {
                    return (key, poly);
                }
            }
        };
        for v in vertex_set.clone() {
            let incident = incidence.get(&v).cloned().unwrap_or_default();
            for (piece, end) in incident {
                if !visited[piece] {
                    let (to, poly) = walk(&v, (piece, end), &mut visited, &vertex_set);
                    edges.push((v.clone(), to, poly));
                }
            }
        }
        // Closed curves carrying no vertex: place one at their smallest point.
        while let Some(piece) = visited.iter().position(|x| !x) {
            let v = pieces[piece].0.reduced();
            vertex_set.insert(v.clone());
            let (to, poly) = walk(&v, (piece, 0), &mut visited, &vertex_set);
            edges.push((v, to, poly));
        }
        let vertices: Vec<Pt> = vertex_set.into_iter().collect();
        let index: BTreeMap<&Pt, usize> = vertices.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let edges: Vec<Edge> = edges.into_iter().map(|(a, b, poly)| Edge { v: [index[&a], index[&b]], polyline: poly }).collect();
        CylinderGraph::new(self.r_minus.clone(), self.r_plus.clone(), vertices, edges, self.marked.clone())
    }
}

fn q_range(s: &(Pt, Pt)) -> (Q, Q) {
    (s.0.q.clone().min(s.1.q.clone()), s.0.q.clone().max(s.1.q.clone()))
}

fn translates(s: &(Pt, Pt), t: &(Pt, Pt)) -> Vec<i64> {
    let (s_lo, s_hi) = q_range(s);
    let (t_lo, t_hi) = q_range(t);
    let lo: i64 = (&s_lo - &t_hi).ceil().to_integer().try_into().unwrap_or(0);
    let hi: i64 = (&s_hi - &t_lo).floor().to_integer().try_into().unwrap_or(0);
    (lo..=hi).collect()
}

fn point_at(a: &Pt, b: &Pt, t: &Q) -> Pt {
    Pt::new(&a.r + t * (&b.r - &a.r), &a.q + t * (&b.q - &a.q))
}

fn param_on(a: &Pt, b: &Pt, p: &Pt) -> Q {
    let d = b.sub(a);
    let w = p.sub(a);
    (&d.0 * &w.0 + &d.1 * &w.1) / (&d.0 * &d.0 + &d.1 * &d.1)
}

/// Parameters along `a→b` and `c→d` of their contact points (crossings, touchings, overlap ends).
fn contact_params(a: &Pt, b: &Pt, c: &Pt, d: &Pt) -> (Vec<Q>, Vec<Q>) {
    let d1 = b.sub(a);
    let d2 = d.sub(c);
    let denom = cross(&d1, &d2);
    let w = c.sub(a);
    let unit = |x: &Q| !x.is_negative() && *x <= Q::one();
    if !denom.is_zero() {
        let u = cross(&w, &d2) / &denom;
        let v = cross(&w, &d1) / &denom;
        return if unit(&u) && unit(&v) { (vec![u], vec![v]) } else { (vec![], vec![]) };
    }
    if !cross(&w, &d1).is_zero() {
        return (vec![], vec![]);
    }
    let on_first: Vec<Q> = [c, d].iter().map(|p| param_on(a, b, p)).filter(unit).collect();
    let on_second: Vec<Q> = [a, b].iter().map(|p| param_on(c, d, p)).filter(unit).collect();
    (on_first, on_second)
}

/// Orientation-free representative of a piece: endpoints ordered by `(q, r)` after reducing
/// the first one into `q ∈ [0, 1)`.
fn canonical(a: Pt, b: Pt) -> (Pt, Pt) {
    let (x, y) = if (&a.q, &a.r) <= (&b.q, &b.r) { (a, b) } else { (b, a) };
    let k = -x.q.floor();
    (x.shifted(&k), y.shifted(&k))
}

fn check_bounds(n: i64, r_minus: &Q, r_plus: &Q) -> Result<(), GraphError> {
    if n < 1 {
        return Err(GraphError::InvalidParameter(format!("n must be positive, got {n}")));
    }
    if !r_minus.is_negative() || *r_plus <= qi(n) {
        return Err(GraphError::InvalidParameter("the cylinder must satisfy R⁻ < 0 < n < R⁺".into()));
    }
    Ok(())
}

/// `φ_n`: circles `r = 0` and `r = n` joined by the `n` segments `[0, n] × {k/n}`; marked `(0, 0)`.
pub fn build_phi_n(n: i64, r_minus: Q, r_plus: Q) -> Result<CylinderGraph, GraphError> {
    check_bounds(n, &r_minus, &r_plus)?;
    let mut b = GraphBuilder::new(r_minus, r_plus);
    b.circle(qi(0)).circle(qi(n));
    for k in 0..n {
        b.segment(Pt::new(qi(0), q(k, n)), Pt::new(qi(n), q(k, n)));
    }
    b.marked(Pt::new(qi(0), qi(0)));
    b.build()
}

/// How a chamber `I ⊂ {0, …, n}` is turned into a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FltzMode {
    /// Circles at every `i ∈ I`; `i − j` equally spaced radial segments between adjacent `j < i`.
    Full,
    /// The segment `[0, n] × {0}` and circles at every `i ∈ I`.
    Partial,
}

fn check_chamber(chamber: &[i64], n: i64) -> Result<Vec<i64>, GraphError> {
    if n < 1 {
        return Err(GraphError::InvalidChamber(format!("n must be positive, got {n}")));
    }
    let set: BTreeSet<i64> = chamber.iter().copied().collect();
    if set.len() != chamber.len() {
        return Err(GraphError::InvalidChamber("repeated index".into()));
    }
    if let Some(&bad) = set.iter().find(|&&i| i < 0 || i > n) {
        return Err(GraphError::InvalidChamber(format!("index {bad} outside 0..={n}")));
    }
    if !set.contains(&0) || !set.contains(&n) {
        return Err(GraphError::InvalidChamber(format!("the chamber must contain 0 and {n}")));
    }
    Ok(set.into_iter().collect())
}

/// The chamber graph on the cylinder `[−1, n + 1] × S¹`, marked at `(0, 0)`.
pub fn build_fltz_graph(chamber: &[i64], n: i64, mode: FltzMode) -> Result<CylinderGraph, GraphError> {
    let levels = check_chamber(chamber, n)?;
    let mut b = GraphBuilder::new(qi(-1), qi(n + 1));
    for &i in &levels {
        b.circle(qi(i));
    }
    match mode {
        FltzMode::Full => {
            for w in levels.windows(2) {
                let d = w[1] - w[0];
                for k in 0..d {
                    b.segment(Pt::new(qi(w[0]), q(k, d)), Pt::new(qi(w[1]), q(k, d)));
                }
            }
        }
        FltzMode::Partial => {
            b.segment(Pt::new(qi(0), qi(0)), Pt::new(qi(n), qi(0)));
        }
    }
    b.marked(Pt::new(qi(0), qi(0)));
    b.build()
}

/// Consecutive differences `i_j − i_{j−1}` of a chamber: the expected face areas.
pub fn chamber_coloring(chamber: &[i64]) -> Vec<i64> {
    let mut levels = chamber.to_vec();
    levels.sort();
    levels.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Generators of the annular braid group realized as loops of graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopGenerator {
    /// Exchange of the faces on either side of the `i`-th segment.
    Tau(i64),
    /// Rigid rotation by `1/n`.
    Rho,
}

/// `frame_count` samples of the loop, starting at `φ_n`. For `τ_i` the parameter `s ∈ [0, 4]`
/// runs through four phases: tilt the `i`-th segment until its ends reach the neighbouring
/// segments, slide the ends along them past each other, and untilt.
pub fn braid_loop_frames(generator: LoopGenerator, n: i64, frame_count: usize, r_minus: Q, r_plus: Q) -> Result<Vec<CylinderGraph>, GraphError> {
    check_bounds(n, &r_minus, &r_plus)?;
    if frame_count < 3 {
        return Err(GraphError::InvalidParameter(format!("need at least 3 frames, got {frame_count}")));
    }
    let last = (frame_count - 1) as i64;
    match generator {
        LoopGenerator::Rho => {
            let base = build_phi_n(n, r_minus, r_plus)?;
            Ok((0..=last).map(|j| base.rotated(&q(j, n * last))).collect())
        }
        LoopGenerator::Tau(i) => {
            if i < 1 || i > n - 1 {
                return Err(GraphError::InvalidParameter(format!("τ index {i} outside 1..={}", n - 1)));
            }
            (0..=last).map(|k| tau_frame(n, i, &q(4 * k, last), &r_minus, &r_plus)).collect()
        }
    }
}

fn tau_frame(n: i64, i: i64, s: &Q, r_minus: &Q, r_plus: &Q) -> Result<CylinderGraph, GraphError> {
    let h = q(1, n);
    let nq = qi(n);
    let mut b = GraphBuilder::new(r_minus.clone(), r_plus.clone());
    b.circle(qi(0)).circle(nq.clone());
    for j in (0..n).filter(|&j| j != i) {
        b.segment(Pt::new(qi(0), q(j, n)), Pt::new(nq.clone(), q(j, n)));
    }
    let ih = qi(i) * &h;
    let (up, down) = (&ih + &h, &ih - &h);
    let (a, c) = if *s <= qi(1) {
        let a = s * &h;
        (Pt::new(qi(0), &ih + &a), Pt::new(nq.clone(), &ih - &a))
    } else if *s <= qi(3) {
        let bb = (s - qi(1)) * &nq / qi(2);
        (Pt::new(bb.clone(), up), Pt::new(&nq - &bb, down))
    } else {
        let a = (qi(4) - s) * &h;
        (Pt::new(qi(0), &ih - &a), Pt::new(nq.clone(), &ih + &a))
    };
    b.segment(a, c);
    b.marked(Pt::new(qi(0), qi(0)));
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::faces;

    #[test]
    fn phi_4_structure() {
        let g = build_phi_n(4, qi(-1), qi(5)).unwrap();
        assert_eq!(g.vertices().len(), 8);
        assert_eq!(g.edges().len(), 12);
        let f = faces(&g).unwrap();
        assert_eq!(f.bounded_areas(), vec![qi(1); 4]);
    }

    #[test]
    fn builder_splits_crossings_and_merges_overlaps() {
        let mut b = GraphBuilder::new(qi(-2), qi(2));
        b.segment(Pt::new(qi(-1), q(1, 4)), Pt::new(qi(1), q(1, 4)));
        b.segment(Pt::new(qi(0), qi(0)), Pt::new(qi(0), q(1, 2)));
        b.segment(Pt::new(qi(0), qi(0)), Pt::new(qi(0), q(1, 4)));
        let g = b.build().unwrap();
        assert_eq!(g.vertices().len(), 5);
        assert_eq!(g.edges().len(), 4);
    }

    #[test]
    fn chamber_validation() {
        assert!(matches!(build_fltz_graph(&[1, 4], 4, FltzMode::Full), Err(GraphError::InvalidChamber(_))));
        assert!(matches!(build_fltz_graph(&[0, 5], 4, FltzMode::Full), Err(GraphError::InvalidChamber(_))));
        assert!(build_fltz_graph(&[0, 2, 4], 4, FltzMode::Full).is_ok());
        assert_eq!(chamber_coloring(&[0, 1, 2, 4]), vec![1, 1, 2]);
    }
}
