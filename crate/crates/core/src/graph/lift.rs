//! Liftability, Legendrian lifts and the discrete flux primitive of an isotopy.

use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};

use super::{faces, polyline_integral, segment_integral, CylinderGraph, GraphError, Pt};
use crate::rational::{format_rational, frac_part, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Liftability {
    pub liftable: bool,
    /// First boundary walk with non-integral `∮ r dq`: edges and the integral.
    pub witness: Option<(Vec<usize>, Q)>,
}

/// A graph lifts to a Legendrian iff `∮ r dq` is integral on every cycle. The boundary walks of
/// all faces of all components generate the cycle space, so it suffices to test those.
pub fn liftability(g: &CylinderGraph) -> Result<Liftability, GraphError> {
    let dec = faces(g)?;
    for c in &dec.cycles {
        if !c.integral.is_integer() {
            return Ok(Liftability { liftable: false, witness: Some((c.edges(), c.integral.clone())) });
        }
    }
    Ok(Liftability { liftable: true, witness: None })
}

/// `q₁ ∈ [0, 1)` at every vertex and at every polyline point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendrianLift {
    pub vertex_q1: Vec<Q>,
    /// `edge_q1[e][k]` is the value at the `k`-th point of edge `e`'s polyline.
    pub edge_q1: Vec<Vec<Q>>,
}

/// Values of `q₁` accumulated along a polyline from `start`, with `dq₁ = −r dq`.
fn along(start: &Q, pl: &[Pt]) -> Vec<Q> {
    let mut out = Vec::with_capacity(pl.len());
    let mut cur = start.clone();
    out.push(frac_part(&cur));
    for w in pl.windows(2) {
        cur -= segment_integral(&w[0], &w[1]);
        out.push(frac_part(&cur));
    }
    out
}

/// The Legendrian lift normalized by `q₁(marked) = 0`, built by breadth-first search.
/// Components without the marked point are normalized at their lowest-index vertex.
pub fn legendrian_lift(g: &CylinderGraph) -> Result<LegendrianLift, GraphError> {
    let order: Vec<usize> = (0..g.edges().len()).collect();
    legendrian_lift_with_order(g, &order)
}

/// Same as [`legendrian_lift`], exploring edges in the given priority order (so the spanning
/// tree can be varied); the result does not depend on the order for liftable graphs.
pub fn legendrian_lift_with_order(g: &CylinderGraph, edge_order: &[usize]) -> Result<LegendrianLift, GraphError> {
    let marked = g.marked().ok_or(GraphError::MissingMarkedPoint)?;
    let lift = liftability(g)?;
    if let Some((edges, integral)) = lift.witness {
        return Err(GraphError::NotLiftable { edges, integral: format_rational(&integral) });
    }
    let nv = g.vertices().len();
    let mut rank = vec![0; g.edges().len()];
    for (i, &e) in edge_order.iter().enumerate() {
        rank[e] = i;
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for h in 0..g.half_edge_count() {
        incident[g.origin(h)].push(h);
    }
    for list in &mut incident {
        list.sort_by_key(|&h| (rank[h / 2], h));
    }
    let mut vertex_q1: Vec<Option<Q>> = vec![None; nv];
    let mut edge_q1: Vec<Option<Vec<Q>>> = vec![None; g.edges().len()];
    let roots = std::iter::once(marked).chain(0..nv);
    for root in roots {
        if vertex_q1[root].is_some() {
            continue;
        }
        vertex_q1[root] = Some(Q::zero());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let base = vertex_q1[v].clone().unwrap();
            for &h in &incident[v] {
                let e = h / 2;
                let pl = g.half_edge_polyline(h);
                let mut vals = along(&base, &pl);
                let end = vals.last().unwrap().clone();
                let w = g.head(h);
                match &vertex_q1[w] {
                    None => {
                        vertex_q1[w] = Some(end);
                        queue.push_back(w);
                    }
                    Some(existing) if *existing != end => {
                        // Unreachable for liftable graphs; reported defensively.
                        return Err(GraphError::NotLiftable { edges: vec![e], integral: format_rational(&polyline_integral(&pl)) });
                    }
                    Some(_) => {}
                }
                if edge_q1[e].is_none() {
                    if h % 2 == 1 {
                        vals.reverse();
                    }
                    edge_q1[e] = Some(vals);
                }
            }
        }
    }
    Ok(LegendrianLift {
        vertex_q1: vertex_q1.into_iter().map(|x| x.unwrap()).collect(),
        edge_q1: edge_q1.into_iter().map(|x| x.unwrap()).collect(),
    })
}

/// Discrete flux primitive on one frame of a sampled isotopy.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxValues {
    pub vertex: Vec<Q>,
    /// `edge[e][k]` at the `k`-th polyline point of edge `e`.
    pub edge: Vec<Vec<Q>>,
    /// Largest disagreement between the two ends of a non-tree edge (zero for a consistent isotopy).
    pub max_path_discrepancy: Q,
}

/// Lift displacement reduced into `(−½, ½]`.
fn reduce_half(x: &Q) -> Q {
    let half = Q::new(1.into(), 2.into());
    let mut y = frac_part(x);
    if y > half {
        y -= Q::one();
    }
    y
}

/// Signed area swept by a straight segment moving from `(a0, b0)` to `(a1, b1)` between two frames,
/// oriented as `ω(∂_t, ∂_s)`: minus the shoelace area of the quadrilateral `a0, b0, b1, a1`.
fn swept(a0: &Pt, b0: &Pt, a1: &Pt, b1: &Pt) -> Q {
    let quad = [a0, b0, b1, a1];
    let mut twice = Q::zero();
    for i in 0..4 {
        let (p, q) = (quad[i], quad[(i + 1) % 4]);
        twice += &p.r * &q.q - &q.r * &p.q;
    }
    -twice / Q::from_integer(2.into())
}

fn check_compatible(frames: &[CylinderGraph]) -> Result<(), GraphError> {
    let first = &frames[0];
    for (k, f) in frames.iter().enumerate() {
        let bad = |reason: &str| GraphError::FramesIncompatible { frame: k, reason: reason.to_string() };
        if f.vertices().len() != first.vertices().len() || f.edges().len() != first.edges().len() {
            return Err(bad("different vertex or edge counts"));
        }
        if f.marked() != first.marked() || f.marked().is_none() {
            return Err(bad("marked point missing or moved to another vertex"));
        }
        for (e, e0) in f.edges().iter().zip(first.edges()) {
            if e.v != e0.v || e.polyline.len() != e0.polyline.len() {
                return Err(bad("edges do not share a common subdivision"));
            }
        }
    }
    Ok(())
}

/// Frame `k + 1` with every polyline point lifted to within `½` of frame `k`.
fn aligned(prev: &CylinderGraph, next: &CylinderGraph) -> (Vec<Pt>, Vec<Vec<Pt>>) {
    let align = |a: &Pt, b: &Pt| Pt::new(b.r.clone(), &a.q + reduce_half(&(&b.q - &a.q)));
    let vertices = prev.vertices().iter().zip(next.vertices()).map(|(a, b)| align(a, b)).collect();
    let edges = prev
        .edges()
        .iter()
        .zip(next.edges())
        .map(|(ea, eb)| ea.polyline.iter().zip(&eb.polyline).map(|(a, b)| align(a, b)).collect())
        .collect();
    (vertices, edges)
}

/// Per-point swept areas between two frames, accumulated from the marked point along a
/// breadth-first spanning tree.
fn swept_potential(prev: &CylinderGraph, next: &CylinderGraph, edge_order: &[usize]) -> (Vec<Q>, Vec<Vec<Q>>, Q) {
    let (_, next_edges) = aligned(prev, next);
    let nv = prev.vertices().len();
    let mut rank = vec![0; prev.edges().len()];
    for (i, &e) in edge_order.iter().enumerate() {
        rank[e] = i;
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for h in 0..prev.half_edge_count() {
        incident[prev.origin(h)].push(h);
    }
    for list in &mut incident {
        list.sort_by_key(|&h| (rank[h / 2], h));
    }
    let mut vertex: Vec<Option<Q>> = vec![None; nv];
    let mut edge: Vec<Option<Vec<Q>>> = vec![None; prev.edges().len()];
    let mut discrepancy = Q::zero();
    let root = prev.marked().expect("frames carry a marked point");
    let roots = std::iter::once(root).chain(0..nv);
    for root in roots {
        if vertex[root].is_some() {
            continue;
        }
        vertex[root] = Some(Q::zero());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let base = vertex[v].clone().unwrap();
            for &h in &incident[v] {
                let e = h / 2;
                let (p0, p1) = (&prev.edges()[e].polyline, &next_edges[e]);
                let idx: Vec<usize> = if h % 2 == 0 { (0..p0.len()).collect() } else { (0..p0.len()).rev().collect() };
                let mut vals = vec![base.clone()];
                for w in idx.windows(2) {
                    let s = swept(&p0[w[0]], &p0[w[1]], &p1[w[0]], &p1[w[1]]);
                    let last = vals.last().unwrap().clone();
                    vals.push(last + s);
                }
                let end = vals.last().unwrap().clone();
                let head = prev.head(h);
                match &vertex[head] {
                    None => {
                        vertex[head] = Some(end);
                        queue.push_back(head);
                    }
                    Some(x) => {
                        let d = (x - &end).abs();
                        if d > discrepancy {
                            discrepancy = d;
                        }
                    }
                }
                if edge[e].is_none() {
                    if h % 2 == 1 {
                        vals.reverse();
                    }
                    edge[e] = Some(vals);
                }
            }
        }
    }
    (vertex.into_iter().map(|x| x.unwrap()).collect(), edge.into_iter().map(|x| x.unwrap()).collect(), discrepancy)
}

/// `H̄(x) = r(•)·q̇(•) + d/dτ ∫_{[t,τ]×[•,x]} φ*ω` at frame `t_index`, by central differences
/// (one-sided at the first and last frame). Frames are sampled at spacing `dt`.
pub fn flux_primitive(frames: &[CylinderGraph], t_index: usize, dt: &Q) -> Result<FluxValues, GraphError> {
    let order: Vec<usize> = (0..frames.first().map_or(0, |f| f.edges().len())).collect();
    flux_primitive_with_order(frames, t_index, dt, &order)
}

pub fn flux_primitive_with_order(frames: &[CylinderGraph], t_index: usize, dt: &Q, edge_order: &[usize]) -> Result<FluxValues, GraphError> {
    if frames.len() < 2 {
        return Err(GraphError::FramesIncompatible { frame: 0, reason: "need at least two frames".into() });
    }
    if t_index >= frames.len() || !dt.is_positive() {
        return Err(GraphError::InvalidParameter(format!("frame index {t_index} of {} with dt = {}", frames.len(), format_rational(dt))));
    }
    check_compatible(frames)?;
    let mut steps: Vec<(usize, usize)> = Vec::new();
    if t_index + 1 < frames.len() {
        steps.push((t_index, t_index + 1));
    }
    if t_index > 0 {
        steps.push((t_index - 1, t_index));
    }
    let span = dt * Q::from_integer((steps.len() as i64).into());
    let cur = &frames[t_index];
    let nv = cur.vertices().len();
    let mut vertex = vec![Q::zero(); nv];
    let mut edge: Vec<Vec<Q>> = cur.edges().iter().map(|e| vec![Q::zero(); e.polyline.len()]).collect();
    let mut discrepancy = Q::zero();
    let marked = cur.marked().unwrap();
    let mut marked_dq = Q::zero();
    for &(a, b) in &steps {
        let (v, e, d) = swept_potential(&frames[a], &frames[b], edge_order);
        for (acc, x) in vertex.iter_mut().zip(&v) {
            *acc += x;
        }
        for (acc, x) in edge.iter_mut().zip(&e) {
            for (y, z) in acc.iter_mut().zip(x) {
                *y += z;
            }
        }
        if d > discrepancy {
            discrepancy = d;
        }
        marked_dq += reduce_half(&(&frames[b].vertices()[marked].q - &frames[a].vertices()[marked].q));
    }
    let base = &cur.vertices()[marked].r * &marked_dq;
    let finish = |x: &Q| (&base + x) / &span;
    Ok(FluxValues {
        vertex: vertex.iter().map(finish).collect(),
        edge: edge.iter().map(|xs| xs.iter().map(finish).collect()).collect(),
        max_path_discrepancy: discrepancy / &span,
    })
}
