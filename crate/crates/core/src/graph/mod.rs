//! Embedded (possibly degenerate) graphs on the cylinder `[R⁻, R⁺] × S¹`.
//!
//! Points are `(r, q)` with `q = q₂` taken modulo 1. Edges are piecewise-linear
//! polylines in lifted coordinates: the `q` values along a polyline are real
//! numbers, and the difference between the lifted end and the end vertex is an
//! integer recording the winding. All coordinates are exact rationals, so face
//! areas `∮ r dq` and the liftability test are exact.

mod build;
mod faces;
mod lift;

pub use build::*;
pub use faces::*;
pub use lift::*;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, frac_part, parse_rational, serde_q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("cylinder bounds must satisfy R⁻ < R⁺ (got {0}, {1})")]
    InvalidBounds(String, String),
    #[error("edge {edge} leaves the cylinder at (r, q) = ({r}, {q})")]
    OutOfBounds { edge: usize, r: String, q: String },
    #[error("vertex {vertex} lies outside the cylinder")]
    VertexOutOfBounds { vertex: usize },
    #[error("edge {edge} refers to vertex {vertex}, which does not exist")]
    EdgeIndex { edge: usize, vertex: usize },
    #[error("edge {edge}: polyline endpoints do not match its vertices")]
    BadEndpoint { edge: usize },
    #[error("edge {edge}: polyline needs at least two points")]
    ShortPolyline { edge: usize },
    #[error("edges {a} and {b} intersect at (r, q) = ({r}, {q})")]
    SelfIntersection { a: usize, b: usize, r: String, q: String },
    #[error("vertex {vertex} lies on the interior of edge {edge}")]
    VertexOnEdge { vertex: usize, edge: usize },
    #[error("vertices {a} and {b} coincide")]
    CoincidentVertices { a: usize, b: usize },
    #[error("edge {edge} closes a cycle that is entirely collapsed")]
    CollapsedCycle { edge: usize },
    #[error("the marked point does not lie on the graph")]
    MarkedPointOffGraph,
    #[error("no marked point is set")]
    MissingMarkedPoint,
    #[error("not liftable: ∮ r dq = {integral} over the cycle through edges {edges:?}")]
    NotLiftable { edges: Vec<usize>, integral: String },
    #[error("frames incompatible at frame {frame}: {reason}")]
    FramesIncompatible { frame: usize, reason: String },
    #[error("invalid chamber: {0}")]
    InvalidChamber(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Euler characteristic check failed (V − E + Σχ(f) = {0})")]
    EulerMismatch(i64),
    #[error("malformed graph JSON: {0}")]
    Json(String),
}

/// A point `(r, q)` of the cylinder or of its universal cover.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pt {
    pub r: Q,
    pub q: Q,
}

impl fmt::Debug for Pt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.r), format_rational(&self.q))
    }
}

impl Pt {
    pub fn new(r: Q, q: Q) -> Self {
        Pt { r, q }
    }

    pub fn shifted(&self, k: &Q) -> Pt {
        Pt { r: self.r.clone(), q: &self.q + k }
    }

    /// Representative with `q ∈ [0, 1)`.
    pub fn reduced(&self) -> Pt {
        Pt { r: self.r.clone(), q: frac_part(&self.q) }
    }

    /// Equal on the cylinder, i.e. up to an integer shift in `q`.
    pub fn same_on_cylinder(&self, other: &Pt) -> bool {
        self.r == other.r && (&self.q - &other.q).is_integer()
    }

    pub fn sub(&self, o: &Pt) -> (Q, Q) {
        (&self.r - &o.r, &self.q - &o.q)
    }
}

pub(crate) fn cross(a: &(Q, Q), b: &(Q, Q)) -> Q {
    &a.0 * &b.1 - &a.1 * &b.0
}

/// `∫ r dq` along the straight segment `a → b` (exact trapezoid rule).
pub fn segment_integral(a: &Pt, b: &Pt) -> Q {
    (&a.r + &b.r) * (&b.q - &a.q) / Q::from_integer(2.into())
}

/// `∫ r dq` along a polyline.
pub fn polyline_integral(points: &[Pt]) -> Q {
    points.windows(2).map(|w| segment_integral(&w[0], &w[1])).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub v: [usize; 2],
    /// Lifted polyline; the first point has exactly the `q` of vertex `v[0]`.
    pub polyline: Vec<Pt>,
}

impl Edge {
    /// Integer winding: lifted `q` displacement minus the displacement between the end vertices.
    pub fn lift_delta(&self) -> Q {
        let (a, b) = (self.polyline.first().unwrap(), self.polyline.last().unwrap());
        &b.q - &a.q
    }
}

/// A validated embedded graph on the cylinder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderGraph {
    r_minus: Q,
    r_plus: Q,
    vertices: Vec<Pt>,
    edges: Vec<Edge>,
    marked: Option<usize>,
}

impl CylinderGraph {
    /// Validates and normalizes raw data: vertex `q` reduced to `[0, 1)`, polylines shifted to start
    /// at their first vertex, repeated points dropped, constant edges contracted, and the marked
    /// point (if it lies inside an edge) inserted as a new vertex.
    pub fn new(r_minus: Q, r_plus: Q, vertices: Vec<Pt>, edges: Vec<Edge>, marked: Option<Pt>) -> Result<Self, GraphError> {
        if r_minus >= r_plus {
            return Err(GraphError::InvalidBounds(format_rational(&r_minus), format_rational(&r_plus)));
        }
        let mut vertices: Vec<Pt> = vertices.iter().map(Pt::reduced).collect();
        for (i, v) in vertices.iter().enumerate() {
            if v.r < r_minus || v.r > r_plus {
                return Err(GraphError::VertexOutOfBounds { vertex: i });
            }
        }
        let mut parent: Vec<usize> = (0..vertices.len()).collect();
        let mut kept = Vec::with_capacity(edges.len());
        for (ei, e) in edges.into_iter().enumerate() {
            for &v in &e.v {
                if v >= vertices.len() {
                    return Err(GraphError::EdgeIndex { edge: ei, vertex: v });
                }
            }
            let mut pl: Vec<Pt> = Vec::with_capacity(e.polyline.len());
            for p in e.polyline {
                if pl.last() != Some(&p) {
                    pl.push(p);
                }
            }
            if pl.is_empty() {
                return Err(GraphError::ShortPolyline { edge: ei });
            }
            for p in &pl {
                if p.r < r_minus || p.r > r_plus {
                    return Err(GraphError::OutOfBounds { edge: ei, r: format_rational(&p.r), q: format_rational(&p.q) });
                }
            }
            let (a, b) = (&vertices[e.v[0]], &vertices[e.v[1]]);
            if !pl[0].same_on_cylinder(a) || !pl[pl.len() - 1].same_on_cylinder(b) {
                return Err(GraphError::BadEndpoint { edge: ei });
            }
            let shift = &a.q - &pl[0].q;
            let pl: Vec<Pt> = pl.iter().map(|p| p.shifted(&shift)).collect();
            if pl.len() == 1 {
                // Constant edge: contract it, unless it closes a collapsed cycle.
                let (ra, rb) = (find(&mut parent, e.v[0]), find(&mut parent, e.v[1]));
                if ra == rb {
                    return Err(GraphError::CollapsedCycle { edge: ei });
                }
                parent[rb.max(ra)] = ra.min(rb);
                continue;
            }
            kept.push((ei, Edge { v: e.v, polyline: pl }));
        }
        // Re-index vertices after contraction.
        let mut new_index = vec![usize::MAX; vertices.len()];
        let mut new_vertices = Vec::new();
        for v in 0..vertices.len() {
            let root = find(&mut parent, v);
            if new_index[root] == usize::MAX {
                new_index[root] = new_vertices.len();
                new_vertices.push(vertices[root].clone());
            }
            new_index[v] = new_index[root];
        }
        vertices = new_vertices;
        let mut edges: Vec<Edge> = kept.into_iter().map(|(_, e)| Edge { v: [new_index[e.v[0]], new_index[e.v[1]]], polyline: e.polyline }).collect();
        let mut marked_index = None;
        if let Some(m) = marked {
            let m = m.reduced();
            if let Some(i) = vertices.iter().position(|v| *v == m) {
                marked_index = Some(i);
            } else {
                let (ei, seg, point) = locate_on_edges(&edges, &m).ok_or(GraphError::MarkedPointOffGraph)?;
                let vi = vertices.len();
                vertices.push(m.clone());
                let old = edges[ei].clone();
                let mut first: Vec<Pt> = old.polyline[..=seg].to_vec();
                if first.last() != Some(&point) {
                    first.push(point.clone());
                }
                let mut second = vec![point.clone()];
                second.extend(old.polyline[seg + 1..].iter().filter(|p| **p != point).cloned());
                let shift = &m.q - &point.q;
                let second: Vec<Pt> = second.iter().map(|p| p.shifted(&shift)).collect();
                edges[ei] = Edge { v: [old.v[0], vi], polyline: first };
                edges.push(Edge { v: [vi, old.v[1]], polyline: second });
                marked_index = Some(vi);
            }
        }
        let g = CylinderGraph { r_minus, r_plus, vertices, edges, marked: marked_index };
        g.check_embedding()?;
        Ok(g)
    }

    pub fn r_minus(&self) -> &Q {
        &self.r_minus
    }

    pub fn r_plus(&self) -> &Q {
        &self.r_plus
    }

    pub fn vertices(&self) -> &[Pt] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn marked(&self) -> Option<usize> {
        self.marked
    }

    pub fn with_marked(&self, vertex: Option<usize>) -> CylinderGraph {
        CylinderGraph { marked: vertex, ..self.clone() }
    }

    pub fn with_bounds(&self, r_minus: Q, r_plus: Q) -> Result<CylinderGraph, GraphError> {
        let marked = self.marked.map(|m| self.vertices[m].clone());
        CylinderGraph::new(r_minus, r_plus, self.vertices.clone(), self.edges.clone(), marked)
    }

    /// Rigid rotation `q ↦ q + dq` (the marked point moves along).
    pub fn rotated(&self, dq: &Q) -> CylinderGraph {
        let vertices: Vec<Pt> = self.vertices.iter().map(|v| v.shifted(dq).reduced()).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let shift = &vertices[e.v[0]].q - (&e.polyline[0].q + dq);
                Edge { v: e.v, polyline: e.polyline.iter().map(|p| p.shifted(&(dq + &shift))).collect() }
            })
            .collect();
        CylinderGraph { r_minus: self.r_minus.clone(), r_plus: self.r_plus.clone(), vertices, edges, marked: self.marked }
    }

    /// Half-edge `2e` runs along edge `e`, `2e + 1` against it.
    pub fn half_edge_count(&self) -> usize {
        2 * self.edges.len()
    }

    /// Lifted polyline of a half-edge, starting at its origin vertex.
    pub fn half_edge_polyline(&self, h: usize) -> Vec<Pt> {
        let e = &self.edges[h / 2];
        if h % 2 == 0 {
            e.polyline.clone()
        } else {
            e.polyline.iter().rev().cloned().collect()
        }
    }

    pub fn origin(&self, h: usize) -> usize {
        self.edges[h / 2].v[h % 2]
    }

    pub fn head(&self, h: usize) -> usize {
        self.edges[h / 2].v[1 - h % 2]
    }

    /// Connected-component label of every vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.v[0]), find(&mut parent, e.v[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut label = BTreeMap::new();
        (0..self.vertices.len())
            .map(|v| {
                let root = find(&mut parent, v);
                let next = label.len();
                *label.entry(root).or_insert(next)
            })
            .collect()
    }

    fn segments(&self) -> Vec<Seg> {
        let mut out = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            let last = e.polyline.len() - 2;
            for (k, w) in e.polyline.windows(2).enumerate() {
                out.push(Seg {
                    edge: ei,
                    index: k,
                    a: w[0].clone(),
                    b: w[1].clone(),
                    a_vertex: (k == 0).then_some(e.v[0]),
                    b_vertex: (k == last).then_some(e.v[1]),
                });
            }
        }
        out
    }

    /// Checks that open edges are injective, pairwise disjoint and avoid the vertices.
    fn check_embedding(&self) -> Result<(), GraphError> {
        for a in 0..self.vertices.len() {
            for b in a + 1..self.vertices.len() {
                if self.vertices[a] == self.vertices[b] {
                    return Err(GraphError::CoincidentVertices { a, b });
                }
            }
        }
        let segs = self.segments();
        for (i, s) in segs.iter().enumerate() {
            for t in &segs[i..] {
                for k in translate_range(s, t) {
                    if std::ptr::eq(s, t) && k == 0 {
                        continue;
                    }
                    let tk = t.shifted(k);
                    if let Some(bad) = bad_contact(s, &tk) {
                        return Err(GraphError::SelfIntersection {
                            a: s.edge,
                            b: t.edge,
                            r: format_rational(&bad.r),
                            q: format_rational(&frac_part(&bad.q)),
                        });
                    }
                }
            }
        }
        for (vi, v) in self.vertices.iter().enumerate() {
            for s in &segs {
                let lo = s.a.q.clone().min(s.b.q.clone());
                let hi = s.a.q.clone().max(s.b.q.clone());
                let k0 = (&lo - &v.q).ceil();
                let mut k = k0;
                while &v.q + &k <= hi {
                    let p = v.shifted(&k);
                    if on_segment(&p, &s.a, &s.b) {
                        let ok = (p == s.a && s.a_vertex == Some(vi)) || (p == s.b && s.b_vertex == Some(vi));
                        if !ok {
                            return Err(GraphError::VertexOnEdge { vertex: vi, edge: s.edge });
                        }
                    }
                    k += Q::one();
                }
            }
        }
        Ok(())
    }

    pub fn to_json_value(&self) -> GraphJson {
        GraphJson {
            r: [self.r_minus.clone(), self.r_plus.clone()],
            vertices: self.vertices.iter().map(|v| [v.r.clone(), v.q.clone()]).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson { v: e.v, polyline: e.polyline.iter().map(|p| [p.r.clone(), p.q.clone()]).collect() })
                .collect(),
            marked: self.marked.map(|m| [self.vertices[m].r.clone(), self.vertices[m].q.clone()]),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("graph JSON serialization cannot fail")
    }

    pub fn from_json_value(j: &GraphJson) -> Result<Self, GraphError> {
        let pt = |p: &[Q; 2]| Pt::new(p[0].clone(), p[1].clone());
        CylinderGraph::new(
            j.r[0].clone(),
            j.r[1].clone(),
            j.vertices.iter().map(pt).collect(),
            j.edges.iter().map(|e| Edge { v: e.v, polyline: e.polyline.iter().map(pt).collect() }).collect(),
            j.marked.as_ref().map(pt),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let j: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        Self::from_json_value(&j)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// First `(edge, segment index, lifted point)` whose segment contains `p` (mod 1).
fn locate_on_edges(edges: &[Edge], p: &Pt) -> Option<(usize, usize, Pt)> {
    for (ei, e) in edges.iter().enumerate() {
        for (k, w) in e.polyline.windows(2).enumerate() {
            let lo = w[0].q.clone().min(w[1].q.clone());
            let hi = w[0].q.clone().max(w[1].q.clone());
            let mut shift = (&lo - &p.q).ceil();
            while &p.q + &shift <= hi {
                let cand = p.shifted(&shift);
                if on_segment(&cand, &w[0], &w[1]) {
                    return Some((ei, k, cand));
                }
                shift += Q::one();
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
struct Seg {
    edge: usize,
    index: usize,
    a: Pt,
    b: Pt,
    a_vertex: Option<usize>,
    b_vertex: Option<usize>,
}

impl Seg {
    fn shifted(&self, k: i64) -> Seg {
        let k = Q::from_integer(k.into());
        Seg { a: self.a.shifted(&k), b: self.b.shifted(&k), ..self.clone() }
    }

    fn q_range(&self) -> (Q, Q) {
        (self.a.q.clone().min(self.b.q.clone()), self.a.q.clone().max(self.b.q.clone()))
    }
}

/// Integer translates `k` for which `t + k` can meet `s` in `q`.
fn translate_range(s: &Seg, t: &Seg) -> std::ops::RangeInclusive<i64> {
    let (s_lo, s_hi) = s.q_range();
    let (t_lo, t_hi) = t.q_range();
    let lo = (&s_lo - &t_hi).ceil();
    let hi = (&s_hi - &t_lo).floor();
    let to_i = |x: &Q| -> i64 { x.to_integer().try_into().unwrap_or(0) };
    to_i(&lo)..=to_i(&hi)
}

pub(crate) fn on_segment(p: &Pt, a: &Pt, b: &Pt) -> bool {
    let d = b.sub(a);
    let w = p.sub(a);
    if !cross(&d, &w).is_zero() {
        return false;
    }
    let dot = &d.0 * &w.0 + &d.1 * &w.1;
    let len2 = &d.0 * &d.0 + &d.1 * &d.1;
    !dot.is_negative() && dot <= len2
}

/// A contact point between `s` and `t` that is not allowed in an embedding, if any.
fn bad_contact(s: &Seg, t: &Seg) -> Option<Pt> {
    let (r_lo1, r_hi1) = (s.a.r.clone().min(s.b.r.clone()), s.a.r.clone().max(s.b.r.clone()));
    let (r_lo2, r_hi2) = (t.a.r.clone().min(t.b.r.clone()), t.a.r.clone().max(t.b.r.clone()));
    if r_hi1 < r_lo2 || r_hi2 < r_lo1 {
        return None;
    }
    let d1 = s.b.sub(&s.a);
    let d2 = t.b.sub(&t.a);
    let denom = cross(&d1, &d2);
    let w = t.a.sub(&s.a);
    let contact = if !denom.is_zero() {
        let u = cross(&w, &d2) / &denom;
        let v = cross(&w, &d1) / &denom;
        if u.is_negative() || u > Q::one() || v.is_negative() || v > Q::one() {
            return None;
        }
        Pt::new(&s.a.r + &u * &d1.0, &s.a.q + &u * &d1.1)
    } else {
        if !cross(&w, &d1).is_zero() {
            return None;
        }
        // Collinear: find the overlap of the two parameter ranges along d1.
        let len2 = &d1.0 * &d1.0 + &d1.1 * &d1.1;
        let param = |p: &Pt| {
            let x = p.sub(&s.a);
            (&x.0 * &d1.0 + &x.1 * &d1.1) / &len2
        };
        let (p1, p2) = (param(&t.a), param(&t.b));
        let lo = p1.clone().min(p2.clone()).max(Q::zero());
        let hi = p1.max(p2).min(Q::one());
        if lo > hi {
            return None;
        }
        let at_lo = Pt::new(&s.a.r + &lo * &d1.0, &s.a.q + &lo * &d1.1);
        if lo < hi {
            // Overlapping collinear pieces are never allowed.
            return Some(at_lo);
        }
        at_lo
    };
    // Allowed: a shared vertex at the ends of both segments, or consecutive segments of one edge.
    let end_of = |g: &Seg, p: &Pt| -> Option<Option<usize>> {
        if *p == g.a {
            Some(g.a_vertex)
        } else if *p == g.b {
            Some(g.b_vertex)
        } else {
            None
        }
    };
    match (end_of(s, &contact), end_of(t, &contact)) {
        (Some(Some(x)), Some(Some(y))) if x == y => None,
        (Some(None), Some(None)) if s.edge == t.edge && (s.index + 1 == t.index || t.index + 1 == s.index) => {
            let shared_ok = (s.index + 1 == t.index && contact == s.b && contact == t.a) || (t.index + 1 == s.index && contact == t.b && contact == s.a);
            (!shared_ok).then_some(contact)
        }
        _ => Some(contact),
    }
}

/// Serialized form of a graph; rationals are written as `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(rename = "R", with = "serde_pair")]
    pub r: [Q; 2],
    #[serde(with = "serde_points")]
    pub vertices: Vec<[Q; 2]>,
    pub edges: Vec<EdgeJson>,
    #[serde(default, with = "serde_opt_point")]
    pub marked: Option<[Q; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub v: [usize; 2],
    #[serde(with = "serde_points")]
    pub polyline: Vec<[Q; 2]>,
}

mod serde_pair {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &[Q; 2], s: S) -> Result<S::Ok, S::Error> {
        [format_rational(&p[0]), format_rational(&p[1])].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Q; 2], D::Error> {
        let v = <[serde_json::Value; 2]>::deserialize(d)?;
        Ok([serde_q::value_to_q(&v[0]).map_err(D::Error::custom)?, serde_q::value_to_q(&v[1]).map_err(D::Error::custom)?])
    }
}

mod serde_points {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ps: &[[Q; 2]], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[String; 2]> = ps.iter().map(|p| [format_rational(&p[0]), format_rational(&p[1])]).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<[Q; 2]>, D::Error> {
        let v = Vec::<[serde_json::Value; 2]>::deserialize(d)?;
        v.iter()
            .map(|p| Ok([serde_q::value_to_q(&p[0]).map_err(D::Error::custom)?, serde_q::value_to_q(&p[1]).map_err(D::Error::custom)?]))
            .collect()
    }
}

mod serde_opt_point {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Option<[Q; 2]>, s: S) -> Result<S::Ok, S::Error> {
        p.as_ref().map(|p| [format_rational(&p[0]), format_rational(&p[1])]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<[Q; 2]>, D::Error> {
        let v = Option::<[serde_json::Value; 2]>::deserialize(d)?;
        v.map(|p| Ok([serde_q::value_to_q(&p[0]).map_err(D::Error::custom)?, serde_q::value_to_q(&p[1]).map_err(D::Error::custom)?]))
            .transpose()
    }
}

/// Parses `"r,q"` into a point (used by command-line front ends).
pub fn parse_point(s: &str) -> Result<Pt, String> {
    let (r, q) = s.split_once(',').ok_or_else(|| format!("expected \"r,q\", got {s:?}"))?;
    Ok(Pt::new(parse_rational(r)?, parse_rational(q)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn p(r: Q, q: Q) -> Pt {
        Pt::new(r, q)
    }

    fn square() -> CylinderGraph {
        let h = q(1, 2);
        let vs = vec![p(qi(0), qi(0)), p(h.clone(), qi(0)), p(h.clone(), h.clone()), p(qi(0), h.clone())];
        let edges = (0..4).map(|i| Edge { v: [i, (i + 1) % 4], polyline: vec![vs[i].clone(), vs[(i + 1) % 4].clone()] }).collect();
        CylinderGraph::new(qi(-1), qi(1), vs, edges, Some(p(qi(0), qi(0)))).unwrap()
    }

    #[test]
    fn crossing_edges_rejected() {
        let vs = vec![p(qi(0), qi(0)), p(qi(2), q(1, 2)), p(qi(0), q(1, 2)), p(qi(2), qi(0))];
        let edges = vec![
            Edge { v: [0, 1], polyline: vec![vs[0].clone(), vs[1].clone()] },
            Edge { v: [2, 3], polyline: vec![vs[2].clone(), vs[3].clone()] },
        ];
        let err = CylinderGraph::new(qi(-1), qi(3), vs, edges, None).unwrap_err();
        assert!(matches!(err, GraphError::SelfIntersection { .. }), "{err:?}");
    }

    #[test]
    fn wrap_around_crossing_detected() {
        // A loop winding once at r = 1 and a segment crossing q = 0 at r = 1.
        let vs = vec![p(qi(1), q(1, 2)), p(qi(0), q(9, 10)), p(qi(2), q(1, 10))];
        let edges = vec![
            Edge { v: [0, 0], polyline: vec![vs[0].clone(), p(qi(1), q(3, 2))] },
            Edge { v: [1, 2], polyline: vec![vs[1].clone(), p(qi(2), q(11, 10))] },
        ];
        assert!(matches!(CylinderGraph::new(qi(-1), qi(3), vs, edges, None), Err(GraphError::SelfIntersection { .. })));
    }

    #[test]
    fn vertex_on_edge_rejected() {
        let vs = vec![p(qi(0), qi(0)), p(qi(2), qi(0)), p(qi(1), qi(0))];
        let edges = vec![Edge { v: [0, 1], polyline: vec![vs[0].clone(), vs[1].clone()] }];
        assert!(matches!(CylinderGraph::new(qi(-1), qi(3), vs, edges, None), Err(GraphError::VertexOnEdge { vertex: 2, edge: 0 })));
    }

    #[test]
    fn constant_edges_contract() {
        let vs = vec![p(qi(0), qi(0)), p(qi(0), qi(0)), p(qi(1), qi(0))];
        let edges = vec![
            Edge { v: [0, 1], polyline: vec![vs[0].clone()] },
            Edge { v: [1, 2], polyline: vec![vs[1].clone(), vs[2].clone()] },
        ];
        let g = CylinderGraph::new(qi(-1), qi(3), vs.clone(), edges, None).unwrap();
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(g.edges().len(), 1);
        let looped = vec![Edge { v: [0, 0], polyline: vec![vs[0].clone()] }];
        assert!(matches!(CylinderGraph::new(qi(-1), qi(3), vs, looped, None), Err(GraphError::CollapsedCycle { .. })));
    }

    #[test]
    fn marked_point_inside_edge_is_inserted() {
        let vs = vec![p(qi(0), qi(0)), p(qi(2), qi(0))];
        let edges = vec![Edge { v: [0, 1], polyline: vec![vs[0].clone(), vs[1].clone()] }];
        let g = CylinderGraph::new(qi(-1), qi(3), vs, edges, Some(p(qi(1), qi(0)))).unwrap();
        assert_eq!(g.vertices().len(), 3);
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.marked(), Some(2));
    }

    #[test]
    fn json_round_trip() {
        let g = square();
        let text = g.to_json();
        let back = CylinderGraph::from_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn integrals() {
        let a = p(qi(1), qi(0));
        let b = p(qi(3), qi(2));
        assert_eq!(segment_integral(&a, &b), qi(4));
        assert_eq!(polyline_integral(&[a.clone(), b.clone(), a]), qi(0));
    }
}
