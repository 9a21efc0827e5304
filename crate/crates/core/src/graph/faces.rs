//! Faces of a cylinder graph via its rotation system.
//!
//! Every half-edge lies on exactly one boundary walk ("cycle"), traversed with
//! the face on its left in the `(r, q)` plane. A cycle carries its integral
//! `∮ r dq` and its winding number in `q`. Within one connected component:
//!
//! * winding 0 with positive integral — boundary of a bounded face of the component;
//! * winding 0 with non-positive integral — the outer walk of a contractible component;
//! * winding +1 — the walk facing the `R⁻` boundary circle;
//! * winding −1 — the walk facing the `R⁺` boundary circle.
//!
//! Cycles of different components bound the same face of the whole graph exactly
//! when every component sees them in the same one of its own faces; that is
//! decided by exact ray-crossing point location.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::{cross, polyline_integral, CylinderGraph, GraphError, Pt};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CycleKind {
    Bounded,
    Outer,
    South,
    North,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub half_edges: Vec<usize>,
    /// `∮ r dq` along the walk.
    pub integral: Q,
    pub winding: i64,
    pub component: usize,
    pub kind: CycleKind,
}

impl Cycle {
    /// Edge ids along the walk, in order.
    pub fn edges(&self) -> Vec<usize> {
        self.half_edges.iter().map(|h| h / 2).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub cycles: Vec<usize>,
    /// Isolated vertices lying in the face.
    pub isolated: Vec<usize>,
    pub touches_south: bool,
    pub touches_north: bool,
    pub area: Q,
}

impl Face {
    /// Bounded and simply connected: one boundary walk, no punctures, no boundary circle.
    pub fn is_bounded(&self) -> bool {
        self.cycles.len() == 1 && self.isolated.is_empty() && !self.touches_south && !self.touches_north
    }

    pub fn is_annular(&self) -> bool {
        !self.is_bounded()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceDecomposition {
    pub cycles: Vec<Cycle>,
    pub faces: Vec<Face>,
    /// Face containing each cycle.
    pub cycle_face: Vec<usize>,
    component_of_vertex: Vec<usize>,
    component_cycles: Vec<Vec<usize>>,
    signatures: Vec<Vec<Option<usize>>>,
}

impl FaceDecomposition {
    /// Areas of the bounded simply connected faces, sorted.
    pub fn bounded_areas(&self) -> Vec<Q> {
        let mut a: Vec<Q> = self.faces.iter().filter(|f| f.is_bounded()).map(|f| f.area.clone()).collect();
        a.sort();
        a
    }

    pub fn total_area(&self) -> Q {
        self.faces.iter().map(|f| f.area.clone()).sum()
    }

    /// Face containing a point not on the graph.
    pub fn locate(&self, g: &CylinderGraph, p: &Pt) -> Option<usize> {
        let sig: Vec<Option<usize>> = (0..self.component_cycles.len()).map(|k| self.component_face_of(g, k, p)).collect();
        self.signatures.iter().position(|s| *s == sig)
    }

    /// Face on the left of each half-edge (half-edge `2e` runs along edge `e`, `2e + 1` against it).
    pub fn half_edge_faces(&self) -> Vec<usize> {
        let count = self.cycles.iter().map(|c| c.half_edges.len()).sum();
        let mut out = vec![usize::MAX; count];
        for (ci, c) in self.cycles.iter().enumerate() {
            for &h in &c.half_edges {
                out[h] = self.cycle_face[ci];
            }
        }
        out
    }

    /// Number of edges shared by each pair of distinct faces, keyed `(i, j)` with `i < j`.
    pub fn adjacency(&self) -> BTreeMap<(usize, usize), usize> {
        let mut face_of_half = BTreeMap::new();
        for (ci, c) in self.cycles.iter().enumerate() {
            for &h in &c.half_edges {
                face_of_half.insert(h, self.cycle_face[ci]);
            }
        }
        let mut out = BTreeMap::new();
        for (&h, &f) in &face_of_half {
            if h % 2 == 0 {
                let g = face_of_half[&(h + 1)];
                if f != g {
                    *out.entry((f.min(g), f.max(g))).or_insert(0) += 1;
                }
            }
        }
        out
    }

    fn component_face_of(&self, g: &CylinderGraph, k: usize, p: &Pt) -> Option<usize> {
        let cycles = &self.component_cycles[k];
        if cycles.is_empty() {
            return None;
        }
        for &c in cycles {
            let cy = &self.cycles[c];
            if matches!(cy.kind, CycleKind::Bounded | CycleKind::South) && crossing_index(g, cy, p) == 1 {
                return Some(c);
            }
        }
        cycles.iter().copied().find(|&c| matches!(self.cycles[c].kind, CycleKind::North | CycleKind::Outer))
    }
}

/// Signed number of crossings of the ray `{(r, q) : r > p.r}` at height `q = p.q + δ` with the
/// cycle, over all integer translates; `δ` is an infinitesimal positive offset.
pub(crate) fn crossing_index(g: &CylinderGraph, cycle: &Cycle, p: &Pt) -> i64 {
    let mut count = 0;
    for &h in &cycle.half_edges {
        let pl = g.half_edge_polyline(h);
        for w in pl.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let dq = &b.q - &a.q;
            if dq.is_zero() {
                continue;
            }
            let (lo, hi) = if dq.is_positive() { (&a.q, &b.q) } else { (&b.q, &a.q) };
            // Integers k with p.q − k ∈ [lo, hi).
            let k_hi = (&p.q - lo).floor();
            let k_lo = (&p.q - hi).floor() + Q::from_integer(1.into());
            let mut k = k_lo;
            while k <= k_hi {
                let y = &p.q - &k;
                let r = &a.r + (&y - &a.q) * (&b.r - &a.r) / &dq;
                if r > p.r {
                    count += if dq.is_positive() { 1 } else { -1 };
                }
                k += Q::from_integer(1.into());
            }
        }
    }
    count
}

fn direction(pl: &[Pt]) -> (Q, Q) {
    pl[1].sub(&pl[0])
}

/// Counter-clockwise angular order of direction vectors in the `(r, q)` plane.
fn angle_cmp(a: &(Q, Q), b: &(Q, Q)) -> Ordering {
    let half = |v: &(Q, Q)| u8::from(!(v.1.is_positive() || (v.1.is_zero() && v.0.is_positive())));
    half(a).cmp(&half(b)).then_with(|| {
        let c = cross(a, b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Computes the face decomposition, including the Euler-characteristic self-check.
pub fn faces(g: &CylinderGraph) -> Result<FaceDecomposition, GraphError> {
    let nv = g.vertices().len();
    let nh = g.half_edge_count();
    // Rotation system: outgoing half-edges at each vertex, counter-clockwise.
    let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for h in 0..nh {
        rotation[g.origin(h)].push(h);
    }
    let dirs: Vec<(Q, Q)> = (0..nh).map(|h| direction(&g.half_edge_polyline(h))).collect();
    for list in &mut rotation {
        list.sort_by(|&x, &y| angle_cmp(&dirs[x], &dirs[y]).then(x.cmp(&y)));
    }
    let mut position = vec![0; nh];
    for list in &rotation {
        for (i, &h) in list.iter().enumerate() {
            position[h] = i;
        }
    }
    let next = |h: usize| {
        let twin = h ^ 1;
        let list = &rotation[g.origin(twin)];
        list[(position[twin] + list.len() - 1) % list.len()]
    };

    let comp = g.components();
    let n_comp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut cycles = Vec::new();
    let mut seen = vec![false; nh];
    for start in 0..nh {
        if seen[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut h = start;
        while !seen[h] {
            seen[h] = true;
            walk.push(h);
            h = next(h);
        }
        let mut integral = Q::zero();
        let mut shift = Q::zero();
        for &x in &walk {
            let pl = g.half_edge_polyline(x);
            integral += polyline_integral(&pl);
            shift += &pl[pl.len() - 1].q - &pl[0].q;
        }
        let winding: i64 = shift.to_integer().try_into().expect("winding fits in i64");
        let kind = match winding {
            0 if integral.is_positive() => CycleKind::Bounded,
            0 => CycleKind::Outer,
            1 => CycleKind::South,
            -1 => CycleKind::North,
            _ => return Err(GraphError::EulerMismatch(winding)),
        };
        cycles.push(Cycle { half_edges: walk, integral, winding, component: comp[g.origin(start)], kind });
    }

    let mut component_cycles = vec![Vec::new(); n_comp];
    for (i, c) in cycles.iter().enumerate() {
        component_cycles[c.component].push(i);
    }
    let mut representative = vec![usize::MAX; n_comp];
    for (v, &k) in comp.iter().enumerate().rev() {
        representative[k] = v;
    }
    let mut dec = FaceDecomposition {
        cycles,
        faces: Vec::new(),
        cycle_face: Vec::new(),
        component_of_vertex: comp.clone(),
        component_cycles,
        signatures: Vec::new(),
    };

    // Signature of component k: which face of every other component contains it.
    let containing: Vec<Vec<Option<usize>>> = (0..n_comp)
        .map(|k| {
            let p = &g.vertices()[representative[k]];
            (0..n_comp).map(|j| if j == k { None } else { dec.component_face_of(g, j, p) }).collect()
        })
        .collect();
    let mut by_signature: BTreeMap<Vec<Option<usize>>, usize> = BTreeMap::new();
    let mut cycle_face = Vec::with_capacity(dec.cycles.len());
    for (ci, c) in dec.cycles.iter().enumerate() {
        let mut sig = containing[c.component].clone();
        sig[c.component] = Some(ci);
        let next_id = by_signature.len();
        let f = *by_signature.entry(sig.clone()).or_insert(next_id);
        if f == dec.signatures.len() {
            dec.signatures.push(sig);
            dec.faces.push(Face { cycles: Vec::new(), isolated: Vec::new(), touches_south: false, touches_north: false, area: Q::zero() });
        }
        dec.faces[f].cycles.push(ci);
        cycle_face.push(f);
    }
    dec.cycle_face = cycle_face;
    for k in 0..n_comp {
        if !dec.component_cycles[k].is_empty() {
            continue;
        }
        let sig = containing[k].clone();
        let f = match by_signature.get(&sig) {
            Some(&f) => f,
            None => {
                let f = dec.faces.len();
                by_signature.insert(sig.clone(), f);
                dec.signatures.push(sig);
                dec.faces.push(Face { cycles: Vec::new(), isolated: Vec::new(), touches_south: false, touches_north: false, area: Q::zero() });
                f
            }
        };
        dec.faces[f].isolated.push(representative[k]);
    }
    if dec.faces.is_empty() {
        dec.signatures.push(Vec::new());
        dec.faces.push(Face { cycles: Vec::new(), isolated: Vec::new(), touches_south: false, touches_north: false, area: Q::zero() });
    }
    for (f, sig) in dec.signatures.iter().enumerate() {
        let kinds: Vec<Option<CycleKind>> = sig.iter().map(|c| c.map(|c| dec.cycles[c].kind)).collect();
        let south = kinds.iter().all(|k| matches!(k, None | Some(CycleKind::Outer | CycleKind::South)));
        let north = kinds.iter().all(|k| matches!(k, None | Some(CycleKind::Outer | CycleKind::North)));
        let face = &mut dec.faces[f];
        face.touches_south = south;
        face.touches_north = north;
        let mut area: Q = face.cycles.iter().map(|&c| dec.cycles[c].integral.clone()).sum();
        if north {
            area += g.r_plus();
        }
        if south {
            area -= g.r_minus();
        }
        face.area = area;
    }

    let v = nv as i64;
    let e = g.edges().len() as i64;
    let chi: i64 = dec
        .faces
        .iter()
        .map(|f| 2 - f.cycles.len() as i64 - f.isolated.len() as i64 - i64::from(f.touches_north) - i64::from(f.touches_south))
        .sum();
    if v - e + chi != 0 {
        return Err(GraphError::EulerMismatch(v - e + chi));
    }
    Ok(dec)
}

impl FaceDecomposition {
    pub fn component_of_vertex(&self) -> &[usize] {
        &self.component_of_vertex
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::rational::{q, qi};

    fn p(r: Q, q: Q) -> Pt {
        Pt::new(r, q)
    }

    #[test]
    fn single_circle() {
        let c = q(3, 2);
        let g = CylinderGraph::new(qi(-1), qi(4), vec![p(c.clone(), qi(0))], vec![Edge { v: [0, 0], polyline: vec![p(c.clone(), qi(0)), p(c.clone(), qi(1))] }], None)
            .unwrap();
        let f = faces(&g).unwrap();
        assert_eq!(f.faces.len(), 2);
        let mut areas: Vec<Q> = f.faces.iter().map(|x| x.area.clone()).collect();
        areas.sort();
        assert_eq!(areas, vec![q(5, 2), q(5, 2)]);
        assert!(f.bounded_areas().is_empty());
    }

    #[test]
    fn square_face() {
        let h = q(1, 2);
        let vs = vec![p(qi(0), qi(0)), p(h.clone(), qi(0)), p(h.clone(), h.clone()), p(qi(0), h.clone())];
        let edges = (0..4).map(|i| Edge { v: [i, (i + 1) % 4], polyline: vec![vs[i].clone(), vs[(i + 1) % 4].clone()] }).collect();
        let g = CylinderGraph::new(qi(-1), qi(1), vs, edges, None).unwrap();
        let f = faces(&g).unwrap();
        assert_eq!(f.bounded_areas(), vec![q(1, 4)]);
        assert_eq!(f.total_area(), qi(2));
        let inside = f.locate(&g, &p(q(1, 4), q(1, 4))).unwrap();
        assert!(f.faces[inside].is_bounded());
        let outside = f.locate(&g, &p(q(3, 4), q(1, 4))).unwrap();
        assert!(f.faces[outside].touches_north && f.faces[outside].touches_south);
    }

    #[test]
    fn isolated_vertex_and_empty_graph() {
        let g = CylinderGraph::new(qi(0), qi(2), vec![p(qi(1), qi(0))], vec![], None).unwrap();
        let f = faces(&g).unwrap();
        assert_eq!(f.faces.len(), 1);
        assert_eq!(f.faces[0].area, qi(2));
        let empty = CylinderGraph::new(qi(0), qi(2), vec![], vec![], None).unwrap();
        assert_eq!(faces(&empty).unwrap().faces[0].area, qi(2));
    }

    #[test]
    fn angular_order() {
        let e = |a: i64, b: i64| (qi(a), qi(b));
        let mut v = vec![e(0, -1), e(-1, 0), e(1, 1), e(1, 0), e(0, 1)];
        v.sort_by(angle_cmp);
        assert_eq!(v, vec![e(1, 0), e(1, 1), e(0, 1), e(-1, 0), e(0, -1)]);
    }
}
