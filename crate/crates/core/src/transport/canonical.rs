//! From a solved power diagram to an exact cylinder graph whose faces have exactly the target
//! areas.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{periodic_distance, solve_weights, CellId, Neighbor, PowerDiagram, Site, SolverDiagnostics, TransportError, TransportProblem, WeightVector};
use crate::graph::{faces, CylinderGraph, Edge, GraphBuilder, Pt};
use crate::rational::{from_f64_rounded, qi, Q};

/// Denominator of the grid the floating-point diagram is snapped to.
pub const SNAP_DENOMINATOR: i64 = 1_000_000;
/// Sample density (points per unit of `q`) for parabolic arcs.
const ARC_SAMPLES: usize = 64;

impl PowerDiagram {
    /// Every boundary arc between two distinct cells, once, as an `(r, q)` polyline.
    pub fn edge_polylines(&self) -> Vec<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        for cell in &self.cells {
            for arc in &cell.arcs {
                let keep = match (cell.id, arc.neighbor) {
                    (CellId::Site(i), Neighbor::Site { index, .. }) => index > i,
                    (CellId::Site(_), Neighbor::North | Neighbor::South) => true,
                    (CellId::North, Neighbor::South) => true,
                    _ => false,
                };
                if keep {
                    out.push(arc.points(ARC_SAMPLES));
                }
            }
        }
        out
    }

    /// The edge graph snapped to the grid `(1/den)ℤ²`; endpoints closer than `10⁻⁷` are merged.
    pub fn edge_graph(&self, den: i64) -> Result<CylinderGraph, TransportError> {
        let polylines = self.edge_polylines();
        let mut reps: Vec<((f64, f64), Pt)> = Vec::new();
        let mut rep_of = |p: (f64, f64)| -> Pt {
            let p = (p.0, p.1.rem_euclid(1.0));
            if let Some((_, x)) = reps.iter().find(|(y, _)| periodic_distance(*y, p) < 1e-7) {
                return x.clone();
            }
            let x = Pt::new(from_f64_rounded(p.0, den), from_f64_rounded(p.1, den)).reduced();
            reps.push((p, x.clone()));
            x
        };
        let lift = |rep: Pt, q_float: f64| {
            let k = (q_float - rep.q.to_f64().unwrap_or(0.0)).round();
            rep.shifted(&qi(k as i64))
        };
        let mut builder = GraphBuilder::new(from_f64_rounded(self.r_minus, den), from_f64_rounded(self.r_plus, den));
        for pl in polylines {
            let (first, last) = (pl[0], pl[pl.len() - 1]);
            let mut pts = vec![lift(rep_of(first), first.1)];
            for &(r, q2) in &pl[1..pl.len() - 1] {
                pts.push(Pt::new(from_f64_rounded(r, den), from_f64_rounded(q2, den)));
            }
            pts.push(lift(rep_of(last), last.1));
            pts.dedup();
            if pts.len() >= 2 {
                builder.polyline(pts);
            }
        }
        let g = builder.build()?;
        Ok(if g.vertices().is_empty() { g } else { g.with_marked(Some(0)) })
    }
}

/// Target area of each face of `g`: `site_targets[i]` for the face containing the `i`-th cell's
/// interior point, and the boundary targets for the faces touching the boundary circles.
fn face_targets(g: &CylinderGraph, sites: &[Pt], site_targets: &[Q], north: &Q, south: &Q) -> Result<Vec<Q>, TransportError> {
    let fd = faces(g)?;
    let mut targets: Vec<Option<Q>> = vec![None; fd.faces.len()];
    let mut assign = |f: usize, t: &Q, what: &str| -> Result<(), TransportError> {
        if targets[f].is_some() {
            return Err(TransportError::Repair(format!("face {f} would receive two targets ({what})")));
        }
        targets[f] = Some(t.clone());
        Ok(())
    };
    for (i, s) in sites.iter().enumerate() {
        let f = fd.locate(g, s).ok_or_else(|| TransportError::Repair(format!("site {i} is not inside a face")))?;
        assign(f, &site_targets[i], &format!("site {i}"))?;
    }
    for (f, face) in fd.faces.iter().enumerate() {
        match (face.touches_north, face.touches_south) {
            (true, true) => return Err(TransportError::Repair("a face touches both boundary circles".into())),
            (true, false) => assign(f, north, "north")?,
            (false, true) => assign(f, south, "south")?,
            _ => {}
        }
    }
    targets.into_iter().enumerate().map(|(f, t)| t.ok_or_else(|| TransportError::Repair(format!("face {f} has no site")))).collect()
}

/// Moves area between adjacent faces by inserting one small triangular bump per dual spanning
/// tree edge, so that every face area equals its target exactly.
pub fn repair_areas(g: &CylinderGraph, targets: &[Q]) -> Result<CylinderGraph, TransportError> {
    let fd = faces(g)?;
    if targets.len() != fd.faces.len() {
        return Err(TransportError::Repair(format!("{} targets for {} faces", targets.len(), fd.faces.len())));
    }
    let side = fd.half_edge_faces();
    let seg_len2 = |a: &Pt, b: &Pt| {
        let (dr, dq) = b.sub(a);
        &dr * &dr + &dq * &dq
    };
    // Dual graph: for each pair of faces, the separating edge with the longest segment.
    let mut link: BTreeMap<(usize, usize), (usize, Q)> = BTreeMap::new();
    for (e, edge) in g.edges().iter().enumerate() {
        let (left, right) = (side[2 * e], side[2 * e + 1]);
        if left == right {
            continue;
        }
        let best = edge.polyline.windows(2).map(|w| seg_len2(&w[0], &w[1])).max().unwrap_or_else(Q::zero);
        let key = (left.min(right), left.max(right));
        if link.get(&key).map_or(true, |(_, l)| best > *l) {
            link.insert(key, (e, best));
        }
    }
    let mut neighbors: Vec<Vec<(usize, usize)>> = vec![Vec::new(); fd.faces.len()];
    for (&(a, b), &(e, _)) in &link {
        neighbors[a].push((b, e));
        neighbors[b].push((a, e));
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; fd.faces.len()];
    let mut order = vec![0];
    let mut seen = vec![false; fd.faces.len()];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(f) = queue.pop_front() {
        for &(h, e) in &neighbors[f] {
            if !seen[h] {
                seen[h] = true;
                parent[h] = Some((f, e));
                order.push(h);
                queue.push_back(h);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(TransportError::Repair("the faces are not connected through edges".into()));
    }
    let mut excess: Vec<Q> = fd.faces.iter().zip(targets).map(|(f, t)| &f.area - t).collect();
    let mut polylines: Vec<Vec<Pt>> = g.edges().iter().map(|e| e.polyline.clone()).collect();
    for &f in order.iter().rev() {
        let Some((p, e)) = parent[f] else { continue };
        let x = excess[f].clone();
        excess[p] += &x;
        if x.is_zero() {
            continue;
        }
        // Shift area x from f into p: push the edge into f (its left side if f is on the left).
        let pl = &mut polylines[e];
        let k = (0..pl.len() - 1).max_by_key(|&k| seg_len2(&pl[k], &pl[k + 1])).unwrap();
        let (a, b) = (pl[k].clone(), pl[k + 1].clone());
        let (dr, dq) = b.sub(&a);
        let len2 = &dr * &dr + &dq * &dq;
        let t = if side[2 * e] == f { qi(2) * &x / &len2 } else { -qi(2) * &x / &len2 };
        let mid = Pt::new((&a.r + &b.r) / qi(2) - &t * &dq, (&a.q + &b.q) / qi(2) + &t * &dr);
        pl.insert(k + 1, mid);
    }
    let edges: Vec<Edge> = g.edges().iter().zip(polylines).map(|(e, polyline)| Edge { v: e.v, polyline }).collect();
    let marked = g.marked().map(|m| g.vertices()[m].clone());
    let repaired = CylinderGraph::new(g.r_minus().clone(), g.r_plus().clone(), g.vertices().to_vec(), edges, marked)?;
    let check = faces(&repaired)?;
    for (f, (face, t)) in check.faces.iter().zip(targets).enumerate() {
        if face.area != *t {
            return Err(TransportError::Repair(format!("face {f} has area {} after repair, expected {t}", face.area)));
        }
    }
    Ok(repaired)
}

/// The exact graph attached to a configuration, with the weights that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalGraph {
    #[serde(skip)]
    pub graph: CylinderGraph,
    pub weights: WeightVector,
    pub diagnostics: SolverDiagnostics,
    /// A point inside the face of each site's cell, in site order.
    #[serde(skip)]
    pub labels: Vec<Pt>,
}

/// Unit-area cells for every site, the rest split evenly between the boundary circles; the power
/// diagram's edges are snapped to rationals and the face areas repaired to be exact.
pub fn canonical_area_one_graph(r_minus: f64, r_plus: f64, sites: &[Site]) -> Result<CanonicalGraph, TransportError> {
    canonical_graph(&TransportProblem::new(r_minus, r_plus, sites.to_vec())?)
}

/// The exact graph of a general problem. Targets are rounded to the snapping grid; the south
/// target absorbs the rounding so that the areas add up to the snapped cylinder exactly.
pub fn canonical_graph(problem: &TransportProblem) -> Result<CanonicalGraph, TransportError> {
    let solution = solve_weights(problem)?;
    let den = SNAP_DENOMINATOR;
    let g = solution.diagram.edge_graph(den)?;
    // A site need not lie in its own power cell, so faces are identified by interior points.
    let n = problem.sites.len();
    let mut labels: Vec<Pt> = solution.diagram.interior_points().into_iter().map(|(r, q2)| Pt::new(from_f64_rounded(r, den), from_f64_rounded(q2, den))).collect();
    labels.truncate(n);
    let site_targets: Vec<Q> = problem.targets.iter().map(|&t| from_f64_rounded(t, den)).collect();
    let north = from_f64_rounded(problem.north_target, den);
    let south = g.r_plus() - g.r_minus() - site_targets.iter().sum::<Q>() - &north;
    if south <= Q::zero() {
        return Err(TransportError::Repair("rounded targets leave no area for the south annulus".into()));
    }
    let targets = face_targets(&g, &labels, &site_targets, &north, &south)?;
    let graph = repair_areas(&g, &targets)?;
    Ok(CanonicalGraph { graph, weights: solution.weights, diagnostics: solution.diagnostics, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::liftability;

    #[test]
    fn single_site_gives_two_circles() {
        let c = canonical_area_one_graph(-2.0, 3.0, &[Site::new(0.5, 0.0)]).unwrap();
        let fd = faces(&c.graph).unwrap();
        assert_eq!(fd.faces.len(), 3);
        assert_eq!(c.graph.edges().len(), 2);
        assert!(c.graph.edges().iter().all(|e| e.v[0] == e.v[1]));
        let mut areas: Vec<Q> = fd.faces.iter().map(|f| f.area.clone()).collect();
        areas.sort();
        assert_eq!(areas, vec![qi(1), qi(2), qi(2)]);
    }

    #[test]
    fn ring_graph_is_exact_and_liftable() {
        let sites: Vec<Site> = (0..4).map(|k| Site::new(2.0, (k as f64 + 0.5) / 4.0)).collect();
        let c = canonical_area_one_graph(-3.0, 7.0, &sites).unwrap();
        let fd = faces(&c.graph).unwrap();
        assert_eq!(fd.bounded_areas(), vec![qi(1); 4]);
        assert!(liftability(&c.graph).unwrap().liftable);
    }
}
