//! Power-diagram cells as regions `{q ∈ [q₀, q₁], L(q) ≤ r ≤ U(q)}` between envelopes of
//! quadratics in `q`.

use serde::Serialize;

use super::{Site, TransportError, WeightVector};

/// The curve `r = a q² + b q + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Curve {
    pub fn constant(c: f64) -> Self {
        Curve { a: 0.0, b: 0.0, c }
    }

    pub fn eval(&self, q: f64) -> f64 {
        (self.a * q + self.b) * q + self.c
    }

    pub fn slope(&self, q: f64) -> f64 {
        2.0 * self.a * q + self.b
    }

    pub fn is_line(&self) -> bool {
        self.a == 0.0
    }

    fn minus(&self, o: &Curve) -> Curve {
        Curve { a: self.a - o.a, b: self.b - o.b, c: self.c - o.c }
    }

    fn antiderivative(&self, q: f64) -> f64 {
        ((self.a / 3.0 * q + self.b / 2.0) * q + self.c) * q
    }

    /// `∫_{q0}^{q1} r(q) dq`.
    pub fn integral(&self, q0: f64, q1: f64) -> f64 {
        self.antiderivative(q1) - self.antiderivative(q0)
    }

    /// Real zeros strictly inside `(lo, hi)`.
    fn zeros_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.a == 0.0 {
            if self.b != 0.0 {
                out.push(-self.c / self.b);
            }
        } else {
            let disc = self.b * self.b - 4.0 * self.a * self.c;
            if disc >= 0.0 {
                let s = disc.sqrt();
                let t = -0.5 * (self.b + if self.b >= 0.0 { s } else { -s });
                if t != 0.0 {
                    out.push(t / self.a);
                    out.push(self.c / t);
                } else {
                    out.push(0.0);
                }
            }
        }
        out.retain(|&q| q > lo && q < hi);
        out
    }
}

/// Which competitor sits on the other side of a piece of cell boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Neighbor {
    /// Site `index`, translated by `shift` in `q`.
    Site { index: usize, shift: i64 },
    North,
    South,
    /// The boundary circle itself (the cell reaches `r = R^±`).
    Wall,
    /// The artificial cut `q ∈ {0, 1}` of the boundary cells.
    Seam,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CellId {
    Site(usize),
    North,
    South,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ArcShape {
    /// `r = curve(q)` for `q ∈ [q0, q1]`.
    Graph { curve: Curve, q0: f64, q1: f64 },
    /// The segment `r ∈ [r0, r1]` at fixed `q`.
    Side { q: f64, r0: f64, r1: f64 },
}

/// A maximal piece of a cell's boundary shared with one neighbor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub neighbor: Neighbor,
    pub shape: ArcShape,
}

impl Arc {
    /// Extent in `q` (zero for sides).
    pub fn q_span(&self) -> f64 {
        match self.shape {
            ArcShape::Graph { q0, q1, .. } => q1 - q0,
            ArcShape::Side { .. } => 0.0,
        }
    }

    /// Euclidean length for straight arcs; `None` for parabolic ones.
    pub fn straight_length(&self) -> Option<f64> {
        match self.shape {
            ArcShape::Graph { curve, q0, q1 } if curve.is_line() => Some((q1 - q0) * (1.0 + curve.b * curve.b).sqrt()),
            ArcShape::Graph { .. } => None,
            ArcShape::Side { r0, r1, .. } => Some(r1 - r0),
        }
    }

    /// `(r, q)` points along the arc; parabolic arcs are sampled with about `per_unit` points per
    /// unit of `q` (at least four segments).
    pub fn points(&self, per_unit: usize) -> Vec<(f64, f64)> {
        match self.shape {
            ArcShape::Side { q, r0, r1 } => vec![(r0, q), (r1, q)],
            ArcShape::Graph { curve, q0, q1 } => {
                let m = if curve.is_line() { 1 } else { (((q1 - q0) * per_unit as f64).ceil() as usize).max(4) };
                (0..=m)
                    .map(|k| {
                        let q = if k == m { q1 } else { q0 + (q1 - q0) * k as f64 / m as f64 };
                        (curve.eval(q), q)
                    })
                    .collect()
            }
        }
    }

    pub fn endpoints(&self) -> [(f64, f64); 2] {
        match self.shape {
            ArcShape::Side { q, r0, r1 } => [(r0, q), (r1, q)],
            ArcShape::Graph { curve, q0, q1 } => [(curve.eval(q0), q0), (curve.eval(q1), q1)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub id: CellId,
    pub area: f64,
    /// `∫_cell (cost − weight)` with the cell's own cost function.
    pub transport_cost: f64,
    pub arcs: Vec<Arc>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerDiagram {
    pub r_minus: f64,
    pub r_plus: f64,
    pub sites: Vec<Site>,
    pub weights: WeightVector,
    /// Site cells in order, then the north and south cells.
    pub cells: Vec<Cell>,
}

#[derive(Clone, Copy, Debug)]
struct Bound {
    owner: Neighbor,
    curve: Curve,
}

/// Cost integrated across a slice: `∫_{L}^{U} cost(r, q) dr` for the cell's cost function.
#[derive(Clone, Copy, Debug)]
enum Cost {
    Site { r: f64, q: f64 },
    North(f64),
    South(f64),
}

impl Cost {
    fn slice(&self, q: f64, lo: f64, hi: f64) -> f64 {
        match *self {
            Cost::Site { r, q: qs } => ((hi - r).powi(3) - (lo - r).powi(3)) / 3.0 + (q - qs).powi(2) * (hi - lo),
            Cost::North(rp) => ((rp - lo).powi(3) - (rp - hi).powi(3)) / 3.0,
            Cost::South(rm) => ((hi - rm).powi(3) - (lo - rm).powi(3)) / 3.0,
        }
    }
}

struct CellSpec {
    q_lo: (f64, Neighbor),
    q_hi: (f64, Neighbor),
    lower: Vec<Bound>,
    upper: Vec<Bound>,
    cost: Cost,
    weight: f64,
}

const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// Active bound of the upper (`sign = 1`, maximum) or lower (`sign = −1`, minimum) envelope just
/// to the right of `q`.
fn active(bounds: &[Bound], q: f64, sign: f64) -> usize {
    let key = |b: &Bound| [sign * b.curve.eval(q), sign * b.curve.slope(q), sign * b.curve.a];
    let mut best = 0;
    for j in 1..bounds.len() {
        let (kj, kb) = (key(&bounds[j]), key(&bounds[best]));
        for t in 0..3 {
            let tol = 1e-12 * (1.0 + kj[t].abs().max(kb[t].abs()));
            if kj[t] > kb[t] + tol {
                best = j;
                break;
            }
            if kj[t] < kb[t] - tol {
                break;
            }
        }
    }
    best
}

/// Breakpoints and active indices `(start, index)` of the envelope over `[lo, hi]`.
fn envelope(bounds: &[Bound], lo: f64, hi: f64, sign: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut q = lo;
    loop {
        let act = active(bounds, q, sign);
        if out.last().map(|&(_, a)| a) != Some(act) {
            out.push((q, act));
        }
        let mut next = hi;
        for (j, b) in bounds.iter().enumerate() {
            if j != act {
                for t in b.curve.minus(&bounds[act].curve).zeros_in(q + 1e-13, next) {
                    next = next.min(t);
                }
            }
        }
        if next >= hi {
            return out;
        }
        q = next;
    }
}

fn find(env: &[(f64, usize)], q: f64) -> usize {
    env.iter().rev().find(|&&(s, _)| s <= q).unwrap_or(&env[0]).1
}

struct Piece {
    q0: f64,
    q1: f64,
    lo: usize,
    up: usize,
}

fn build_cell(id: CellId, spec: &CellSpec) -> Cell {
    let (q_lo, q_hi) = (spec.q_lo.0, spec.q_hi.0);
    let mut pieces: Vec<Piece> = Vec::new();
    if q_hi > q_lo {
        let lower = envelope(&spec.lower, q_lo, q_hi, 1.0);
        let upper = envelope(&spec.upper, q_lo, q_hi, -1.0);
        let mut cuts: Vec<f64> = lower.iter().chain(&upper).map(|&(s, _)| s).collect();
        cuts.push(q_hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let (lo, up) = (find(&lower, mid), find(&upper, mid));
            let gap = spec.upper[up].curve.minus(&spec.lower[lo].curve);
            let mut sub = vec![w[0]];
            sub.extend(gap.zeros_in(w[0], w[1]));
            sub.push(w[1]);
            sub.sort_by(f64::total_cmp);
            for s in sub.windows(2) {
                if s[1] - s[0] > 1e-14 && gap.eval(0.5 * (s[0] + s[1])) > 0.0 {
                    match pieces.last_mut() {
                        Some(p) if p.lo == lo && p.up == up && p.q1 == s[0] => p.q1 = s[1],
                        _ => pieces.push(Piece { q0: s[0], q1: s[1], lo, up }),
                    }
                }
            }
        }
    }
    let mut area = 0.0;
    let mut cost = 0.0;
    for p in &pieces {
        let (l, u) = (spec.lower[p.lo].curve, spec.upper[p.up].curve);
        area += u.integral(p.q0, p.q1) - l.integral(p.q0, p.q1);
        let (half, mid) = (0.5 * (p.q1 - p.q0), 0.5 * (p.q1 + p.q0));
        for (x, wt) in GAUSS4 {
            let q = mid + half * x;
            cost += wt * half * spec.cost.slice(q, l.eval(q), u.eval(q));
        }
    }
    cost -= spec.weight * area;
    Cell { id, area, transport_cost: cost, arcs: arcs_of(spec, &pieces) }
}

fn arcs_of(spec: &CellSpec, pieces: &[Piece]) -> Vec<Arc> {
    let mut arcs = Vec::new();
    let (Some(first), Some(last)) = (pieces.first(), pieces.last()) else {
        return arcs;
    };
    let side = |q: f64, p: &Piece, owner: Neighbor, arcs: &mut Vec<Arc>| {
        let (r0, r1) = (spec.lower[p.lo].curve.eval(q), spec.upper[p.up].curve.eval(q));
        if r1 - r0 > 1e-12 {
            arcs.push(Arc { neighbor: owner, shape: ArcShape::Side { q, r0, r1 } });
        }
    };
    side(first.q0, first, spec.q_lo.1, &mut arcs);
    for (bounds, pick) in [(&spec.lower, 0usize), (&spec.upper, 1)] {
        let mut k = 0;
        while k < pieces.len() {
            let idx = if pick == 0 { pieces[k].lo } else { pieces[k].up };
            let q0 = pieces[k].q0;
            while k + 1 < pieces.len() && (if pick == 0 { pieces[k + 1].lo } else { pieces[k + 1].up }) == idx {
                k += 1;
            }
            arcs.push(Arc { neighbor: bounds[idx].owner, shape: ArcShape::Graph { curve: bounds[idx].curve, q0, q1: pieces[k].q1 } });
            k += 1;
        }
    }
    side(last.q1, last, spec.q_hi.1, &mut arcs);
    arcs
}

impl PowerDiagram {
    /// Cells without the degeneracy check; used inside the solver.
    pub fn compute(r_minus: f64, r_plus: f64, sites: &[Site], weights: &WeightVector) -> PowerDiagram {
        let n = sites.len();
        let mut cells = Vec::with_capacity(n + 2);
        for i in 0..n {
            cells.push(build_cell(CellId::Site(i), &site_spec(r_minus, r_plus, sites, weights, i)));
        }
        cells.push(build_cell(CellId::North, &boundary_spec(r_minus, r_plus, sites, weights, true)));
        cells.push(build_cell(CellId::South, &boundary_spec(r_minus, r_plus, sites, weights, false)));
        PowerDiagram { r_minus, r_plus, sites: sites.to_vec(), weights: weights.clone(), cells }
    }

    pub fn areas(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.area).collect()
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        let n = self.sites.len();
        match id {
            CellId::Site(i) => &self.cells[i],
            CellId::North => &self.cells[n],
            CellId::South => &self.cells[n + 1],
        }
    }

    /// The concave dual objective `Σ_c ∫_c (cost_c − w_c) + Σ_c w_c λ_c` for targets `λ`.
    pub fn dual_objective(&self, targets: &[f64]) -> f64 {
        let w = self.weights.to_vec();
        self.cells.iter().zip(targets).zip(&w).map(|((c, t), w)| c.transport_cost + w * t).sum()
    }

    /// `∂A_c/∂w_d`, in cell order (sites, north, south).
    pub fn area_jacobian(&self) -> Vec<Vec<f64>> {
        let n = self.sites.len();
        let (north, south) = (n, n + 1);
        let mut h = vec![vec![0.0; n + 2]; n + 2];
        let mut add = |a: usize, b: usize, v: f64| {
            h[a][b] -= v;
            h[a][a] += v;
        };
        for (ci, cell) in self.cells.iter().enumerate() {
            for arc in &cell.arcs {
                let span = arc.q_span();
                match (cell.id, arc.neighbor) {
                    (CellId::Site(i), Neighbor::Site { index: j, shift }) if j != i => {
                        let (a, b) = (self.sites[i], self.sites[j]);
                        let d = ((b.r - a.r).powi(2) + (b.q + shift as f64 - a.q).powi(2)).sqrt();
                        add(ci, j, arc.straight_length().unwrap_or(0.0) / (2.0 * d));
                    }
                    (CellId::Site(i), Neighbor::South) => add(ci, south, span / (2.0 * (self.sites[i].r - self.r_minus))),
                    (CellId::Site(i), Neighbor::North) => add(ci, north, span / (2.0 * (self.r_plus - self.sites[i].r))),
                    (CellId::North, Neighbor::Site { index: j, .. }) => add(ci, j, span / (2.0 * (self.r_plus - self.sites[j].r))),
                    (CellId::South, Neighbor::Site { index: j, .. }) => add(ci, j, span / (2.0 * (self.sites[j].r - self.r_minus))),
                    (CellId::North, Neighbor::South) => add(ci, south, span / (2.0 * (self.r_plus - self.r_minus))),
                    (CellId::South, Neighbor::North) => add(ci, north, span / (2.0 * (self.r_plus - self.r_minus))),
                    _ => {}
                }
            }
        }
        h
    }

    /// A point well inside each cell (sites, north, south): on a grid of spacing `1/128`, the
    /// point farthest from the cell's boundary, estimated as the smallest power gap to a
    /// competitor divided by the gap's gradient.
    pub fn interior_points(&self) -> Vec<(f64, f64)> {
        let n = self.sites.len();
        let steps = 128usize;
        let rows = ((self.r_plus - self.r_minus) * steps as f64).ceil() as usize;
        let mut best = vec![(f64::NEG_INFINITY, (0.0, 0.0)); n + 2];
        for i in 0..rows {
            let r = self.r_minus + (i as f64 + 0.5) * (self.r_plus - self.r_minus) / rows as f64;
            for j in 0..steps {
                let q = (j as f64 + 0.5) / steps as f64;
                // (power, gradient) of every competitor, translates included.
                let mut comps: Vec<(usize, f64, (f64, f64))> = Vec::with_capacity(3 * n + 2);
                for (k, s) in self.sites.iter().enumerate() {
                    for t in -1..=1 {
                        let dq = q - s.q - t as f64;
                        comps.push((k, (r - s.r).powi(2) + dq * dq - self.weights.sites[k], (2.0 * (r - s.r), 2.0 * dq)));
                    }
                }
                comps.push((n, (self.r_plus - r).powi(2) - self.weights.north, (-2.0 * (self.r_plus - r), 0.0)));
                comps.push((n + 1, (r - self.r_minus).powi(2) - self.weights.south, (2.0 * (r - self.r_minus), 0.0)));
                let win = (0..comps.len()).min_by(|&a, &b| comps[a].1.total_cmp(&comps[b].1)).unwrap();
                let (owner, pw, gw) = comps[win];
                let mut depth = (r - self.r_minus).min(self.r_plus - r);
                for (k, &(o, p, g)) in comps.iter().enumerate() {
                    if k == win || o == owner && o < n {
                        continue;
                    }
                    let norm = ((g.0 - gw.0).powi(2) + (g.1 - gw.1).powi(2)).sqrt();
                    depth = depth.min((p - pw) / norm.max(1e-12));
                }
                if depth > best[owner].0 {
                    best[owner] = (depth, (r, q));
                }
            }
        }
        best.into_iter().map(|(_, p)| p).collect()
    }

    /// Diagram vertices `(r, q mod 1)` with the cells meeting there, merged within `tol`.
    pub fn vertices(&self, tol: f64) -> Vec<((f64, f64), Vec<CellId>)> {
        let mut out: Vec<((f64, f64), Vec<CellId>)> = Vec::new();
        for cell in &self.cells {
            for arc in &cell.arcs {
                if matches!(arc.neighbor, Neighbor::Seam) {
                    continue;
                }
                for (r, q) in arc.endpoints() {
                    if matches!(cell.id, CellId::North | CellId::South) && (q == 0.0 || q == 1.0) {
                        continue;
                    }
                    let p = (r, q.rem_euclid(1.0));
                    match out.iter_mut().find(|(x, _)| periodic_distance(*x, p) < tol) {
                        Some((_, ids)) => {
                            if !ids.contains(&cell.id) {
                                ids.push(cell.id);
                            }
                        }
                        None => out.push((p, vec![cell.id])),
                    }
                }
            }
        }
        for (_, ids) in &mut out {
            ids.sort();
        }
        out.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then(a.0 .1.total_cmp(&b.0 .1)));
        out
    }
}

/// Distance between `(r, q)` points with `q` periodic.
pub fn periodic_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dq = (a.1 - b.1).rem_euclid(1.0);
    let dq = dq.min(1.0 - dq);
    ((a.0 - b.0).powi(2) + dq * dq).sqrt()
}

fn site_spec(r_minus: f64, r_plus: f64, sites: &[Site], w: &WeightVector, i: usize) -> CellSpec {
    let x = sites[i];
    let wi = w.sites[i];
    let mut spec = CellSpec {
        q_lo: (f64::NEG_INFINITY, Neighbor::Seam),
        q_hi: (f64::INFINITY, Neighbor::Seam),
        lower: vec![Bound { owner: Neighbor::Wall, curve: Curve::constant(r_minus) }],
        upper: vec![Bound { owner: Neighbor::Wall, curve: Curve::constant(r_plus) }],
        cost: Cost::Site { r: x.r, q: x.q },
        weight: wi,
    };
    // Against the circles: r ≥ ((q − q_i)² + r_i² − R⁻² − w_i + w_S) / (2(r_i − R⁻)) and the mirror image.
    let parabola = |scale: f64, offset: f64| Curve { a: scale, b: -2.0 * scale * x.q, c: scale * (x.q * x.q + offset) };
    let s = 1.0 / (2.0 * (x.r - r_minus));
    spec.lower.push(Bound { owner: Neighbor::South, curve: parabola(s, x.r * x.r - r_minus * r_minus - wi + w.south) });
    let s = -1.0 / (2.0 * (r_plus - x.r));
    spec.upper.push(Bound { owner: Neighbor::North, curve: parabola(s, x.r * x.r - r_plus * r_plus - wi + w.north) });
    for (j, y) in sites.iter().enumerate() {
        for k in -1i64..=1 {
            if j == i && k == 0 {
                continue;
            }
            let (yr, yq) = (y.r, y.q + k as f64);
            let (dr, dq) = (yr - x.r, yq - x.q);
            // 2(r dr + q dq) ≤ |y|² − |x|² − w_j + w_i
            let c = yr * yr + yq * yq - x.r * x.r - x.q * x.q - w.sites[j] + wi;
            // A cell meeting its own translate is one face wrapping around the cylinder.
            let owner = if j == i { Neighbor::Seam } else { Neighbor::Site { index: j, shift: k } };
            if dr.abs() <= 1e-13 {
                let bound = c / (2.0 * dq);
                if dq > 0.0 && bound < spec.q_hi.0 {
                    spec.q_hi = (bound, owner);
                } else if dq < 0.0 && bound > spec.q_lo.0 {
                    spec.q_lo = (bound, owner);
                }
            } else {
                let curve = Curve { a: 0.0, b: -dq / dr, c: c / (2.0 * dr) };
                if dr > 0.0 {
                    spec.upper.push(Bound { owner, curve });
                } else {
                    spec.lower.push(Bound { owner, curve });
                }
            }
        }
    }
    spec
}

fn boundary_spec(r_minus: f64, r_plus: f64, sites: &[Site], w: &WeightVector, north: bool) -> CellSpec {
    let (own_w, other_w) = if north { (w.north, w.south) } else { (w.south, w.north) };
    let mut bounds = Vec::new();
    for (j, y) in sites.iter().enumerate() {
        for k in -1i64..=1 {
            let yq = y.q + k as f64;
            let owner = Neighbor::Site { index: j, shift: k };
            // North: r ≥ (R⁺² − r_j² − (q − q_j)² − w_N + w_j) / (2(R⁺ − r_j)); south mirrored.
            let curve = if north {
                let s = -1.0 / (2.0 * (r_plus - y.r));
                Curve { a: s, b: -2.0 * s * yq, c: s * (yq * yq - r_plus * r_plus + y.r * y.r + own_w - w.sites[j]) }
            } else {
                let s = 1.0 / (2.0 * (y.r - r_minus));
                Curve { a: s, b: -2.0 * s * yq, c: s * (yq * yq + y.r * y.r - r_minus * r_minus - w.sites[j] + own_w) }
            };
            bounds.push(Bound { owner, curve });
        }
    }
    let level = (r_plus * r_plus - r_minus * r_minus + if north { -own_w + other_w } else { own_w - other_w }) / (2.0 * (r_plus - r_minus));
    let other = if north { Neighbor::South } else { Neighbor::North };
    bounds.push(Bound { owner: other, curve: Curve::constant(level) });
    let (lower, upper, cost) = if north {
        bounds.push(Bound { owner: Neighbor::Wall, curve: Curve::constant(r_minus) });
        (bounds, vec![Bound { owner: Neighbor::Wall, curve: Curve::constant(r_plus) }], Cost::North(r_plus))
    } else {
        bounds.push(Bound { owner: Neighbor::Wall, curve: Curve::constant(r_plus) });
        (vec![Bound { owner: Neighbor::Wall, curve: Curve::constant(r_minus) }], bounds, Cost::South(r_minus))
    };
    CellSpec { q_lo: (0.0, Neighbor::Seam), q_hi: (1.0, Neighbor::Seam), lower, upper, cost, weight: own_w }
}

/// The power diagram of `sites` with the given weights. Fails if four or more cells meet at a
/// point (power-cocircular sites), where the combinatorics is not stable.
pub fn power_diagram(r_minus: f64, r_plus: f64, sites: &[Site], weights: &WeightVector) -> Result<PowerDiagram, TransportError> {
    if weights.sites.len() != sites.len() {
        return Err(TransportError::InvalidProblem(format!("{} weights for {} sites", weights.sites.len(), sites.len())));
    }
    let sites: Vec<Site> = sites.iter().map(|s| Site::new(s.r, s.q)).collect();
    let d = PowerDiagram::compute(r_minus, r_plus, &sites, weights);
    for ((r, q), ids) in d.vertices(1e-9) {
        if ids.len() >= 4 {
            return Err(TransportError::DegenerateConfiguration { r, q, cells: ids.len() });
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_zeros() {
        let c = Curve { a: 1.0, b: -3.0, c: 2.0 };
        let mut z = c.zeros_in(0.0, 5.0);
        z.sort_by(f64::total_cmp);
        assert_eq!(z, vec![1.0, 2.0]);
        assert_eq!(Curve { a: 0.0, b: 2.0, c: -1.0 }.zeros_in(0.0, 1.0), vec![0.5]);
        assert!(Curve { a: 1.0, b: 0.0, c: 1.0 }.zeros_in(-9.0, 9.0).is_empty());
        assert!((Curve { a: 3.0, b: 0.0, c: 0.0 }.integral(0.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn areas_partition_the_cylinder() {
        let sites = vec![Site::new(0.3, 0.1), Site::new(1.2, 0.7), Site::new(-0.5, 0.45)];
        let w = WeightVector { sites: vec![0.1, -0.2, 0.05], north: 0.3, south: -0.1 };
        let d = PowerDiagram::compute(-2.0, 3.0, &sites, &w);
        let total: f64 = d.areas().iter().sum();
        assert!((total - 5.0).abs() < 1e-12, "{total}");
        assert!(d.areas().iter().all(|&a| a > 0.0));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let sites = vec![Site::new(0.3, 0.1), Site::new(1.2, 0.7), Site::new(-0.5, 0.45), Site::new(0.4, 0.6)];
        let w = WeightVector { sites: vec![0.1, -0.2, 0.05, 0.0], north: 0.3, south: -0.1 };
        let d = PowerDiagram::compute(-2.0, 3.0, &sites, &w);
        let jac = d.area_jacobian();
        let h = 1e-6;
        for k in 0..6 {
            let mut plus = w.to_vec();
            let mut minus = w.to_vec();
            plus[k] += h;
            minus[k] -= h;
            let ap = PowerDiagram::compute(-2.0, 3.0, &sites, &WeightVector::from_slice(&plus)).areas();
            let am = PowerDiagram::compute(-2.0, 3.0, &sites, &WeightVector::from_slice(&minus)).areas();
            for c in 0..6 {
                let fd = (ap[c] - am[c]) / (2.0 * h);
                assert!((fd - jac[c][k]).abs() < 1e-5, "∂A_{c}/∂w_{k}: {fd} vs {}", jac[c][k]);
            }
        }
    }

    #[test]
    fn objective_gradient_is_target_minus_area() {
        let sites = vec![Site::new(0.3, 0.1), Site::new(1.2, 0.7)];
        let w = WeightVector { sites: vec![0.1, -0.2], north: 0.3, south: -0.1 };
        let targets = [1.0, 1.5, 1.2, 1.3];
        let d = PowerDiagram::compute(-2.0, 3.0, &sites, &w);
        let h = 1e-6;
        for k in 0..4 {
            let mut plus = w.to_vec();
            let mut minus = w.to_vec();
            plus[k] += h;
            minus[k] -= h;
            let gp = PowerDiagram::compute(-2.0, 3.0, &sites, &WeightVector::from_slice(&plus)).dual_objective(&targets);
            let gm = PowerDiagram::compute(-2.0, 3.0, &sites, &WeightVector::from_slice(&minus)).dual_objective(&targets);
            let fd = (gp - gm) / (2.0 * h);
            assert!((fd - (targets[k] - d.areas()[k])).abs() < 1e-6, "{k}: {fd}");
        }
    }

    #[test]
    fn grid_of_four_sites_is_degenerate() {
        let sites = vec![Site::new(1.0, 0.0), Site::new(1.0, 0.5), Site::new(2.0, 0.0), Site::new(2.0, 0.5)];
        let err = power_diagram(-2.0, 5.0, &sites, &WeightVector::zeros(4)).unwrap_err();
        assert!(matches!(err, TransportError::DegenerateConfiguration { .. }), "{err}");
    }
}
