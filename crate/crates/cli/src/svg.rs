//! Deterministic SVG for cylinder graphs, power diagrams and FLTZ front projections.
//!
//! Every picture has the same fixed view box: a 400 × 400 drawing area with a 20 unit margin.
//! Cylinders are unrolled with `q` running left to right over `[0, 1)` and `r` increasing
//! upwards; front projections show the torus `M_R / M` as the unit square. Elements carry ids and
//! are emitted sorted by id, so identical input gives byte-identical output.

use std::collections::BTreeMap;
use std::fmt::Write;

use toric_mirror::fan::{fltz_components, StackyFan};
use toric_mirror::graph::CylinderGraph;
use toric_mirror::rational::{format_rational, qi, to_f64, Q};
use toric_mirror::transport::PowerDiagram;

const MARGIN: f64 = 20.0;
const SIZE: f64 = 400.0;
/// Length of a conormal hair tick, in units of the torus square.
const HAIR: f64 = 0.025;

const STYLE: &str = "\
.frame{fill:none;stroke:#999;stroke-width:1;stroke-dasharray:4 3}\
.circle,.edge,.arc,.line{fill:none;stroke:#000;stroke-width:2}\
.vertex{fill:#000}.marked{fill:#c00}.site{fill:#06c}\
.hair{fill:none;stroke:#444;stroke-width:1}\
.torus{fill:#eee;stroke:none}";

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

struct Element {
    id: String,
    body: String,
}

/// A picture under construction; elements are sorted by id on output.
struct Canvas {
    title: String,
    elements: Vec<Element>,
}

impl Canvas {
    fn new(title: impl Into<String>) -> Self {
        Canvas { title: title.into(), elements: Vec::new() }
    }

    fn push(&mut self, id: String, body: String) {
        self.elements.push(Element { id, body });
    }

    fn finish(mut self) -> String {
        self.elements.sort_by(|a, b| a.id.cmp(&b.id));
        let total = SIZE + 2.0 * MARGIN;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {t} {t}" width="{t}" height="{t}">"#,
            t = num(total)
        );
        let _ = writeln!(out, "<title>{}</title>", self.title);
        let _ = writeln!(out, "<style>{STYLE}</style>");
        let _ = writeln!(
            out,
            r#"<defs><clipPath id="frame-clip"><rect x="{m}" y="{m}" width="{s}" height="{s}"/></clipPath></defs>"#,
            m = num(MARGIN),
            s = num(SIZE)
        );
        let _ = writeln!(out, r#"<rect class="frame" x="{m}" y="{m}" width="{s}" height="{s}"/>"#, m = num(MARGIN), s = num(SIZE));
        let _ = writeln!(out, r#"<g clip-path="url(#frame-clip)">"#);
        for e in &self.elements {
            let _ = writeln!(out, "{}", e.body);
        }
        out.push_str("</g>\n</svg>\n");
        out
    }
}

/// Unrolled cylinder `[R⁻, R⁺] × [0, 1)` → drawing area.
struct CylinderFrame {
    r_minus: f64,
    r_plus: f64,
}

impl CylinderFrame {
    fn x(&self, q: f64) -> f64 {
        MARGIN + SIZE * q
    }

    fn y(&self, r: f64) -> f64 {
        MARGIN + SIZE * (self.r_plus - r) / (self.r_plus - self.r_minus)
    }

    fn points(&self, pl: &[(f64, f64)], shift: f64) -> String {
        pl.iter().map(|&(r, q)| format!("{},{}", num(self.x(q - shift)), num(self.y(r)))).collect::<Vec<_>>().join(" ")
    }
}

/// The integer translates `k` for which the lifted polyline, moved by `−k`, meets `[0, 1)`.
fn translates(pl: &[(f64, f64)]) -> std::ops::RangeInclusive<i64> {
    let lo = pl.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = pl.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    // Tolerate rounding in floating-point input so that an edge at q = 1 is not drawn twice.
    let eps = 1e-9;
    ((lo + eps).floor() as i64)..=((hi - eps).floor().max((lo + eps).floor()) as i64)
}

/// Lagrangian projection of a cylinder graph. Horizontal edges that together go once around a
/// level `r = c` are drawn as one `circle` line; all other edges are `edge` polylines, repeated
/// for each translate that shows up in the fundamental strip.
pub fn render_graph(g: &CylinderGraph) -> String {
    let frame = CylinderFrame { r_minus: to_f64(g.r_minus()), r_plus: to_f64(g.r_plus()) };
    let mut canvas = Canvas::new(format!("cylinder graph on [{}, {}]", format_rational(g.r_minus()), format_rational(g.r_plus())));
    let mut levels: BTreeMap<Q, (Q, Vec<usize>)> = BTreeMap::new();
    for (e, edge) in g.edges().iter().enumerate() {
        let r0 = &edge.polyline[0].r;
        if edge.polyline.iter().all(|p| &p.r == r0) {
            let span = edge
                .polyline
                .windows(2)
                .map(|w| {
                    let d = &w[1].q - &w[0].q;
                    if d < qi(0) {
                        -d
                    } else {
                        d
                    }
                })
                .sum::<Q>();
            let entry = levels.entry(r0.clone()).or_insert_with(|| (qi(0), Vec::new()));
            entry.0 += span;
            entry.1.push(e);
        }
    }
    let mut as_circle = vec![false; g.edges().len()];
    for (k, (r, (span, edges))) in levels.iter().filter(|(_, (span, _))| *span == qi(1)).enumerate() {
        let _ = span;
        for &e in edges {
            as_circle[e] = true;
        }
        let y = num(frame.y(to_f64(r)));
        canvas.push(
            format!("circle-{k:04}"),
            format!(
                r#"<line id="circle-{k:04}" class="circle" data-r="{}" x1="{}" y1="{y}" x2="{}" y2="{y}"/>"#,
                format_rational(r),
                num(frame.x(0.0)),
                num(frame.x(1.0))
            ),
        );
    }
    for (e, edge) in g.edges().iter().enumerate() {
        if as_circle[e] {
            continue;
        }
        let pl: Vec<(f64, f64)> = edge.polyline.iter().map(|p| (to_f64(&p.r), to_f64(&p.q))).collect();
        for (c, k) in translates(&pl).enumerate() {
            let id = format!("edge-{e:04}-{c}");
            canvas.push(
                id.clone(),
                format!(r#"<polyline id="{id}" class="edge" data-edge="{e}" points="{}"/>"#, frame.points(&pl, k as f64)),
            );
        }
    }
    for (v, p) in g.vertices().iter().enumerate() {
        let class = if g.marked() == Some(v) { "vertex marked" } else { "vertex" };
        let q = to_f64(&p.q).rem_euclid(1.0);
        canvas.push(
            format!("vertex-{v:04}"),
            format!(r#"<circle id="vertex-{v:04}" class="{class}" cx="{}" cy="{}" r="3"/>"#, num(frame.x(q)), num(frame.y(to_f64(&p.r)))),
        );
    }
    canvas.finish()
}

/// A power diagram: every boundary arc between two cells, and the sites.
pub fn render_diagram(d: &PowerDiagram) -> String {
    let frame = CylinderFrame { r_minus: d.r_minus, r_plus: d.r_plus };
    let mut canvas = Canvas::new(format!("power diagram with {} sites", d.sites.len()));
    for (a, pl) in d.edge_polylines().iter().enumerate() {
        for (c, k) in translates(pl).enumerate() {
            let id = format!("arc-{a:04}-{c}");
            canvas.push(id.clone(), format!(r#"<polyline id="{id}" class="arc" points="{}"/>"#, frame.points(pl, k as f64)));
        }
    }
    for (i, s) in d.sites.iter().enumerate() {
        canvas.push(
            format!("site-{i:04}"),
            format!(r#"<circle id="site-{i:04}" class="site" cx="{}" cy="{}" r="3"/>"#, num(frame.x(s.q)), num(frame.y(s.r))),
        );
    }
    canvas.finish()
}

/// The torus square `[0, 1]²` → drawing area.
fn sx(x: f64) -> f64 {
    MARGIN + SIZE * x
}

fn sy(y: f64) -> f64 {
    MARGIN + SIZE * (1.0 - y)
}

fn unit(v: (f64, f64)) -> (f64, f64) {
    let l = (v.0 * v.0 + v.1 * v.1).sqrt();
    (v.0 / l, v.1 / l)
}

fn hair(p: (f64, f64), dir: (f64, f64)) -> String {
    format!("M{} {}l{} {}", num(sx(p.0)), num(sy(p.1)), num(SIZE * HAIR * dir.0), num(-SIZE * HAIR * dir.1))
}

/// `s + t·v` for `t ∈ [0, 1]` cut where it crosses the square's sides, each piece moved into the
/// square.
fn wrapped_segments(s: (f64, f64), v: (f64, f64)) -> Vec<[(f64, f64); 2]> {
    let mut cuts = vec![0.0, 1.0];
    for (s, v) in [(s.0, v.0), (s.1, v.1)] {
        if v != 0.0 {
            let (a, b) = (s.min(s + v), s.max(s + v));
            let mut k = a.ceil();
            while k <= b {
                let t = (k - s) / v;
                if t > 0.0 && t < 1.0 {
                    cuts.push(t);
                }
                k += 1.0;
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let at = |t: f64| (s.0 + t * v.0, s.1 + t * v.1);
    cuts.windows(2)
        .map(|w| {
            let mid = at(0.5 * (w[0] + w[1]));
            let (fx, fy) = (mid.0.floor(), mid.1.floor());
            let (a, b) = (at(w[0]), at(w[1]));
            [(a.0 - fx, a.1 - fy), (b.0 - fx, b.1 - fy)]
        })
        .collect()
}

/// The slope `v_y / v_x` of a line family, or `vertical`.
fn slope_label(v: &[Q]) -> String {
    if v[0] == qi(0) {
        "vertical".to_string()
    } else {
        format_rational(&(&v[1] / &v[0]))
    }
}

/// Front projection of the FLTZ skeleton of a rank-2 fan onto the torus `M_R / M`.
///
/// The zero section is the shaded square. A ray `u` contributes a family of closed lines
/// `⟨m, u⟩ ∈ (1/b)ℤ` with hair ticks pointing along the conormal `u`; a two-dimensional cone
/// contributes points with a fan of ticks spanning the directions of its two rays.
pub fn render_front(fan: &StackyFan) -> String {
    let mut canvas = Canvas::new(format!("FLTZ front projection, {} rays", fan.rays().len()));
    let ray_dir = |r: usize| unit((fan.rays()[r][0] as f64, fan.rays()[r][1] as f64));
    for comp in fltz_components(fan) {
        let c = comp.cone_index;
        let shifts: Vec<(f64, f64)> =
            comp.torus.shifts.iter().map(|s| (to_f64(&s[0]).rem_euclid(1.0), to_f64(&s[1]).rem_euclid(1.0))).collect();
        match comp.rays.len() {
            0 => canvas.push(
                format!("a-torus-{c:04}"),
                format!(r#"<rect id="a-torus-{c:04}" class="torus" x="{m}" y="{m}" width="{s}" height="{s}"/>"#, m = num(MARGIN), s = num(SIZE)),
            ),
            1 => {
                let basis: Vec<Q> = comp.torus.basis[0].iter().map(|b| Q::from_integer(b.clone())).collect();
                let v = (to_f64(&basis[0]), to_f64(&basis[1]));
                let dir = ray_dir(comp.rays[0]);
                let ticks = 12 * (v.0.abs().max(v.1.abs()) as usize).max(1);
                let mut line = String::new();
                let mut hairs = String::new();
                for &s in &shifts {
                    for [a, b] in wrapped_segments(s, v) {
                        let _ = write!(line, "M{} {}L{} {}", num(sx(a.0)), num(sy(a.1)), num(sx(b.0)), num(sy(b.1)));
                    }
                    for k in 0..ticks {
                        let t = (k as f64 + 0.5) / ticks as f64;
                        let p = ((s.0 + t * v.0).rem_euclid(1.0), (s.1 + t * v.1).rem_euclid(1.0));
                        hairs.push_str(&hair(p, dir));
                    }
                }
                canvas.push(
                    format!("family-{c:04}"),
                    format!(
                        r#"<g id="family-{c:04}" class="family" data-ray="{}" data-slope="{}"><path class="line" d="{line}"/><path class="hair" d="{hairs}"/></g>"#,
                        comp.rays[0],
                        slope_label(&basis)
                    ),
                );
            }
            _ => {
                let (u1, u2) = (ray_dir(comp.rays[0]), ray_dir(comp.rays[1]));
                for (k, &p) in shifts.iter().enumerate() {
                    let hairs: String = (0..6)
                        .map(|j| {
                            let t = j as f64 / 5.0;
                            hair(p, unit(((1.0 - t) * u1.0 + t * u2.0, (1.0 - t) * u1.1 + t * u2.1)))
                        })
                        .collect();
                    let id = format!("point-{c:04}-{k:04}");
                    canvas.push(
                        id.clone(),
                        format!(
                            r#"<g id="{id}" class="point"><circle class="vertex" cx="{}" cy="{}" r="3"/><path class="hair" d="{hairs}"/></g>"#,
                            num(sx(p.0)),
                            num(sy(p.1))
                        ),
                    );
                }
            }
        }
    }
    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping_a_slope_minus_quarter_line() {
        let segs = wrapped_segments((0.0, 0.0), (4.0, -1.0));
        assert_eq!(segs.len(), 4);
        for [a, b] in segs {
            for p in [a, b] {
                assert!((-1e-12..=1.0 + 1e-12).contains(&p.0) && (-1e-12..=1.0 + 1e-12).contains(&p.1));
            }
        }
    }

    #[test]
    fn translates_are_half_open() {
        assert_eq!(translates(&[(0.0, 0.0), (1.0, 0.0)]), 0..=0);
        assert_eq!(translates(&[(0.0, 0.8), (1.0, 1.2)]), 0..=1);
        assert_eq!(translates(&[(0.0, -0.25), (1.0, 0.25)]), -1..=0);
    }
}
