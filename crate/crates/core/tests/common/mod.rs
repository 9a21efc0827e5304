//! Reference implementations shared by the integration tests. They recompute quantities from
//! their definitions, independently of the library's algorithms.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_mirror::graph::{CylinderGraph, GraphBuilder, Pt};
use toric_mirror::rational::{q, qi};
use toric_mirror::transport::{Site, WeightVector};

/// Power of every competitor at `(r, q)`: `n` sites (minimized over translates), north, south.
fn powers(r_minus: f64, r_plus: f64, sites: &[Site], w: &WeightVector, r: f64, q: f64) -> Vec<f64> {
    let mut out: Vec<f64> = sites
        .iter()
        .zip(&w.sites)
        .map(|(s, wi)| {
            let dq = (q - s.q).rem_euclid(1.0);
            let dq = dq.min(1.0 - dq);
            (r - s.r).powi(2) + dq * dq - wi
        })
        .collect();
    out.push((r_plus - r).powi(2) - w.north);
    out.push((r - r_minus).powi(2) - w.south);
    out
}

/// Lengths of the slice `q = const` owned by each cell (sites, north, south), from the 1-D power
/// diagram of the slice: every competitor is a parabola `(r − c)² + C` in `r`.
fn slice_lengths(r_minus: f64, r_plus: f64, sites: &[Site], w: &WeightVector, q: f64) -> Vec<f64> {
    let n = sites.len();
    let mut comps: Vec<(usize, f64, f64)> = Vec::new();
    for (j, s) in sites.iter().enumerate() {
        for k in -1..=1 {
            let dq = q - s.q - k as f64;
            comps.push((j, s.r, dq * dq - w.sites[j]));
        }
    }
    comps.push((n, r_plus, -w.north));
    comps.push((n + 1, r_minus, -w.south));
    let mut out = vec![0.0; n + 2];
    for (a, &(owner, ca, cca)) in comps.iter().enumerate() {
        let (mut lo, mut hi) = (r_minus, r_plus);
        for (b, &(_, cb, ccb)) in comps.iter().enumerate() {
            if a == b {
                continue;
            }
            // (r − ca)² + cca ≤ (r − cb)² + ccb  ⟺  2r(cb − ca) ≤ cb² − ca² + ccb − cca
            let lhs = 2.0 * (cb - ca);
            let rhs = cb * cb - ca * ca + ccb - cca;
            if lhs > 0.0 {
                hi = hi.min(rhs / lhs);
            } else if lhs < 0.0 {
                lo = lo.max(rhs / lhs);
            } else if rhs < 0.0 || (rhs == 0.0 && b < a) {
                hi = lo;
            }
        }
        if hi > lo {
            out[owner] += hi - lo;
        }
    }
    out
}

fn simpson(f: &dyn Fn(f64) -> Vec<f64>, a: f64, b: f64, fa: &[f64], fm: &[f64], fb: &[f64], depth: u32, acc: &mut [f64]) {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let whole: Vec<f64> = (0..fa.len()).map(|i| (b - a) / 6.0 * (fa[i] + 4.0 * fm[i] + fb[i])).collect();
    let left: Vec<f64> = (0..fa.len()).map(|i| (m - a) / 6.0 * (fa[i] + 4.0 * flm[i] + fm[i])).collect();
    let right: Vec<f64> = (0..fa.len()).map(|i| (b - m) / 6.0 * (fm[i] + 4.0 * frm[i] + fb[i])).collect();
    let err = (0..fa.len()).map(|i| (left[i] + right[i] - whole[i]).abs()).fold(0.0, f64::max);
    if depth == 0 || err < 1e-13 || b - a < 1e-12 {
        for i in 0..fa.len() {
            acc[i] += left[i] + right[i];
        }
        return;
    }
    simpson(f, a, m, fa, &flm, fm, depth - 1, acc);
    simpson(f, m, b, fm, &frm, fb, depth - 1, acc);
}

/// Cell areas (sites, north, south) by integrating slice lengths over `q ∈ [0, 1]`. Slice
/// lengths are piecewise quadratic in `q`, so adaptive Simpson is exact away from the kinks and
/// refines around them.
pub fn exact_areas(r_minus: f64, r_plus: f64, sites: &[Site], w: &WeightVector) -> Vec<f64> {
    let f = |q: f64| slice_lengths(r_minus, r_plus, sites, w, q);
    let mut acc = vec![0.0; sites.len() + 2];
    let pieces = 64;
    for k in 0..pieces {
        let (a, b) = (k as f64 / pieces as f64, (k + 1) as f64 / pieces as f64);
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        simpson(&f, a, b, &fa, &fm, &fb, 48, &mut acc);
    }
    acc
}

/// Cell areas by stratified Monte Carlo: one uniform point in each cell of a `rows × cols` grid.
pub fn monte_carlo_areas(r_minus: f64, r_plus: f64, sites: &[Site], w: &WeightVector, rows: usize, cols: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; sites.len() + 2];
    let (dr, dq) = ((r_plus - r_minus) / rows as f64, 1.0 / cols as f64);
    for i in 0..rows {
        for j in 0..cols {
            let r = r_minus + (i as f64 + rng.gen::<f64>()) * dr;
            let q = (j as f64 + rng.gen::<f64>()) * dq;
            let p = powers(r_minus, r_plus, sites, w, r, q);
            let owner = (0..p.len()).min_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
            counts[owner] += 1;
        }
    }
    let cell = dr * dq;
    counts.into_iter().map(|c| c as f64 * cell).collect()
}

/// Pairs of cells (indices: sites, then north `n`, south `n + 1`) owning neighbouring points of a
/// `rows × cols` grid, which approximates the adjacency of the diagram.
pub fn sampled_adjacency(r_minus: f64, r_plus: f64, sites: &[Site], w: &WeightVector, rows: usize, cols: usize) -> std::collections::BTreeSet<(usize, usize)> {
    let owner = |i: usize, j: usize| {
        let r = r_minus + (i as f64 + 0.5) * (r_plus - r_minus) / rows as f64;
        let q = (j % cols) as f64 / cols as f64;
        let p = powers(r_minus, r_plus, sites, w, r, q);
        (0..p.len()).min_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap()
    };
    let grid: Vec<Vec<usize>> = (0..rows).map(|i| (0..cols).map(|j| owner(i, j)).collect()).collect();
    let mut out = std::collections::BTreeSet::new();
    for i in 0..rows {
        for j in 0..cols {
            let a = grid[i][j];
            for b in [grid[i][(j + 1) % cols], if i + 1 < rows { grid[i + 1][j] } else { a }] {
                if a != b {
                    out.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    out
}

/// Circles at a few integer levels joined by straight, tilted or bent segments; every face has
/// integral area, so the graph is liftable. The marked vertex is random.
pub fn random_liftable_graph(rng: &mut ChaCha8Rng) -> CylinderGraph {
    let levels_count = rng.gen_range(2..=4);
    let mut levels: Vec<i64> = vec![0];
    for _ in 1..levels_count {
        let last = *levels.last().unwrap();
        levels.push(last + rng.gen_range(1..=3));
    }
    let top = *levels.last().unwrap();
    let offset = q(rng.gen_range(0..12), 12);
    let mut b = GraphBuilder::new(qi(-rng.gen_range(1..=3)), qi(top + rng.gen_range(1..=3)));
    for &l in &levels {
        b.circle(qi(l));
    }
    for w in levels.windows(2) {
        let d = w[1] - w[0];
        let mut heights: Vec<i64> = (0..d).collect();
        heights.shuffle(rng);
        heights.truncate(rng.gen_range(1..=d as usize));
        let shape = rng.gen_range(0..3);
        let bend = q(rng.gen_range(-2..=2), 4 * d);
        for k in heights {
            let base = q(k, d) + &offset;
            let lo = Pt::new(qi(w[0]), base.clone());
            match shape {
                0 => b.segment(lo, Pt::new(qi(w[1]), base)),
                1 => b.segment(lo, Pt::new(qi(w[1]), base + &bend)),
                _ => {
                    let mid = Pt::new((qi(w[0]) + qi(w[1])) / qi(2), &base + &bend);
                    b.polyline(vec![lo, mid, Pt::new(qi(w[1]), base)])
                }
            };
        }
    }
    let g = b.build().unwrap();
    let m = rng.gen_range(0..g.vertices().len());
    g.with_marked(Some(m))
}
