//! Čech cohomology of line bundles on toric stacks, one character `m ∈ M` at a time.
//!
//! The cover is by the charts of the maximal cones. A tuple `i₀ < … < i_d` of
//! maximal cones contributes a copy of the ground field in degree `m` exactly
//! when the section condition holds on the intersection cone. Ranks are
//! computed over `Q`; the differentials have entries in `{0, ±1}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::fan::{StackyFan, SupportFunction};
use crate::lattice::IntMatrix;

/// Default cap on the number of lattice points in a cohomology box.
pub const DEFAULT_BOX_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CechError {
    #[error("box contains {volume} lattice points, above the cap of {cap}")]
    BoxTooLarge { volume: u128, cap: u64 },
    #[error("box has {got} ranges for a rank-{rank} lattice")]
    BoxRank { got: usize, rank: usize },
    #[error("empty range {lo}..{hi} in box")]
    EmptyRange { lo: i64, hi: i64 },
}

/// `⟨m, u_ρ⟩ ≥ F(u_ρ)` for all rays of `cone`.
pub fn section_condition(fan: &StackyFan, f: &SupportFunction, cone: &[usize], m: &[BigInt]) -> bool {
    cone.iter().all(|&r| num_rational::BigRational::from_integer(fan.pairing(m, r)) >= *f.value(r))
}

/// The Čech complex in a single character.
#[derive(Clone, Debug)]
pub struct CechComplexAtDegree {
    /// `spaces[d]` lists the present tuples of positions into the cone ordering.
    pub spaces: Vec<Vec<Vec<usize>>>,
    /// `differentials[d]: C^d → C^{d+1}`, rows indexed by `spaces[d+1]`.
    pub differentials: Vec<IntMatrix>,
}

impl CechComplexAtDegree {
    /// Assembles the complex, using `order` (a permutation of the maximal cones) to index the cover.
    pub fn build(fan: &StackyFan, f: &SupportFunction, m: &[BigInt], order: &[usize]) -> Self {
        let maximal = fan.maximal_cones();
        let cones: Vec<&[usize]> = order.iter().map(|&i| maximal[i]).collect();
        let k = cones.len();
        let mut spaces = Vec::with_capacity(k);
        for d in 0..k {
            let present: Vec<Vec<usize>> = combinations(k, d + 1)
                .into_iter()
                .filter(|t| section_condition(fan, f, &intersection(&cones, t), m))
                .collect();
            spaces.push(present);
        }
        let mut differentials = Vec::with_capacity(k.saturating_sub(1));
        for d in 0..k.saturating_sub(1) {
            let (src, dst) = (&spaces[d], &spaces[d + 1]);
            let index: BTreeMap<&Vec<usize>, usize> = src.iter().enumerate().map(|(i, t)| (t, i)).collect();
            let mut mat = IntMatrix::zeros(dst.len(), src.len());
            for (row, t) in dst.iter().enumerate() {
                for omit in 0..t.len() {
                    let face: Vec<usize> = t.iter().enumerate().filter(|&(j, _)| j != omit).map(|(_, &x)| x).collect();
                    if let Some(&col) = index.get(&face) {
                        let sign = if omit % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                        mat.set(row, col, sign);
                    }
                }
            }
            differentials.push(mat);
        }
        CechComplexAtDegree { spaces, differentials }
    }

    /// Whether every composite of consecutive differentials vanishes.
    pub fn is_complex(&self) -> bool {
        self.differentials.windows(2).all(|w| w[1].mul(&w[0]).is_zero())
    }

    /// Betti numbers `h^d` for `d = 0..k`.
    pub fn betti(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.differentials.iter().map(IntMatrix::rank).collect();
        (0..self.spaces.len())
            .map(|d| {
                let out = ranks.get(d).copied().unwrap_or(0);
                let inc = if d > 0 { ranks[d - 1] } else { 0 };
                self.spaces[d].len() - out - inc
            })
            .collect()
    }
}

fn intersection(cones: &[&[usize]], tuple: &[usize]) -> Vec<usize> {
    let mut common: Vec<usize> = cones[tuple[0]].to_vec();
    for &i in &tuple[1..] {
        common.retain(|r| cones[i].contains(r));
    }
    common
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Betti numbers of `O(F)` in character `m`, indexed by cohomological degree.
pub fn cohomology_at_degree(fan: &StackyFan, f: &SupportFunction, m: &[BigInt]) -> Vec<usize> {
    let order: Vec<usize> = (0..fan.maximal_cones().len()).collect();
    CechComplexAtDegree::build(fan, f, m, &order).betti()
}

/// Nonzero Betti numbers keyed by `(m, d)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CohomologyTable {
    pub entries: BTreeMap<(Vec<i64>, usize), usize>,
}

impl CohomologyTable {
    pub fn get(&self, m: &[i64], d: usize) -> usize {
        self.entries.get(&(m.to_vec(), d)).copied().unwrap_or(0)
    }

    /// Entries in cohomological degree `d`.
    pub fn in_degree(&self, d: usize) -> Vec<(Vec<i64>, usize)> {
        self.entries.iter().filter(|((_, dd), _)| *dd == d).map(|((m, _), &b)| (m.clone(), b)).collect()
    }
}

/// Cohomology over the box `∏ [lo_k, hi_k]` (inclusive), with the default size cap.
pub fn cohomology_box(fan: &StackyFan, f: &SupportFunction, bounds: &[(i64, i64)]) -> Result<CohomologyTable, CechError> {
    cohomology_box_with_cap(fan, f, bounds, DEFAULT_BOX_CAP)
}

pub fn cohomology_box_with_cap(
    fan: &StackyFan,
    f: &SupportFunction,
    bounds: &[(i64, i64)],
    cap: u64,
) -> Result<CohomologyTable, CechError> {
    if bounds.len() != fan.rank() {
        return Err(CechError::BoxRank { got: bounds.len(), rank: fan.rank() });
    }
    let mut volume: u128 = 1;
    for &(lo, hi) in bounds {
        if hi < lo {
            return Err(CechError::EmptyRange { lo, hi });
        }
        volume = volume.saturating_mul((hi - lo) as u128 + 1);
    }
    if volume > cap as u128 {
        return Err(CechError::BoxTooLarge { volume, cap });
    }
    let mut table = CohomologyTable::default();
    let mut point: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    if fan.maximal_cones().is_empty() {
        return Ok(table);
    }
    loop {
        let m: Vec<BigInt> = point.iter().map(|&x| BigInt::from(x)).collect();
        for (d, b) in cohomology_at_degree(fan, f, &m).into_iter().enumerate() {
            if b != 0 {
                table.entries.insert((point.clone(), d), b);
            }
        }
        // Odometer increment over the box.
        let mut k = 0;
        loop {
            if k == point.len() {
                return Ok(table);
            }
            if point[k] < bounds[k].1 {
                point[k] += 1;
                break;
            }
            point[k] = bounds[k].0;
            k += 1;
        }
    }
}
