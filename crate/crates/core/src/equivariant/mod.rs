//! Character-graded homological algebra over `S = k[x, y]` with a `Z/n` action
//! of weights `wt(x) = 1`, `wt(y) = n − 1`.
//!
//! A generator `e` of a free module carries a twist `c` (so it spans a copy of
//! `S(c)`) and a polynomial-degree shift `s`. The monomial `x^a y^b · e` then
//! has character `c − wt(x^a y^b)` and internal degree `s + a + b`. Every
//! question is answered one slice `(character χ, internal degree t)` at a time,
//! where all chain groups are finite-dimensional.
//!
//! Complexes are cohomological: differentials raise the degree by one.

mod local;
mod maps;

pub use local::*;
pub use maps::*;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{rank_q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("the cyclic group order must be at least 2, got {0}")]
    InvalidRing(i64),
    #[error("index {i} out of range 1..={max}")]
    InvalidIndex { i: i64, max: i64 },
    #[error("entry ({row}, {col}) of the map in degree {degree} is not homogeneous of the required weight/degree")]
    NotHomogeneous { degree: i32, row: usize, col: usize },
    #[error("matrix in degree {degree} has shape {got:?}, expected {expected:?}")]
    ShapeMismatch { degree: i32, got: (usize, usize), expected: (usize, usize) },
    #[error("d∘d ≠ 0 starting in degree {degree}")]
    NotAComplex { degree: i32 },
    #[error("not a chain map: the square in degree {degree} does not commute")]
    NotChainMap { degree: i32 },
    #[error("identity fails: {identity}")]
    IdentityFails { identity: String },
    #[error("{check}: mismatch in degree {degree}, character {character}, polynomial degree {t}: expected {expected}, got {got}")]
    MismatchAtDegree { check: String, degree: i32, character: i64, t: i64, expected: usize, got: usize },
}

/// `k[x,y]` with the `Z/n` weights `(1, n−1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightedRing {
    n: i64,
}

impl WeightedRing {
    pub fn new(n: i64) -> Result<Self, AlgebraError> {
        if n < 2 {
            return Err(AlgebraError::InvalidRing(n));
        }
        Ok(WeightedRing { n })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// Variable weights as residues mod `n`.
    pub fn weights(&self) -> (i64, i64) {
        (1, self.n - 1)
    }

    pub fn reduce(&self, c: i64) -> i64 {
        c.rem_euclid(self.n)
    }

    /// Weight of `x^a y^b` modulo `n`.
    pub fn monomial_weight(&self, a: u32, b: u32) -> i64 {
        self.reduce(a as i64 + (self.n - 1) * b as i64)
    }
}

/// A polynomial in `x, y` with rational coefficients, keyed by exponents `(a, b)` of `x^a y^b`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), Q>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|((a, b), c)| format!("{c}·x^{a}y^{b}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Q::from_integer(c.into()))
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, Q::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, Q::one())
    }

    pub fn monomial(a: u32, b: u32, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, a: u32, b: u32) -> Q {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, key: (u32, u32), c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// `(degree, weight)` if the polynomial is nonzero and homogeneous for both gradings.
    pub fn homogeneity(&self, ring: &WeightedRing) -> Option<(u32, i64)> {
        let mut it = self.terms.keys();
        let &(a, b) = it.next()?;
        let (d, w) = (a + b, ring.monomial_weight(a, b));
        it.all(|&(a2, b2)| a2 + b2 == d && ring.monomial_weight(a2, b2) == w).then_some((d, w))
    }
}

/// Whether a generator spans a free summand `S(c)` or the skyscraper `S(c)/(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenKind {
    Free,
    Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    /// Character twist, reduced mod `n`.
    pub twist: i64,
    /// Internal polynomial degree of the generator.
    pub shift: i64,
    pub kind: GenKind,
}

/// `⊕ S(c_i)` (or skyscraper summands), with per-generator degree shifts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedFreeModule {
    pub generators: Vec<Generator>,
}

impl GradedFreeModule {
    pub fn new(generators: Vec<Generator>) -> Self {
        GradedFreeModule { generators }
    }

    pub fn free(ring: &WeightedRing, twists_and_shifts: &[(i64, i64)]) -> Self {
        GradedFreeModule {
            generators: twists_and_shifts
                .iter()
                .map(|&(c, s)| Generator { twist: ring.reduce(c), shift: s, kind: GenKind::Free })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn twists(&self) -> Vec<i64> {
        self.generators.iter().map(|g| g.twist).collect()
    }

    pub fn direct_sum(parts: &[&GradedFreeModule]) -> Self {
        GradedFreeModule { generators: parts.iter().flat_map(|p| p.generators.iter().copied()).collect() }
    }

    /// Basis of the slice `(χ, t)`: pairs (generator index, exponents).
    pub fn slice_basis(&self, ring: &WeightedRing, chi: i64, t: i64) -> Vec<(usize, (u32, u32))> {
        let chi = ring.reduce(chi);
        let mut out = Vec::new();
        for (g, gen) in self.generators.iter().enumerate() {
            let e = t - gen.shift;
            if e < 0 || (gen.kind == GenKind::Point && e > 0) {
                continue;
            }
            let e = e as u32;
            for a in 0..=e {
                let b = e - a;
                if ring.reduce(gen.twist - ring.monomial_weight(a, b)) == chi {
                    out.push((g, (a, b)));
                }
            }
        }
        out
    }
}

/// Matrix of polynomials; rows index target generators, columns source generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<&Poly>> = (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c)).collect()).collect();
        write!(f, "{rows:?}")
    }
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, entries: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Poly::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>, cols: usize) -> Self {
        let r = rows.len();
        let mut entries = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged polynomial matrix");
            entries.extend(row);
        }
        PolyMatrix { rows: r, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "polynomial matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.entries[idx] = out.entries[idx].add(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.shape(), other.shape(), "polynomial matrix sum shape mismatch");
        PolyMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, c: &Q) -> PolyMatrix {
        PolyMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn neg(&self) -> PolyMatrix {
        self.scale(&-Q::one())
    }

    /// Places `block` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &PolyMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    /// Checks that each nonzero entry maps source generator `c` to target generator `r` homogeneously.
    fn check_homogeneous(
        &self,
        ring: &WeightedRing,
        source: &GradedFreeModule,
        target: &GradedFreeModule,
        degree: i32,
    ) -> Result<(), AlgebraError> {
        let expected = (target.len(), source.len());
        if self.shape() != expected {
            return Err(AlgebraError::ShapeMismatch { degree, got: self.shape(), expected });
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                let p = self.get(r, c);
                if p.is_zero() {
                    continue;
                }
                let (g, h) = (&source.generators[c], &target.generators[r]);
                let ok = match p.homogeneity(ring) {
                    Some((d, w)) => w == ring.reduce(h.twist - g.twist) && d as i64 == g.shift - h.shift,
                    None => false,
                };
                if !ok || (g.kind == GenKind::Point && h.kind == GenKind::Free) {
                    return Err(AlgebraError::NotHomogeneous { degree, row: r, col: c });
                }
            }
        }
        Ok(())
    }

    /// The linear map induced on the slice `(χ, t)`, as a dense rational matrix.
    fn slice_matrix(
        &self,
        ring: &WeightedRing,
        source: &GradedFreeModule,
        target: &GradedFreeModule,
        chi: i64,
        t: i64,
    ) -> (usize, usize, Vec<Vec<Q>>) {
        let src = source.slice_basis(ring, chi, t);
        let dst = target.slice_basis(ring, chi, t);
        let index: HashMap<(usize, (u32, u32)), usize> = dst.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut m = vec![vec![Q::zero(); src.len()]; dst.len()];
        for (col, &(g, (a, b))) in src.iter().enumerate() {
            for h in 0..target.len() {
                for (&(pa, pb), coef) in self.get(h, g).terms() {
                    if let Some(&row) = index.get(&(h, (a + pa, b + pb))) {
                        m[row][col] += coef;
                    }
                }
            }
        }
        (dst.len(), src.len(), m)
    }
}

/// A bounded cohomological complex of graded free modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    ring: WeightedRing,
    lo: i32,
    modules: Vec<GradedFreeModule>,
    /// `diffs[k]` maps `modules[k] → modules[k+1]`.
    diffs: Vec<PolyMatrix>,
}

impl GradedComplex {
    /// Validates homogeneity of all differentials and `d∘d = 0`.
    pub fn new(ring: WeightedRing, lo: i32, modules: Vec<GradedFreeModule>, diffs: Vec<PolyMatrix>) -> Result<Self, AlgebraError> {
        assert_eq!(diffs.len() + 1, modules.len().max(1), "need one differential between consecutive modules");
        for (k, d) in diffs.iter().enumerate() {
            d.check_homogeneous(&ring, &modules[k], &modules[k + 1], lo + k as i32)?;
        }
        for k in 1..diffs.len() {
            if !diffs[k].mul(&diffs[k - 1]).is_zero() {
                return Err(AlgebraError::NotAComplex { degree: lo + k as i32 - 1 });
            }
        }
        Ok(GradedComplex { ring, lo, modules, diffs })
    }

    /// A single module placed in `degree`.
    pub fn concentrated(ring: WeightedRing, degree: i32, module: GradedFreeModule) -> Self {
        GradedComplex { ring, lo: degree, modules: vec![module], diffs: vec![] }
    }

    pub fn ring(&self) -> &WeightedRing {
        &self.ring
    }

    /// Lowest and highest degree carrying a (possibly empty) module.
    pub fn range(&self) -> (i32, i32) {
        (self.lo, self.lo + self.modules.len() as i32 - 1)
    }

    pub fn module(&self, degree: i32) -> GradedFreeModule {
        let k = degree - self.lo;
        if k < 0 || k as usize >= self.modules.len() {
            GradedFreeModule::default()
        } else {
            self.modules[k as usize].clone()
        }
    }

    pub fn module_ref(&self, degree: i32) -> Option<&GradedFreeModule> {
        let k = degree - self.lo;
        (k >= 0).then(|| self.modules.get(k as usize)).flatten()
    }

    /// The differential leaving `degree`, zero outside the stored range.
    pub fn differential(&self, degree: i32) -> PolyMatrix {
        let k = degree - self.lo;
        if k >= 0 && (k as usize) < self.diffs.len() {
            self.diffs[k as usize].clone()
        } else {
            PolyMatrix::zeros(self.module(degree + 1).len(), self.module(degree).len())
        }
    }

    /// Same complex with every twist shifted by `c`.
    pub fn twisted(&self, c: i64) -> GradedComplex {
        let modules = self
            .modules
            .iter()
            .map(|m| GradedFreeModule {
                generators: m.generators.iter().map(|g| Generator { twist: self.ring.reduce(g.twist + c), ..*g }).collect(),
            })
            .collect();
        GradedComplex { ring: self.ring, lo: self.lo, modules, diffs: self.diffs.clone() }
    }

    fn min_shift(&self) -> i64 {
        self.modules.iter().flat_map(|m| m.generators.iter().map(|g| g.shift)).min().unwrap_or(0)
    }

    /// Dimension of the chain group in `degree` on slice `(χ, t)`.
    pub fn chain_dim(&self, degree: i32, chi: i64, t: i64) -> usize {
        self.module_ref(degree).map_or(0, |m| m.slice_basis(&self.ring, chi, t).len())
    }

    /// Rank of the differential leaving `degree` on slice `(χ, t)`.
    pub fn differential_rank(&self, degree: i32, chi: i64, t: i64) -> usize {
        let k = degree - self.lo;
        if k < 0 || k as usize >= self.diffs.len() {
            return 0;
        }
        let k = k as usize;
        let (_, _, m) = self.diffs[k].slice_matrix(&self.ring, &self.modules[k], &self.modules[k + 1], chi, t);
        rank_q(m)
    }

    /// Homology dimensions on every slice with `t ≤ t_max`.
    pub fn homology_table(&self, t_max: i64) -> CharacterDimensionTable {
        let (lo, hi) = self.range();
        let mut table = CharacterDimensionTable::default();
        for chi in 0..self.ring.n {
            for t in self.min_shift().min(0)..=t_max {
                let ranks: Vec<usize> = (lo - 1..=hi).map(|d| self.differential_rank(d, chi, t)).collect();
                for d in lo..=hi {
                    let dim = self.chain_dim(d, chi, t);
                    let idx = (d - lo) as usize;
                    let h = dim - ranks[idx + 1] - ranks[idx];
                    if h > 0 {
                        table.entries.insert((d, chi, t), h);
                    }
                }
            }
        }
        table
    }

    /// Euler characteristic of the chain groups on a slice.
    pub fn chain_euler(&self, chi: i64, t: i64) -> i64 {
        let (lo, hi) = self.range();
        (lo..=hi).map(|d| if d.rem_euclid(2) == 0 { 1 } else { -1 } * self.chain_dim(d, chi, t) as i64).sum()
    }
}

/// Homology dimensions keyed by `(cohomological degree, character, polynomial degree)`; zeros omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CharacterDimensionTable {
    pub entries: BTreeMap<(i32, i64, i64), usize>,
}

impl CharacterDimensionTable {
    pub fn get(&self, d: i32, chi: i64, t: i64) -> usize {
        self.entries.get(&(d, chi, t)).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total dimension in degree `d` and character `χ`, summed over polynomial degrees.
    pub fn character_total(&self, d: i32, chi: i64) -> usize {
        self.entries.iter().filter(|((dd, c, _), _)| *dd == d && *c == chi).map(|(_, &v)| v).sum()
    }

    /// Euler characteristic of the homology on a slice.
    pub fn euler(&self, chi: i64, t: i64) -> i64 {
        self.entries
            .iter()
            .filter(|((_, c, tt), _)| *c == chi && *tt == t)
            .map(|((d, _, _), &v)| if d.rem_euclid(2) == 0 { v as i64 } else { -(v as i64) })
            .sum()
    }
}
