//! The annular braid group `B_{n,1}`: words in `τ_1, …, τ_{n−1}` and `ρ`, their shadow on
//! `K₀` of the stacky `A_{n−1}` point, and their action on Bondal–Thomsen labels.
//!
//! `K₀` has the basis `[O(0)], …, [O(n−1)]` (with `O(n) ≅ O`). The skyscraper `O_0(i)` has
//! class `2e_i − e_{i−1} − e_{i+1}` and pairs with line bundles by `χ(O_0(i), O(j)) = δ_ij`, so
//! the spherical twist `T_{O_0(i)}` acts on `K₀` as the reflection `v ↦ v − v_i·[O_0(i)]`.
//! The generator `τ_i` acts by `T_{O_0(−i)}` and `ρ` by `− ⊗ O(−1)`.
//!
//! These are necessary conditions only: relations on `K₀` say nothing about faithfulness or
//! about the natural isomorphisms the categorical action comes with.

mod labels;

pub use labels::*;

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("need at least 2 strands, got {0}")]
    InvalidStrandCount(i64),
    #[error("τ_{index} is not a generator on {n} strands (expected 1..={max})", max = n - 1)]
    IndexOutOfRange { index: i64, n: i64 },
    #[error("cannot parse braid letter {0:?} (expected t<i>, t<i>^-1, r or r^-1)")]
    InvalidLetter(String),
    #[error("the word has {word} strands but the coloring has {coloring}")]
    ColoringMismatch { word: i64, coloring: usize },
    #[error("invalid coloring: {0}")]
    InvalidColoring(String),
    #[error("ρ is not allowed in this braid group")]
    RhoNotAllowed,
    #[error("matrix entries overflow i64")]
    Overflow,
    #[error("stratum {stratum} already carries the cone record M_{present}, cannot apply τ_{requested}")]
    UnsupportedStratum { stratum: usize, present: i64, requested: i64 },
    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),
}

/// One of the generators `τ_i` or `ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Tau(i64),
    Rho,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn tau(i: i64) -> Self {
        Letter { generator: Generator::Tau(i), inverse: false }
    }

    pub fn rho() -> Self {
        Letter { generator: Generator::Rho, inverse: false }
    }

    pub fn inverted(self) -> Self {
        Letter { inverse: !self.inverse, ..self }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.generator {
            Generator::Tau(i) => write!(f, "t{i}")?,
            Generator::Rho => write!(f, "r")?,
        }
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

impl FromStr for Letter {
    type Err = BraidError;

    /// `t3`, `t3^-1`, `T3` (inverse), `r`, `r^-1`, `R` (inverse).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BraidError::InvalidLetter(s.to_string());
        let (body, mut inverse) = match s.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let mut chars = body.chars();
        let head = chars.next().ok_or_else(bad)?;
        if head.is_ascii_uppercase() {
            inverse = !inverse;
        }
        let rest = chars.as_str();
        let generator = match head.to_ascii_lowercase() {
            'r' if rest.is_empty() => Generator::Rho,
            't' => Generator::Tau(rest.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        Ok(Letter { generator, inverse })
    }
}

/// A word in the generators of `B_{n,1}`, stored uncompressed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    n: i64,
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(n: i64, letters: Vec<Letter>) -> Result<Self, BraidError> {
        if n < 2 {
            return Err(BraidError::InvalidStrandCount(n));
        }
        for l in &letters {
            if let Generator::Tau(i) = l.generator {
                if !(1..n).contains(&i) {
                    return Err(BraidError::IndexOutOfRange { index: i, n });
                }
            }
        }
        Ok(BraidWord { n, letters })
    }

    /// Whitespace-separated letters, e.g. `"t1 t2^-1 r"`.
    pub fn parse(n: i64, text: &str) -> Result<Self, BraidError> {
        let letters = text.split_whitespace().map(str::parse).collect::<Result<Vec<Letter>, _>>()?;
        BraidWord::new(n, letters)
    }

    pub fn identity(n: i64) -> Result<Self, BraidError> {
        BraidWord::new(n, Vec::new())
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { n: self.n, letters: self.letters.iter().rev().map(|l| l.inverted()).collect() }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        assert_eq!(self.n, other.n, "words on different strand counts");
        BraidWord { n: self.n, letters: self.letters.iter().chain(&other.letters).copied().collect() }
    }

    /// Whether `ρ^{±1}` occurs in the word.
    pub fn uses_rho(&self) -> bool {
        self.letters.iter().any(|l| l.generator == Generator::Rho)
    }

    /// The permutation of strand positions `0..n`: `perm[j]` is where the strand starting at
    /// position `j` ends, reading the word left to right. `τ_i` swaps positions `i−1` and `i`;
    /// `ρ` moves every strand one position forward around the annulus.
    pub fn permutation(&self) -> Vec<usize> {
        let n = self.n as usize;
        let mut at: Vec<usize> = (0..n).collect(); // at[position] = strand
        for l in &self.letters {
            match (l.generator, l.inverse) {
                (Generator::Tau(i), _) => at.swap(i as usize - 1, i as usize),
                (Generator::Rho, false) => at.rotate_right(1),
                (Generator::Rho, true) => at.rotate_left(1),
            }
        }
        let mut perm = vec![0; n];
        for (pos, &strand) in at.iter().enumerate() {
            perm[strand] = pos;
        }
        perm
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// An integer `n × n` matrix acting on `K₀` in the basis `[O(0)], …, [O(n−1)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct K0Matrix {
    pub rows: Vec<Vec<i64>>,
}

impl K0Matrix {
    pub fn identity(n: usize) -> Self {
        K0Matrix { rows: (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect() }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        K0Matrix { rows: (0..n).map(|i| self.column(i)).collect() }
    }

    pub fn checked_mul(&self, other: &K0Matrix) -> Option<K0Matrix> {
        let n = self.size();
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = self.rows[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    rows[i][j] = rows[i][j].checked_add(a.checked_mul(other.rows[k][j])?)?;
                }
            }
        }
        Some(K0Matrix { rows })
    }

    pub fn pow(&self, k: u32) -> K0Matrix {
        (0..k).fold(K0Matrix::identity(self.size()), |acc, _| &acc * self)
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i128 {
        let n = self.size();
        let mut m: Vec<Vec<i128>> = self.rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1;
        let mut prev = 1i128;
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| m[i][k] != 0) else { return 0 };
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
                m[i][k] = 0;
            }
            prev = m[k][k];
        }
        sign * m.last().map_or(1, |r| r[n - 1])
    }
}

impl Mul for &K0Matrix {
    type Output = K0Matrix;

    fn mul(self, other: &K0Matrix) -> K0Matrix {
        self.checked_mul(other).expect("matrix entries overflow i64")
    }
}

fn idx(n: i64, i: i64) -> usize {
    i.rem_euclid(n) as usize
}

/// `[O_0(i)] = [O(i)] − [O(i−1)] − [O(i+1)] + [O(i−n)]`, from the twisted Koszul resolution
/// `0 → O(i−n) → O(i−1) ⊕ O(i+1−n) → O(i) → 0`, reduced with `O(j−n) ≅ O(j)`.
pub fn skyscraper_class(n: i64, i: i64) -> Vec<i64> {
    assert!(n >= 2, "need n ≥ 2");
    let mut v = vec![0; n as usize];
    v[idx(n, i)] += 2;
    v[idx(n, i - 1)] -= 1;
    v[idx(n, i + 1)] -= 1;
    v
}

/// `χ(O_0(i), −)` on `K₀`: the row vector `e_i*`.
fn pairing_row(n: i64, i: i64) -> Vec<i64> {
    let mut v = vec![0; n as usize];
    v[idx(n, i)] = 1;
    v
}

/// The spherical twist `T_{O_0(i)}` on `K₀`: `v ↦ v − χ(O_0(i), v)·[O_0(i)]`.
pub fn twist_matrix(n: i64, i: i64) -> K0Matrix {
    let s = skyscraper_class(n, i);
    let chi = pairing_row(n, i);
    let mut m = K0Matrix::identity(n as usize);
    for (r, row) in m.rows.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x -= s[r] * chi[c];
        }
    }
    m
}

/// `− ⊗ O(−1)`: `e_j ↦ e_{j−1}`.
pub fn rho_matrix(n: i64) -> K0Matrix {
    assert!(n >= 2, "need n ≥ 2");
    let mut m = vec![vec![0; n as usize]; n as usize];
    for j in 0..n {
        m[idx(n, j - 1)][j as usize] = 1;
    }
    K0Matrix { rows: m }
}

/// The circulant Cartan matrix `2I − P − P⁻¹` of the affine `A_{n−1}` diagram.
pub fn cartan_matrix(n: i64) -> K0Matrix {
    K0Matrix { rows: (0..n).map(|j| skyscraper_class(n, j)).collect::<Vec<_>>() }.transpose()
}

/// Which skyscraper `τ_i` twists along.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistConvention {
    /// `τ_i ↦ T_{O_0(−i)}`, compatible with `ρ = − ⊗ O(−1)`.
    #[default]
    Relabelled,
    /// `τ_i ↦ T_{O_0(i)}`.
    Dual,
}

impl TwistConvention {
    pub fn sheaf_index(self, n: i64, i: i64) -> i64 {
        match self {
            TwistConvention::Relabelled => (-i).rem_euclid(n),
            TwistConvention::Dual => i.rem_euclid(n),
        }
    }
}

fn letter_matrix(n: i64, l: Letter, convention: TwistConvention) -> K0Matrix {
    match l.generator {
        // Twists are reflections on K₀, so τ and τ⁻¹ agree there.
        Generator::Tau(i) => twist_matrix(n, convention.sheaf_index(n, i)),
        Generator::Rho if l.inverse => rho_matrix(n).transpose(),
        Generator::Rho => rho_matrix(n),
    }
}

/// The product of the generator matrices, in the order of the word.
pub fn represent(word: &BraidWord) -> Result<K0Matrix, BraidError> {
    represent_with(word, TwistConvention::Relabelled)
}

pub fn represent_with(word: &BraidWord, convention: TwistConvention) -> Result<K0Matrix, BraidError> {
    let n = word.n();
    word.letters().iter().try_fold(K0Matrix::identity(n as usize), |acc, &l| acc.checked_mul(&letter_matrix(n, l, convention)).ok_or(BraidError::Overflow))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    /// `τ_i τ_{i+1} τ_i = τ_{i+1} τ_i τ_{i+1}`, indices cyclic.
    Braid,
    /// `τ_i τ_j = τ_j τ_i` for cyclically non-adjacent `i, j`.
    Commutation,
    /// `ρ τ_k ρ⁻¹ = τ_{k+1}`, indices cyclic.
    RhoConjugation,
    /// The cyclic translate `τ_n = ρ^{n−1} τ_1 ρ^{−(n−1)}` is the twist along `O_0(0)`.
    CyclicTranslate,
    /// `ρⁿ = 1`.
    RhoPower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub kind: RelationKind,
    pub relation: String,
    pub passed: bool,
    /// For failures, what the left-hand side turned out to equal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub n: i64,
    pub convention: TwistConvention,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks the annular braid relations on `K₀`. Generators are indexed cyclically `1..=n`, where
/// `τ_n` is the cyclic translate of `τ_1`. For `n = 2` the affine diagram has no braid or
/// commutation relations, so only the `ρ` relations are checked.
pub fn verify_relations(n: i64) -> Result<RelationReport, BraidError> {
    verify_relations_with(n, TwistConvention::Relabelled)
}

pub fn verify_relations_with(n: i64, convention: TwistConvention) -> Result<RelationReport, BraidError> {
    if !(2..=64).contains(&n) {
        return Err(BraidError::InvalidStrandCount(n));
    }
    let rho = rho_matrix(n);
    let rho_inv = rho.transpose();
    // τ_k for k in 1..=n; τ_n is defined as a conjugate of τ_1.
    let tau: Vec<K0Matrix> = (1..=n)
        .map(|k| {
            if k < n {
                twist_matrix(n, convention.sheaf_index(n, k))
            } else {
                &(&rho.pow(n as u32 - 1) * &twist_matrix(n, convention.sheaf_index(n, 1))) * &rho_inv.pow(n as u32 - 1)
            }
        })
        .collect();
    let t = |k: i64| &tau[(k - 1).rem_euclid(n) as usize];
    let name = |k: i64| format!("τ_{}", (k - 1).rem_euclid(n) + 1);
    let mut checks = Vec::new();
    let mut push = |kind, relation: String, passed: bool, detail: Option<String>| checks.push(RelationCheck { kind, relation, passed, detail });
    if n >= 3 {
        for i in 1..=n {
            // For n = 3 every pair is adjacent; skip the duplicate orientation.
            if n == 3 && i == n {
                continue;
            }
            let (a, b) = (t(i), t(i + 1));
            let ok = &(a * b) * a == &(b * a) * b;
            push(RelationKind::Braid, format!("{0} {1} {0} = {1} {0} {1}", name(i), name(i + 1)), ok, None);
        }
        for i in 1..=n {
            for j in i + 2..=n {
                if (i - j).rem_euclid(n) == 1 || (j - i).rem_euclid(n) == 1 {
                    continue;
                }
                let ok = t(i) * t(j) == t(j) * t(i);
                push(RelationKind::Commutation, format!("{0} {1} = {1} {0}", name(i), name(j)), ok, None);
            }
        }
    }
    for k in 1..=n {
        let conj = &(&rho * t(k)) * &rho_inv;
        let ok = conj == *t(k + 1);
        let detail = (!ok).then(|| {
            let sheaf = |m: &K0Matrix| (0..n).find(|&j| *m == twist_matrix(n, j));
            let step = |a: i64, b: i64| (b - a + n / 2).rem_euclid(n) - n / 2;
            match (sheaf(t(k)), sheaf(&conj), sheaf(t(k + 1))) {
                (Some(a), Some(c), Some(b)) => format!(
                    "ρ {} ρ⁻¹ twists along O_0({c}) but {} along O_0({b}): conjugation shifts the skyscraper by {}, the generators by {}",
                    name(k),
                    name(k + 1),
                    step(a, c),
                    step(a, b)
                ),
                _ => format!("ρ {} ρ⁻¹ is not a skyscraper twist", name(k)),
            }
        });
        push(RelationKind::RhoConjugation, format!("ρ {} ρ⁻¹ = {}", name(k), name(k + 1)), ok, detail);
    }
    let ok = *t(n) == twist_matrix(n, 0);
    let detail = (!ok).then(|| match (0..n).find(|&j| *t(n) == twist_matrix(n, j)) {
        Some(j) => format!("{} is the twist along O_0({j})", name(n)),
        None => format!("{} is not a skyscraper twist", name(n)),
    });
    push(RelationKind::CyclicTranslate, format!("{} = T_(O_0(0))", name(n)), ok, detail);
    push(RelationKind::RhoPower, format!("ρ^{n} = 1"), rho.pow(n as u32) == K0Matrix::identity(n as usize), None);
    Ok(RelationReport { n, convention, checks })
}

/// A coloring `C : {1..k} → ℤ_{>0}` of strands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<i64>,
}

impl Coloring {
    pub fn new(colors: Vec<i64>) -> Result<Self, BraidError> {
        if colors.is_empty() || colors.iter().any(|&c| c <= 0) {
            return Err(BraidError::InvalidColoring(format!("colors must be positive and non-empty, got {colors:?}")));
        }
        Ok(Coloring { colors })
    }

    /// Consecutive differences of a chamber `I = {0 = i_0 < … < i_k = n}`.
    pub fn from_chamber(chamber: &[i64]) -> Result<Self, BraidError> {
        let mut sorted = chamber.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != chamber.len() || sorted.len() < 2 || sorted[0] != 0 {
            return Err(BraidError::InvalidColoring(format!("{chamber:?} is not a chamber 0 = i_0 < … < i_k")));
        }
        Coloring::new(crate::graph::chamber_coloring(&sorted))
    }

    pub fn strands(&self) -> usize {
        self.colors.len()
    }

    pub fn total(&self) -> i64 {
        self.colors.iter().sum()
    }
}

/// Whether the word's strand permutation preserves the coloring: `C(π(j)) = C(j)` for all `j`.
/// `ρ` is only accepted when `allow_rho` is set (it is excluded for partial resolutions).
pub fn mixed_braid_membership(word: &BraidWord, coloring: &Coloring, allow_rho: bool) -> Result<bool, BraidError> {
    if word.n() as usize != coloring.strands() {
        return Err(BraidError::ColoringMismatch { word: word.n(), coloring: coloring.strands() });
    }
    if word.uses_rho() && !allow_rho {
        return Err(BraidError::RhoNotAllowed);
    }
    let perm = word.permutation();
    Ok(perm.iter().enumerate().all(|(j, &p)| coloring.colors[p] == coloring.colors[j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skyscraper_examples() {
        assert_eq!(skyscraper_class(4, 0), vec![2, -1, 0, -1]);
        assert_eq!(skyscraper_class(2, 1), vec![-2, 2]);
    }

    #[test]
    fn twist_example() {
        let t = twist_matrix(3, 1);
        assert_eq!(t.column(0), vec![1, 0, 0]);
        assert_eq!(t.column(1), vec![1, -1, 1]);
        assert_eq!(t.column(2), vec![0, 0, 1]);
        assert_eq!(t.determinant(), -1);
        assert_eq!(&t * &t, K0Matrix::identity(3));
    }

    #[test]
    fn rho_permutes_skyscrapers() {
        let r = rho_matrix(4);
        assert_eq!(r.apply(&skyscraper_class(4, 2)), skyscraper_class(4, 1));
        assert_eq!(r.pow(4), K0Matrix::identity(4));
    }

    #[test]
    fn letters_parse_and_print() {
        let w = BraidWord::parse(4, "t1 T2 t3^-1 r R r^-1").unwrap();
        assert_eq!(w.to_string(), "t1 t2^-1 t3^-1 r r^-1 r^-1");
        assert_eq!(BraidWord::parse(4, &w.to_string()).unwrap(), w);
        assert!(matches!(BraidWord::parse(4, "t4"), Err(BraidError::IndexOutOfRange { .. })));
        assert!(matches!(BraidWord::parse(4, "x1"), Err(BraidError::InvalidLetter(_))));
        assert!(matches!(BraidWord::parse(4, "t"), Err(BraidError::InvalidLetter(_))));
    }

    #[test]
    fn determinant_by_bareiss() {
        let m = K0Matrix { rows: vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]] };
        assert_eq!(m.determinant(), 18);
        let p = K0Matrix { rows: vec![vec![0, 1], vec![1, 0]] };
        assert_eq!(p.determinant(), -1);
    }
}
