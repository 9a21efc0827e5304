//! The local model of the `A_{n−1}` singularity: Koszul resolutions of the
//! skyscrapers `O_0(i)`, their Ext tables and Euler pairings, and the
//! Bondal–Thomsen mutation sequence with its explicit nullhomotopies.

use std::collections::BTreeMap;

use super::{
    complex_cone, total_complex, AlgebraError, ComplexMap, GenKind, Generator, GradedComplex, GradedFreeModule, Poly,
    PolyMatrix, WeightedRing,
};
use crate::rational::qi;

/// Default polynomial-degree truncation for homology checks.
pub const DEFAULT_TRUNCATION: i64 = 6;

/// Resolution of `O_0(i)` in degrees −2, −1, 0:
/// `O(i−n) → O(i−1) ⊕ O(i−(n−1)) → O(i)` with differentials `(−y; x)` and `(x, y)`.
pub fn koszul_resolution(ring: &WeightedRing, i: i64) -> GradedComplex {
    let n = ring.n();
    let modules = vec![
        GradedFreeModule::free(ring, &[(i - n, 2)]),
        GradedFreeModule::free(ring, &[(i - 1, 1), (i - (n - 1), 1)]),
        GradedFreeModule::free(ring, &[(i, 0)]),
    ];
    let d2 = PolyMatrix::from_rows(vec![vec![Poly::y().neg()], vec![Poly::x()]], 1);
    let d1 = PolyMatrix::from_rows(vec![vec![Poly::x(), Poly::y()]], 2);
    GradedComplex::new(*ring, -2, modules, vec![d2, d1]).expect("the Koszul complex is a homogeneous complex")
}

/// `Hom(Koszul(i), O(j))` in degrees 0, 1, 2:
/// `S(j−i) → S(j−i+1) ⊕ S(j−i+n−1) → S(j−i+n)` with differentials `(x; y)` and `(−y, x)`.
pub fn koszul_hom_line_complex(ring: &WeightedRing, i: i64, j: i64) -> GradedComplex {
    let (n, c) = (ring.n(), j - i);
    let modules = vec![
        GradedFreeModule::free(ring, &[(c, 0)]),
        GradedFreeModule::free(ring, &[(c + 1, -1), (c + n - 1, -1)]),
        GradedFreeModule::free(ring, &[(c + n, -2)]),
    ];
    let d0 = PolyMatrix::from_rows(vec![vec![Poly::x()], vec![Poly::y()]], 1);
    let d1 = PolyMatrix::from_rows(vec![vec![Poly::y().neg(), Poly::x()]], 2);
    GradedComplex::new(*ring, 0, modules, vec![d0, d1]).expect("the dual Koszul complex is a homogeneous complex")
}

/// `Hom(Koszul(i), O_0(j))` in degrees 0, 1, 2: skyscraper summands with twists
/// `[j−i]`, `[j−i+1, j−i+n−1]`, `[j−i+n]` and zero differentials.
pub fn skyscraper_hom_complex(ring: &WeightedRing, i: i64, j: i64) -> GradedComplex {
    let (n, c) = (ring.n(), j - i);
    let point = |t: i64| Generator { twist: ring.reduce(t), shift: 0, kind: GenKind::Point };
    let modules = vec![
        GradedFreeModule::new(vec![point(c)]),
        GradedFreeModule::new(vec![point(c + 1), point(c + n - 1)]),
        GradedFreeModule::new(vec![point(c + n)]),
    ];
    GradedComplex::new(*ring, 0, modules, vec![PolyMatrix::zeros(2, 1), PolyMatrix::zeros(1, 2)])
        .expect("zero differentials always form a complex")
}

/// Dimensions of the invariant (character-0) parts of homology in degrees 0, 1, 2.
fn invariant_dims(cx: &GradedComplex, t_max: i64) -> [usize; 3] {
    let table = cx.homology_table(t_max);
    [0, 1, 2].map(|d| table.character_total(d, 0))
}

/// `(dim Ext⁰, dim Ext¹, dim Ext²)` of `O_0(i)` and `O_0(j)`.
pub fn local_ext_dims(ring: &WeightedRing, i: i64, j: i64) -> (usize, usize, usize) {
    let [a, b, c] = invariant_dims(&skyscraper_hom_complex(ring, i, j), 0);
    (a, b, c)
}

/// `χ(O_0(i), O_0(j)) = Σ (−1)^k dim Ext^k`.
pub fn euler_pairing_skyscrapers(ring: &WeightedRing, i: i64, j: i64) -> i64 {
    let (a, b, c) = local_ext_dims(ring, i, j);
    a as i64 - b as i64 + c as i64
}

/// `χ(O_0(i), O(j))`, read off the invariant homology of `Hom(Koszul(i), O(j))`.
pub fn euler_pairing_skyscraper_line(ring: &WeightedRing, i: i64, j: i64) -> i64 {
    let [a, b, c] = invariant_dims(&koszul_hom_line_complex(ring, i, j), DEFAULT_TRUNCATION);
    a as i64 - b as i64 + c as i64
}

/// Objects of the local model after twisting by `−i`: `A = O(−i)` and
/// `M_i = cone(f : D → B ⊕ C)` with `D = O(−i−n)`, `B = O(−i−1)`, `C = O(−i+1)`,
/// `f = (−y; x)`, together with the chain map `g = (x, y) : M_i → A`.
#[derive(Clone, Debug)]
pub struct LocalModel {
    pub ring: WeightedRing,
    pub i: i64,
    pub a: GradedComplex,
    pub m: GradedComplex,
    pub g: ComplexMap,
}

impl LocalModel {
    pub fn new(ring: &WeightedRing, i: i64) -> Result<Self, AlgebraError> {
        let n = ring.n();
        if i < 1 || i > n - 1 {
            return Err(AlgebraError::InvalidIndex { i, max: n - 1 });
        }
        let d = GradedComplex::concentrated(*ring, 0, GradedFreeModule::free(ring, &[(-i - n, 2)]));
        let bc = GradedComplex::concentrated(*ring, 0, GradedFreeModule::free(ring, &[(-i - 1, 1), (-i + 1, 1)]));
        let f = ComplexMap::chain_map(&d, &bc, single(0, PolyMatrix::from_rows(vec![vec![Poly::y().neg()], vec![Poly::x()]], 1)))?;
        let m = complex_cone(&f)?;
        let a = GradedComplex::concentrated(*ring, 0, GradedFreeModule::free(ring, &[(-i, 0)]));
        let g = ComplexMap::chain_map(&m, &a, single(0, PolyMatrix::from_rows(vec![vec![Poly::x(), Poly::y()]], 2)))?;
        Ok(LocalModel { ring: *ring, i, a, m, g })
    }
}

fn single(d: i32, m: PolyMatrix) -> BTreeMap<i32, PolyMatrix> {
    BTreeMap::from([(d, m)])
}

/// Summand type in the mutation sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Summand {
    A,
    M,
}

/// A block of a map between sums of `A` and `M`: zero, `c·id`, or `c·g` (only `M → A`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Zero,
    Id(i64),
    G(i64),
}

/// The four-term sequence `M → A⊕M⊕M → A⊕A⊕M → A`, its differentials and nullhomotopies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationBlocks {
    pub terms: [Vec<Summand>; 4],
    /// `d[k] : X_k → X_{k+1}`.
    pub d: [Vec<Vec<Block>>; 3],
    /// `h[k] : X_{k+1} → X_k`.
    pub h: [Vec<Vec<Block>>; 3],
}

impl MutationBlocks {
    pub fn standard() -> Self {
        use Block::*;
        use Summand::*;
        MutationBlocks {
            terms: [vec![M], vec![A, M, M], vec![A, A, M], vec![A]],
            d: [
                vec![vec![G(1)], vec![Id(-1)], vec![Id(1)]],
                vec![vec![Id(1), Zero, G(-1)], vec![Id(1), G(1), Zero], vec![Zero, Id(1), Id(1)]],
                vec![vec![Id(1), Id(-1), G(1)]],
            ],
            h: [
                vec![vec![Zero, Id(-1), Zero]],
                vec![vec![Zero, Id(1), Zero], vec![Zero, Zero, Zero], vec![Zero, Zero, Id(1)]],
                vec![vec![Id(1)], vec![Zero], vec![Zero]],
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationReport {
    pub n: i64,
    pub i: i64,
    pub truncation: i64,
    /// Identities verified, in the order checked.
    pub identities: Vec<String>,
    /// Total dimension of the chain groups of the total complex over the truncation.
    pub total_chain_dim: usize,
    pub homology_vanishes: bool,
}

fn assemble(model: &LocalModel, sources: &[Summand], targets: &[Summand], blocks: &[Vec<Block>]) -> ComplexMap {
    let pick = |s: Summand| match s {
        Summand::A => model.a.clone(),
        Summand::M => model.m.clone(),
    };
    let src: Vec<GradedComplex> = sources.iter().map(|&s| pick(s)).collect();
    let dst: Vec<GradedComplex> = targets.iter().map(|&s| pick(s)).collect();
    let entries: Vec<Vec<Option<ComplexMap>>> = targets
        .iter()
        .enumerate()
        .map(|(r, &t)| {
            sources
                .iter()
                .enumerate()
                .map(|(c, &s)| match blocks[r][c] {
                    Block::Zero => None,
                    Block::Id(k) => {
                        assert_eq!(s, t, "identity block between different summands");
                        Some(ComplexMap::identity(&pick(s)).scale(&qi(k)))
                    }
                    Block::G(k) => {
                        assert!(s == Summand::M && t == Summand::A, "g blocks map M to A");
                        Some(model.g.scale(&qi(k)))
                    }
                })
                .collect()
        })
        .collect();
    ComplexMap::block(&src, &dst, &entries)
}

/// Checks the mutation sequence for the standard blocks.
pub fn verify_mutation_exactness(ring: &WeightedRing, i: i64, truncation: i64) -> Result<MutationReport, AlgebraError> {
    verify_mutation_with_blocks(ring, i, truncation, &MutationBlocks::standard())
}

/// Checks `d∘d = 0`, `d h + h d = 1` at every term, and that the total complex of the
/// sequence has no homology with polynomial degree `≤ truncation`.
pub fn verify_mutation_with_blocks(
    ring: &WeightedRing,
    i: i64,
    truncation: i64,
    blocks: &MutationBlocks,
) -> Result<MutationReport, AlgebraError> {
    let model = LocalModel::new(ring, i)?;
    let t = &blocks.terms;
    let d: Vec<ComplexMap> = (0..3).map(|k| assemble(&model, &t[k], &t[k + 1], &blocks.d[k])).collect();
    let h: Vec<ComplexMap> = (0..3).map(|k| assemble(&model, &t[k + 1], &t[k], &blocks.h[k])).collect();
    let fail = |name: &str| AlgebraError::IdentityFails { identity: name.to_string() };
    let mut identities = Vec::new();
    let mut check = |name: &str, ok: bool| -> Result<(), AlgebraError> {
        if !ok {
            return Err(fail(name));
        }
        identities.push(name.to_string());
        Ok(())
    };
    check("d1∘d0=0", d[0].then(&d[1]).is_zero())?;
    check("d2∘d1=0", d[1].then(&d[2]).is_zero())?;
    check("h1∘d0=1", d[0].then(&h[0]).is_identity())?;
    check("d0∘h1+h2∘d1=1", h[0].then(&d[0]).add(&d[1].then(&h[1])).is_identity())?;
    check("d1∘h2+h3∘d2=1", h[1].then(&d[1]).add(&d[2].then(&h[2])).is_identity())?;
    check("d2∘h3=1", h[2].then(&d[2]).is_identity())?;
    for (k, dk) in d.iter().enumerate() {
        check(&format!("d{k} is a chain map"), dk.is_chain_map())?;
    }
    let columns: Vec<GradedComplex> = (0..4).map(|k| d.get(k).map_or_else(|| d[2].target().clone(), |m| m.source().clone())).collect();
    let total = total_complex(&columns, &d, -3)?;
    let table = total.homology_table(truncation);
    let (lo, hi) = total.range();
    let mut total_chain_dim = 0;
    for chi in 0..ring.n() {
        for tt in -2..=truncation {
            total_chain_dim += (lo..=hi).map(|deg| total.chain_dim(deg, chi, tt)).sum::<usize>();
        }
    }
    if let Some((&(deg, chi, tt), &got)) = table.entries.iter().next() {
        return Err(AlgebraError::MismatchAtDegree { check: "total complex homology".into(), degree: deg, character: chi, t: tt, expected: 0, got });
    }
    Ok(MutationReport { n: ring.n(), i, truncation, identities, total_chain_dim, homology_vanishes: true })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkingDiskReport {
    pub n: i64,
    pub i: i64,
    pub truncation: i64,
    /// Number of `(character, polynomial degree)` slices compared.
    pub slices_compared: usize,
}

/// Checks that `M_i` has the homology of the twisted ideal sheaf `(x, y)·S(−i)` and that
/// `cone(g : M_i → O(−i))` has the homology of the skyscraper `O_0(−i)`.
pub fn verify_linking_disk_identification(ring: &WeightedRing, i: i64, truncation: i64) -> Result<LinkingDiskReport, AlgebraError> {
    let model = LocalModel::new(ring, i)?;
    let n = ring.n();
    let free = GradedFreeModule::free(ring, &[(-i, 0)]);
    let m_table = model.m.homology_table(truncation);
    let cone_table = complex_cone(&model.g)?.homology_table(truncation);
    let mismatch = |check: &str, degree: i32, chi: i64, t: i64, expected: usize, got: usize| AlgebraError::MismatchAtDegree {
        check: check.to_string(),
        degree,
        character: chi,
        t,
        expected,
        got,
    };
    let skyscraper_chi = ring.reduce(-i);
    let mut slices = 0;
    for chi in 0..n {
        for t in 0..=truncation {
            slices += 1;
            let at_origin = usize::from(t == 0 && chi == skyscraper_chi);
            let ideal = free.slice_basis(ring, chi, t).len() - at_origin;
            let got = m_table.get(0, chi, t);
            if got != ideal {
                return Err(mismatch("M_i ≃ ideal sheaf", 0, chi, t, ideal, got));
            }
            for d in [-2, -1, 1] {
                let got = m_table.get(d, chi, t);
                if got != 0 {
                    return Err(mismatch("M_i ≃ ideal sheaf", d, chi, t, 0, got));
                }
            }
            for d in [-2, -1, 0, 1] {
                let expected = if d == 0 { at_origin } else { 0 };
                let got = cone_table.get(d, chi, t);
                if got != expected {
                    return Err(mismatch("cone(M_i → O(−i)) ≃ skyscraper", d, chi, t, expected, got));
                }
            }
        }
    }
    Ok(LinkingDiskReport { n, i, truncation, slices_compared: slices })
}

/// `Σ_k (−1)^k dim Ext^k` matrix over `0..n`, handy for comparing with Cartan matrices.
pub fn euler_matrix_skyscrapers(ring: &WeightedRing) -> Vec<Vec<i64>> {
    let n = ring.n();
    (0..n).map(|i| (0..n).map(|j| euler_pairing_skyscrapers(ring, i, j)).collect()).collect()
}

/// The total complex of the standard mutation sequence, with `X_k` in horizontal position `k − 3`.
pub fn mutation_total_complex(ring: &WeightedRing, i: i64) -> Result<GradedComplex, AlgebraError> {
    let model = LocalModel::new(ring, i)?;
    let b = MutationBlocks::standard();
    let d: Vec<ComplexMap> = (0..3).map(|k| assemble(&model, &b.terms[k], &b.terms[k + 1], &b.d[k])).collect();
    let columns = vec![d[0].source().clone(), d[1].source().clone(), d[2].source().clone(), d[2].target().clone()];
    total_complex(&columns, &d, -3)
}
