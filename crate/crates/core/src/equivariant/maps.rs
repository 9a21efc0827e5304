//! Degree-preserving maps between graded complexes, mapping cones, direct sums
//! and total complexes of sequences of complexes.

use std::collections::BTreeMap;

use num_traits::One;

use super::{AlgebraError, GradedComplex, GradedFreeModule, PolyMatrix};
use crate::rational::Q;

/// A family of module maps `f^d : X^d → Y^d`, homogeneous in every entry.
/// It is a chain map when `d_Y ∘ f = f ∘ d_X`; see [`ComplexMap::is_chain_map`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexMap {
    source: GradedComplex,
    target: GradedComplex,
    components: BTreeMap<i32, PolyMatrix>,
}

impl ComplexMap {
    /// Builds a map from its nonzero components; missing degrees are zero.
    pub fn new(source: &GradedComplex, target: &GradedComplex, components: BTreeMap<i32, PolyMatrix>) -> Result<Self, AlgebraError> {
        for (&d, m) in &components {
            m.check_homogeneous(source.ring(), &source.module(d), &target.module(d), d)?;
        }
        Ok(ComplexMap { source: source.clone(), target: target.clone(), components })
    }

    /// Like [`ComplexMap::new`] but also requires the chain-map squares to commute.
    pub fn chain_map(source: &GradedComplex, target: &GradedComplex, components: BTreeMap<i32, PolyMatrix>) -> Result<Self, AlgebraError> {
        let f = Self::new(source, target, components)?;
        f.check_chain_map()?;
        Ok(f)
    }

    pub fn zero(source: &GradedComplex, target: &GradedComplex) -> Self {
        ComplexMap { source: source.clone(), target: target.clone(), components: BTreeMap::new() }
    }

    pub fn identity(x: &GradedComplex) -> Self {
        let (lo, hi) = x.range();
        let components = (lo..=hi).map(|d| (d, PolyMatrix::identity(x.module(d).len()))).collect();
        ComplexMap { source: x.clone(), target: x.clone(), components }
    }

    pub fn source(&self) -> &GradedComplex {
        &self.source
    }

    pub fn target(&self) -> &GradedComplex {
        &self.target
    }

    /// The component in `degree` (a zero matrix if none was stored).
    pub fn component(&self, degree: i32) -> PolyMatrix {
        self.components
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| PolyMatrix::zeros(self.target.module(degree).len(), self.source.module(degree).len()))
    }

    fn degree_span(&self) -> (i32, i32) {
        let (a, b) = self.source.range();
        let (c, d) = self.target.range();
        (a.min(c) - 1, b.max(d) + 1)
    }

    pub fn check_chain_map(&self) -> Result<(), AlgebraError> {
        let (lo, hi) = self.degree_span();
        for d in lo..=hi {
            let left = self.target.differential(d).mul(&self.component(d));
            let right = self.component(d + 1).mul(&self.source.differential(d));
            if left != right {
                return Err(AlgebraError::NotChainMap { degree: d });
            }
        }
        Ok(())
    }

    pub fn is_chain_map(&self) -> bool {
        self.check_chain_map().is_ok()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ComplexMap) -> ComplexMap {
        let (lo, hi) = self.source.range();
        let components = (lo..=hi).map(|d| (d, other.component(d).mul(&self.component(d)))).collect();
        ComplexMap { source: self.source.clone(), target: other.target.clone(), components }
    }

    pub fn add(&self, other: &ComplexMap) -> ComplexMap {
        let (lo, hi) = self.source.range();
        let components = (lo..=hi).map(|d| (d, self.component(d).add(&other.component(d)))).collect();
        ComplexMap { source: self.source.clone(), target: self.target.clone(), components }
    }

    pub fn scale(&self, c: &Q) -> ComplexMap {
        ComplexMap {
            source: self.source.clone(),
            target: self.target.clone(),
            components: self.components.iter().map(|(&d, m)| (d, m.scale(c))).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(PolyMatrix::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        let (lo, hi) = self.source.range();
        self.source == self.target && (lo..=hi).all(|d| self.component(d) == PolyMatrix::identity(self.source.module(d).len()))
    }

    /// A map between direct sums assembled from blocks; `blocks[r][c]` maps summand `c` of the
    /// source to summand `r` of the target (`None` for zero).
    pub fn block(sources: &[GradedComplex], targets: &[GradedComplex], blocks: &[Vec<Option<ComplexMap>>]) -> ComplexMap {
        let source = direct_sum(sources);
        let target = direct_sum(targets);
        let (lo, hi) = source.range();
        let mut components = BTreeMap::new();
        for d in lo..=hi {
            let mut m = PolyMatrix::zeros(target.module(d).len(), source.module(d).len());
            let mut r0 = 0;
            for (r, t) in targets.iter().enumerate() {
                let mut c0 = 0;
                for (c, s) in sources.iter().enumerate() {
                    if let Some(b) = &blocks[r][c] {
                        m.put_block(r0, c0, &b.component(d));
                    }
                    c0 += s.module(d).len();
                }
                r0 += t.module(d).len();
            }
            components.insert(d, m);
        }
        ComplexMap { source, target, components }
    }
}

/// Direct sum of complexes over the same ring.
pub fn direct_sum(parts: &[GradedComplex]) -> GradedComplex {
    assert!(!parts.is_empty(), "direct sum of no complexes");
    let ring = *parts[0].ring();
    let lo = parts.iter().map(|p| p.range().0).min().unwrap_or(0);
    let hi = parts.iter().map(|p| p.range().1).max().unwrap_or(0);
    let modules: Vec<GradedFreeModule> = (lo..=hi)
        .map(|d| {
            let ms: Vec<GradedFreeModule> = parts.iter().map(|p| p.module(d)).collect();
            GradedFreeModule::direct_sum(&ms.iter().collect::<Vec<_>>())
        })
        .collect();
    let diffs = (lo..hi)
        .map(|d| {
            let mut m = PolyMatrix::zeros(modules[(d + 1 - lo) as usize].len(), modules[(d - lo) as usize].len());
            let (mut r0, mut c0) = (0, 0);
            for p in parts {
                m.put_block(r0, c0, &p.differential(d));
                r0 += p.module(d + 1).len();
                c0 += p.module(d).len();
            }
            m
        })
        .collect();
    GradedComplex { ring, lo, modules, diffs }
}

/// Mapping cone of a chain map `f : X → Y`: degree `d` holds `Y^d ⊕ X^{d+1}` and the
/// differential is `[[d_Y, f], [0, −d_X]]`.
pub fn complex_cone(f: &ComplexMap) -> Result<GradedComplex, AlgebraError> {
    f.check_chain_map()?;
    let (x, y) = (f.source(), f.target());
    let lo = y.range().0.min(x.range().0 - 1);
    let hi = y.range().1.max(x.range().1 - 1);
    let modules: Vec<GradedFreeModule> = (lo..=hi).map(|d| GradedFreeModule::direct_sum(&[&y.module(d), &x.module(d + 1)])).collect();
    let minus = -Q::one();
    let diffs = (lo..hi)
        .map(|d| {
            let (yd, yd1) = (y.module(d).len(), y.module(d + 1).len());
            let (xd1, xd2) = (x.module(d + 1).len(), x.module(d + 2).len());
            let mut m = PolyMatrix::zeros(yd1 + xd2, yd + xd1);
            m.put_block(0, 0, &y.differential(d));
            m.put_block(0, yd, &f.component(d + 1));
            m.put_block(yd1, yd, &x.differential(d + 1).scale(&minus));
            m
        })
        .collect();
    GradedComplex::new(*y.ring(), lo, modules, diffs)
}

/// Total complex of `X_0 → X_1 → … → X_K`, with `X_k` in horizontal position `p0 + k`.
/// The differential is `d_h + (−1)^p d_v`; `maps[k] : X_k → X_{k+1}` must be chain maps
/// with vanishing consecutive composites.
pub fn total_complex(columns: &[GradedComplex], maps: &[ComplexMap], p0: i32) -> Result<GradedComplex, AlgebraError> {
    assert_eq!(maps.len() + 1, columns.len(), "need one map between consecutive columns");
    for m in maps {
        m.check_chain_map()?;
    }
    let ring = *columns[0].ring();
    let pos = |k: usize| p0 + k as i32;
    let lo = columns.iter().enumerate().map(|(k, c)| pos(k) + c.range().0).min().unwrap_or(0);
    let hi = columns.iter().enumerate().map(|(k, c)| pos(k) + c.range().1).max().unwrap_or(0);
    let module_at = |n: i32| {
        let ms: Vec<GradedFreeModule> = columns.iter().enumerate().map(|(k, c)| c.module(n - pos(k))).collect();
        GradedFreeModule::direct_sum(&ms.iter().collect::<Vec<_>>())
    };
    let modules: Vec<GradedFreeModule> = (lo..=hi).map(module_at).collect();
    let diffs = (lo..hi)
        .map(|n| {
            let src_sizes: Vec<usize> = columns.iter().enumerate().map(|(k, c)| c.module(n - pos(k)).len()).collect();
            let dst_sizes: Vec<usize> = columns.iter().enumerate().map(|(k, c)| c.module(n + 1 - pos(k)).len()).collect();
            let offset = |sizes: &[usize], k: usize| sizes[..k].iter().sum::<usize>();
            let mut m = PolyMatrix::zeros(dst_sizes.iter().sum(), src_sizes.iter().sum());
            for (k, c) in columns.iter().enumerate() {
                let q = n - pos(k);
                let sign = if pos(k).rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
                m.put_block(offset(&dst_sizes, k), offset(&src_sizes, k), &c.differential(q).scale(&sign));
                if k < maps.len() {
                    m.put_block(offset(&dst_sizes, k + 1), offset(&src_sizes, k), &maps[k].component(q));
                }
            }
            m
        })
        .collect();
    GradedComplex::new(ring, lo, modules, diffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::{Poly, WeightedRing};

    fn line(ring: WeightedRing, c: i64) -> GradedComplex {
        GradedComplex::concentrated(ring, 0, GradedFreeModule::free(&ring, &[(c, 0)]))
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let ring = WeightedRing::new(4).unwrap();
        let o = line(ring, 0);
        let cone = complex_cone(&ComplexMap::identity(&o)).unwrap();
        assert!(cone.homology_table(6).is_empty());
    }

    #[test]
    fn cone_of_zero_is_sum_with_shift() {
        let ring = WeightedRing::new(3).unwrap();
        let (a, b) = (line(ring, 0), line(ring, 1));
        let cone = complex_cone(&ComplexMap::zero(&a, &b)).unwrap();
        assert_eq!(cone.module(0).twists(), vec![1]);
        assert_eq!(cone.module(-1).twists(), vec![0]);
        assert!(cone.differential(-1).is_zero());
    }

    #[test]
    fn non_chain_map_rejected() {
        let ring = WeightedRing::new(2).unwrap();
        let x = GradedComplex::new(
            ring,
            -1,
            vec![GradedFreeModule::free(&ring, &[(1, 1)]), GradedFreeModule::free(&ring, &[(0, 0)])],
            vec![PolyMatrix::from_rows(vec![vec![Poly::x()]], 1)],
        )
        .unwrap();
        let y = line(ring, 0);
        // The identity in degree 0 does not commute with multiplication by x out of degree −1.
        let mut comps = BTreeMap::new();
        comps.insert(0, PolyMatrix::identity(1));
        let f = ComplexMap::new(&x, &y, comps).unwrap();
        assert!(matches!(complex_cone(&f), Err(AlgebraError::NotChainMap { .. })));
    }
}
