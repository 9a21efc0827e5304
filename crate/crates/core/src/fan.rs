//! Stacky fans `(Σ, β)`, support functions, Picard groups and the components
//! of the FLTZ skeleton.
//!
//! Sign convention: the divisor `Σ a_ρ D_ρ` corresponds to the support function
//! with `F(u_ρ) = −a_ρ`. With this choice the sections of `O(F)` over the chart
//! of a cone `τ` in degree `m` exist exactly when `⟨m, u_ρ⟩ ≥ F(u_ρ)` for every
//! ray `ρ` of `τ`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{cokernel_invariants, perp_beta_sublattice, smith_normal_form, AbelianGroup, AffineSublattice, IntMatrix};
use crate::rational::{qi, solve_q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("ray {ray} has {got} coordinates, expected {rank}")]
    DimensionMismatch { ray: usize, got: usize, rank: usize },
    #[error("ray {ray} is zero")]
    ZeroRay { ray: usize },
    #[error("ray {ray} = {vector:?} is not primitive (gcd {gcd})")]
    NonPrimitiveRay { ray: usize, vector: Vec<i64>, gcd: i64 },
    #[error("rays {a} and {b} coincide")]
    DuplicateRay { a: usize, b: usize },
    #[error("ray {ray} has non-positive multiplicity {b}")]
    NonPositiveMultiplicity { ray: usize, b: i64 },
    #[error("multiplicity list has {got} entries for {rays} rays")]
    MultiplicityCount { got: usize, rays: usize },
    #[error("cone {cone:?} refers to ray {index}, but there are only {rays} rays")]
    RayIndexOutOfRange { cone: Vec<usize>, index: usize, rays: usize },
    #[error("cone {cone:?} is not simplicial (its rays are linearly dependent)")]
    NonSimplicialCone { cone: Vec<usize> },
    #[error("face {face:?} of cone {cone:?} is not listed")]
    MissingFace { cone: Vec<usize>, face: Vec<usize> },
    #[error("cones {a:?} and {b:?} overlap in their interiors")]
    OverlappingCones { a: Vec<usize>, b: Vec<usize> },
    #[error("value for ray {ray} gives b·F = {value}, which is not an integer")]
    NonIntegralSlope { ray: usize, value: String },
    #[error("expected {expected} values (one per ray), got {got}")]
    WrongLength { expected: usize, got: usize },
}

/// Fan data as it appears in fan files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFan {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    /// Ray multiplicities; all ones when omitted.
    #[serde(default)]
    pub b: Option<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    /// Optional explicit cone list; if present it must be closed under faces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cones: Option<Vec<Vec<usize>>>,
}

/// A validated simplicial stacky fan with its face closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackyFan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    multiplicities: Vec<i64>,
    /// All cones as sorted ray-index sets, ordered by (dimension, lexicographic); index 0 is `{0}`.
    cones: Vec<Vec<usize>>,
    /// Indices into `cones` of the maximal cones, ordered lexicographically on their ray sets.
    maximal: Vec<usize>,
}

/// Validates raw fan data and computes the face closure.
pub fn validate_fan(raw: &RawFan) -> Result<StackyFan, FanError> {
    let rank = raw.rank;
    let nrays = raw.rays.len();
    for (i, r) in raw.rays.iter().enumerate() {
        if r.len() != rank {
            return Err(FanError::DimensionMismatch { ray: i, got: r.len(), rank });
        }
        let g = r.iter().fold(0i64, |g, x| g.gcd(x));
        if g == 0 {
            return Err(FanError::ZeroRay { ray: i });
        }
        if g != 1 {
            return Err(FanError::NonPrimitiveRay { ray: i, vector: r.clone(), gcd: g });
        }
        if let Some(j) = raw.rays[..i].iter().position(|s| s == r) {
            return Err(FanError::DuplicateRay { a: j, b: i });
        }
    }
    let multiplicities = raw.b.clone().unwrap_or_else(|| vec![1; nrays]);
    if multiplicities.len() != nrays {
        return Err(FanError::MultiplicityCount { got: multiplicities.len(), rays: nrays });
    }
    if let Some((i, &b)) = multiplicities.iter().enumerate().find(|(_, b)| **b <= 0) {
        return Err(FanError::NonPositiveMultiplicity { ray: i, b });
    }

    let normalize = |c: &Vec<usize>| -> Result<Vec<usize>, FanError> {
        let set: BTreeSet<usize> = c.iter().copied().collect();
        if let Some(&bad) = set.iter().find(|&&i| i >= nrays) {
            return Err(FanError::RayIndexOutOfRange { cone: c.clone(), index: bad, rays: nrays });
        }
        Ok(set.into_iter().collect())
    };

    let listed: Vec<Vec<usize>> = raw.max_cones.iter().map(normalize).collect::<Result<_, _>>()?;
    for c in &listed {
        let m = IntMatrix::from_rows_with_cols(&c.iter().map(|&i| raw.rays[i].clone()).collect::<Vec<_>>(), rank);
        if m.rank() != c.len() {
            return Err(FanError::NonSimplicialCone { cone: c.clone() });
        }
    }

    let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
    all.insert(Vec::new());
    match &raw.cones {
        Some(explicit) => {
            let explicit: Vec<Vec<usize>> = explicit.iter().map(normalize).collect::<Result<_, _>>()?;
            let set: BTreeSet<Vec<usize>> = explicit.iter().cloned().chain(listed.iter().cloned()).collect();
            for c in &set {
                for face in proper_faces(c) {
                    if !face.is_empty() && !set.contains(&face) {
                        return Err(FanError::MissingFace { cone: c.clone(), face });
                    }
                }
            }
            all.extend(set);
        }
        None => {
            for c in &listed {
                all.extend(proper_faces(c));
                all.insert(c.clone());
            }
        }
    }
    // Rays not in any listed cone still span 1-cones of the fan.
    for i in 0..nrays {
        all.insert(vec![i]);
    }
    for c in &all {
        let m = IntMatrix::from_rows_with_cols(&c.iter().map(|&i| raw.rays[i].clone()).collect::<Vec<_>>(), rank);
        if m.rank() != c.len() {
            return Err(FanError::NonSimplicialCone { cone: c.clone() });
        }
    }

    let mut cones: Vec<Vec<usize>> = all.into_iter().collect();
    cones.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    if rank == 2 {
        check_planar_overlaps(&raw.rays, &cones)?;
    }
    let mut maximal: Vec<usize> = (0..cones.len())
        .filter(|&i| !cones.iter().any(|c| c.len() > cones[i].len() && cones[i].iter().all(|r| c.contains(r))))
        .collect();
    maximal.sort_by(|&a, &b| cones[a].cmp(&cones[b]));
    Ok(StackyFan { rank, rays: raw.rays.clone(), multiplicities, cones, maximal })
}

fn proper_faces(c: &[usize]) -> Vec<Vec<usize>> {
    let k = c.len();
    (0u64..(1u64 << k) - 1)
        .map(|mask| (0..k).filter(|&j| mask & (1 << j) != 0).map(|j| c[j]).collect())
        .collect()
}

fn cross(a: &[i64], b: &[i64]) -> i128 {
    a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128
}

/// In rank 2, checks that no ray lies in the interior of a 2-cone and no two 2-cones coincide.
fn check_planar_overlaps(rays: &[Vec<i64>], cones: &[Vec<usize>]) -> Result<(), FanError> {
    let two: Vec<&Vec<usize>> = cones.iter().filter(|c| c.len() == 2).collect();
    let strictly_inside = |c: &[usize], v: &[i64]| {
        let (a, b) = (&rays[c[0]], &rays[c[1]]);
        let s = cross(a, b).signum();
        cross(a, v).signum() == s && cross(v, b).signum() == s
    };
    for c in &two {
        for (i, r) in rays.iter().enumerate() {
            if !c.contains(&i) && strictly_inside(c, r) {
                return Err(FanError::OverlappingCones { a: c.to_vec(), b: vec![i] });
            }
        }
    }
    for (x, c) in two.iter().enumerate() {
        for d in &two[x + 1..] {
            // Two distinct 2-cones sharing no interior ray can still overlap only if one contains the other's bisector.
            let mid: Vec<i64> = (0..2).map(|k| rays[d[0]][k] + rays[d[1]][k]).collect();
            if strictly_inside(c, &mid) {
                return Err(FanError::OverlappingCones { a: c.to_vec(), b: d.to_vec() });
            }
        }
    }
    Ok(())
}

impl StackyFan {
    pub fn from_raw(raw: &RawFan) -> Result<Self, FanError> {
        validate_fan(raw)
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let raw: RawFan = serde_json::from_str(text).map_err(|e| e.to_string())?;
        validate_fan(&raw).map_err(|e| e.to_string())
    }

    /// The fan of `[C²/Z_n]`: rays `(1,0)` and `(1,n)` spanning one 2-cone, multiplicities one.
    pub fn a_n_minus_1(n: i64) -> Self {
        validate_fan(&RawFan { rank: 2, rays: vec![vec![1, 0], vec![1, n]], b: None, max_cones: vec![vec![0, 1]], cones: None })
            .expect("A_{n-1} fan is valid")
    }

    /// The minimal resolution of the `A_1` singularity: rays `(1,0),(1,1),(1,2)`, two 2-cones.
    pub fn resolved_a1() -> Self {
        validate_fan(&RawFan {
            rank: 2,
            rays: vec![vec![1, 0], vec![1, 1], vec![1, 2]],
            b: None,
            max_cones: vec![vec![0, 1], vec![1, 2]],
            cones: None,
        })
        .expect("resolved A_1 fan is valid")
    }

    pub fn to_raw(&self) -> RawFan {
        RawFan {
            rank: self.rank,
            rays: self.rays.clone(),
            b: Some(self.multiplicities.clone()),
            max_cones: self.maximal.iter().map(|&i| self.cones[i].clone()).collect(),
            cones: None,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn multiplicities(&self) -> &[i64] {
        &self.multiplicities
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    /// Maximal cones in lexicographic order of their ray sets.
    pub fn maximal_cones(&self) -> Vec<&[usize]> {
        self.maximal.iter().map(|&i| self.cones[i].as_slice()).collect()
    }

    pub fn cone_index(&self, rays: &[usize]) -> Option<usize> {
        let mut key = rays.to_vec();
        key.sort_unstable();
        key.dedup();
        self.cones.iter().position(|c| *c == key)
    }

    /// The matrix of `β*: M → Z^{Σ(1)}`, one row `b_ρ·u_ρ` per ray.
    pub fn beta_dual(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = self
            .rays
            .iter()
            .zip(&self.multiplicities)
            .map(|(u, &b)| u.iter().map(|&x| BigInt::from(x) * BigInt::from(b)).collect())
            .collect();
        IntMatrix::from_rows_with_cols(&rows, self.rank)
    }

    /// Pairing `⟨m, u_ρ⟩` for an integral `m`.
    pub fn pairing(&self, m: &[BigInt], ray: usize) -> BigInt {
        m.iter().zip(&self.rays[ray]).map(|(a, &b)| a * BigInt::from(b)).sum()
    }

    /// Returns a copy with rays relabelled: new ray `i` is old ray `perm[i]`.
    pub fn permute_rays(&self, perm: &[usize]) -> StackyFan {
        let mut inverse = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let raw = RawFan {
            rank: self.rank,
            rays: perm.iter().map(|&o| self.rays[o].clone()).collect(),
            b: Some(perm.iter().map(|&o| self.multiplicities[o]).collect()),
            max_cones: self.maximal.iter().map(|&c| self.cones[c].iter().map(|&r| inverse[r]).collect()).collect(),
            cones: None,
        };
        validate_fan(&raw).expect("relabelled fan stays valid")
    }
}

/// `Pic = coker(β*) ≅ SF(Σ,β)/ι(M)`.
pub fn picard_group(fan: &StackyFan) -> AbelianGroup {
    cokernel_invariants(&fan.beta_dual())
}

/// A support function given by its values on the rays; `b_ρ F(u_ρ)` is integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportFunction {
    #[serde(with = "crate::rational::serde_q_vec")]
    values: Vec<Q>,
}

impl SupportFunction {
    pub fn new(fan: &StackyFan, values: Vec<Q>) -> Result<Self, FanError> {
        if values.len() != fan.rays.len() {
            return Err(FanError::WrongLength { expected: fan.rays.len(), got: values.len() });
        }
        for (i, (v, &b)) in values.iter().zip(&fan.multiplicities).enumerate() {
            let scaled = v * qi(b);
            if !scaled.is_integer() {
                return Err(FanError::NonIntegralSlope { ray: i, value: crate::rational::format_rational(&scaled) });
            }
        }
        Ok(SupportFunction { values })
    }

    pub fn zero(fan: &StackyFan) -> Self {
        SupportFunction { values: vec![Q::zero(); fan.rays.len()] }
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn value(&self, ray: usize) -> &Q {
        &self.values[ray]
    }

    pub fn add(&self, other: &SupportFunction) -> SupportFunction {
        SupportFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &SupportFunction) -> SupportFunction {
        SupportFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() }
    }

    /// The divisor coefficients `a_ρ = −F(u_ρ)`.
    pub fn to_divisor(&self) -> Vec<Q> {
        self.values.iter().map(|v| -v).collect()
    }

    /// A linear form `ℓ ∈ M_Q` agreeing with `F` on the rays of `cone`.
    pub fn linear_form_on_cone(&self, fan: &StackyFan, cone: &[usize]) -> Vec<Q> {
        let a: Vec<Vec<Q>> = cone.iter().map(|&r| fan.rays[r].iter().map(|&x| qi(x)).collect()).collect();
        let b: Vec<Q> = cone.iter().map(|&r| self.values[r].clone()).collect();
        solve_q(&a, &b).expect("simplicial cones admit a linear extension")
    }

    /// Evaluates the piecewise-linear extension at `p`, or `None` if `p` lies outside the support.
    pub fn evaluate(&self, fan: &StackyFan, p: &[Q]) -> Option<Q> {
        for &ci in &fan.maximal {
            let cone = &fan.cones[ci];
            // Solve p = Σ λ_j u_j for the rays of the cone.
            let a: Vec<Vec<Q>> = (0..fan.rank).map(|k| cone.iter().map(|&r| qi(fan.rays[r][k])).collect()).collect();
            if let Some(lambda) = solve_q(&a, p) {
                if lambda.iter().all(|l| !l.is_negative()) {
                    return Some(lambda.iter().zip(cone).map(|(l, &r)| l * &self.values[r]).sum());
                }
            }
        }
        None
    }
}

/// Converts divisor coefficients `a_ρ` to the support function `F(u_ρ) = −a_ρ`.
pub fn divisor_to_support_function(fan: &StackyFan, coefficients: &[Q]) -> Result<SupportFunction, FanError> {
    SupportFunction::new(fan, coefficients.iter().map(|a| -a).collect())
}

/// The linear support function `ι(m)` with `ι(m)(u_ρ) = ⟨m, u_ρ⟩`.
pub fn iota(fan: &StackyFan, m: &[BigInt]) -> SupportFunction {
    SupportFunction { values: (0..fan.rays.len()).map(|r| Q::from_integer(fan.pairing(m, r))).collect() }
}

/// Decides whether `F₁ − F₂ = ι(m)` for a lattice point `m`, returning the witness.
pub fn support_functions_equal_in_pic(fan: &StackyFan, f1: &SupportFunction, f2: &SupportFunction) -> Option<Vec<BigInt>> {
    let delta = f1.sub(f2);
    if delta.values.iter().any(|v| !v.is_integer()) {
        return None;
    }
    let rhs: Vec<BigInt> = delta.values.iter().map(|v| v.to_integer()).collect();
    let rays = IntMatrix::from_rows_with_cols(&fan.rays, fan.rank);
    // Solve rays·m = rhs over Z through U·R·V = D.
    let snf = smith_normal_form(&rays);
    let ub = snf.u.mul_vec(&rhs);
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); fan.rank];
    for (i, t) in ub.iter().enumerate() {
        let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !t.is_zero() {
                return None;
            }
        } else {
            let (q, r) = t.div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    let m = snf.v.mul_vec(&y);
    debug_assert_eq!(iota(fan, &m), delta);
    Some(m)
}

/// One component `π(σ^{⊥β}) × σ` of the FLTZ skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FltzComponent {
    pub cone_index: usize,
    pub torus: AffineSublattice,
    pub rays: Vec<usize>,
}

/// One component per cone of the fan.
pub fn fltz_components(fan: &StackyFan) -> Vec<FltzComponent> {
    (0..fan.cones.len())
        .map(|i| FltzComponent { cone_index: i, torus: perp_beta_sublattice(fan, i), rays: fan.cones[i].clone() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn raw(rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> RawFan {
        RawFan { rank: 2, rays, b: None, max_cones, cones: None }
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(validate_fan(&raw(vec![vec![2, 0]], vec![vec![0]])), Err(FanError::NonPrimitiveRay { ray: 0, .. })));
        assert!(matches!(
            validate_fan(&raw(vec![vec![1, 0], vec![-1, 0]], vec![vec![0, 1]])),
            Err(FanError::NonSimplicialCone { .. })
        ));
        let mut r = raw(vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]);
        r.cones = Some(vec![vec![0, 1], vec![0]]);
        assert_eq!(validate_fan(&r), Err(FanError::MissingFace { cone: vec![0, 1], face: vec![1] }));
        assert!(matches!(
            validate_fan(&raw(vec![vec![1, 0], vec![1, 2], vec![1, 1]], vec![vec![0, 1], vec![2]])),
            Err(FanError::OverlappingCones { .. })
        ));
    }

    #[test]
    fn a_n_fan_structure() {
        let fan = StackyFan::a_n_minus_1(4);
        assert_eq!(fan.cones(), &[vec![], vec![0], vec![1], vec![0, 1]]);
        assert_eq!(fan.maximal_cones(), vec![&[0usize, 1][..]]);
        let g = picard_group(&fan);
        assert_eq!(g.torsion, vec![BigInt::from(4)]);
        assert_eq!(g.free_rank, 0);
    }

    #[test]
    fn resolved_a1_picard() {
        let g = picard_group(&StackyFan::resolved_a1());
        assert!(g.torsion.is_empty());
        assert_eq!(g.free_rank, 1);
    }

    #[test]
    fn empty_fan() {
        let fan = validate_fan(&RawFan { rank: 2, rays: vec![], b: None, max_cones: vec![], cones: None }).unwrap();
        assert_eq!(fan.cones().len(), 1);
        assert!(picard_group(&fan).is_trivial());
        let comps = fltz_components(&fan);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].torus.dim(), 2);
    }

    #[test]
    fn divisors_and_witnesses() {
        let fan = StackyFan::a_n_minus_1(3);
        let f = divisor_to_support_function(&fan, &[q(0, 1), q(-1, 1)]).unwrap();
        assert_eq!(f.values(), &[q(0, 1), q(1, 1)]);
        assert_eq!(f.to_divisor(), vec![q(0, 1), q(-1, 1)]);
        let zero = SupportFunction::zero(&fan);
        assert_eq!(support_functions_equal_in_pic(&fan, &f, &zero), None);
        let shifted = f.add(&iota(&fan, &[BigInt::from(1), BigInt::from(0)]));
        assert_eq!(support_functions_equal_in_pic(&fan, &shifted, &f), Some(vec![BigInt::from(1), BigInt::from(0)]));
        assert_eq!(support_functions_equal_in_pic(&fan, &f, &f), Some(vec![BigInt::zero(), BigInt::zero()]));
    }

    #[test]
    fn half_integral_values() {
        let fan = validate_fan(&RawFan { rank: 2, rays: vec![vec![1, 0], vec![0, 1]], b: Some(vec![2, 1]), max_cones: vec![vec![0, 1]], cones: None })
            .unwrap();
        assert!(divisor_to_support_function(&fan, &[q(1, 2), q(0, 1)]).is_ok());
        assert!(matches!(divisor_to_support_function(&fan, &[q(0, 1), q(1, 2)]), Err(FanError::NonIntegralSlope { ray: 1, .. })));
    }

    #[test]
    fn fltz_components_of_a_n() {
        let fan = StackyFan::a_n_minus_1(4);
        let comps = fltz_components(&fan);
        assert_eq!(comps.len(), 4);
        // {0}: full torus; (1,0): q1 ≡ 0; (1,4): q1 + 4 q2 ≡ 0; 2-cone: four points.
        assert_eq!(comps[0].torus.dim(), 2);
        assert_eq!(comps[1].torus.constraints().row(0), &[BigInt::from(1), BigInt::from(0)]);
        assert_eq!(comps[1].torus.dim(), 1);
        assert_eq!(comps[2].torus.constraints().row(0), &[BigInt::from(1), BigInt::from(4)]);
        assert_eq!(comps[3].torus.dim(), 0);
        assert_eq!(comps[3].torus.shift_count(), 4);
        assert!(comps[3].torus.shifts.iter().all(|s| comps[1].torus.contains_point(s) && comps[2].torus.contains_point(s)));
    }
}
