use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_mirror::braid::*;
use toric_mirror::equivariant::{euler_matrix_skyscrapers, euler_pairing_skyscraper_line, verify_linking_disk_identification, WeightedRing};

/// Alternating sum of the twisted Koszul resolution `O(i−n) → O(i−1) ⊕ O(i−(n−1)) → O(i)`,
/// each twist reduced modulo `n`.
fn koszul_class(n: i64, i: i64) -> Vec<i64> {
    let mut v = vec![0; n as usize];
    for (twist, sign) in [(i, 1), (i - 1, -1), (i - (n - 1), -1), (i - n, 1)] {
        v[twist.rem_euclid(n) as usize] += sign;
    }
    v
}

/// Laplace expansion along the first row.
fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    if m.len() == 1 {
        return m[0][0];
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

fn random_word(rng: &mut ChaCha8Rng, n: i64, len: usize) -> BraidWord {
    let letters = (0..len)
        .map(|_| {
            let l = if rng.gen_bool(0.25) { Letter::rho() } else { Letter::tau(rng.gen_range(1..n)) };
            if rng.gen_bool(0.5) {
                l.inverted()
            } else {
                l
            }
        })
        .collect();
    BraidWord::new(n, letters).unwrap()
}

fn matrix_mul(a: &K0Matrix, b: &K0Matrix) -> Vec<Vec<i64>> {
    let n = a.size();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a.rows[i][k] * b.rows[k][j]).sum()).collect()).collect()
}

#[test]
fn skyscraper_classes_match_the_koszul_resolution() {
    for n in 2..=10 {
        for i in -n..2 * n {
            let v = skyscraper_class(n, i);
            assert_eq!(v, koszul_class(n, i), "n = {n}, i = {i}");
            assert_eq!(v.iter().sum::<i64>(), 0);
        }
    }
    assert_eq!(skyscraper_class(4, 0), vec![2, -1, 0, -1]);
    assert_eq!(skyscraper_class(2, 1), vec![-2, 2]);
}

#[test]
fn twists_follow_the_euler_pairing_of_the_local_model() {
    for n in 2..=6 {
        let ring = WeightedRing::new(n).unwrap();
        for i in 0..n {
            let chi: Vec<i64> = (0..n).map(|j| euler_pairing_skyscraper_line(&ring, i, j)).collect();
            let s = koszul_class(n, i);
            let expected: Vec<Vec<i64>> = (0..n as usize).map(|r| (0..n as usize).map(|c| (r == c) as i64 - s[r] * chi[c]).collect()).collect();
            assert_eq!(twist_matrix(n, i).rows, expected, "n = {n}, i = {i}");
        }
    }
    let t = twist_matrix(3, 1);
    assert_eq!((t.column(0), t.column(1), t.column(2)), (vec![1, 0, 0], vec![1, -1, 1], vec![0, 0, 1]));
}

#[test]
fn twists_are_reflections_with_determinant_minus_one() {
    for n in 2..=8 {
        for i in 0..n {
            let t = twist_matrix(n, i);
            assert_eq!(cofactor_det(&t.rows), -1, "n = {n}, i = {i}");
            assert_eq!(t.determinant(), -1);
            assert_eq!(matrix_mul(&t, &t), K0Matrix::identity(n as usize).rows);
        }
    }
}

#[test]
fn twist_fixes_the_orthogonal_hyperplane() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=8 {
        for i in 0..n {
            let t = twist_matrix(n, i);
            for _ in 0..20 {
                let mut v: Vec<i64> = (0..n).map(|_| rng.gen_range(-9..=9)).collect();
                v[i as usize] = 0;
                assert_eq!(t.apply(&v), v);
            }
            // T − I has rank one: its image is spanned by the skyscraper class.
            let s = skyscraper_class(n, i);
            for c in 0..n as usize {
                let col: Vec<i64> = (0..n as usize).map(|r| t.rows[r][c] - (r == c) as i64).collect();
                let factor = if c == i as usize { -1 } else { 0 };
                assert_eq!(col, s.iter().map(|x| x * factor).collect::<Vec<_>>());
            }
        }
    }
}

#[test]
fn rho_is_the_cyclic_shift() {
    for n in 2..=9 {
        let r = rho_matrix(n);
        assert_eq!(r.pow(n as u32), K0Matrix::identity(n as usize));
        assert_eq!(r.determinant().abs(), 1);
        for i in 0..n {
            assert_eq!(r.apply(&skyscraper_class(n, i)), skyscraper_class(n, i - 1));
        }
    }
    let r4 = rho_matrix(4);
    assert_eq!(r4.rows, vec![vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0]]);
}

#[test]
fn euler_form_is_the_affine_cartan_matrix() {
    for n in 3..=8 {
        let ring = WeightedRing::new(n).unwrap();
        let gram = euler_matrix_skyscrapers(&ring);
        // χ(O_0(a), O_0(b)) is the a-th coordinate of [O_0(b)].
        let via_classes: Vec<Vec<i64>> = (0..n).map(|a| (0..n).map(|b| skyscraper_class(n, b)[a as usize]).collect()).collect();
        assert_eq!(gram, via_classes, "n = {n}");
        assert_eq!(gram, cartan_matrix(n).rows);
    }
}

#[test]
fn representation_examples() {
    let n = 4;
    let rep = |s: &str| represent(&BraidWord::parse(n, s).unwrap()).unwrap();
    assert_eq!(rep(""), K0Matrix::identity(4));
    assert_eq!(rep("t1 t2 t1"), rep("t2 t1 t2"));
    assert_eq!(rep("r t1 r^-1"), rep("t2"));
    assert_eq!(rep("t1"), twist_matrix(4, 3));
    assert_eq!(represent_with(&BraidWord::parse(n, "t1").unwrap(), TwistConvention::Dual).unwrap(), twist_matrix(4, 1));
}

#[test]
fn representation_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let (l1, l2) = (rng.gen_range(0..8), rng.gen_range(0..8));
        let (a, b) = (random_word(&mut rng, n, l1), random_word(&mut rng, n, l2));
        let (ma, mb) = (represent(&a).unwrap(), represent(&b).unwrap());
        assert_eq!(represent(&a.concat(&b)).unwrap().rows, matrix_mul(&ma, &mb), "{a} · {b}");
        assert_eq!(ma.determinant().abs(), 1);
        assert_eq!(represent(&a.concat(&a.inverse())).unwrap(), K0Matrix::identity(n as usize));
    }
}

#[test]
fn relations_hold_for_small_n() {
    for n in 2..=12 {
        let report = verify_relations(n).unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "n = {n}: {failures:?}");
        let kinds: BTreeSet<RelationKind> = report.checks.iter().map(|c| c.kind).collect();
        if n == 2 {
            assert_eq!(kinds, BTreeSet::from([RelationKind::RhoConjugation, RelationKind::CyclicTranslate, RelationKind::RhoPower]));
        } else {
            assert!(kinds.contains(&RelationKind::Braid));
            assert_eq!(report.checks.iter().filter(|c| c.kind == RelationKind::RhoConjugation).count(), n as usize);
        }
        if n >= 4 {
            assert!(kinds.contains(&RelationKind::Commutation));
        }
    }
    assert!(matches!(verify_relations(1), Err(BraidError::InvalidStrandCount(1))));
}

#[test]
fn unrelabelled_convention_breaks_rho_conjugation_in_the_other_direction() {
    for n in 3..=8 {
        let report = verify_relations_with(n, TwistConvention::Dual).unwrap();
        let failed: BTreeSet<RelationKind> = report.failures().map(|c| c.kind).collect();
        assert!(failed.contains(&RelationKind::RhoConjugation), "n = {n}");
        // Relations among τ_1, …, τ_{n−1} do not see the labelling; only the cyclic translate does.
        let tau_n = format!("τ_{n}");
        assert!(report.failures().filter(|c| matches!(c.kind, RelationKind::Braid | RelationKind::Commutation)).all(|c| c.relation.contains(&tau_n)));
        let details: Vec<&str> = report.failures().filter(|c| c.kind == RelationKind::RhoConjugation).map(|c| c.detail.as_deref().unwrap()).collect();
        assert!(details.iter().all(|d| d.contains("conjugation shifts the skyscraper by -1")), "{details:?}");
        assert!(details.iter().any(|d| d.contains("the generators by 1")), "{details:?}");
    }
}

#[test]
fn chamber_colorings_select_mixed_braids() {
    let c = Coloring::from_chamber(&[0, 1, 2, 4]).unwrap();
    assert_eq!(c.colors, vec![1, 1, 2]);
    assert_eq!(c.total(), 4);
    let word = |s: &str| BraidWord::parse(3, s).unwrap();
    assert!(mixed_braid_membership(&word("t1"), &c, false).unwrap());
    assert!(!mixed_braid_membership(&word("t2"), &c, false).unwrap());
    assert!(mixed_braid_membership(&word("t2 t2^-1"), &c, false).unwrap());
    assert!(mixed_braid_membership(&word("t2 t1 t2"), &Coloring::new(vec![1, 2, 1]).unwrap(), false).unwrap());
    assert!(matches!(mixed_braid_membership(&word("r"), &c, false), Err(BraidError::RhoNotAllowed)));
    assert!(!mixed_braid_membership(&word("r"), &c, true).unwrap());
    assert!(mixed_braid_membership(&word("r"), &Coloring::new(vec![2, 2, 2]).unwrap(), true).unwrap());
    assert!(matches!(mixed_braid_membership(&BraidWord::parse(4, "t1").unwrap(), &c, false), Err(BraidError::ColoringMismatch { .. })));
    assert!(Coloring::from_chamber(&[1, 2]).is_err());
}

proptest! {
    #[test]
    fn word_times_inverse_is_always_mixed(seed in any::<u64>(), len in 0usize..12, colors in proptest::collection::vec(1i64..4, 2..7)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(&mut rng, colors.len() as i64, len);
        let c = Coloring::new(colors).unwrap();
        prop_assert!(mixed_braid_membership(&w.concat(&w.inverse()), &c, true).unwrap());
    }

    #[test]
    fn permutations_compose(seed in any::<u64>(), n in 2i64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_word(&mut rng, n, 6), random_word(&mut rng, n, 6));
        let (pa, pb) = (a.permutation(), b.permutation());
        let composed: Vec<usize> = (0..n as usize).map(|j| pb[pa[j]]).collect();
        prop_assert_eq!(a.concat(&b).permutation(), composed);
    }
}

#[test]
fn bt_examples() {
    let base = BTLabeling::base(4).unwrap();
    let rho = bt_relabel(&base, BTMove::Rho).unwrap();
    assert_eq!(rho.describe().0, vec!["O(-1)", "O(-2)", "O(-3)", "O"]);
    let t1 = bt_relabel(&base, BTMove::Tau(1)).unwrap();
    let cone = t1.middle.iter().flatten().next().copied().unwrap();
    assert_eq!(cone.index, 1);
    assert_eq!(cone.ideal_sheaf_twist(), -1);
    assert_eq!(bt_relabel(&t1, BTMove::Tau(1)).unwrap(), base);
    assert_eq!(bt_relabel_word(&base, &BraidWord::parse(4, "t1 t1").unwrap()).unwrap(), base);
}

#[test]
fn bt_cone_records_are_the_linking_disks() {
    // The recorded cone is the complex whose homology is the twisted ideal sheaf.
    for n in 3..=5 {
        let ring = WeightedRing::new(n).unwrap();
        let base = BTLabeling::base(n).unwrap();
        for i in 1..n {
            let l = bt_relabel(&base, BTMove::Tau(i)).unwrap();
            let cone = l.middle.iter().flatten().next().copied().unwrap();
            assert_eq!(cone.local_model(&ring).unwrap().i, i);
            verify_linking_disk_identification(&ring, cone.index, 4).unwrap();
        }
    }
}

#[test]
fn bt_relabelling_is_rho_equivariant() {
    let n = 4;
    let moves = [BTMove::Rho, BTMove::RhoInverse, BTMove::Tau(0), BTMove::Tau(1), BTMove::Tau(2), BTMove::Tau(3)];
    // Every labeling reachable from the base one.
    let base = BTLabeling::base(n).unwrap();
    let mut seen = BTreeSet::from([format!("{base:?}")]);
    let mut all = vec![base.clone()];
    let mut queue = VecDeque::from([base]);
    while let Some(l) = queue.pop_front() {
        for m in moves {
            if let Ok(next) = bt_relabel(&l, m) {
                if seen.insert(format!("{next:?}")) {
                    all.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    assert_eq!(all.len(), 4 * 16);
    for l in &all {
        for i in 0..n {
            let lhs = bt_relabel(&l, BTMove::Tau(i)).and_then(|x| bt_relabel(&x, BTMove::Rho));
            let rhs = bt_relabel(&l, BTMove::Rho).and_then(|x| bt_relabel(&x, BTMove::Tau(i + 1)));
            assert_eq!(lhs, rhs, "labeling {l}, τ_{i}");
        }
    }
}

#[test]
fn bt_rejects_foreign_cones() {
    let mut l = BTLabeling::base(4).unwrap();
    let p = l.segment_of(2);
    l.middle[p] = Some(ConeRecord { index: 1 });
    assert!(matches!(bt_relabel(&l, BTMove::Tau(2)), Err(BraidError::UnsupportedStratum { present: 1, requested: 2, .. })));
}

#[test]
fn words_round_trip_through_json() {
    let w = BraidWord::parse(5, "t1 t4^-1 r R t2").unwrap();
    let back: BraidWord = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
    assert_eq!(back, w);
    let l = bt_relabel_word(&BTLabeling::base(5).unwrap(), &w).unwrap();
    let back: BTLabeling = serde_json::from_str(&serde_json::to_string(&l).unwrap()).unwrap();
    assert_eq!(back, l);
}
