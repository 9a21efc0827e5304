use num_bigint::BigInt;
use proptest::prelude::*;
use toric_mirror::cech::*;
use toric_mirror::fan::{divisor_to_support_function, RawFan, StackyFan, SupportFunction};
use toric_mirror::rational::qi;

fn projective_plane() -> StackyFan {
    StackyFan::from_raw(&RawFan {
        rank: 2,
        rays: vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
        b: None,
        max_cones: vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        cones: None,
    })
    .unwrap()
}

fn p1_times_p1() -> StackyFan {
    StackyFan::from_raw(&RawFan {
        rank: 2,
        rays: vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
        b: None,
        max_cones: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        cones: None,
    })
    .unwrap()
}

fn totals(fan: &StackyFan, f: &SupportFunction, r: i64) -> [usize; 3] {
    let t = cohomology_box(fan, f, &[(-r, r), (-r, r)]).unwrap();
    let mut out = [0; 3];
    for d in 0..3 {
        out[d] = t.in_degree(d).iter().map(|(_, v)| v).sum();
    }
    out
}

fn binom2(n: i64) -> usize {
    if n < 2 {
        0
    } else {
        (n * (n - 1) / 2) as usize
    }
}

/// `h⁰(O(d)) = C(d+2, 2)` and `h²(O(d)) = C(−d−1, 2)` on the projective plane.
#[test]
fn projective_plane_line_bundles() {
    let fan = projective_plane();
    for d in -6..=4 {
        let f = divisor_to_support_function(&fan, &[qi(d), qi(0), qi(0)]).unwrap();
        assert_eq!(totals(&fan, &f, 8), [binom2(d + 2), 0, binom2(-d - 1)], "O({d})");
    }
}

/// Künneth on P¹ × P¹: `h^i(O(a, b)) = Σ h^j(O(a))·h^{i−j}(O(b))`.
#[test]
fn p1_times_p1_kunneth() {
    let h = |a: i64| -> [usize; 2] { [(a + 1).max(0) as usize, (-a - 1).max(0) as usize] };
    let fan = p1_times_p1();
    for a in -4..=3 {
        for b in -4..=3 {
            let f = divisor_to_support_function(&fan, &[qi(a), qi(b), qi(0), qi(0)]).unwrap();
            let (x, y) = (h(a), h(b));
            let expected = [x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[1] * y[1]];
            assert_eq!(totals(&fan, &f, 6), expected, "O({a}, {b})");
        }
    }
}

#[test]
fn rejects_bad_boxes() {
    let fan = StackyFan::resolved_a1();
    let f = SupportFunction::zero(&fan);
    assert!(matches!(cohomology_box(&fan, &f, &[(0, 1)]), Err(CechError::BoxRank { .. })));
    assert!(matches!(cohomology_box(&fan, &f, &[(2, 1), (0, 0)]), Err(CechError::EmptyRange { .. })));
    assert!(matches!(cohomology_box_with_cap(&fan, &f, &[(0, 9), (0, 9)], 10), Err(CechError::BoxTooLarge { .. })));
}

proptest! {
    /// Euler characteristic on the projective plane is `(d+1)(d+2)/2` for every `d`.
    #[test]
    fn projective_plane_euler_characteristic(a in -4i64..=3, b in -4i64..=3, c in -4i64..=3) {
        let fan = projective_plane();
        let f = divisor_to_support_function(&fan, &[qi(a), qi(b), qi(c)]).unwrap();
        let [h0, h1, h2] = totals(&fan, &f, 14);
        let d = a + b + c;
        prop_assert_eq!(h0 as i64 - h1 as i64 + h2 as i64, (d + 1) * (d + 2) / 2);
    }

    #[test]
    fn cech_differentials_square_to_zero(m0 in -4i64..=4, m1 in -4i64..=4, c in prop::collection::vec(-2i64..=2, 4)) {
        let fan = p1_times_p1();
        let coeffs: Vec<_> = c.iter().map(|&x| qi(x)).collect();
        let f = divisor_to_support_function(&fan, &coeffs).unwrap();
        let m = [BigInt::from(m0), BigInt::from(m1)];
        let complex = CechComplexAtDegree::build(&fan, &f, &m, &[0, 1, 2, 3]);
        prop_assert!(complex.is_complex());
        prop_assert_eq!(complex.betti(), cohomology_at_degree(&fan, &f, &m));
    }

    #[test]
    fn single_cones_are_acyclic(
        a in -3i64..=3, b in -3i64..=3, c in -3i64..=3, d in -3i64..=3, f0 in -4i64..=4, f1 in -4i64..=4,
    ) {
        prop_assume!(a * d - b * c != 0);
        let raw = RawFan { rank: 2, rays: vec![vec![a, b], vec![c, d]], b: None, max_cones: vec![vec![0, 1]], cones: None };
        let Ok(fan) = StackyFan::from_raw(&raw) else { return Ok(()) };
        let f = SupportFunction::new(&fan, vec![qi(f0), qi(f1)]).unwrap();
        let t = cohomology_box(&fan, &f, &[(-3, 3), (-3, 3)]).unwrap();
        prop_assert!(t.in_degree(1).is_empty() && t.in_degree(2).is_empty());
    }
}
