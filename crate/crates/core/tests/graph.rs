mod common;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toric_mirror::graph::*;
use toric_mirror::rational::{frac_part, q, qi, Q};

fn pt(r: Q, q2: Q) -> Pt {
    Pt::new(r, q2)
}

fn sorted(mut v: Vec<Q>) -> Vec<Q> {
    v.sort();
    v
}

/// Areas of the annular faces touching the south and north boundary circles.
fn boundary_areas(f: &FaceDecomposition) -> (Vec<Q>, Vec<Q>) {
    let south = f.faces.iter().filter(|x| x.touches_south).map(|x| x.area.clone()).collect();
    let north = f.faces.iter().filter(|x| x.touches_north).map(|x| x.area.clone()).collect();
    (south, north)
}

#[test]
fn phi_n_has_n_unit_faces_and_is_liftable() {
    for n in 1..=10 {
        let g = build_phi_n(n, qi(-1), qi(n + 2)).unwrap();
        let f = faces(&g).unwrap();
        assert_eq!(f.bounded_areas(), vec![qi(1); n as usize], "n = {n}");
        assert_eq!(f.faces.len(), n as usize + 2);
        assert_eq!(boundary_areas(&f), (vec![qi(1)], vec![qi(2)]));
        assert_eq!(f.total_area(), qi(n + 3));
        assert!(liftability(&g).unwrap().liftable);
    }
}

#[test]
fn phi_2_annuli_on_wider_cylinder() {
    let g = build_phi_n(2, qi(-3), qi(5)).unwrap();
    let f = faces(&g).unwrap();
    assert_eq!(f.bounded_areas(), vec![qi(1), qi(1)]);
    assert_eq!(boundary_areas(&f), (vec![qi(3)], vec![qi(3)]));
}

#[test]
fn phi_n_rejects_bad_cylinders() {
    assert!(matches!(build_phi_n(3, qi(0), qi(5)), Err(GraphError::InvalidParameter(_))));
    assert!(matches!(build_phi_n(3, qi(-1), qi(3)), Err(GraphError::InvalidParameter(_))));
    assert!(matches!(build_phi_n(0, qi(-1), qi(3)), Err(GraphError::InvalidParameter(_))));
}

#[test]
fn circle_splits_cylinder_into_two_annuli() {
    for c in [q(1, 3), qi(0), q(-7, 2)] {
        let mut b = GraphBuilder::new(qi(-4), qi(2));
        b.circle(c.clone());
        let f = faces(&b.build().unwrap()).unwrap();
        assert!(f.bounded_areas().is_empty());
        assert_eq!(boundary_areas(&f), (vec![&c + qi(4)], vec![qi(2) - &c]));
    }
}

#[test]
fn small_square_area() {
    let h = q(1, 2);
    let mut b = GraphBuilder::new(qi(-1), qi(1));
    b.closed_polyline(vec![pt(qi(0), qi(0)), pt(h.clone(), qi(0)), pt(h.clone(), h.clone()), pt(qi(0), h.clone()), pt(qi(0), qi(0))]);
    let f = faces(&b.build().unwrap()).unwrap();
    assert_eq!(f.bounded_areas(), vec![q(1, 4)]);
    assert_eq!(f.total_area(), qi(2));
}

#[test]
fn crossing_polylines_are_reported_with_location() {
    let vs = vec![pt(qi(0), qi(0)), pt(qi(2), q(1, 2)), pt(qi(0), q(1, 2)), pt(qi(2), qi(0))];
    let edges = vec![
        Edge { v: [0, 1], polyline: vec![vs[0].clone(), vs[1].clone()] },
        Edge { v: [2, 3], polyline: vec![vs[2].clone(), vs[3].clone()] },
    ];
    match CylinderGraph::new(qi(-1), qi(3), vs, edges, None) {
        Err(GraphError::SelfIntersection { r, q: q2, .. }) => {
            assert_eq!(r, "1");
            assert_eq!(q2, "1/4");
        }
        other => panic!("expected a crossing, got {other:?}"),
    }
}

#[test]
fn full_chamber_of_all_indices_has_the_faces_of_phi() {
    // One radial segment per unit band: the same face areas as φ₄, in a different position.
    let g = build_fltz_graph(&[0, 1, 2, 3, 4], 4, FltzMode::Full).unwrap();
    let phi = build_phi_n(4, qi(-1), qi(5)).unwrap();
    let areas = |g: &CylinderGraph| sorted(faces(g).unwrap().faces.iter().map(|f| f.area.clone()).collect());
    assert_eq!(areas(&g), areas(&phi));
    assert!(liftability(&g).unwrap().liftable);
}

/// Total area of the bounded faces between the circles `r = lo` and `r = hi`.
fn band_area(g: &CylinderGraph, f: &FaceDecomposition, lo: i64, hi: i64) -> Q {
    let mut seen = std::collections::BTreeSet::new();
    let mid = (qi(lo) + qi(hi)) / qi(2);
    for k in 0..200 {
        let p = pt(mid.clone(), q(2 * k + 1, 400));
        if let Some(face) = f.locate(g, &p) {
            seen.insert(face);
        }
    }
    seen.into_iter().filter(|&i| f.faces[i].is_bounded()).map(|i| f.faces[i].area.clone()).sum()
}

#[test]
fn full_chamber_band_areas_follow_the_coloring() {
    for (chamber, n) in [(vec![0, 2, 4], 4), (vec![0, 1, 4], 4), (vec![0, 3, 5], 5), (vec![0, 5], 5), (vec![0, 1, 2, 3, 4, 5], 5)] {
        let g = build_fltz_graph(&chamber, n, FltzMode::Full).unwrap();
        let f = faces(&g).unwrap();
        // Each band of width d is cut into d unit squares by its d radial segments.
        assert_eq!(f.bounded_areas(), vec![qi(1); n as usize]);
        let colors = chamber_coloring(&chamber);
        for (w, c) in chamber.windows(2).zip(&colors) {
            assert_eq!(band_area(&g, &f, w[0], w[1]), qi(*c), "{chamber:?}");
        }
        assert!(liftability(&g).unwrap().liftable);
    }
}

#[test]
fn partial_chamber_faces_follow_the_coloring() {
    for (chamber, n) in [(vec![0, 4], 4), (vec![0, 1, 4], 4), (vec![0, 2, 3, 5], 5), (vec![0, 1, 2, 3, 4, 5], 5)] {
        let g = build_fltz_graph(&chamber, n, FltzMode::Partial).unwrap();
        let f = faces(&g).unwrap();
        let expected: Vec<Q> = sorted(chamber_coloring(&chamber).into_iter().map(qi).collect());
        assert_eq!(f.bounded_areas(), expected, "{chamber:?}");
        assert!(liftability(&g).unwrap().liftable);
    }
}

#[test]
fn moved_segment_breaks_liftability() {
    let mut b = GraphBuilder::new(qi(-1), qi(5));
    b.circle(qi(0)).circle(qi(4));
    for h in [qi(0), q(1, 3), q(1, 2), q(3, 4)] {
        b.segment(pt(qi(0), h.clone()), pt(qi(4), h));
    }
    b.marked(pt(qi(0), qi(0)));
    let g = b.build().unwrap();
    let f = faces(&g).unwrap();
    assert_eq!(f.bounded_areas(), vec![q(2, 3), qi(1), qi(1), q(4, 3)]);
    let l = liftability(&g).unwrap();
    assert!(!l.liftable);
    let (_, integral) = l.witness.unwrap();
    assert_eq!(frac_part(&integral.abs()).min(qi(1) - frac_part(&integral.abs())), q(1, 3));
    assert!(matches!(legendrian_lift(&g), Err(GraphError::NotLiftable { .. })));
}

#[test]
fn phi_4_lift_vanishes() {
    let g = build_phi_n(4, qi(-1), qi(5)).unwrap();
    let lift = legendrian_lift(&g).unwrap();
    assert!(lift.vertex_q1.iter().all(Q::is_zero));
    assert!(lift.edge_q1.iter().flatten().all(Q::is_zero));
}

#[test]
fn unit_square_lift_along_the_far_side() {
    // φ₁: q₁ at (1, t) is −t mod 1, reached along the segment (dq = 0) then up the r = 1 circle.
    for (a, b) in [(1, 3), (1, 2), (3, 4), (5, 7)] {
        let t = q(a, b);
        let mut builder = GraphBuilder::new(qi(-1), qi(2));
        builder.circle(qi(0)).circle(qi(1)).segment(pt(qi(0), qi(0)), pt(qi(1), qi(0)));
        builder.node(pt(qi(1), t.clone())).marked(pt(qi(0), qi(0)));
        let g = builder.build().unwrap();
        let lift = legendrian_lift(&g).unwrap();
        let v = g.vertices().iter().position(|p| *p == pt(qi(1), t.clone())).unwrap();
        assert_eq!(lift.vertex_q1[v], frac_part(&-t.clone()));
        assert_eq!(lift.vertex_q1[g.marked().unwrap()], qi(0));
    }
}

/// A random graph whose faces all have integral area: integer circles, and in each band of
/// width `d` some of the `d` evenly spaced radial segments, all given the same shear or kink so
/// that the faces between them keep their areas; everything is rotated by a common offset.
#[test]
fn lift_is_independent_of_spanning_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let g = common::random_liftable_graph(&mut rng);
        assert!(liftability(&g).unwrap().liftable);
        let mut order: Vec<usize> = (0..g.edges().len()).collect();
        order.shuffle(&mut rng);
        let first = legendrian_lift_with_order(&g, &order).unwrap();
        order.shuffle(&mut rng);
        let second = legendrian_lift_with_order(&g, &order).unwrap();
        assert_eq!(first, second);
        assert!(first.vertex_q1[g.marked().unwrap()].is_zero());
        // The Legendrian condition holds on every segment.
        for (e, vals) in g.edges().iter().zip(&first.edge_q1) {
            for (w, x) in e.polyline.windows(2).zip(vals.windows(2)) {
                assert_eq!(frac_part(&(&x[1] - &x[0] + segment_integral(&w[0], &w[1]))), qi(0));
            }
        }
    }
}

#[test]
fn tau_frames_preserve_areas_and_close_up() {
    for n in [2, 3, 4, 5] {
        let phi = build_phi_n(n, qi(-1), qi(n + 1)).unwrap();
        for i in 1..n {
            let frames = braid_loop_frames(LoopGenerator::Tau(i), n, 7, qi(-1), qi(n + 1)).unwrap();
            assert_eq!(frames.len(), 7);
            assert_eq!(frames[0], phi);
            assert_eq!(frames[6], phi);
            for g in &frames {
                let f = faces(g).unwrap();
                assert_eq!(f.bounded_areas(), vec![qi(1); n as usize]);
                assert_eq!(f.total_area(), qi(n + 2));
                assert!(liftability(g).unwrap().liftable);
            }
            let mut there_and_back = frames.clone();
            there_and_back.extend(frames.iter().rev().cloned());
            assert_eq!(there_and_back.last().unwrap(), &phi);
        }
    }
}

#[test]
fn tau_frames_pass_through_the_exchanged_position() {
    // At s = 2 the moving segment has turned into the arc r = 2 between the neighbouring heights.
    let frames = braid_loop_frames(LoopGenerator::Tau(1), 4, 9, qi(-1), qi(5)).unwrap();
    let mid = &frames[4];
    let lo = mid.vertices().iter().position(|p| *p == pt(qi(2), qi(0))).unwrap();
    let hi = mid.vertices().iter().position(|p| *p == pt(qi(2), q(1, 2))).unwrap();
    assert!(mid.edges().iter().any(|e| {
        let ends = [e.v[0], e.v[1]];
        (ends == [lo, hi] || ends == [hi, lo]) && e.polyline.iter().all(|p| p.r == qi(2))
    }));
}

#[test]
fn rho_frames_rotate_rigidly() {
    let frames = braid_loop_frames(LoopGenerator::Rho, 4, 5, qi(-1), qi(5)).unwrap();
    let phi = build_phi_n(4, qi(-1), qi(5)).unwrap();
    assert_eq!(frames[0], phi);
    assert_eq!(frames[4], phi.rotated(&q(1, 4)));
    for g in &frames {
        assert_eq!(faces(g).unwrap().bounded_areas(), vec![qi(1); 4]);
        assert!(liftability(g).unwrap().liftable);
    }
    // Up to the marked-point convention the last frame is φ₄ again.
    let m = frames[4].marked().unwrap();
    assert_eq!(frames[4].vertices()[m], pt(qi(0), q(1, 4)));
}

#[test]
fn loop_samplers_validate_input() {
    assert!(braid_loop_frames(LoopGenerator::Tau(0), 4, 7, qi(-1), qi(5)).is_err());
    assert!(braid_loop_frames(LoopGenerator::Tau(4), 4, 7, qi(-1), qi(5)).is_err());
    assert!(braid_loop_frames(LoopGenerator::Rho, 4, 2, qi(-1), qi(5)).is_err());
}

#[test]
fn constant_isotopy_has_zero_flux() {
    let g = build_phi_n(4, qi(-1), qi(5)).unwrap();
    let frames = vec![g.clone(), g.clone(), g];
    let flux = flux_primitive(&frames, 1, &q(1, 10)).unwrap();
    assert!(flux.vertex.iter().all(Q::is_zero));
    assert!(flux.edge.iter().flatten().all(Q::is_zero));
}

/// Flux of a rigid rotation at speed `v` with basepoint radius `r0`: `v (2 r0 − r)`.
fn rotation_flux(v: &Q, r0: &Q, r: &Q) -> Q {
    v * (qi(2) * r0 - r)
}

#[test]
fn rotation_flux_matches_closed_form() {
    let count = 9;
    let frames = braid_loop_frames(LoopGenerator::Rho, 4, count, qi(-1), qi(5)).unwrap();
    let dt = q(1, count as i64 - 1);
    let speed = q(1, 4);
    for alt_marked in [false, true] {
        let frames: Vec<CylinderGraph> = if alt_marked {
            let far = frames[0].vertices().iter().position(|p| p.r == qi(4)).unwrap();
            frames.iter().map(|g| g.with_marked(Some(far))).collect()
        } else {
            frames.clone()
        };
        let r0 = frames[0].vertices()[frames[0].marked().unwrap()].r.clone();
        for t in [0, 3, count - 1] {
            let flux = flux_primitive(&frames, t, &dt).unwrap();
            assert!(flux.max_path_discrepancy.is_zero());
            for (p, h) in frames[t].vertices().iter().zip(&flux.vertex) {
                assert_eq!(*h, rotation_flux(&speed, &r0, &p.r));
            }
            for (e, hs) in frames[t].edges().iter().zip(&flux.edge) {
                for (p, h) in e.polyline.iter().zip(hs) {
                    assert_eq!(*h, rotation_flux(&speed, &r0, &p.r));
                }
            }
        }
    }
}

#[test]
fn flux_of_tau_loop_is_path_independent() {
    let frames = braid_loop_frames(LoopGenerator::Tau(2), 4, 13, qi(-1), qi(5)).unwrap();
    // Consecutive frames within one phase share their combinatorics.
    let phase: Vec<CylinderGraph> = frames[1..3].to_vec();
    let flux = flux_primitive(&phase, 0, &q(1, 12)).unwrap();
    let mut order: Vec<usize> = (0..phase[0].edges().len()).collect();
    order.reverse();
    let other = flux_primitive_with_order(&phase, 0, &q(1, 12), &order).unwrap();
    assert!(flux.max_path_discrepancy.is_zero());
    assert_eq!(flux, other);
}

#[test]
fn incompatible_frames_are_rejected() {
    let a = build_phi_n(4, qi(-1), qi(5)).unwrap();
    let b = build_phi_n(3, qi(-1), qi(5)).unwrap();
    assert!(matches!(flux_primitive(&[a, b], 0, &q(1, 2)), Err(GraphError::FramesIncompatible { .. })));
}

#[test]
fn json_round_trip_of_loop_frames() {
    let frames = braid_loop_frames(LoopGenerator::Tau(1), 3, 5, qi(-2), qi(4)).unwrap();
    for g in frames {
        let text = g.to_json();
        assert_eq!(CylinderGraph::from_json(&text).unwrap(), g);
    }
}

/// Random graphs (not necessarily liftable) with rational heights and random tilts.
fn arb_graph() -> impl Strategy<Value = CylinderGraph> {
    (1i64..4, prop::collection::vec((0i64..24, -3i64..4), 0..5), 0i64..24, any::<bool>()).prop_map(|(top, segs, circle_q, with_square)| {
        let mut b = GraphBuilder::new(qi(-1), qi(top + 1));
        b.circle(qi(0)).circle(qi(top));
        for (h, tilt) in segs {
            b.segment(pt(qi(0), q(h, 24)), pt(qi(top), q(h, 24) + q(tilt, 48)));
        }
        if with_square {
            let lo = q(circle_q, 24);
            b.closed_polyline(vec![
                pt(q(-1, 2), lo.clone()),
                pt(q(-1, 4), lo.clone()),
                pt(q(-1, 4), &lo + q(1, 8)),
                pt(q(-1, 2), &lo + q(1, 8)),
                pt(q(-1, 2), lo),
            ]);
        }
        b.build().unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_area_is_conserved(g in arb_graph()) {
        let f = faces(&g).unwrap();
        prop_assert_eq!(f.total_area(), g.r_plus() - g.r_minus());
        for face in f.faces.iter().filter(|x| x.is_bounded()) {
            prop_assert!(face.area.is_positive());
        }
    }

    #[test]
    fn face_areas_are_rotation_invariant(g in arb_graph(), k in 0i64..24) {
        let a = faces(&g).unwrap();
        let b = faces(&g.rotated(&q(k, 24))).unwrap();
        let areas = |f: &FaceDecomposition| sorted(f.faces.iter().map(|x| x.area.clone()).collect());
        prop_assert_eq!(areas(&a), areas(&b));
    }

    #[test]
    fn lift_respects_marked_normalization(g in arb_graph()) {
        let g = g.with_marked(Some(0));
        let l = liftability(&g).unwrap();
        match legendrian_lift(&g) {
            Ok(lift) => {
                prop_assert!(l.liftable);
                prop_assert!(lift.vertex_q1[0].is_zero());
                prop_assert!(lift.vertex_q1.iter().all(|x| !x.is_negative() && *x < Q::one()));
            }
            Err(GraphError::NotLiftable { .. }) => prop_assert!(!l.liftable),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
