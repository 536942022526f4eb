use orbitope::sampling::{random_measure, random_profile, random_rotation, random_tensor, seeded_rng};
use orbitope::single::{
    decompose, decompose_zero_eig, f_map, invariants, invert_f_map_newton, membership, region_x_contains, FmapFace,
    HullSpec, Membership,
};
use orbitope::{AnisoTensor, Rotation};
use proptest::prelude::*;

fn unit_hull() -> HullSpec {
    HullSpec::new(AnisoTensor::diagonal(1.0, 0.0)).unwrap()
}

#[test]
fn zero_eig_round_trip() {
    let mut rng = seeded_rng(11);
    let hull = HullSpec::new(random_rotation(&mut rng).act(&AnisoTensor::diagonal(2.5, 0.0))).unwrap();
    for _ in 0..1000 {
        let target = random_measure(&mut rng, 2).evaluate(hull.chi());
        let m = decompose_zero_eig(&hull, &target).unwrap();
        assert!(m.len() <= 2);
        assert!(m.evaluate(hull.chi()).max_abs_diff(&target) < 1e-8);
    }
}

#[test]
fn general_round_trip() {
    let mut rng = seeded_rng(12);
    for _ in 0..1000 {
        let chi = random_rotation(&mut rng).act(&random_profile(&mut rng));
        let hull = HullSpec::new(chi).unwrap();
        let target = random_measure(&mut rng, 5).evaluate(&chi);
        let m = decompose(&hull, &target).unwrap();
        assert!(m.len() <= 3);
        assert!(m.evaluate(&chi).max_abs_diff(&target) < 1e-8, "{:?}", m);
    }
}

#[test]
fn zero_target_is_two_half_atoms() {
    let m = decompose_zero_eig(&unit_hull(), &AnisoTensor::ZERO).unwrap();
    assert_eq!(m.len(), 2);
    assert!(m.atoms().iter().all(|a| (a.weight - 0.5).abs() < 1e-12));
}

#[test]
fn f_map_image_in_region_x() {
    let n = 50;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let g = |t: usize| t as f64 / (n - 1) as f64;
                let (a, d) = f_map(g(i), g(j), g(k)).unwrap();
                assert!(region_x_contains(a, d), "{a} {d}");
            }
        }
    }
}

#[test]
fn newton_oracle_matches_closed_form_targets() {
    let mut rng = seeded_rng(5);
    let hull = unit_hull();
    for _ in 0..200 {
        let target = random_measure(&mut rng, 2).evaluate(hull.chi());
        let inv = invariants(&target);
        let c = inv.det.abs();
        let found = [FmapFace::V1, FmapFace::U1]
            .into_iter()
            .filter_map(|face| invert_f_map_newton(inv.alpha, c, face).ok())
            .next();
        let p = found.unwrap_or_else(|| panic!("no preimage for {inv:?}"));
        let (a, d) = f_map(p.lambda, p.u, p.v).unwrap();
        assert!((a - inv.alpha).abs() < 1e-10 && (d - c).abs() < 1e-10);
    }
}

#[test]
fn orbit_test_by_frame_alignment() {
    let mut rng = seeded_rng(9);
    for _ in 0..200 {
        let a = random_tensor(&mut rng);
        let b = random_rotation(&mut rng).act(&a);
        let (ia, ib) = (invariants(&a), invariants(&b));
        assert!((ia.alpha - ib.alpha).abs() < 1e-10 && (ia.det - ib.det).abs() < 1e-10);
        let u = orbitope::single::align_frames(&a, &b);
        assert!(u.act(&a).max_abs_diff(&b) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sampled_points_are_members(seed in any::<u64>(), atoms in 1usize..6) {
        let mut rng = seeded_rng(seed);
        let chi = random_rotation(&mut rng).act(&random_profile(&mut rng));
        let hull = HullSpec::new(chi).unwrap();
        let target = random_measure(&mut rng, atoms).evaluate(&chi);
        prop_assert!(!membership(&hull, &target).is_outside());
    }

    #[test]
    fn eigenvalue_bound_on_axes(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let chi = random_rotation(&mut rng).act(&random_profile(&mut rng));
        let hull = HullSpec::new(chi).unwrap();
        let target = random_measure(&mut rng, 4).evaluate(&chi);
        let e = orbitope::sampling::random_unit_vector(&mut rng);
        let l = orbitope::l_e(&target, &e).unwrap();
        prop_assert!(l <= hull.max() + 1e-12 && l >= hull.min() - 1e-12);
    }

    #[test]
    fn invariants_are_conjugation_invariant(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let chi = random_tensor(&mut rng);
        let r = random_rotation(&mut rng);
        let (a, b) = (invariants(&chi), invariants(&r.act(&chi)));
        prop_assert!((a.alpha - b.alpha).abs() < 1e-10 * (1.0 + a.alpha.abs()));
        prop_assert!((a.det - b.det).abs() < 1e-10 * (1.0 + a.det.abs()));
    }

    #[test]
    fn decomposition_reconstructs(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let chi = random_rotation(&mut rng).act(&random_profile(&mut rng));
        let hull = HullSpec::new(chi).unwrap();
        let target = random_measure(&mut rng, 6).evaluate(&chi);
        let m = decompose(&hull, &target).unwrap();
        prop_assert!(m.len() <= 3);
        prop_assert!(m.evaluate(&chi).max_abs_diff(&target) < 1e-8);
    }
}

#[test]
fn scaled_vertex_is_outside() {
    let hull = unit_hull();
    let r = Rotation::about_e1(0.3);
    assert!(matches!(membership(&hull, &(r.act(hull.chi()) * 1.01)), Membership::Outside { .. }));
}
