//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::{PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use orbitope::linalg::numerical_rank;
use orbitope::pair::moment::moments;
use orbitope::pair::{
    coaxial_face, coaxial_scan, decompose_pair, evaluate_pair, face_dimension_empirical, facet_decompose,
    hull_dimension, moment_matrix, orbit_affine_rank, AlphaDirection, CoaxialFace, TensorPair,
};
use orbitope::rdc::{estimate_tensor, p_max, synthesize_observations};
use orbitope::sampling::{
    random_measure, random_profile, random_rotation, random_tensor, random_unit_vector, random_weights, seeded_rng,
    SeededRng,
};
use orbitope::single::{
    decompose, decompose_zero_eig, f_map, facet, invariants, invert_f_map, membership, FacetSign, HullSpec,
};
use orbitope::{coaxial_rotation, orbit_dimension, AnisoTensor, Atom, AtomicMeasure, Complex64, Rotation};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rotated_profile(rng: &mut SeededRng) -> AnisoTensor {
    random_rotation(rng).act(&random_profile(rng))
}

fn c1_membership() -> Outcome {
    let mut rng = seeded_rng(101);
    let mut wrong_outside = 0;
    for _ in 0..100_000 {
        let chi = rotated_profile(&mut rng);
        let hull = HullSpec::new(chi).unwrap();
        let n = rng.random_range(1..=6);
        if membership(&hull, &random_measure(&mut rng, n).evaluate(&chi)).is_outside() {
            wrong_outside += 1;
        }
    }
    let mut wrong_inside = 0;
    for i in 0..1000 {
        let chi = rotated_profile(&mut rng);
        let hull = HullSpec::new(chi).unwrap();
        let s = rng.random_range(1.01..2.0);
        let boundary = if i % 2 == 0 {
            random_rotation(&mut rng).act(&chi)
        } else {
            let sign = if i % 4 == 1 { FacetSign::Max } else { FacetSign::Min };
            let f = facet(&hull, &random_unit_vector(&mut rng), sign).unwrap();
            f.point(f.radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU))
        };
        if !membership(&hull, &(boundary * s)).is_outside() {
            wrong_inside += 1;
        }
    }
    check(
        wrong_outside == 0 && wrong_inside == 0,
        format!("{wrong_outside}/100000 samples outside, {wrong_inside}/1000 violations not outside"),
    )
}

fn c2_caratheodory_three() -> Outcome {
    let mut rng = seeded_rng(102);
    let (mut done, mut bad, mut max_atoms, mut worst) = (0, 0, 0, 0.0f64);
    while done < 1000 {
        let chi = rotated_profile(&mut rng);
        let hull = HullSpec::new(chi).unwrap();
        if hull.has_zero_eigenvalue(1e-3) {
            continue;
        }
        let target = random_measure(&mut rng, 6).evaluate(&chi);
        match decompose(&hull, &target) {
            Ok(m) => {
                let err = m.evaluate(&chi).max_abs_diff(&target);
                max_atoms = max_atoms.max(m.len());
                worst = worst.max(err);
                if m.len() > 3 || err >= 1e-8 {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
        done += 1;
    }
    check(bad == 0, format!("{bad}/1000 bad, max {max_atoms} atoms, worst error {worst:.2e}"))
}

fn c3_caratheodory_two() -> Outcome {
    let mut rng = seeded_rng(103);
    let (mut bad, mut max_atoms, mut worst) = (0, 0, 0.0f64);
    for _ in 0..1000 {
        let chi = random_rotation(&mut rng).act(&AnisoTensor::diagonal(1.0, 0.0)) * rng.random_range(0.2..5.0);
        let hull = HullSpec::new(chi).unwrap();
        let target = random_measure(&mut rng, 5).evaluate(&chi);
        match decompose_zero_eig(&hull, &target) {
            Ok(m) => {
                let err = m.evaluate(&chi).max_abs_diff(&target);
                max_atoms = max_atoms.max(m.len());
                worst = worst.max(err);
                if m.len() > 2 || err >= 1e-8 {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
    }
    // 0 = ½χ + ½S(π/2).χ, S(π/2) being the quarter turn about e₂
    let chi = AnisoTensor::diagonal(1.0, 0.0);
    let quarter = coaxial_rotation(&orbitope::Vector3::y(), PI / 2.0).unwrap();
    let identity_ok = (chi * 0.5 + quarter.act(&chi) * 0.5).max_abs_diff(&AnisoTensor::ZERO) < 1e-15;
    let zero = decompose_zero_eig(&HullSpec::new(chi).unwrap(), &AnisoTensor::ZERO).unwrap();
    let zero_ok = zero.len() == 2
        && zero.atoms().iter().all(|a| (a.weight - 0.5).abs() < 1e-12)
        && zero.evaluate(&chi).max_abs_diff(&AnisoTensor::ZERO) < 1e-8;
    check(
        bad == 0 && identity_ok && zero_ok,
        format!("{bad}/1000 bad, max {max_atoms} atoms, worst error {worst:.2e}, zero case {}", identity_ok && zero_ok),
    )
}

/// Real roots of x³ − αx + c by the trigonometric formula.
fn depressed_cubic_roots(alpha: f64, c: f64) -> [f64; 3] {
    let r = 2.0 * (alpha / 3.0).sqrt();
    let arg = (-c / 2.0 * (27.0 / alpha.powi(3)).sqrt()).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    [0, 1, 2].map(|k| r * (phi - TAU * k as f64 / 3.0).cos())
}

fn c4_region_x() -> Outcome {
    let n = 200;
    let (mut inside, mut missed, mut worst) = (0, 0, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            let alpha = (i as f64 + 0.5) / n as f64;
            let det = (j as f64 + 0.5) / n as f64 * 0.5;
            // strictly inside 27 det² ≤ 4 α³, α ≤ 1 − det
            if !(27.0 * det * det < 4.0 * alpha.powi(3) && alpha < 1.0 - det) {
                continue;
            }
            inside += 1;
            let dist = invert_f_map(alpha, det, depressed_cubic_roots(alpha, det))
                .ok()
                .and_then(|p| {
                    let on_face = p.u == 1.0 || p.v == 1.0;
                    let (a, d) = f_map(p.lambda, p.u, p.v).ok()?;
                    on_face.then(|| (a - alpha).hypot(d - det))
                })
                .unwrap_or(f64::INFINITY);
            worst = worst.max(dist);
            if dist > 1e-3 {
                missed += 1;
            }
        }
    }
    let (ta, td): (f64, f64) = (1.0 / 3.0, 2.0 / 27.0);
    let tangent_ok = (27.0 * td * td - 4.0 * ta * ta * ta).abs() < 1e-12 && (3.0 * td - (ta - 1.0 / 9.0)).abs() < 1e-12;
    let (ca, cd): (f64, f64) = (0.75, 0.25);
    let corner_ok = (27.0 * cd * cd - 4.0 * ca * ca * ca).abs() < 1e-12 && (ca - (1.0 - cd)).abs() < 1e-12;
    // the corner is the image of eigenvalues (−1/2, −1/2, 1)
    let corner_inv = invariants(&AnisoTensor::diagonal(-0.5, -0.5));
    let corner_hit = (corner_inv.alpha - ca).abs() < 1e-12 && (corner_inv.det - cd).abs() < 1e-12;
    check(
        missed == 0 && tangent_ok && corner_ok && corner_hit,
        format!("{missed}/{inside} grid points missed (worst {worst:.1e}), tangent {tangent_ok}, corner {}", corner_ok && corner_hit),
    )
}

fn local_orbit_rank(chi: &AnisoTensor, rng: &mut SeededRng) -> usize {
    let r0 = random_rotation(rng);
    let base = r0.act(chi);
    let rows: Vec<Vec<f64>> = (0..500)
        .map(|_| {
            let r = coaxial_rotation(&random_unit_vector(rng), 1e-5).unwrap() * r0;
            (r.act(chi) - base).coords().iter().map(|c| c * 1e5).collect()
        })
        .collect();
    numerical_rank(&rows, 1e-3)
}

fn c5_dimensions() -> Outcome {
    let mut rng = seeded_rng(105);
    let distinct = AnisoTensor::diagonal(1.0, 0.2);
    let repeated = AnisoTensor::diagonal(-0.5, -0.5);
    let o3 = (orbit_dimension(&distinct).unwrap(), local_orbit_rank(&distinct, &mut rng));
    let o2 = (orbit_dimension(&repeated).unwrap(), local_orbit_rank(&repeated, &mut rng));
    let mut hulls = Vec::new();
    for n in 1..=3 {
        let tensors: Vec<AnisoTensor> = (0..n).map(|_| random_tensor(&mut rng)).collect();
        hulls.push((hull_dimension(&tensors), orbit_affine_rank(&tensors, 500, &mut rng)));
    }
    let dependent = [distinct, distinct * 2.0];
    let dep = (hull_dimension(&dependent), orbit_affine_rank(&dependent, 500, &mut rng));
    let ok = o3 == (3, 3)
        && o2 == (2, 2)
        && hulls == [(5, 5), (10, 10), (15, 15)]
        && dep == (5, 5);
    check(ok, format!("orbit {o3:?} {o2:?}, hull (formula, sampled) {hulls:?}, proportional pair {dep:?}"))
}

fn random_pair(rng: &mut SeededRng) -> TensorPair {
    let a = rotated_profile(rng);
    let b = rotated_profile(rng);
    TensorPair::new(a, b * rng.random_range(0.3..2.0))
}

fn c6_face_dichotomy() -> Outcome {
    let mut rng = seeded_rng(106);
    let (mut min_six, mut mismatches) = (usize::MAX, 0);
    for _ in 0..50 {
        let pair = random_pair(&mut rng);
        let mut six = 0;
        for k in 0..720 {
            let face = coaxial_face(&pair, &AlphaDirection::sweep(k, 720), 0).unwrap();
            if face.dim == 6 {
                six += 1;
            }
            if face_dimension_empirical(&face, &pair, 20).unwrap() != face.dim {
                mismatches += 1;
            }
        }
        min_six = min_six.min(six);
    }
    let mut shared_bad = 0;
    for _ in 0..50 {
        let r = random_rotation(&mut rng);
        let a = r.act(&AnisoTensor::diagonal(rng.random_range(0.2..1.0), rng.random_range(-0.5..0.5)));
        let b = r.act(&AnisoTensor::diagonal(rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5)));
        shared_bad += coaxial_scan(&TensorPair::new(a, b), 720)
            .unwrap()
            .iter()
            .filter(|row| row.dim != 2 && row.dim != 4)
            .count();
    }
    check(
        min_six >= 700 && mismatches == 0 && shared_bad == 0,
        format!("min dim-6 directions {min_six}/720, {mismatches} formula/sample mismatches, {shared_bad} shared-axis dims outside {{2,4}}"),
    )
}

/// Support function of the circle-orbit hull in direction `(c1, c2)`, on a dense angle grid.
fn support(c1: Complex64, c2: Complex64) -> f64 {
    (0..20_000)
        .map(|k| {
            let t = TAU * k as f64 / 20_000.0;
            (c1.conj() * Complex64::from_polar(1.0, t) + c2.conj() * Complex64::from_polar(1.0, 2.0 * t)).re
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn c7_moments() -> Outcome {
    let angles: Vec<f64> = (0..36).map(|k| TAU * k as f64 / 36.0).collect();
    let weights: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    let (mut tested, mut rank_bad, mut psd_bad) = (0, 0, 0);
    let mut run = |atoms: &[(f64, usize)]| {
        let mut merged: Vec<(f64, usize)> = Vec::new();
        for &(w, k) in atoms {
            match merged.iter_mut().find(|m| m.1 == k) {
                Some(m) => m.0 += w,
                None => merged.push((w, k)),
            }
        }
        let (a, b) = moments(&atoms.iter().map(|&(w, k)| (w, angles[k])).collect::<Vec<_>>());
        let m = moment_matrix(a, b);
        tested += 1;
        if m.rank() != merged.len().min(3) {
            rank_bad += 1;
        }
        if !m.is_psd() {
            psd_bad += 1;
        }
    };
    for i in 0..36 {
        for j in i..36 {
            for &w in &weights {
                run(&[(w, i), (1.0 - w, j)]);
            }
            for k in j..36 {
                for &w1 in &weights {
                    for &w2 in &weights {
                        let w3 = 1.0 - w1 - w2;
                        if w3 > 0.05 {
                            run(&[(w1, i), (w2, j), (w3, k)]);
                        }
                    }
                }
            }
        }
    }
    let mut rng = seeded_rng(107);
    let (mut outside, mut accepted) = (0, 0);
    while outside < 1000 {
        let a = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let b = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        // outside when some direction separates it from the hull by a clear margin
        let separated = (0..16).any(|k| {
            let t = TAU * k as f64 / 16.0;
            let (c1, c2) = (Complex64::from_polar(t.cos(), t), Complex64::from_polar(t.sin().abs(), 2.0 * t));
            (c1.conj() * a + c2.conj() * b).re > support(c1, c2) + 1e-6
        }) || a.norm() > 1.0 + 1e-6
            || b.norm() > 1.0 + 1e-6;
        if !separated {
            continue;
        }
        outside += 1;
        if moment_matrix(a, b).is_psd() {
            accepted += 1;
        }
    }
    check(
        rank_bad == 0 && psd_bad == 0 && accepted == 0,
        format!("{tested} grid measures: {rank_bad} rank mismatches, {psd_bad} not psd; {accepted}/1000 outside points accepted"),
    )
}

fn random_facet_point(rng: &mut SeededRng, pair: &TensorPair) -> Option<(CoaxialFace, TensorPair)> {
    let face = coaxial_face(pair, &AlphaDirection::from_angle(rng.random_range(0.0..TAU)), 0).ok()?;
    if face.dim != 6 {
        return None;
    }
    let n = rng.random_range(1..=6);
    let atoms = random_weights(rng, n)
        .into_iter()
        .map(|weight| Atom { weight, rotation: face.rotation(rng.random_range(0.0..TAU), rng.random_bool(0.5)) })
        .collect();
    Some((face, evaluate_pair(&AtomicMeasure::new(atoms).unwrap(), pair)))
}

fn c8_facet_caratheodory() -> Outcome {
    let mut rng = seeded_rng(108);
    let (mut done, mut bad, mut max_atoms, mut worst) = (0, 0, 0, 0.0f64);
    while done < 500 {
        let pair = random_pair(&mut rng);
        let Some((face, target)) = random_facet_point(&mut rng, &pair) else { continue };
        match facet_decompose(&face, &pair, &target) {
            Ok(m) => {
                let err = evaluate_pair(&m, &pair).max_abs_diff(&target);
                max_atoms = max_atoms.max(m.len());
                worst = worst.max(err);
                if m.len() > 4 || err >= 1e-7 {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
        done += 1;
    }
    let (mut over_eight, mut global_max, mut global_failed) = (0, 0, 0);
    for _ in 0..50 {
        let pair = random_pair(&mut rng);
        let target = evaluate_pair(&random_measure(&mut rng, 10), &pair);
        match decompose_pair(&pair, &target, 720) {
            Ok(out) => {
                global_max = global_max.max(out.measure.len());
                if out.measure.len() > 8 {
                    over_eight += 1;
                }
            }
            Err(_) => global_failed += 1,
        }
    }
    check(
        bad == 0 && over_eight == 0,
        format!(
            "{bad}/500 facet points bad (max {max_atoms} atoms, worst {worst:.2e}); \
             general targets: max {global_max} atoms, {over_eight} over 8, {global_failed}/50 unresolved"
        ),
    )
}

fn c9_p_max() -> Outcome {
    let mut rng = seeded_rng(109);
    let hull = HullSpec::new(AnisoTensor::diagonal(1.0, 0.0)).unwrap();
    let mut analytic_worst: f64 = 0.0;
    for r in [Rotation::identity(), random_rotation(&mut rng), random_rotation(&mut rng)] {
        analytic_worst = analytic_worst.max((p_max(&hull, &AnisoTensor::ZERO, &r).unwrap() - 0.5).abs());
    }
    let mut violated = 0;
    for _ in 0..1000 {
        let chi = rotated_profile(&mut rng);
        let hull = HullSpec::new(chi).unwrap();
        let p0 = rng.random_range(0.01..0.99);
        let r = random_rotation(&mut rng);
        let target = r.act(&chi) * p0 + random_measure(&mut rng, 3).evaluate(&chi) * (1.0 - p0);
        if p_max(&hull, &target, &r).unwrap() < p0 - 1e-9 {
            violated += 1;
        }
    }
    check(
        analytic_worst < 1e-9 && violated == 0,
        format!("|p_max − 1/2| = {analytic_worst:.1e}, {violated}/1000 planted bounds violated"),
    )
}

fn c10_rdc() -> Outcome {
    let mut rng = seeded_rng(110);
    let mut exact_worst: f64 = 0.0;
    for _ in 0..100 {
        let chi = random_tensor(&mut rng);
        let obs = synthesize_observations(&chi, 20, 0.0, 1.0, &mut rng).unwrap();
        exact_worst = exact_worst.max(estimate_tensor(&obs).unwrap().tensor.max_abs_diff(&chi));
    }
    let mut errors: Vec<f64> = Vec::new();
    for _ in 0..100 {
        let chi = random_tensor(&mut rng);
        let obs = synthesize_observations(&chi, 20, 0.01, 1.0, &mut rng).unwrap();
        let est = estimate_tensor(&obs).unwrap().tensor;
        errors.extend(est.coords().iter().zip(chi.coords()).map(|(a, b)| (a - b).abs()));
    }
    errors.sort_by(f64::total_cmp);
    let median = errors[errors.len() / 2];
    check(
        exact_worst < 1e-10 && median < 0.01,
        format!("noise-free worst {exact_worst:.1e}, noisy median coordinate error {median:.2e}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("single-ion membership vs sampling", c1_membership),
        ("at most 3 atoms without zero eigenvalue", c2_caratheodory_three),
        ("at most 2 atoms with zero eigenvalue", c3_caratheodory_two),
        ("region X coverage and landmarks", c4_region_x),
        ("orbit and hull dimensions", c5_dimensions),
        ("coaxial face dichotomy", c6_face_dichotomy),
        ("moment matrix criterion", c7_moments),
        ("facet decompositions with at most 4 atoms", c8_facet_caratheodory),
        ("p_max", c9_p_max),
        ("RDC round trip", c10_rdc),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
