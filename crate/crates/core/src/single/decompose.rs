//! Constructive Carathéodory decompositions in the single-ion hull.

use nalgebra::Matrix3;

use super::fmap::invert_f_map;
use super::{invariants, require_member, HullSpec};
use crate::error::{Error, Result};
use crate::measure::{Atom, AtomicMeasure};
use crate::rotation::Rotation;
use crate::spectral::{self, SpectralData};
use crate::tensor::AnisoTensor;

const RAY_TOL: f64 = 1e-12;

fn sign_matrices() -> [Matrix3<f64>; 4] {
    [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)]
        .map(|(a, b, c)| Matrix3::from_diagonal(&nalgebra::Vector3::new(a, b, c)))
}

/// A rotation `U` with `U.source ≈ target` for tensors with equal spectra,
/// built from the two eigenframes.
pub fn align_frames(source: &AnisoTensor, target: &AnisoTensor) -> Rotation {
    let fs = spectral::spectral(source).frame;
    let ft = spectral::spectral(target).frame;
    sign_matrices()
        .iter()
        .map(|d| Rotation::from_matrix_unchecked(ft.matrix() * d * fs.matrix().transpose()))
        .min_by(|a, b| {
            let ea = a.act(source).max_abs_diff(target);
            let eb = b.act(source).max_abs_diff(target);
            ea.total_cmp(&eb)
        })
        .expect("four candidates")
}

fn r_theta(t: f64) -> Rotation {
    let (s, c) = t.sin_cos();
    Rotation::from_matrix_unchecked(Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0))
}

fn s_tau(t: f64) -> Rotation {
    let (s, c) = t.sin_cos();
    Rotation::from_matrix_unchecked(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
}

fn key_for(chi: AnisoTensor) -> impl Fn(&Rotation) -> Vec<f64> {
    move |r: &Rotation| r.act(&chi).coords().to_vec()
}

/// Two-atom decomposition for a generator with eigenvalues `(M, 0, −M)`.
///
/// The target is normalized to the frame and scale where the generator is
/// `D = diag(1, 0, −1)`. Its invariants are pulled back through the f-map to
/// `(λ, θ, τ)`, the tensor `λ R(θ).G + (1−λ) S(τ).G` is built for `G = ±D`
/// (the sign follows the sign of the determinant) and its eigenframe is
/// rotated onto the target's.
pub fn decompose_zero_eig(hull: &HullSpec, target: &AnisoTensor) -> Result<AtomicMeasure> {
    if !hull.has_zero_eigenvalue(1e-9) {
        return Err(Error::InvalidArgument("generator has no zero eigenvalue".into()));
    }
    require_member(hull, target)?;
    let scale = (hull.max() - hull.min()) / 2.0;
    let frame = hull.spectral().frame;
    let key = key_for(*hull.chi());
    let lift = |x: Rotation| frame * x * frame.transpose();

    let t = frame.transpose().act(target) * (1.0 / scale);
    let d = AnisoTensor::diagonal(1.0, 0.0);
    let t_spec = spectral::eigenvalues(&t);
    if (t_spec[0] - 1.0).abs() < 1e-12 && t_spec[1].abs() < 1e-12 && (t_spec[2] + 1.0).abs() < 1e-12 {
        let u = align_frames(&d, &t);
        return Ok(AtomicMeasure::point_mass(lift(u)));
    }

    let inv = invariants(&t);
    let positive = inv.det > 0.0;
    // roots of x³ − alpha x + |det| are the eigenvalues of ∓t
    let roots = if positive { t_spec.map(|x| -x) } else { t_spec };
    let (base, generator) = if positive {
        let b = s_tau(std::f64::consts::FRAC_PI_2);
        (b, b.act(&d))
    } else {
        (Rotation::identity(), d)
    };
    let point = invert_f_map(inv.alpha.clamp(0.0, 1.0), inv.det.abs(), roots)?;
    let theta = point.u.sqrt().asin();
    let tau = point.v.sqrt().asin();
    let (r, s) = (r_theta(theta), s_tau(tau));
    let built = r.act(&generator) * point.lambda + s.act(&generator) * (1.0 - point.lambda);
    let u = align_frames(&built, &t);
    let measure = AtomicMeasure::from_computed(
        vec![
            Atom { weight: point.lambda, rotation: lift(u * r * base) },
            Atom { weight: 1.0 - point.lambda, rotation: lift(u * s * base) },
        ],
        &key,
    );
    let err = measure.evaluate(hull.chi()).max_abs_diff(target);
    if err > 1e-9 * scale.max(1.0) {
        return Err(Error::InversionFailed { alpha: inv.alpha, det: inv.det });
    }
    Ok(measure)
}

/// The chord construction on the facet through a boundary point.
///
/// `target` must have top eigenvalue `M` (`max_facet`) or bottom eigenvalue
/// `m`; it is written as the midpoint of two points of the facet's circle,
/// or returned as a single vertex when it lies on the circle.
pub fn facet_chord(hull: &HullSpec, target: &AnisoTensor, max_facet: bool) -> AtomicMeasure {
    let key = key_for(*hull.chi());
    let reorder = |s: &SpectralData| -> (Matrix3<f64>, [f64; 3]) {
        let f = s.frame.matrix();
        let l = s.eigenvalues;
        if max_facet {
            (*f, l)
        } else {
            // cyclic (e_min, e_max, e_mid) keeps determinant +1
            (Matrix3::from_columns(&[f.column(2), f.column(0), f.column(1)]), [l[2], l[0], l[1]])
        }
    };
    let (g_target, lt) = reorder(&spectral::spectral(target));
    let (g_chi, lc) = reorder(hull.spectral());
    let radius = (lc[1] - lc[2]) / 2.0;
    let rho = (lt[1] - lt[2]) / 2.0;
    let g_target = Rotation::from_matrix_unchecked(g_target);
    let g_chi_t = Rotation::from_matrix_unchecked(g_chi.transpose());
    if radius <= spectral::degeneracy_tol(hull.chi()) {
        return AtomicMeasure::point_mass(g_target * g_chi_t);
    }
    let half = (rho / radius).clamp(-1.0, 1.0).acos() / 2.0;
    let atoms = [half, -half]
        .map(|a| Atom { weight: 0.5, rotation: g_target * Rotation::about_e1(a) * g_chi_t })
        .to_vec();
    AtomicMeasure::from_computed(atoms, key)
}

fn eig_bounds_ok(hull: &HullSpec, x: &AnisoTensor) -> bool {
    let [top, _, bottom] = spectral::eigenvalues(x);
    top <= hull.max() && bottom >= hull.min()
}

fn chord_on_tighter_bound(hull: &HullSpec, point: &AnisoTensor) -> AtomicMeasure {
    let [top, _, bottom] = spectral::eigenvalues(point);
    facet_chord(hull, point, hull.max() - top <= bottom - hull.min())
}

/// At most three atoms: a boundary target is a chord midpoint on its facet,
/// an interior target is split along the ray from the vertex `χ` to the point
/// where that ray leaves `V`.
pub fn decompose(hull: &HullSpec, target: &AnisoTensor) -> Result<AtomicMeasure> {
    require_member(hull, target)?;
    if hull.has_zero_eigenvalue(1e-12) {
        if let Ok(m) = decompose_zero_eig(hull, target) {
            return Ok(m);
        }
    }
    let chi = *hull.chi();
    let dir = *target - chi;
    let tiny = 1e-14 * hull.scale();
    if dir.coords().iter().all(|c| c.abs() <= tiny) {
        return Ok(AtomicMeasure::point_mass(Rotation::identity()));
    }

    let at = |t: f64| chi + dir * t;
    let mut lo = 1.0;
    let mut hi = 2.0;
    while eig_bounds_ok(hull, &at(hi)) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > RAY_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if eig_bounds_ok(hull, &at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let exit = at(lo);
    let chord = chord_on_tighter_bound(hull, &exit);
    let w = 1.0 / lo;
    let mut atoms: Vec<Atom> = chord.scaled_atoms(w).collect();
    atoms.push(Atom { weight: 1.0 - w, rotation: Rotation::identity() });
    Ok(AtomicMeasure::from_computed(atoms, key_for(chi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single::facet;
    use crate::single::FacetSign;
    use nalgebra::Vector3;

    #[test]
    fn zero_target_uses_half_turn_partner() {
        let hull = HullSpec::new(AnisoTensor::diagonal(1.0, 0.0)).unwrap();
        let m = decompose_zero_eig(&hull, &AnisoTensor::ZERO).unwrap();
        assert_eq!(m.len(), 2);
        let s = s_tau(std::f64::consts::FRAC_PI_2);
        let has = |r: &Rotation| m.atoms().iter().any(|a| a.rotation.max_abs_diff(r) < 1e-12 && (a.weight - 0.5).abs() < 1e-12);
        assert!(has(&Rotation::identity()));
        assert!(has(&s));
    }

    #[test]
    fn vertex_is_single_atom() {
        let hull = HullSpec::new(AnisoTensor::new(0.4, -0.3, 0.2, 0.5, 0.1)).unwrap();
        let m = decompose(&hull, hull.chi()).unwrap();
        assert_eq!(m.len(), 1);
        let hull = HullSpec::new(AnisoTensor::diagonal(2.0, -1.0)).unwrap();
        let m = decompose_zero_eig(&HullSpec::new(AnisoTensor::diagonal(1.0, 0.0)).unwrap(), &AnisoTensor::diagonal(1.0, 0.0)).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(decompose(&hull, hull.chi()).unwrap().len(), 1);
    }

    #[test]
    fn facet_center_is_quarter_turn_chord() {
        let hull = HullSpec::new(AnisoTensor::new(1.0, 0.0, 0.0, 0.3, 0.0)).unwrap();
        let f = facet(&hull, &Vector3::x(), FacetSign::Max).unwrap();
        let m = facet_chord(&hull, &f.center, true);
        assert_eq!(m.len(), 2);
        let a = m.atoms()[0].rotation.transpose() * m.atoms()[1].rotation;
        // relative rotation is a quarter turn about e₁
        let angle = a.matrix()[(2, 1)].atan2(a.matrix()[(1, 1)]).abs();
        assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(m.evaluate(hull.chi()).max_abs_diff(&f.center) < 1e-12);
    }

    #[test]
    fn outside_is_rejected() {
        let hull = HullSpec::new(AnisoTensor::diagonal(1.0, 0.0)).unwrap();
        let out = AnisoTensor::diagonal(1.5, 0.0);
        assert!(matches!(decompose(&hull, &out), Err(Error::OutsideHull { .. })));
        assert!(matches!(decompose_zero_eig(&hull, &out), Err(Error::OutsideHull { .. })));
    }
}
