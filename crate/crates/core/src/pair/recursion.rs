//! Vertex + facet recursion for general points of the pair hull.
//!
//! From a start vertex the ray through the target is followed until the
//! projected eigenvalue bounds first become tight at some `α*`. The exit
//! point is decomposed on the coaxial face for `α*` and the top eigenvector
//! there, giving at most five atoms. The projected bounds are only necessary
//! for membership, so an exit point may miss every face; the next start
//! vertex is then tried, and if all fail the last error is returned.

use super::face::{base_for_axis, coaxial_face_with_base};
use super::facet::facet_decompose;
use super::{evaluate_pair, necessary_membership, AlphaDirection, TensorPair};
use crate::error::{Error, Result};
use crate::measure::{Atom, AtomicMeasure};
use crate::rotation::Rotation;
use crate::sampling::{random_rotation, seeded_rng};
use crate::spectral;

/// Start vertices tried in turn: the identity, then fixed pseudo-random rotations.
const START_VERTICES: usize = 16;
const START_VERTEX_SEED: u64 = 0x5eed;

#[derive(Debug, Clone)]
pub struct RecursionOutcome {
    pub measure: AtomicMeasure,
    /// Ray parameter of the exit point (`1` when the target is already on a face).
    pub t_exit: f64,
    pub alpha: AlphaDirection,
    pub face_dim: usize,
}

/// `M_α − λ_max(target_α)` and its derivative in the angle of α.
///
/// The derivative follows from first-order eigenvalue perturbation, since
/// `d/dα χ_α = χ_{α⊥}`.
fn upper_margin(pair: &TensorPair, target: &TensorPair, angle: f64) -> (f64, f64) {
    let alpha = AlphaDirection::from_angle(angle);
    let (g, g_perp) = pair.split(&alpha);
    let (z, z_perp) = target.split(&alpha);
    let sg = spectral::spectral(&g);
    let sz = spectral::spectral(&z);
    let (eg, ez) = (sg.eigenvector(0), sz.eigenvector(0));
    (sg.max() - sz.max(), g_perp.quadratic_form(&eg) - z_perp.quadratic_form(&ez))
}

/// Smallest upper margin over the full circle of directions (the lower
/// bound for α is the upper bound for −α), refined to a stationary point.
fn worst_alpha(pair: &TensorPair, target: &TensorPair, n_alpha: usize) -> (f64, f64) {
    let step = std::f64::consts::TAU / n_alpha as f64;
    let (mut best, mut best_angle) = (f64::INFINITY, 0.0);
    for k in 0..n_alpha {
        let m = upper_margin(pair, target, k as f64 * step).0;
        if m < best {
            (best, best_angle) = (m, k as f64 * step);
        }
    }
    let (mut lo, mut hi) = (best_angle - step, best_angle + step);
    if upper_margin(pair, target, lo).1 < 0.0 && upper_margin(pair, target, hi).1 > 0.0 {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if upper_margin(pair, target, mid).1 < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let refined = 0.5 * (lo + hi);
        let m = upper_margin(pair, target, refined).0;
        if m <= best {
            return (m, refined);
        }
    }
    (best, best_angle)
}

fn decompose_on_face(pair: &TensorPair, point: &TensorPair, angle: f64) -> Result<(AtomicMeasure, usize)> {
    let alpha = AlphaDirection::from_angle(angle);
    let frame = spectral::spectral(&super::project_alpha(point, &alpha)).frame;
    let base = base_for_axis(pair, &alpha, frame.matrix());
    let face = coaxial_face_with_base(pair, &alpha, 0, base)?;
    Ok((facet_decompose(&face, pair, point)?, face.dim))
}

pub fn decompose_pair(pair: &TensorPair, target: &TensorPair, n_alpha: usize) -> Result<RecursionOutcome> {
    if let super::NecessaryMembership::Fail { index, violation, .. } = necessary_membership(pair, target, n_alpha)? {
        return Err(Error::NecessaryConditionFails { index, violation });
    }
    let scale = pair.scale();
    let offset = TensorPair::new(target.chi1 - pair.chi1, target.chi2 - pair.chi2);
    if offset.to_vec().iter().all(|c| c.abs() <= 1e-14 * scale) {
        return Ok(RecursionOutcome {
            measure: AtomicMeasure::point_mass(Rotation::identity()),
            t_exit: 1.0,
            alpha: AlphaDirection::from_angle(0.0),
            face_dim: 0,
        });
    }

    // a target already on a face is decomposed there; a ray from a vertex of
    // that same face would only slide along it
    let (margin, angle) = worst_alpha(pair, target, n_alpha);
    if margin <= 1e-9 * scale.max(1.0) {
        if let Ok((measure, face_dim)) = decompose_on_face(pair, target, angle) {
            return Ok(RecursionOutcome { measure, t_exit: 1.0, alpha: AlphaDirection::from_angle(angle), face_dim });
        }
    }

    let mut rng = seeded_rng(START_VERTEX_SEED);
    let mut last_err = Error::SearchFailed("no start vertex tried".into());
    for attempt in 0..START_VERTICES {
        let start = if attempt == 0 { Rotation::identity() } else { random_rotation(&mut rng) };
        match ray_from(pair, target, n_alpha, start) {
            Ok(out) => return Ok(out),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// One ray from the vertex `start.χ` through the target.
fn ray_from(pair: &TensorPair, target: &TensorPair, n_alpha: usize, start: Rotation) -> Result<RecursionOutcome> {
    let scale = pair.scale();
    let vertex = pair.act(&start);
    let dir = TensorPair::new(target.chi1 - vertex.chi1, target.chi2 - vertex.chi2);
    let at = |t: f64| TensorPair::new(vertex.chi1 + dir.chi1 * t, vertex.chi2 + dir.chi2 * t);
    let feasible = |t: f64| worst_alpha(pair, &at(t), n_alpha).0 >= 0.0;

    let (mut lo, mut hi) = (1.0, 2.0);
    while feasible(hi) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let exit = at(lo);
    let (_, angle) = worst_alpha(pair, &exit, n_alpha);
    let (on_face, face_dim) = decompose_on_face(pair, &exit, angle)?;

    let w = 1.0 / lo;
    let mut atoms: Vec<Atom> = on_face.scaled_atoms(w).collect();
    atoms.push(Atom { weight: 1.0 - w, rotation: start });
    let p = *pair;
    let measure = AtomicMeasure::from_computed(atoms, move |r| p.act(r).to_vec());
    let err = evaluate_pair(&measure, pair).max_abs_diff(target);
    if err > 1e-7 * scale.max(1.0) {
        return Err(Error::SearchFailed(format!("recursion reconstruction error {err:e}")));
    }
    Ok(RecursionOutcome { measure, t_exit: lo, alpha: AlphaDirection::from_angle(angle), face_dim })
}
