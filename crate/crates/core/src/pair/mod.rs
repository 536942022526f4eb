//! The pair hull `V¹'² = conv(SO(3).(χ₁, χ₂))` in `W ⊕ W`.
//!
//! There is no exact membership test here. [`necessary_membership`] checks
//! every projection `π_α`; coaxial faces and their decompositions are in
//! [`face`], [`moment`] and [`facet`].

pub mod face;
pub mod facet;
pub mod moment;
pub mod recursion;

pub use face::{coaxial_face, coaxial_face_with_base, coaxial_scan, face_dimension_empirical, CoaxialFace, FaceScanRow};
pub use facet::facet_decompose;
pub use moment::{circle_hull_decompose, moment_matrix, MomentMatrix};
pub use recursion::{decompose_pair, RecursionOutcome};

use nalgebra::Vector3;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::AtomicMeasure;
use crate::rotation::Rotation;
use crate::sampling::random_rotation;
use crate::single::HullSpec;
use crate::spectral;
use crate::tensor::{check_unit, AnisoTensor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorPair {
    pub chi1: AnisoTensor,
    pub chi2: AnisoTensor,
}

impl TensorPair {
    pub fn new(chi1: AnisoTensor, chi2: AnisoTensor) -> Self {
        Self { chi1, chi2 }
    }

    /// Rank of `{χ₁, χ₂}` as 5-vectors.
    pub fn rank(&self) -> usize {
        linalg::numerical_rank(&[self.chi1.coords().to_vec(), self.chi2.coords().to_vec()], 1e-8)
    }

    pub fn act(&self, r: &Rotation) -> Self {
        Self { chi1: r.act(&self.chi1), chi2: r.act(&self.chi2) }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.chi1.coords().iter().chain(self.chi2.coords().iter()).copied().collect()
    }

    pub fn max_abs_diff(&self, other: &TensorPair) -> f64 {
        self.chi1.max_abs_diff(&other.chi1).max(self.chi2.max_abs_diff(&other.chi2))
    }

    /// Length scale used for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.chi1.norm().hypot(self.chi2.norm()).max(1e-300)
    }

    /// `(α₁χ₁ + α₂χ₂, −α₂χ₁ + α₁χ₂)`: the pair in the rotated basis `(α, α⊥)`.
    pub(crate) fn split(&self, alpha: &AlphaDirection) -> (AnisoTensor, AnisoTensor) {
        (project_alpha(self, alpha), project_alpha(self, &alpha.perp()))
    }
}

/// Evaluates `Σ pⱼ Rⱼ.(χ₁, χ₂)`.
pub fn evaluate_pair(measure: &AtomicMeasure, pair: &TensorPair) -> TensorPair {
    TensorPair { chi1: measure.evaluate(&pair.chi1), chi2: measure.evaluate(&pair.chi2) }
}

/// A unit vector `α ∈ S¹` selecting the combination `α₁χ₁ + α₂χ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaDirection([f64; 2]);

impl AlphaDirection {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        let norm = a1.hypot(a2);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitAlpha { norm });
        }
        Ok(Self([a1, a2]))
    }

    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self([c, s])
    }

    /// The `k`-th of `n` equally spaced directions starting at `(1, 0)`.
    pub fn sweep(k: usize, n: usize) -> Self {
        Self::from_angle(2.0 * std::f64::consts::PI * k as f64 / n as f64)
    }

    pub fn components(&self) -> [f64; 2] {
        self.0
    }

    pub fn angle(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }

    /// `α⊥ = (−α₂, α₁)`.
    pub fn perp(&self) -> Self {
        Self([-self.0[1], self.0[0]])
    }

    pub fn neg(&self) -> Self {
        Self([-self.0[0], -self.0[1]])
    }
}

pub fn project_alpha(pair: &TensorPair, alpha: &AlphaDirection) -> AnisoTensor {
    let [a1, a2] = alpha.components();
    pair.chi1 * a1 + pair.chi2 * a2
}

/// `L_{e,α}(χ̄) = eᵀ χ̄_α e`.
pub fn l_e_alpha(target: &TensorPair, e: &Vector3<f64>, alpha: &AlphaDirection) -> Result<f64> {
    check_unit(e)?;
    Ok(project_alpha(target, alpha).quadratic_form(e))
}

/// `5 · dim span{χ₁, …, χ_N}`.
pub fn hull_dimension(tensors: &[AnisoTensor]) -> usize {
    let rows: Vec<Vec<f64>> = tensors.iter().map(|t| t.coords().to_vec()).collect();
    5 * linalg::numerical_rank(&rows, 1e-8)
}

/// Affine rank of `n_samples` random orbit points of the tuple, in `W^N`.
pub fn orbit_affine_rank<R: Rng + ?Sized>(tensors: &[AnisoTensor], n_samples: usize, rng: &mut R) -> usize {
    let points: Vec<Vec<f64>> = (0..n_samples)
        .map(|_| {
            let r = random_rotation(rng);
            tensors.iter().flat_map(|t| r.act(t).coords()).collect()
        })
        .collect();
    linalg::affine_rank(&points, 1e-8)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NecessaryMembership {
    Pass { min_margin: f64 },
    Fail { index: usize, alpha: AlphaDirection, violation: f64 },
}

impl NecessaryMembership {
    pub fn passed(&self) -> bool {
        matches!(self, NecessaryMembership::Pass { .. })
    }
}

/// Eigenvalue margin of `target_α` inside `V_α = π_α(V)`; negative outside.
pub(crate) fn alpha_margin(pair: &TensorPair, target: &TensorPair, alpha: &AlphaDirection) -> f64 {
    let gen = project_alpha(pair, alpha);
    let t = project_alpha(target, alpha);
    let [gm, _, gmin] = spectral::eigenvalues(&gen);
    let [tm, _, tmin] = spectral::eigenvalues(&t);
    (gm - tm).min(tmin - gmin)
}

/// Checks `target_α ∈ V_α` for `n_alpha` equally spaced directions.
///
/// Only a necessary condition for `target ∈ V¹'²`. The lowest failing index
/// is reported.
pub fn necessary_membership(pair: &TensorPair, target: &TensorPair, n_alpha: usize) -> Result<NecessaryMembership> {
    if n_alpha < 8 {
        return Err(Error::InvalidArgument(format!("n_alpha = {n_alpha} < 8")));
    }
    let tol = 1e-9 * pair.scale().max(1.0);
    let mut min_margin = f64::INFINITY;
    for k in 0..n_alpha {
        let alpha = AlphaDirection::sweep(k, n_alpha);
        let margin = alpha_margin(pair, target, &alpha);
        if margin < -tol {
            return Ok(NecessaryMembership::Fail { index: k, alpha, violation: -margin });
        }
        min_margin = min_margin.min(margin);
    }
    Ok(NecessaryMembership::Pass { min_margin })
}

/// The single-ion hull of `χ_α`, or `None` when `χ_α = 0`.
pub(crate) fn alpha_hull(pair: &TensorPair, alpha: &AlphaDirection) -> Option<HullSpec> {
    HullSpec::new(project_alpha(pair, alpha)).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_examples() {
        let p = TensorPair::new(AnisoTensor::diagonal(1.0, 0.0), AnisoTensor::diagonal(0.0, 1.0));
        assert_eq!(project_alpha(&p, &AlphaDirection::new(1.0, 0.0).unwrap()), p.chi1);
        assert_eq!(project_alpha(&p, &AlphaDirection::new(0.0, 1.0).unwrap()), p.chi2);
        assert!(AlphaDirection::new(1.0, 0.1).is_err());
    }

    #[test]
    fn hull_dimensions() {
        let a = AnisoTensor::diagonal(1.0, 0.0);
        let b = AnisoTensor::new(0.0, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(hull_dimension(&[a]), 5);
        assert_eq!(hull_dimension(&[a, b]), 10);
        assert_eq!(hull_dimension(&[a, a * 2.0]), 5);
    }

    #[test]
    fn necessary_examples() {
        let p = TensorPair::new(AnisoTensor::diagonal(1.0, 0.0), AnisoTensor::new(0.0, 0.3, 0.0, 0.2, 0.6));
        assert!(necessary_membership(&p, &p, 720).unwrap().passed());
        let bad = TensorPair::new(p.chi1 * 1.1, p.chi2);
        match necessary_membership(&p, &bad, 720).unwrap() {
            NecessaryMembership::Fail { index, .. } => assert_eq!(index, 0),
            other => panic!("{other:?}"),
        }
        assert!(necessary_membership(&p, &p, 4).is_err());
    }
}
