//! Coaxial faces `F_{e,α}` and their dimensions.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::{AlphaDirection, TensorPair};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rotation::Rotation;
use crate::spectral;

/// Rank threshold for the U₁/U₂ components, relative to the pair's scale.
pub const COMPONENT_RANK_TOL: f64 = 1e-8;

/// The face of `V¹'²` on which `L_{e,α}` attains `M_α`, seen from the vertex
/// `base.(χ₁, χ₂)`.
///
/// `frame` is a rotation with first column `axis` that diagonalizes
/// `(base.χ)_α`. The face consists of the images of the base vertex under
/// `frame · Q · frameᵀ` for `Q` in the coaxial group of e₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoaxialFace {
    pub axis: Vector3<f64>,
    pub alpha: AlphaDirection,
    pub m_alpha: f64,
    pub base: Rotation,
    pub frame: Rotation,
    pub d1: usize,
    pub d2: usize,
    pub dim: usize,
}

/// Face coordinates of the base vertex in `frame`: the U₂ coordinate of `χ_α`
/// (real, `≥ 0`) and the `(U₀, U₁, U₂)` coordinates of `χ' = π_{α⊥}(χ)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FaceCoords {
    pub s_alpha: f64,
    pub v_perp: f64,
    pub x_perp: Complex64,
    pub s_perp: Complex64,
}

pub(crate) fn to_complex(coords: [f64; 5]) -> (f64, Complex64, Complex64) {
    (coords[0], Complex64::new(coords[1], coords[2]), Complex64::new(coords[3], coords[4]))
}

impl CoaxialFace {
    /// `frame · R_{e₁,θ} · [R_{e₃,π}] · frameᵀ · base`, the vertex rotations of the face.
    pub fn rotation(&self, theta: f64, reflected: bool) -> Rotation {
        let mut q = Rotation::about_e1(theta);
        if reflected {
            q = q * Rotation::half_turn_e3();
        }
        self.frame * q * self.frame.transpose() * self.base
    }

    pub(crate) fn coords(&self, pair: &TensorPair) -> FaceCoords {
        let local = pair.act(&(self.frame.transpose() * self.base));
        let (along, across) = local.split(&self.alpha);
        let (_, _, s) = to_complex(along.coords());
        let (v_perp, x_perp, s_perp) = to_complex(across.coords());
        FaceCoords { s_alpha: s.re, v_perp, x_perp, s_perp }
    }
}

/// Coaxial face through the vertex `χ` itself.
///
/// `which_eigvec = 0` takes the top eigenvector of `χ_α`; `2` takes the
/// bottom one, which is the top eigenvector for `−α`.
pub fn coaxial_face(pair: &TensorPair, alpha: &AlphaDirection, which_eigvec: usize) -> Result<CoaxialFace> {
    coaxial_face_with_base(pair, alpha, which_eigvec, Rotation::identity())
}

pub fn coaxial_face_with_base(
    pair: &TensorPair,
    alpha: &AlphaDirection,
    which_eigvec: usize,
    base: Rotation,
) -> Result<CoaxialFace> {
    let alpha = match which_eigvec {
        0 => *alpha,
        2 => alpha.neg(),
        _ => return Err(Error::InvalidArgument(format!("which_eigvec must be 0 or 2, got {which_eigvec}"))),
    };
    let vertex = pair.act(&base);
    let chi_alpha = super::project_alpha(&vertex, &alpha);
    if chi_alpha.is_zero() || chi_alpha.norm() <= 1e-14 * pair.scale() {
        return Err(Error::ZeroTensor);
    }
    let spec = spectral::spectral(&chi_alpha);
    let mut face = CoaxialFace {
        axis: spec.eigenvector(0),
        alpha,
        m_alpha: spec.max(),
        base,
        frame: spec.frame,
        d1: 0,
        d2: 0,
        dim: 0,
    };
    let c = face.coords(pair);
    let tol = COMPONENT_RANK_TOL * pair.scale();
    face.d1 = usize::from(c.x_perp.norm() > tol);
    face.d2 = linalg::rank_above(&[vec![c.s_alpha, 0.0], vec![c.s_perp.re, c.s_perp.im]], tol);
    face.dim = 2 * (face.d1 + face.d2);
    Ok(face)
}

/// Golden-ratio angle sequence, dense in the circle without repeats.
pub(crate) fn golden_angle(k: usize) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    2.0 * std::f64::consts::PI * (k as f64 * phi).fract()
}

/// Affine rank of sampled face vertices, alternating between the two
/// components of the coaxial group.
pub fn face_dimension_empirical(face: &CoaxialFace, pair: &TensorPair, n_samples: usize) -> Result<usize> {
    if n_samples < 20 {
        return Err(Error::InvalidArgument(format!("n_samples = {n_samples} < 20")));
    }
    let points: Vec<Vec<f64>> = (0..n_samples)
        .map(|k| pair.act(&face.rotation(golden_angle(k + 1), k % 2 == 1)).to_vec())
        .collect();
    Ok(linalg::affine_rank(&points, 1e-8))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceScanRow {
    pub alpha_angle: f64,
    pub d1: usize,
    pub d2: usize,
    pub dim: usize,
    pub m_alpha: f64,
}

/// Face dimensions at the top eigenvector for `n_alpha` equally spaced α.
pub fn coaxial_scan(pair: &TensorPair, n_alpha: usize) -> Result<Vec<FaceScanRow>> {
    (0..n_alpha)
        .map(|k| {
            let alpha = AlphaDirection::sweep(k, n_alpha);
            let f = coaxial_face(pair, &alpha, 0)?;
            Ok(FaceScanRow { alpha_angle: alpha.angle(), d1: f.d1, d2: f.d2, dim: f.dim, m_alpha: f.m_alpha })
        })
        .collect()
}

/// `R` with `R.χ_α` having `e` as top eigenvector, built from eigenframes.
pub(crate) fn base_for_axis(pair: &TensorPair, alpha: &AlphaDirection, target_frame: &Matrix3<f64>) -> Rotation {
    let f = spectral::spectral(&super::project_alpha(pair, alpha)).frame;
    Rotation::from_matrix_unchecked(target_frame * f.matrix().transpose())
}
