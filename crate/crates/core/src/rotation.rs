//! Rotations of R³ and their conjugation action on tensors.

use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::tensor::{check_unit, AnisoTensor};

/// Tolerance for `‖R Rᵀ − I‖_∞` and `|det R − 1|`.
pub const ROTATION_TOL: f64 = 1e-12;

/// A 3×3 orthogonal matrix with determinant 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let orthogonality = (m * m.transpose() - Matrix3::identity()).amax();
        let det = m.determinant();
        if orthogonality > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::NotRotation { orthogonality, det });
        }
        Ok(Rotation(m))
    }

    /// For matrices built from orthonormal frames inside the crate.
    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Rotation(m)
    }

    /// Rotation by `theta` about the unit axis `e` (right-hand rule).
    pub fn about_axis(e: &Vector3<f64>, theta: f64) -> Result<Self> {
        check_unit(e)?;
        Ok(Self::about_unit_axis(e, theta))
    }

    pub(crate) fn about_unit_axis(e: &Vector3<f64>, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let k = e.cross_matrix();
        Rotation(Matrix3::identity() * c + k * s + e * e.transpose() * (1.0 - c))
    }

    /// `R_{e₁,θ}`: fixes e₁, turns the (e₂, e₃) plane by θ.
    pub fn about_e1(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Rotation(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    /// `R_{e₃,π} = diag(−1, −1, 1)`, the reflection component of Q_{e₁}.
    pub fn half_turn_e3() -> Self {
        Rotation(Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0)))
    }

    /// Some rotation taking e₁ to the unit vector `e`.
    ///
    /// Uses the minimal (Rodrigues) rotation; for `e` in the hemisphere around
    /// −e₁ it first applies a half turn about e₃ so the formula stays well
    /// conditioned.
    pub fn taking_e1_to(e: &Vector3<f64>) -> Result<Self> {
        check_unit(e)?;
        Ok(Self::taking_e1_to_unit(e))
    }

    pub(crate) fn taking_e1_to_unit(e: &Vector3<f64>) -> Self {
        fn minimal(e: &Vector3<f64>) -> Matrix3<f64> {
            // k = e₁ × e, c = e₁·e; R = I + K + K²/(1 + c)
            let k = Vector3::new(0.0, -e.z, e.y);
            let kx = k.cross_matrix();
            Matrix3::identity() + kx + kx * kx / (1.0 + e.x)
        }
        if e.x >= -0.5 {
            Rotation(minimal(e))
        } else {
            let flip = Self::half_turn_e3().0;
            let flipped = flip.transpose() * e;
            Rotation(flip * minimal(&flipped))
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    /// Column `i` of the matrix (the image of eᵢ).
    pub fn column(&self, i: usize) -> Vector3<f64> {
        self.0.column(i).into_owned()
    }

    /// `R.χ = R χ Rᵀ`.
    pub fn act(&self, chi: &AnisoTensor) -> AnisoTensor {
        AnisoTensor::project(&(self.0 * chi.matrix() * self.0.transpose()))
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    pub fn orthogonality_error(&self) -> f64 {
        (self.0 * self.0.transpose() - Matrix3::identity()).amax()
    }

    pub fn max_abs_diff(&self, other: &Rotation) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<&Rotation> for &Rotation {
    type Output = Rotation;
    fn mul(self, rhs: &Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

/// `act(R, χ) = R χ Rᵀ`.
pub fn act(r: &Rotation, chi: &AnisoTensor) -> AnisoTensor {
    r.act(chi)
}

/// The rotation by `theta` about the unit axis `e`.
pub fn coaxial_rotation(e: &Vector3<f64>, theta: f64) -> Result<Rotation> {
    Rotation::about_axis(e, theta)
}
