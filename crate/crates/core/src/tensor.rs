//! Anisotropic (trace-free symmetric) 3×3 tensors and their 5-vector coordinates.
//!
//! A point `(v, w, x, y, z)` of R⁵ corresponds to the matrix
//!
//! ```text
//! | v        w          x        |
//! | w     -v/2 + y      z        |
//! | x        z       -v/2 - y    |
//! ```
//!
//! Under rotations about e₁ the coordinate `v` is fixed, `(w, x)` turns by θ and
//! `(y, z)` turns by 2θ.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Tolerance used when validating user-supplied matrices.
pub const MATRIX_INPUT_TOL: f64 = 1e-10;

/// Tolerance on `‖e‖ − 1` for axis arguments.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnisoTensor {
    coords: [f64; 5],
}

impl AnisoTensor {
    pub const ZERO: AnisoTensor = AnisoTensor { coords: [0.0; 5] };

    pub fn new(v: f64, w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { coords: [v, w, x, y, z] }
    }

    pub fn from_coords(coords: [f64; 5]) -> Self {
        Self { coords }
    }

    /// Diagonal tensor `diag(a, b, -a-b)`.
    pub fn diagonal(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, 0.0, (b - (-a - b)) / 2.0, 0.0)
    }

    pub fn coords(&self) -> [f64; 5] {
        self.coords
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let [v, w, x, y, z] = self.coords;
        Matrix3::new(v, w, x, w, -v / 2.0 + y, z, x, z, -v / 2.0 - y)
    }

    /// Validating constructor: the matrix must be symmetric and trace-free to
    /// within [`MATRIX_INPUT_TOL`] (scaled by the largest entry when that exceeds 1).
    pub fn from_matrix(m: &Matrix3<f64>) -> Result<Self> {
        let scale = m.amax().max(1.0);
        let asymmetry = (m - m.transpose()).amax();
        if asymmetry > MATRIX_INPUT_TOL * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let trace = m.trace();
        if trace.abs() > MATRIX_INPUT_TOL * scale {
            return Err(Error::NotTraceFree { trace });
        }
        Ok(Self::project(m))
    }

    /// Symmetric trace-free part of an arbitrary 3×3 matrix.
    pub fn project(m: &Matrix3<f64>) -> Self {
        let s = (m + m.transpose()) * 0.5;
        let third = s.trace() / 3.0;
        Self::new(
            s[(0, 0)] - third,
            s[(0, 1)],
            s[(0, 2)],
            (s[(1, 1)] - s[(2, 2)]) / 2.0,
            s[(1, 2)],
        )
    }

    /// Frobenius norm of the matrix view.
    pub fn norm(&self) -> f64 {
        self.matrix().norm()
    }

    /// `‖self − other‖_∞` over matrix entries.
    pub fn max_abs_diff(&self, other: &AnisoTensor) -> f64 {
        (self.matrix() - other.matrix()).amax()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == 0.0)
    }

    /// The quadratic form `eᵀ χ e`.
    pub fn quadratic_form(&self, r: &Vector3<f64>) -> f64 {
        r.dot(&(self.matrix() * r))
    }
}

impl Add for AnisoTensor {
    type Output = AnisoTensor;
    fn add(self, rhs: AnisoTensor) -> AnisoTensor {
        let mut c = self.coords;
        c.iter_mut().zip(rhs.coords).for_each(|(a, b)| *a += b);
        AnisoTensor { coords: c }
    }
}

impl Sub for AnisoTensor {
    type Output = AnisoTensor;
    fn sub(self, rhs: AnisoTensor) -> AnisoTensor {
        self + (-rhs)
    }
}

impl Neg for AnisoTensor {
    type Output = AnisoTensor;
    fn neg(self) -> AnisoTensor {
        self * -1.0
    }
}

impl Mul<f64> for AnisoTensor {
    type Output = AnisoTensor;
    fn mul(self, s: f64) -> AnisoTensor {
        AnisoTensor { coords: self.coords.map(|c| c * s) }
    }
}

impl Mul<AnisoTensor> for f64 {
    type Output = AnisoTensor;
    fn mul(self, t: AnisoTensor) -> AnisoTensor {
        t * self
    }
}

pub(crate) fn check_unit(e: &Vector3<f64>) -> Result<()> {
    let norm = e.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitAxis { norm });
    }
    Ok(())
}

/// `L_e(χ) = eᵀ χ e`, the Q_e-invariant linear functional.
pub fn l_e(chi: &AnisoTensor, e: &Vector3<f64>) -> Result<f64> {
    check_unit(e)?;
    Ok(chi.quadratic_form(e))
}
