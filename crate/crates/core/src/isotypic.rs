//! Splitting W under the coaxial subgroup of an axis, and orbit tangent spaces.

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rotation::Rotation;
use crate::tensor::{check_unit, AnisoTensor};

/// Components of χ in `U₀ ⊕ U₁ ⊕ U₂` for rotations about `axis`.
///
/// The 2-vectors are coordinates in `frame`, a rotation taking e₁ to the
/// axis; they are only defined up to a common rotation (by θ and 2θ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotypicalSplit {
    pub scalar: f64,
    pub u1: Vector2<f64>,
    pub u2: Vector2<f64>,
    pub axis: Vector3<f64>,
    pub frame: Rotation,
}

impl IsotypicalSplit {
    pub fn reassemble(&self) -> AnisoTensor {
        let local = AnisoTensor::new(self.scalar, self.u1.x, self.u1.y, self.u2.x, self.u2.y);
        self.frame.act(&local)
    }
}

pub fn isotypical_split(chi: &AnisoTensor, e: &Vector3<f64>) -> Result<IsotypicalSplit> {
    check_unit(e)?;
    Ok(split_in_frame(chi, &Rotation::taking_e1_to_unit(e)))
}

/// Split with respect to the first column of an explicit frame.
pub(crate) fn split_in_frame(chi: &AnisoTensor, frame: &Rotation) -> IsotypicalSplit {
    let [v, w, x, y, z] = frame.transpose().act(chi).coords();
    IsotypicalSplit {
        scalar: v,
        u1: Vector2::new(w, x),
        u2: Vector2::new(y, z),
        axis: frame.column(0),
        frame: *frame,
    }
}

fn so3_generators() -> [Matrix3<f64>; 3] {
    [Vector3::x(), Vector3::y(), Vector3::z()].map(|k| k.cross_matrix())
}

/// Dimension of the orbit SO(3).χ: rank of the tangent vectors `rχ − χr`
/// over a basis of skew matrices `r`.
pub fn orbit_dimension(chi: &AnisoTensor) -> Result<usize> {
    if chi.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let m = chi.matrix();
    let rows: Vec<Vec<f64>> = so3_generators()
        .iter()
        .map(|r| AnisoTensor::project(&(r * m - m * r)).coords().to_vec())
        .collect();
    Ok(linalg::rank_above(&rows, 1e-9 * chi.norm()))
}
