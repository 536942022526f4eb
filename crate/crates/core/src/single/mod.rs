//! The single-ion hull `V = conv(SO(3).χ)`.
//!
//! `V` is exactly the set of anisotropic tensors whose eigenvalues lie in
//! `[m, M]`, the extreme eigenvalues of χ.

mod decompose;
mod fmap;

pub use decompose::{align_frames, decompose, decompose_zero_eig, facet_chord};
pub use fmap::{f_map, invert_f_map, invert_f_map_newton, FmapFace, FmapPoint};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::rotation::Rotation;
use crate::spectral::{self, SpectralData};
use crate::tensor::{check_unit, AnisoTensor};

/// Relative tolerance for classifying a point as on the boundary of `V`.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Absolute slack on the two inequalities defining region X.
pub const REGION_X_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullSpec {
    chi: AnisoTensor,
    spectral: SpectralData,
}

impl HullSpec {
    pub fn new(chi: AnisoTensor) -> Result<Self> {
        let spectral = spectral::spectral(&chi);
        if spectral.max() <= 0.0 || spectral.min() >= 0.0 {
            return Err(Error::ZeroTensor);
        }
        Ok(Self { chi, spectral })
    }

    pub fn chi(&self) -> &AnisoTensor {
        &self.chi
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    /// Largest eigenvalue `M`.
    pub fn max(&self) -> f64 {
        self.spectral.max()
    }

    /// Smallest eigenvalue `m`.
    pub fn min(&self) -> f64 {
        self.spectral.min()
    }

    pub fn mid(&self) -> f64 {
        self.spectral.eigenvalues[1]
    }

    /// `M + m/2`, radius of the min-facets.
    pub fn alpha_geom(&self) -> f64 {
        (self.max() + self.min() / 2.0).max(0.0)
    }

    /// `−m − M/2`, radius of the max-facets.
    pub fn gamma_geom(&self) -> f64 {
        (-self.min() - self.max() / 2.0).max(0.0)
    }

    /// `M − m`, the natural length scale for tolerances.
    pub fn scale(&self) -> f64 {
        self.max() - self.min()
    }

    /// Whether the middle eigenvalue vanishes, i.e. χ ∝ diag(1, 0, −1) up to rotation.
    pub fn has_zero_eigenvalue(&self, rel_tol: f64) -> bool {
        self.mid().abs() <= rel_tol * self.scale()
    }

    pub fn boundary_tol(&self) -> f64 {
        BOUNDARY_TOL * self.scale().max(1.0)
    }

    /// The vertex `R.χ`.
    pub fn vertex(&self, r: &Rotation) -> AnisoTensor {
        r.act(&self.chi)
    }

    pub fn membership(&self, target: &AnisoTensor) -> Membership {
        membership(self, target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Membership {
    Inside { margin: f64 },
    Boundary,
    Outside { violation: f64 },
}

impl Membership {
    pub fn is_outside(&self) -> bool {
        matches!(self, Membership::Outside { .. })
    }

    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Membership::Inside { .. } => "inside",
            Membership::Boundary => "boundary",
            Membership::Outside { .. } => "outside",
        }
    }
}

/// Classifies `target` against the eigenvalue bounds `m ≤ λ ≤ M`.
pub fn membership(hull: &HullSpec, target: &AnisoTensor) -> Membership {
    let [top, _, bottom] = spectral::eigenvalues(target);
    let upper = hull.max() - top;
    let lower = bottom - hull.min();
    let margin = upper.min(lower);
    let tol = hull.boundary_tol();
    if margin.abs() <= tol {
        Membership::Boundary
    } else if margin < 0.0 {
        Membership::Outside { violation: -margin }
    } else {
        Membership::Inside { margin }
    }
}

pub(crate) fn require_member(hull: &HullSpec, target: &AnisoTensor) -> Result<Membership> {
    match membership(hull, target) {
        Membership::Outside { violation } => Err(Error::OutsideHull { violation }),
        m => Ok(m),
    }
}

/// `alpha = −(λ₁λ₂ + λ₁λ₃ + λ₂λ₃)` and the determinant; together they fix
/// the characteristic polynomial `x³ − alpha·x − det`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharPolyInvariants {
    pub alpha: f64,
    pub det: f64,
}

pub fn invariants(chi: &AnisoTensor) -> CharPolyInvariants {
    let m = chi.matrix();
    CharPolyInvariants { alpha: 0.5 * (m * m).trace(), det: m.determinant() }
}

/// Whether `(alpha, det)` lies in `{27 det² ≤ 4 alpha³, alpha ≤ 1 − |det|}`.
pub fn region_x_contains(alpha: f64, det: f64) -> bool {
    27.0 * det * det <= 4.0 * alpha.powi(3) + REGION_X_TOL && alpha <= 1.0 - det.abs() + REGION_X_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetSign {
    Max,
    Min,
}

/// The linear functional `L_e` together with its constant value on a facet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportingFunctional {
    pub axis: Vector3<f64>,
    pub level: f64,
}

impl SupportingFunctional {
    pub fn eval(&self, chi: &AnisoTensor) -> f64 {
        chi.quadratic_form(&self.axis)
    }
}

/// A coaxial facet `F_e^M` or `F_e^m`: a disk in the U₂-plane of `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetDescriptor {
    pub axis: Vector3<f64>,
    pub sign: FacetSign,
    pub center: AnisoTensor,
    pub radius: f64,
    /// `None` when the facet degenerates to a single vertex; a point face has
    /// no distinguished supporting functional.
    pub support: Option<SupportingFunctional>,
}

impl FacetDescriptor {
    pub fn is_degenerate(&self) -> bool {
        self.support.is_none()
    }

    /// The facet point at polar angle `phi` and U₂-radius `rho ≤ radius`.
    pub fn point(&self, rho: f64, phi: f64) -> AnisoTensor {
        let frame = Rotation::taking_e1_to_unit(&self.axis);
        let local = AnisoTensor::new(self.scalar(), 0.0, 0.0, rho * phi.cos(), rho * phi.sin());
        frame.act(&local)
    }

    fn scalar(&self) -> f64 {
        self.center.quadratic_form(&self.axis)
    }
}

pub fn facet(hull: &HullSpec, e: &Vector3<f64>, sign: FacetSign) -> Result<FacetDescriptor> {
    check_unit(e)?;
    let (level, radius) = match sign {
        FacetSign::Max => (hull.max(), hull.gamma_geom()),
        FacetSign::Min => (hull.min(), hull.alpha_geom()),
    };
    // diag(level, -level/2, -level/2) with its distinguished axis along e
    let center = AnisoTensor::project(&(e * e.transpose() * (1.5 * level) - Matrix3::identity() * (0.5 * level)));
    let degenerate = radius <= spectral::DEGENERACY_TOL * hull.scale().max(1.0);
    let support = (!degenerate).then_some(SupportingFunctional { axis: *e, level });
    Ok(FacetDescriptor { axis: *e, sign, center, radius, support })
}
