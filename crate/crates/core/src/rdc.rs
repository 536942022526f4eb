//! Residual dipolar couplings: the forward model, tensor estimation from
//! observations, synthetic data, and bounds on the weight of an orientation.

use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::pair::{alpha_hull, necessary_membership, project_alpha, AlphaDirection, NecessaryMembership, TensorPair};
use crate::rotation::Rotation;
use crate::sampling::random_unit_vector;
use crate::single::{require_member, HullSpec};
use crate::spectral;
use crate::tensor::AnisoTensor;

/// Condition numbers above this are logged as a warning.
pub const CONDITION_WARNING: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleObservation {
    pub r: Vector3<f64>,
    pub delta: f64,
    pub c: f64,
}

impl DipoleObservation {
    pub fn new(r: Vector3<f64>, delta: f64) -> Self {
        Self { r, delta, c: 1.0 }
    }
}

fn check_r(r: &Vector3<f64>) -> Result<f64> {
    let n = r.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::InvalidArgument("dipole vector must be nonzero".into()));
    }
    Ok(n)
}

/// `δ = C/‖r‖⁵ · rᵀχ̄r`.
pub fn forward_rdc(chi: &AnisoTensor, r: &Vector3<f64>, c: f64) -> Result<f64> {
    let n = check_r(r)?;
    Ok(c / n.powi(5) * chi.quadratic_form(r))
}

/// The linear functional `χ ↦ δ` in the coordinates `(v, w, x, y, z)`.
pub fn design_row(r: &Vector3<f64>, c: f64) -> Result<[f64; 5]> {
    let n = check_r(r)?;
    let k = c / n.powi(5);
    let (a, b, d) = (r.x, r.y, r.z);
    Ok([a * a - (b * b + d * d) / 2.0, 2.0 * a * b, 2.0 * a * d, b * b - d * d, 2.0 * b * d].map(|x| k * x))
}

pub fn mean_tensor(measure: &AtomicMeasure, chi: &AnisoTensor) -> AnisoTensor {
    measure.evaluate(chi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorEstimate {
    pub tensor: AnisoTensor,
    pub rms_residual: f64,
    pub condition: f64,
}

/// Least-squares fit of the five tensor coordinates to the observed couplings.
pub fn estimate_tensor(observations: &[DipoleObservation]) -> Result<TensorEstimate> {
    let n = observations.len();
    let mut rows = Vec::with_capacity(n * 5);
    for o in observations {
        rows.extend(design_row(&o.r, o.c)?);
    }
    if n < 5 {
        return Err(Error::UnderDetermined { observations: n, rank: n });
    }
    let a = DMatrix::from_row_slice(n, 5, &rows);
    let b = DVector::from_iterator(n, observations.iter().map(|o| o.delta));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let rank = svd.singular_values.iter().filter(|s| **s > 1e-12 * smax).count();
    if rank < 5 {
        return Err(Error::UnderDetermined { observations: n, rank });
    }
    let condition = smax / smin;
    if condition > CONDITION_WARNING {
        log::warn!("design matrix condition number {condition:e}");
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let residual = &a * &x - &b;
    let rms_residual = (residual.norm_squared() / n as f64).sqrt();
    let tensor = AnisoTensor::from_coords([x[0], x[1], x[2], x[3], x[4]]);
    Ok(TensorEstimate { tensor, rms_residual, condition })
}

/// `n` observations of `chi` along random directions with lengths in
/// `[0.9, 1.1]`, with additive Gaussian noise of standard deviation `sigma`.
pub fn synthesize_observations<R: Rng + ?Sized>(
    chi: &AnisoTensor,
    n: usize,
    sigma: f64,
    c: f64,
    rng: &mut R,
) -> Result<Vec<DipoleObservation>> {
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    (0..n)
        .map(|_| {
            let r = random_unit_vector(rng) * rng.random_range(0.9..1.1);
            let delta = forward_rdc(chi, &r, c)? + noise.sample(rng);
            Ok(DipoleObservation { r, delta, c })
        })
        .collect()
}

/// The ion tensor(s) behind an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    Single(AnisoTensor),
    Pair(TensorPair),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub measure: AtomicMeasure,
    pub generator: Generator,
}

impl EnsembleSpec {
    /// Mean tensor for a single ion, or the pair of mean tensors.
    pub fn mean(&self) -> Generator {
        match &self.generator {
            Generator::Single(chi) => Generator::Single(self.measure.evaluate(chi)),
            Generator::Pair(p) => Generator::Pair(crate::pair::evaluate_pair(&self.measure, p)),
        }
    }
}

fn eig_bounds_ok(hull: &HullSpec, x: &AnisoTensor, tol: f64) -> bool {
    let [top, _, bottom] = spectral::eigenvalues(x);
    top <= hull.max() + tol && bottom >= hull.min() - tol
}

/// Largest `p` with `(χ̄ − p·R.χ)/(1 − p) ∈ V`.
pub fn p_max(hull: &HullSpec, target: &AnisoTensor, r: &Rotation) -> Result<f64> {
    require_member(hull, target)?;
    let vertex = r.act(hull.chi());
    let tol = 1e-12 * hull.scale();
    if vertex.max_abs_diff(target) <= tol {
        return Ok(1.0);
    }
    let feasible = |p: f64| eig_bounds_ok(hull, &((*target - vertex * p) * (1.0 / (1.0 - p))), tol);
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-12);
    if feasible(hi) {
        return Ok(hi);
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Upper bound on the pair `p_max`: the minimum of the single-ion values for
/// every projection `π_α` in the sweep.
pub fn p_max_pair_upper(pair: &TensorPair, target: &TensorPair, r: &Rotation, n_alpha: usize) -> Result<f64> {
    if let NecessaryMembership::Fail { index, violation, .. } = necessary_membership(pair, target, n_alpha)? {
        return Err(Error::NecessaryConditionFails { index, violation });
    }
    let mut best: f64 = 1.0;
    for k in 0..n_alpha {
        let alpha = AlphaDirection::sweep(k, n_alpha);
        let Some(hull) = alpha_hull(pair, &alpha) else { continue };
        let t = project_alpha(target, &alpha);
        let p = match p_max(&hull, &t, r) {
            Ok(p) => p,
            // within the sweep tolerance but outside the strict boundary band
            Err(Error::OutsideHull { .. }) => 0.0,
            Err(e) => return Err(e),
        };
        best = best.min(p);
    }
    Ok(best)
}
