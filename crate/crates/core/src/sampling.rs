//! Seeded random generators for rotations, tensors and measures.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::measure::{Atom, AtomicMeasure};
use crate::rotation::Rotation;
use crate::tensor::AnisoTensor;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-uniform rotation from a normalized Gaussian quaternion.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    let mut q = [0.0f64; 4];
    loop {
        for c in q.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let n = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-8 {
            q.iter_mut().for_each(|c| *c /= n);
            break;
        }
    }
    let [w, x, y, z] = q;
    Rotation::from_matrix_unchecked(Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - z * w),
        2.0 * (x * z + y * w),
        2.0 * (x * y + z * w),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - x * w),
        2.0 * (x * z - y * w),
        2.0 * (y * z + x * w),
        1.0 - 2.0 * (x * x + y * y),
    ))
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        let n: f64 = v.norm();
        if n > 1e-8 {
            return v / n;
        }
    }
}

/// Tensor with i.i.d. standard normal coordinates.
pub fn random_tensor<R: Rng + ?Sized>(rng: &mut R) -> AnisoTensor {
    AnisoTensor::from_coords([0; 5].map(|_| rng.sample(StandardNormal)))
}

/// Random diagonal tensor with max eigenvalue 1 and the other two drawn so that
/// the full range of eigenvalue profiles (including near-repeated ones) appears.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R) -> AnisoTensor {
    // eigenvalues (1, -1-m, m) with m ∈ [-2, -1/2]
    let m: f64 = rng.random_range(-2.0..-0.5);
    AnisoTensor::diagonal(1.0, -1.0 - m)
}

/// Flat-Dirichlet weights.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

pub fn random_measure<R: Rng + ?Sized>(rng: &mut R, n_atoms: usize) -> AtomicMeasure {
    let weights = random_weights(rng, n_atoms);
    let atoms = weights
        .into_iter()
        .map(|weight| Atom { weight, rotation: random_rotation(rng) })
        .collect();
    AtomicMeasure::new(atoms).expect("dirichlet weights form a measure")
}
