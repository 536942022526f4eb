//! Spectral decomposition of anisotropic tensors by cyclic Jacobi rotations.

use nalgebra::{Matrix3, Vector3};

use crate::rotation::Rotation;
use crate::tensor::AnisoTensor;

/// Off-diagonal convergence threshold, relative to the Frobenius norm.
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigenvalues closer than this (times `max(1, ‖χ‖)`) are treated as equal.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    /// Sorted descending.
    pub eigenvalues: [f64; 3],
    /// Columns are the corresponding unit eigenvectors.
    pub frame: Rotation,
}

impl SpectralData {
    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[2]
    }

    pub fn eigenvector(&self, i: usize) -> Vector3<f64> {
        self.frame.column(i)
    }
}

pub fn degeneracy_tol(chi: &AnisoTensor) -> f64 {
    DEGENERACY_TOL * chi.norm().max(1.0)
}

/// Raw cyclic Jacobi: returns unsorted eigenvalues and the matrix of eigenvectors.
pub(crate) fn jacobi_eigen(m: &Matrix3<f64>) -> ([f64; 3], Matrix3<f64>) {
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = Matrix3::identity();
    let scale = a.norm();
    if scale == 0.0 {
        return ([0.0; 3], v);
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = (a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2)).sqrt();
        if off <= JACOBI_TOL * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut j = Matrix3::identity();
            j[(p, p)] = c;
            j[(q, q)] = c;
            j[(p, q)] = s;
            j[(q, p)] = -s;
            a = j.transpose() * a * j;
            a[(p, q)] = 0.0;
            a[(q, p)] = 0.0;
            v *= j;
        }
    }
    ([a[(0, 0)], a[(1, 1)], a[(2, 2)]], v)
}

fn sign_normalize(v: Vector3<f64>) -> Vector3<f64> {
    match v.iter().find(|c| c.abs() > 1e-12) {
        Some(c) if *c < 0.0 => -v,
        _ => v,
    }
}

/// Orthonormal basis of the span of `basis`, built by Gram–Schmidt on the
/// projections of e₁, e₂, e₃ (in that order).
fn canonical_basis(basis: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let mut out: Vec<Vector3<f64>> = Vec::with_capacity(basis.len());
    for i in 0..3 {
        if out.len() == basis.len() {
            break;
        }
        let ei = Vector3::ith(i, 1.0);
        let mut p: Vector3<f64> = basis.iter().map(|b| b * b.dot(&ei)).sum();
        for q in &out {
            p -= q * q.dot(&p);
        }
        if p.norm() > 1e-3 {
            out.push(p.normalize());
        }
    }
    out
}

/// Sorted spectrum and an eigenvector frame with determinant +1.
///
/// Eigenvectors get their first non-negligible component positive; inside a
/// repeated eigenspace the basis is Gram–Schmidt on the projected standard
/// basis. The third column is the cross product of the first two.
pub fn spectral(chi: &AnisoTensor) -> SpectralData {
    let (vals, vecs) = jacobi_eigen(&chi.matrix());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let eigenvalues = order.map(|i| vals[i]);
    let mut cols: Vec<Vector3<f64>> = order.iter().map(|&i| vecs.column(i).into_owned()).collect();

    let tol = degeneracy_tol(chi);
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && (eigenvalues[end - 1] - eigenvalues[end]).abs() <= tol {
            end += 1;
        }
        if end - start > 1 {
            let canon = canonical_basis(&cols[start..end]);
            cols[start..end].copy_from_slice(&canon);
        }
        start = end;
    }

    let c0 = sign_normalize(cols[0]);
    let c1 = sign_normalize(cols[1]);
    let c2 = c0.cross(&c1);
    let frame = Rotation::from_matrix_unchecked(Matrix3::from_columns(&[c0, c1, c2]));
    SpectralData { eigenvalues, frame }
}

/// Sorted (descending) eigenvalues only.
pub fn eigenvalues(chi: &AnisoTensor) -> [f64; 3] {
    let (mut vals, _) = jacobi_eigen(&chi.matrix());
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}
