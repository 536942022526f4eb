//! Trigonometric moments `(a, b) = (Σλⱼe^{iθⱼ}, Σλⱼe^{2iθⱼ})` of measures on
//! the circle, and their moment matrices.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

pub const PSD_SLACK: f64 = 1e-10;
pub const RANK_TOL: f64 = 1e-9;

/// `[[1, a, ā], [ā, 1, b̄], [a, b, 1]] = Σ λⱼ vⱼvⱼ*` with `v = (1, z̄, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentMatrix {
    pub a: Complex64,
    pub b: Complex64,
    eigenvalues: [f64; 3],
}

impl MomentMatrix {
    pub fn matrix(&self) -> Matrix3<Complex64> {
        build(self.a, self.b)
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        self.eigenvalues
    }

    pub fn is_psd(&self) -> bool {
        self.eigenvalues[0] >= -PSD_SLACK
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|l| **l > RANK_TOL).count()
    }

    /// `1 + ā²b + a²b̄ − 2|a|² − |b|²`.
    pub fn determinant(&self) -> f64 {
        det_formula(self.a, self.b)
    }
}

fn build(a: Complex64, b: Complex64) -> Matrix3<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    Matrix3::new(one, a, a.conj(), a.conj(), one, b.conj(), a, b, one)
}

pub(crate) fn det_formula(a: Complex64, b: Complex64) -> f64 {
    1.0 + 2.0 * (a.conj() * a.conj() * b).re - 2.0 * a.norm_sqr() - b.norm_sqr()
}

fn sorted_eigen(a: Complex64, b: Complex64) -> ([f64; 3], Matrix3<Complex64>) {
    let eig = build(a, b).symmetric_eigen();
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.map(|i| eig.eigenvalues[i]);
    let vecs = Matrix3::from_columns(&idx.map(|i| eig.eigenvectors.column(i).into_owned()));
    (vals, vecs)
}

pub fn moment_matrix(a: Complex64, b: Complex64) -> MomentMatrix {
    MomentMatrix { a, b, eigenvalues: sorted_eigen(a, b).0 }
}

/// Moments of a list of `(weight, θ)` atoms.
pub fn moments(atoms: &[(f64, f64)]) -> (Complex64, Complex64) {
    atoms.iter().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(a, b), &(w, t)| {
        (a + Complex64::from_polar(w, t), b + Complex64::from_polar(w, 2.0 * t))
    })
}

/// Least-squares weights for fixed angles, clamped to `≥ 0` and renormalized.
fn fit_weights(a: Complex64, b: Complex64, angles: &[f64]) -> Vec<(f64, f64)> {
    let rows = 5;
    let design = nalgebra::DMatrix::from_fn(rows, angles.len(), |i, j| {
        let t = angles[j];
        match i {
            0 => 1.0,
            1 => t.cos(),
            2 => t.sin(),
            3 => (2.0 * t).cos(),
            _ => (2.0 * t).sin(),
        }
    });
    let rhs = nalgebra::DVector::from_vec(vec![1.0, a.re, a.im, b.re, b.im]);
    let w = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .unwrap_or_else(|_| nalgebra::DVector::from_element(angles.len(), 1.0 / angles.len() as f64));
    let clamped: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    clamped.iter().zip(angles).map(|(x, t)| (x / total, *t)).filter(|(x, _)| *x > 1e-15).collect()
}

fn rank_two(a: Complex64, b: Complex64, kernel: nalgebra::Vector3<Complex64>) -> Vec<(f64, f64)> {
    // atoms z satisfy c₁z² + c₀z + c₂ = 0
    let (c0, c1, c2) = (kernel[0], kernel[1], kernel[2]);
    let disc = (c0 * c0 - 4.0 * c1 * c2).sqrt();
    let roots = [(-c0 + disc) / (2.0 * c1), (-c0 - disc) / (2.0 * c1)];
    let angles: Vec<f64> = roots.iter().map(|z| z.arg()).collect();
    fit_weights(a, b, &angles)
}

/// Atoms `(λⱼ, θⱼ)`, as many as the rank of the moment matrix, with the
/// given moments.
///
/// Rank 2 atoms are the roots of the polynomial read off the kernel of the
/// moment matrix. In rank 3 the point is pushed along the ray from the
/// vertex `(1, 1)` to the boundary of the psd set, decomposed there, and the
/// three weights refitted.
pub fn circle_hull_decompose(a: Complex64, b: Complex64) -> Result<Vec<(f64, f64)>> {
    let (vals, vecs) = sorted_eigen(a, b);
    if vals[0] < -PSD_SLACK {
        return Err(Error::OutsideB);
    }
    let rank = vals.iter().filter(|l| **l > RANK_TOL).count();
    match rank {
        0 | 1 => Ok(vec![(1.0, a.arg())]),
        2 => Ok(rank_two(a, b, vecs.column(0).into_owned())),
        _ => {
            let one = Complex64::new(1.0, 0.0);
            let at = |t: f64| (one + (a - one) * t, one + (b - one) * t);
            let psd = |t: f64| {
                let (x, y) = at(t);
                sorted_eigen(x, y).0[0] >= 0.0
            };
            let (mut lo, mut hi) = (1.0, 2.0);
            while psd(hi) {
                lo = hi;
                hi *= 2.0;
            }
            while hi - lo > 1e-14 * hi {
                let mid = 0.5 * (lo + hi);
                if psd(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (x, y) = at(lo);
            let (_, vecs) = sorted_eigen(x, y);
            let mut angles: Vec<f64> = rank_two(x, y, vecs.column(0).into_owned()).iter().map(|p| p.1).collect();
            angles.push(0.0);
            Ok(fit_weights(a, b, &angles))
        }
    }
}

/// Brute-force minimal atom count over angles on a grid, for cross-checking ranks.
pub fn minimal_atoms_on_grid(atoms: &[(f64, f64)]) -> usize {
    let mut angles: Vec<f64> = Vec::new();
    for (w, t) in atoms {
        if *w <= 0.0 {
            continue;
        }
        let t = t.rem_euclid(2.0 * std::f64::consts::PI);
        if !angles.iter().any(|s| {
            let d = (s - t).abs();
            d.min(2.0 * std::f64::consts::PI - d) < 1e-9
        }) {
            angles.push(t);
        }
    }
    let rows: Vec<Vec<f64>> = angles
        .iter()
        .map(|t| vec![1.0, t.cos(), t.sin(), (2.0 * t).cos(), (2.0 * t).sin()])
        .collect();
    // distinct circle points are affinely independent up to 5 of them
    linalg::numerical_rank(&rows, 1e-10)
}
