//! The map `(λ, u, v) ↦ (alpha, det)` on the unit cube and its inverse on the
//! faces `v = 1` and `u = 1`.
//!
//! Writing `p = λ(1−λ)`:
//!
//! ```text
//! alpha = 1 − p(4v + u − 2uv)
//! det   = p·u·(1 − 2λv)
//! ```
//!
//! On both faces a point with target `(alpha, c)` corresponds to a real root
//! `μ` of `x³ − alpha·x + c`: on `v = 1` take `λ = (1 − μ)/2`, on `u = 1` take
//! `λ = μ`. The remaining coordinate then follows from the alpha equation.

use crate::error::{Error, Result};

const CUBE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmapPoint {
    pub lambda: f64,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmapFace {
    /// `v = 1`, free `(λ, u)`.
    V1,
    /// `u = 1`, free `(λ, v)`.
    U1,
}

fn in_unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

pub fn f_map(lambda: f64, u: f64, v: f64) -> Result<(f64, f64)> {
    if !(in_unit(lambda) && in_unit(u) && in_unit(v)) {
        return Err(Error::OutsideCube(lambda, u, v));
    }
    Ok(f_unchecked(lambda, u, v))
}

fn f_unchecked(lambda: f64, u: f64, v: f64) -> (f64, f64) {
    let p = lambda * (1.0 - lambda);
    (1.0 - p * (4.0 * v + u - 2.0 * u * v), p * u * (1.0 - 2.0 * lambda * v))
}

/// Which face the preimage of `(alpha, c)` is taken from: `u = 1` above the
/// curve `c = sqrt(4/27 (alpha − 1/4)(alpha − 1)²)` for `alpha ≥ 1/3`, `v = 1`
/// elsewhere.
pub fn preferred_face(alpha: f64, c: f64) -> FmapFace {
    if alpha >= 1.0 / 3.0 && c > (4.0 / 27.0 * (alpha - 0.25) * (alpha - 1.0).powi(2)).sqrt() {
        FmapFace::U1
    } else {
        FmapFace::V1
    }
}

fn cube_candidate(lambda: f64, u: f64, v: f64) -> Option<(FmapPoint, f64)> {
    let coords = [lambda, u, v];
    if coords.iter().any(|x| !(-CUBE_SLACK..=1.0 + CUBE_SLACK).contains(x)) {
        return None;
    }
    let slack = coords.iter().map(|x| x.min(1.0 - x)).fold(f64::INFINITY, f64::min);
    let c = coords.map(|x| x.clamp(0.0, 1.0));
    Some((FmapPoint { lambda: c[0], u: c[1], v: c[2] }, slack))
}

fn face_candidate(face: FmapFace, mu: f64, alpha: f64) -> Option<(FmapPoint, f64)> {
    match face {
        FmapFace::V1 => {
            let lambda = (1.0 - mu) / 2.0;
            let p = lambda * (1.0 - lambda);
            if p < 1e-14 {
                return None;
            }
            cube_candidate(lambda, 4.0 - (1.0 - alpha) / p, 1.0)
        }
        FmapFace::U1 => {
            let p = mu * (1.0 - mu);
            if p < 1e-14 {
                return None;
            }
            cube_candidate(mu, 1.0, ((1.0 - alpha) / p - 1.0) / 2.0)
        }
    }
}

/// Closed-form preimage of `(alpha, c)` (with `c ≥ 0`) on a face of the cube.
///
/// `roots` must be the three real roots of `x³ − alpha·x + c`, which the caller
/// usually has as eigenvalues. Among admissible candidates the one on the
/// preferred face furthest from the cube boundary wins.
pub fn invert_f_map(alpha: f64, c: f64, roots: [f64; 3]) -> Result<FmapPoint> {
    let preferred = preferred_face(alpha, c);
    let other = match preferred {
        FmapFace::V1 => FmapFace::U1,
        FmapFace::U1 => FmapFace::V1,
    };
    for face in [preferred, other] {
        let best = roots
            .iter()
            .filter_map(|&mu| face_candidate(face, mu, alpha))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((point, _)) = best {
            return Ok(point);
        }
    }
    invert_f_map_newton(alpha, c, preferred).or_else(|_| invert_f_map_newton(alpha, c, other))
}

fn face_point(face: FmapFace, lambda: f64, w: f64) -> FmapPoint {
    match face {
        FmapFace::V1 => FmapPoint { lambda, u: w, v: 1.0 },
        FmapFace::U1 => FmapPoint { lambda, u: 1.0, v: w },
    }
}

fn residual(face: FmapFace, lambda: f64, w: f64, alpha: f64, c: f64) -> [f64; 2] {
    let p = face_point(face, lambda, w);
    let (a, d) = f_unchecked(p.lambda, p.u, p.v);
    [a - alpha, d - c]
}

/// Jacobian of `f` restricted to `face`, columns `(∂λ, ∂w)`.
fn jacobian(face: FmapFace, lambda: f64, w: f64) -> [[f64; 2]; 2] {
    let p = lambda * (1.0 - lambda);
    let dp = 1.0 - 2.0 * lambda;
    let FmapPoint { u, v, .. } = face_point(face, lambda, w);
    let da_dl = -dp * (4.0 * v + u - 2.0 * u * v);
    let dd_dl = dp * u * (1.0 - 2.0 * lambda * v) - 2.0 * p * u * v;
    match face {
        FmapFace::V1 => [[da_dl, -p * (1.0 - 2.0 * v)], [dd_dl, p * (1.0 - 2.0 * lambda * v)]],
        FmapFace::U1 => [[da_dl, -p * (4.0 - 2.0 * u)], [dd_dl, -2.0 * p * u * lambda]],
    }
}

/// Damped Newton on one face, started from the best cell centres of a 40×40
/// grid (cell centres avoid the edges `λ ∈ {0, 1}` where the Jacobian is
/// singular).
pub fn invert_f_map_newton(alpha: f64, c: f64, face: FmapFace) -> Result<FmapPoint> {
    const N: usize = 40;
    const STARTS: usize = 8;
    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(N * N);
    for i in 0..N {
        for j in 0..N {
            let (l, w) = ((i as f64 + 0.5) / N as f64, (j as f64 + 0.5) / N as f64);
            grid.push((res_norm(residual(face, l, w, alpha, c)), l, w));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(r, l, w) in grid.iter().take(STARTS) {
        let (r, l, w) = newton_from(face, alpha, c, r, l, w);
        if r <= 1e-12 {
            return Ok(face_point(face, l, w));
        }
    }
    Err(Error::InversionFailed { alpha, det: c })
}

fn res_norm(r: [f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

fn newton_from(face: FmapFace, alpha: f64, c: f64, mut r: f64, mut l: f64, mut w: f64) -> (f64, f64, f64) {
    for _ in 0..100 {
        if r < 1e-15 {
            break;
        }
        let [[a, b], [cc, d]] = jacobian(face, l, w);
        let det = a * d - b * cc;
        if det.abs() < 1e-300 {
            break;
        }
        let res = residual(face, l, w, alpha, c);
        let dl = (d * res[0] - b * res[1]) / det;
        let dw = (-cc * res[0] + a * res[1]) / det;
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-6 {
            let (nl, nw) = ((l - step * dl).clamp(0.0, 1.0), (w - step * dw).clamp(0.0, 1.0));
            let nr = res_norm(residual(face, nl, nw, alpha, c));
            if nr < r {
                (l, w, r) = (nl, nw, nr);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (r, l, w)
}
