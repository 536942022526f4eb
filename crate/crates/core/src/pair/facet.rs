//! Decomposition of points on a 6-dimensional coaxial facet into at most
//! four vertices.
//!
//! In the facet frame a vertex is `R_{e₁,θ}` or `R_{e₁,θ}R_{e₃,π}` applied to
//! the base vertex; on the complex coordinates `U₁ = w + ix`, `U₂ = y + iz`
//! these act as `z ↦ e^{ikθ}z` or `z ↦ e^{ikθ}z̄`. A measure on the facet is
//! therefore a weight `μ` on the first component with circle moments
//! `(a, b)` and a weight `1 − μ` on the second with moments `(a', b')`.
//! Matching the target fixes `μb` and `(1−μ)b'` outright and leaves one
//! complex linear relation between `μa` and `(1−μ)a'`.
//!
//! For fixed `μ` the admissible `a` form an ellipse (the slice of the
//! moment body at fixed `b`). The search walks its boundary looking for the
//! point where `(a', b')` also reaches the boundary of its moment body; each
//! side then needs at most two atoms.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use super::face::{to_complex, CoaxialFace};
use super::moment::{circle_hull_decompose, det_formula};
use super::TensorPair;
use crate::error::{Error, Result};
use crate::measure::{Atom, AtomicMeasure};

const MU_STEPS: usize = 100;
const PHI_STEPS: usize = 360;
const ZOOM_ROUNDS: usize = 2;
const ON_FACE_TOL: f64 = 1e-8;
const ACCEPT_TOL: f64 = 5e-8;
/// How far the split weights may leave `[|B₊|, 1 − |B₋|]` before the target
/// is declared off the facet.
const WEIGHT_SLACK: f64 = 1e-6;

struct Problem<'a> {
    face: &'a CoaxialFace,
    pair: &'a TensorPair,
    target: &'a TensorPair,
    x_perp: Complex64,
    /// `μ·b` and `(1−μ)·b'`.
    bb_plus: Complex64,
    bb_minus: Complex64,
    /// Target U₁ coordinate of `π_{α⊥}`.
    u_target: Complex64,
    scale: f64,
}

impl Problem<'_> {
    fn a_minus(&self, mu: f64, a: Complex64) -> Complex64 {
        (self.u_target - self.x_perp * a * mu) / (self.x_perp.conj() * (1.0 - mu))
    }

    fn a_plus(&self, mu: f64, a_minus: Complex64) -> Complex64 {
        (self.u_target - self.x_perp.conj() * a_minus * (1.0 - mu)) / (self.x_perp * mu)
    }

    fn b_plus(&self, mu: f64) -> Complex64 {
        self.bb_plus / mu
    }

    fn b_minus(&self, mu: f64) -> Complex64 {
        self.bb_minus / (1.0 - mu)
    }

    /// Turns moments on both components into a measure, if it is small and exact.
    fn finalize(&self, mu: f64, plus: Option<(Complex64, Complex64)>, minus: Option<(Complex64, Complex64)>) -> Option<AtomicMeasure> {
        let mut atoms = Vec::new();
        if let Some((a, b)) = plus {
            let (a, b) = project_to_b(a, b);
            for (w, t) in circle_hull_decompose(a, b).ok()? {
                atoms.push(Atom { weight: mu * w, rotation: self.face.rotation(t, false) });
            }
        }
        if let Some((a, b)) = minus {
            let (a, b) = project_to_b(a, b);
            for (w, t) in circle_hull_decompose(a, b).ok()? {
                atoms.push(Atom { weight: (1.0 - mu) * w, rotation: self.face.rotation(t, true) });
            }
        }
        let pair = *self.pair;
        let m = AtomicMeasure::from_computed(atoms, move |r| pair.act(r).to_vec());
        let err = super::evaluate_pair(&m, self.pair).max_abs_diff(self.target);
        (m.len() <= 4 && err <= ACCEPT_TOL * self.scale.max(1.0)).then_some(m)
    }

    fn single_component(&self) -> Option<AtomicMeasure> {
        let eps = 1e-12 * self.scale.max(1.0);
        if self.bb_minus.norm() <= eps {
            let a = self.u_target / self.x_perp;
            if let Some(m) = self.finalize(1.0, Some((a, self.bb_plus)), None) {
                return Some(m);
            }
        }
        if self.bb_plus.norm() <= eps {
            let a = self.u_target / self.x_perp.conj();
            if let Some(m) = self.finalize(0.0, None, Some((a, self.bb_minus))) {
                return Some(m);
            }
        }
        None
    }

    /// One side is a single vertex (`|b| = 1` forces `a = ±e^{i arg(b)/2}`).
    fn vertex_split(&self, lo: f64, hi: f64) -> Option<AtomicMeasure> {
        if lo > 0.0 && lo <= 1.0 - 1e-12 {
            let mu = lo;
            let b = self.b_plus(mu);
            let root = Complex64::from_polar(1.0, b.arg() / 2.0);
            for a in [root, -root] {
                let (am, bm) = (self.a_minus(mu, a), self.b_minus(mu));
                if let Some(m) = self.finalize(mu, Some((a, b)), Some((am, bm))) {
                    return Some(m);
                }
            }
        }
        if (1e-12..1.0).contains(&hi) {
            let mu = hi;
            let bm = self.b_minus(mu);
            let root = Complex64::from_polar(1.0, bm.arg() / 2.0);
            for am in [root, -root] {
                let (a, b) = (self.a_plus(mu, am), self.b_plus(mu));
                if let Some(m) = self.finalize(mu, Some((a, b)), Some((am, bm))) {
                    return Some(m);
                }
            }
        }
        None
    }

    /// Boundary point of the slice `{a : (a, b) ∈ B}`.
    fn ellipse_point(b: Complex64, phi: f64) -> Complex64 {
        let r = b.norm().min(1.0);
        let psi = Complex64::from_polar(1.0, b.arg() / 2.0);
        psi * Complex64::new(((1.0 + r) / 2.0).sqrt() * phi.cos(), ((1.0 - r) / 2.0).sqrt() * phi.sin())
    }

    fn defect(&self, mu: f64, phi: f64) -> f64 {
        let a = Self::ellipse_point(self.b_plus(mu), phi);
        let bm = self.b_minus(mu);
        det_formula(self.a_minus(mu, a), bm)
    }

    /// Scans `φ` at fixed `μ`; returns a measure or the best `(defect, φ)` seen.
    fn scan_mu(&self, mu: f64) -> std::result::Result<AtomicMeasure, (f64, f64)> {
        let step = 2.0 * std::f64::consts::PI / PHI_STEPS as f64;
        let values: Vec<f64> = (0..PHI_STEPS).map(|j| self.defect(mu, j as f64 * step)).collect();
        let best = values
            .iter()
            .enumerate()
            .fold((f64::NEG_INFINITY, 0.0), |acc, (j, d)| if *d > acc.0 { (*d, j as f64 * step) } else { acc });
        for j in 0..PHI_STEPS {
            let (d0, d1) = (values[j], values[(j + 1) % PHI_STEPS]);
            if d0 == 0.0 || d0.signum() != d1.signum() {
                let (mut lo, mut hi) = (j as f64 * step, (j + 1) as f64 * step);
                let lo_sign = d0.signum();
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.defect(mu, mid).signum() == lo_sign {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                // take the feasible end of the bracket
                let phi = if lo_sign >= 0.0 { lo } else { hi };
                let b = self.b_plus(mu);
                let a = Self::ellipse_point(b, phi);
                let (am, bm) = (self.a_minus(mu, a), self.b_minus(mu));
                if let Some(m) = self.finalize(mu, Some((a, b)), Some((am, bm))) {
                    return Ok(m);
                }
            }
        }
        Err(best)
    }

    fn candidate(&self, mu: f64, phi: f64) -> Option<AtomicMeasure> {
        let b = self.b_plus(mu);
        let a = Self::ellipse_point(b, phi);
        self.finalize(mu, Some((a, b)), Some((self.a_minus(mu, a), self.b_minus(mu))))
    }

    /// Sign changes of the defect on a `μ × φ` grid, zooming twice around the
    /// most feasible `μ`. If the defect never changes sign (the target sits
    /// on the relative boundary of the facet, up to round-off), the most
    /// feasible grid point is tried with its moments projected back.
    fn grid_search(&self, lo: f64, hi: f64) -> Option<AtomicMeasure> {
        let (mut lo, mut hi) = (lo, hi);
        let mut best = (f64::NEG_INFINITY, 0.5 * (lo + hi), 0.0);
        for _ in 0..=ZOOM_ROUNDS {
            let width = hi - lo;
            if width <= 0.0 {
                break;
            }
            for i in 0..MU_STEPS {
                let mu = lo + width * (i as f64 + 0.5) / MU_STEPS as f64;
                match self.scan_mu(mu) {
                    Ok(m) => return Some(m),
                    Err((score, phi)) if score > best.0 => best = (score, mu, phi),
                    Err(_) => {}
                }
            }
            let cell = width / MU_STEPS as f64;
            (lo, hi) = ((best.1 - cell).max(lo), (best.1 + cell).min(hi));
        }
        self.candidate(best.1, best.2)
    }
}

/// Pulls `(a, b)` into the moment body: `b` onto the closed unit disk, then
/// `a` radially onto the slice ellipse. A no-op for admissible moments.
fn project_to_b(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let r = b.norm();
    let b = if r > 1.0 { b / r } else { b };
    let r = r.min(1.0);
    let psi = Complex64::from_polar(1.0, b.arg() / 2.0);
    let w = a / psi;
    let (sa, sb) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
    let level = if sb <= 0.0 {
        if w.im != 0.0 {
            return (psi * w.re.clamp(-1.0, 1.0), b);
        }
        w.re * w.re / sa
    } else {
        w.re * w.re / sa + w.im * w.im / sb
    };
    if level > 1.0 {
        (a / level.sqrt(), b)
    } else {
        (a, b)
    }
}

/// Writes `target`, a point of the 6-dimensional facet `face`, as a convex
/// combination of at most four facet vertices.
pub fn facet_decompose(face: &CoaxialFace, pair: &TensorPair, target: &TensorPair) -> Result<AtomicMeasure> {
    if face.dim != 6 {
        return Err(Error::NotAFacet { dim: face.dim });
    }
    let fc = face.coords(pair);
    let local = target.act(&face.frame.transpose());
    let (along, across) = local.split(&face.alpha);
    let (vt, ut, st) = to_complex(along.coords());
    let (vp, up, sp) = to_complex(across.coords());
    let scale = pair.scale();
    let residual = (vt - face.m_alpha).abs().max(ut.norm()).max((vp - fc.v_perp).abs());
    if residual > ON_FACE_TOL * scale.max(1.0) {
        return Err(Error::NotOnFace { residual });
    }

    // s_α(B₊ + B₋) = S_α and s'B₊ + s̄'B₋ = S' as a real 4×4 system
    let s = fc.s_perp;
    let sa = fc.s_alpha;
    let m = Matrix4::new(
        sa, 0.0, sa, 0.0, //
        0.0, sa, 0.0, sa, //
        s.re, -s.im, s.re, s.im, //
        s.im, s.re, -s.im, s.re,
    );
    let sol = m
        .lu()
        .solve(&Vector4::new(st.re, st.im, sp.re, sp.im))
        .ok_or_else(|| Error::SearchFailed("degenerate U₂ system".into()))?;
    let problem = Problem {
        face,
        pair,
        target,
        x_perp: fc.x_perp,
        bb_plus: Complex64::new(sol[0], sol[1]),
        bb_minus: Complex64::new(sol[2], sol[3]),
        u_target: up,
        scale,
    };

    let mut lo = problem.bb_plus.norm();
    let mut hi = 1.0 - problem.bb_minus.norm();
    if lo > hi + WEIGHT_SLACK || hi < -WEIGHT_SLACK || lo > 1.0 + WEIGHT_SLACK {
        return Err(Error::SearchFailed(format!("no admissible split weight: |B+| = {lo}, 1 - |B-| = {hi}")));
    }
    if lo > hi {
        let mid = (0.5 * (lo + hi)).clamp(0.0, 1.0);
        (lo, hi) = (mid, mid);
    }
    let (lo, hi) = (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0));
    problem
        .single_component()
        .or_else(|| problem.vertex_split(lo, hi))
        .or_else(|| problem.grid_search(lo, hi))
        .ok_or_else(|| Error::SearchFailed("no split found on the refined grid".into()))
}
