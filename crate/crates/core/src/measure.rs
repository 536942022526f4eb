//! Finite convex combinations of rotations.

use crate::error::{Error, Result};
use crate::rotation::Rotation;
use crate::tensor::AnisoTensor;

pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub rotation: Rotation,
}

/// `χ̄ = Σ pⱼ Rⱼ.χ` with `pⱼ ≥ 0`, `Σ pⱼ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if let Some(a) = atoms.iter().find(|a| !(a.weight >= 0.0 && a.weight <= 1.0)) {
            return Err(Error::InvalidMeasure(format!("weight {} not in [0, 1]", a.weight)));
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(Self { atoms })
    }

    pub fn point_mass(rotation: Rotation) -> Self {
        Self { atoms: vec![Atom { weight: 1.0, rotation }] }
    }

    /// Builds a measure from computed atoms: negative round-off is clamped,
    /// negligible atoms dropped, atoms with the same image (by `key`) merged,
    /// and the weights renormalized.
    pub(crate) fn from_computed<F>(raw: Vec<Atom>, key: F) -> Self
    where
        F: Fn(&Rotation) -> Vec<f64>,
    {
        let mut kept: Vec<(Atom, Vec<f64>)> = Vec::new();
        for atom in raw {
            let w = atom.weight.max(0.0);
            if w <= 1e-14 {
                continue;
            }
            let k = key(&atom.rotation);
            let scale = k.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            let dup = kept.iter_mut().find(|(_, kk)| {
                kk.iter().zip(&k).all(|(a, b)| (a - b).abs() <= 1e-11 * scale)
            });
            match dup {
                Some((a, _)) => a.weight += w,
                None => kept.push((Atom { weight: w, rotation: atom.rotation }, k)),
            }
        }
        let total: f64 = kept.iter().map(|(a, _)| a.weight).sum();
        let atoms = kept
            .into_iter()
            .map(|(mut a, _)| {
                a.weight /= total;
                a
            })
            .collect();
        Self { atoms }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `Σ pⱼ Rⱼ.χ`.
    pub fn evaluate(&self, chi: &AnisoTensor) -> AnisoTensor {
        self.atoms
            .iter()
            .fold(AnisoTensor::ZERO, |acc, a| acc + a.rotation.act(chi) * a.weight)
    }

    /// Applies `g` on the left of every rotation: the measure pushed forward by `g`.
    pub fn left_compose(&self, g: &Rotation) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| Atom { weight: a.weight, rotation: g * &a.rotation }).collect(),
        }
    }

    /// Scales all weights by `s` (used when splicing sub-decompositions).
    pub(crate) fn scaled_atoms(&self, s: f64) -> impl Iterator<Item = Atom> + '_ {
        self.atoms.iter().map(move |a| Atom { weight: a.weight * s, rotation: a.rotation })
    }
}
