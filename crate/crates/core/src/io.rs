//! File formats: JSON for tensors, rotations, measures and ensembles; CSV for
//! observations and face scans.
//!
//! Floats are written with 17 significant digits so that files round-trip
//! bit for bit.

use std::io::{Read, Write};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, AtomicMeasure};
use crate::pair::{FaceScanRow, TensorPair};
use crate::rdc::{DipoleObservation, EnsembleSpec, Generator};
use crate::rotation::Rotation;
use crate::tensor::AnisoTensor;

type Rows = [[f64; 3]; 3];

fn rows(m: &Matrix3<f64>) -> Rows {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[(i, j)]))
}

fn matrix(r: &Rows) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| r[i][j])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TensorJson {
    Coords { coords: [f64; 5] },
    Matrix { matrix: Rows },
}

impl TensorJson {
    pub fn to_tensor(&self) -> Result<AnisoTensor> {
        match self {
            TensorJson::Coords { coords } => Ok(AnisoTensor::from_coords(*coords)),
            TensorJson::Matrix { matrix: m } => AnisoTensor::from_matrix(&matrix(m)),
        }
    }
}

impl From<&AnisoTensor> for TensorJson {
    fn from(t: &AnisoTensor) -> Self {
        TensorJson::Coords { coords: t.coords() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationJson {
    pub matrix: Rows,
}

impl RotationJson {
    pub fn to_rotation(&self) -> Result<Rotation> {
        Rotation::from_matrix(matrix(&self.matrix))
    }
}

impl From<&Rotation> for RotationJson {
    fn from(r: &Rotation) -> Self {
        RotationJson { matrix: rows(r.matrix()) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomJson {
    pub p: f64,
    #[serde(rename = "R")]
    pub r: Rows,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureJson {
    pub atoms: Vec<AtomJson>,
}

impl MeasureJson {
    pub fn to_measure(&self) -> Result<AtomicMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok(Atom { weight: a.p, rotation: Rotation::from_matrix(matrix(&a.r))? }))
            .collect::<Result<Vec<_>>>()?;
        AtomicMeasure::new(atoms)
    }
}

impl From<&AtomicMeasure> for MeasureJson {
    fn from(m: &AtomicMeasure) -> Self {
        MeasureJson { atoms: m.atoms().iter().map(|a| AtomJson { p: a.weight, r: rows(a.rotation.matrix()) }).collect() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairJson {
    pub chi1: TensorJson,
    pub chi2: TensorJson,
}

impl PairJson {
    pub fn to_pair(&self) -> Result<TensorPair> {
        Ok(TensorPair::new(self.chi1.to_tensor()?, self.chi2.to_tensor()?))
    }
}

impl From<&TensorPair> for PairJson {
    fn from(p: &TensorPair) -> Self {
        PairJson { chi1: (&p.chi1).into(), chi2: (&p.chi2).into() }
    }
}

/// A measure together with either `chi` or `chi1`/`chi2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub atoms: Vec<AtomJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<TensorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi1: Option<TensorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi2: Option<TensorJson>,
}

impl EnsembleJson {
    pub fn to_ensemble(&self) -> Result<EnsembleSpec> {
        let measure = MeasureJson { atoms: self.atoms.clone() }.to_measure()?;
        let generator = match (&self.chi, &self.chi1, &self.chi2) {
            (Some(c), None, None) => Generator::Single(c.to_tensor()?),
            (None, Some(a), Some(b)) => Generator::Pair(TensorPair::new(a.to_tensor()?, b.to_tensor()?)),
            _ => return Err(Error::InvalidArgument("ensemble needs either `chi` or both `chi1` and `chi2`".into())),
        };
        Ok(EnsembleSpec { measure, generator })
    }
}

impl From<&EnsembleSpec> for EnsembleJson {
    fn from(e: &EnsembleSpec) -> Self {
        let atoms = MeasureJson::from(&e.measure).atoms;
        match &e.generator {
            Generator::Single(c) => EnsembleJson { atoms, chi: Some(c.into()), chi1: None, chi2: None },
            Generator::Pair(p) => EnsembleJson { atoms, chi: None, chi1: Some((&p.chi1).into()), chi2: Some((&p.chi2).into()) },
        }
    }
}

/// serde_json formatter printing every float as `{:.16e}` (non-finite as null).
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub fn from_json_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(s)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct ObservationRecord {
    rx: f64,
    ry: f64,
    rz: f64,
    delta: f64,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
}

/// Reads `rx,ry,rz,delta[,C]`; a missing `C` column means `C = 1`.
pub fn read_observations<R: Read>(reader: R) -> Result<Vec<DipoleObservation>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    rdr.deserialize::<ObservationRecord>()
        .map(|rec| {
            let rec = rec?;
            Ok(DipoleObservation { r: Vector3::new(rec.rx, rec.ry, rec.rz), delta: rec.delta, c: rec.c.unwrap_or(1.0) })
        })
        .collect()
}

pub fn write_observations<W: Write>(writer: W, obs: &[DipoleObservation]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["rx", "ry", "rz", "delta", "C"])?;
    for o in obs {
        w.write_record([o.r.x, o.r.y, o.r.z, o.delta, o.c].map(|x| format!("{x:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_face_scan<W: Write>(writer: W, rows: &[FaceScanRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["alpha_angle", "d1", "d2", "dim", "M_alpha"])?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.alpha_angle),
            r.d1.to_string(),
            r.d2.to_string(),
            r.dim.to_string(),
            format!("{:.16e}", r.m_alpha),
        ])?;
    }
    w.flush()?;
    Ok(())
}
