//! Convex hulls of SO(3)-orbits of anisotropic tensors.
//!
//! The crate covers one tensor (`single`), pairs of tensors (`pair`) and the
//! dipolar-coupling data path (`rdc`). Every operation is a pure function on
//! immutable values.

pub mod error;
pub mod io;
pub mod isotypic;
pub mod linalg;
pub mod measure;
pub mod pair;
pub mod rdc;
pub mod rotation;
pub mod sampling;
pub mod single;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use isotypic::{isotypical_split, orbit_dimension, IsotypicalSplit};
pub use measure::{Atom, AtomicMeasure};
pub use rotation::{act, coaxial_rotation, Rotation};
pub use spectral::{spectral, SpectralData};
pub use tensor::{l_e, AnisoTensor};

pub use nalgebra::{Matrix3, Vector2, Vector3};
pub use num_complex::Complex64;
