use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("axis is not a unit vector (norm {norm})")]
    NonUnitAxis { norm: f64 },

    #[error("direction alpha is not on the unit circle (norm {norm})")]
    NonUnitAlpha { norm: f64 },

    #[error("the zero tensor has no orbit to take the hull of")]
    ZeroTensor,

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not trace-free (trace {trace:e})")]
    NotTraceFree { trace: f64 },

    #[error("matrix is not a rotation (orthogonality error {orthogonality:e}, det {det})")]
    NotRotation { orthogonality: f64, det: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("target lies outside the hull (eigenvalue violation {violation:e})")]
    OutsideHull { violation: f64 },

    #[error("point ({0}, {1}, {2}) lies outside the unit cube")]
    OutsideCube(f64, f64, f64),

    #[error("could not invert the invariant map at (alpha, det) = ({alpha}, {det})")]
    InversionFailed { alpha: f64, det: f64 },

    #[error("moment matrix is not positive semi-definite: (a, b) lies outside B")]
    OutsideB,

    #[error("target is not on the coaxial face (residual {residual:e})")]
    NotOnFace { residual: f64 },

    #[error("coaxial face has dimension {dim}, a 6-dimensional facet is required")]
    NotAFacet { dim: usize },

    #[error("facet decomposition search failed: {0}")]
    SearchFailed(String),

    #[error("under-determined least squares: {observations} observations, design rank {rank}")]
    UnderDetermined { observations: usize, rank: usize },

    #[error("necessary membership fails at alpha index {index} (violation {violation:e})")]
    NecessaryConditionFails { index: usize, violation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors about the mathematics of the input rather than about
    /// reading or parsing it.
    pub fn is_domain(&self) -> bool {
        !matches!(
            self,
            Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
                | Error::NotSymmetric { .. }
                | Error::NotTraceFree { .. }
                | Error::NotRotation { .. }
                | Error::InvalidMeasure(_)
        )
    }
}
