use std::path::PathBuf;

use thiserror::Error;

use crate::spectrum::ResonanceFit;

pub type Result<T> = std::result::Result<T, RmxError>;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum RmxError {
    #[error("invalid case definition: {0}")]
    InvalidCase(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix not symmetric: max |A - A^T| = {max_dev:.3e} exceeds {tol:.3e}")]
    Asymmetric { max_dev: f64, tol: f64 },

    #[error("eigensolve did not converge for block {block}")]
    NonConvergence { block: String },

    #[error("energy {energy} Ry lies within {distance:.3e} Ry of pole {pole_index}")]
    PoleProximity {
        energy: f64,
        pole_index: usize,
        distance: f64,
    },

    #[error(
        "mesh point {mesh_index} ({energy} Ry) lies within {distance:.3e} Ry of pole {pole_index}"
    )]
    MeshPoleProximity {
        mesh_index: usize,
        energy: f64,
        pole_index: usize,
        distance: f64,
    },

    #[error(
        "mesh still collides with pole {pole_index} after the half-spacing shift; change n_points"
    )]
    MeshCollision { pole_index: usize },

    #[error("Gaussian kernel under-resolved: fwhm = {fwhm} Ry < 2 x mesh spacing = {spacing} Ry")]
    UnderResolvedKernel { fwhm: f64, spacing: f64 },

    #[error("spectra do not share a common energy mesh")]
    MeshMismatch,

    #[error("fit window holds {maxima} interior maxima; exactly one is required")]
    AmbiguousWindow { maxima: usize },

    #[error(
        "resonance fit did not converge; best iterate: center = {} Ry, gamma = {} Ry",
        best.center, best.gamma
    )]
    FitDiverged { best: Box<ResonanceFit> },

    #[error("{path}: bad file format: {detail}")]
    Format { path: PathBuf, detail: String },

    #[error("{path}: corrupt record framing at {record}")]
    CorruptRecord { path: PathBuf, record: String },

    #[error("{path}: I/O error: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("determinism violation: {0}")]
    DeterminismViolation(String),
}

impl RmxError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RmxError::Io {
            path: path.into(),
            source,
        }
    }
}
