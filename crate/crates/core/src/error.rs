use crate::C64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid damping: {0}")]
    InvalidDamping(String),

    #[error("laplacian not symmetric (max relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("laplacian not negative semidefinite (largest eigenvalue {max_eigenvalue:.3e})")]
    NotNegativeSemidefinite { max_eigenvalue: f64 },

    #[error("matrix market input, line {line}: {message}")]
    MatrixMarket { line: usize, message: String },

    #[error("dense solver cap exceeded: dimension {dim} > {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("eigensolver did not converge ({stage}, dimension {dim})")]
    NoConvergence { stage: &'static str, dim: usize },

    #[error("singular system at tau = {tau} (reciprocal condition {rcond:.3e})")]
    Singular { tau: C64, rcond: f64 },

    #[error("fundamental-domain reduction exceeded {cap} generator applications for frame {frame:?}")]
    ReductionCap { cap: usize, frame: [f64; 4] },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("adjacency matrix is reducible: states {unreachable:?} are not mutually reachable from state 0")]
    Reducible { unreachable: Vec<usize> },

    #[error("near-defective spectrum (eigenvector condition {condition:.3e}); use ode evolution")]
    NearDefective { condition: f64 },

    #[error("contour around {center} encloses rank {rank:.6} but the cluster has {expected} eigenvalues")]
    Enclosure { center: C64, expected: usize, rank: f64 },

    #[error("eigenvalue {tau} lies within {distance:.3e} of the region boundary; nudge the region")]
    OnBoundary { tau: C64, distance: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("non-positive energy {energy:.3e} at t = {t} inside the fit window")]
    NonPositiveEnergy { t: f64, energy: f64 },

    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),

    #[error("energy increased by {relative:.3e} E(0) at t = {t}")]
    EnergyIncrease { t: f64, relative: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
