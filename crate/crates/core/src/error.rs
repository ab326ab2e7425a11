use thiserror::Error;

/// Failures raised by the geometry, solver and sampling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DivisionByZero: quaternion modulus {modulus:e} is below the inversion threshold")]
    DivisionByZero { modulus: f64 },

    #[error("DimensionMismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("NotInBall: point has norm {norm} (must be < 1)")]
    NotInBall { norm: f64 },

    #[error("Singular: homogeneous coordinate vanished while projecting")]
    Singular,

    #[error("NotSymplectic: M*JM - J has max entry {residual:e} (tolerance {tolerance:e})")]
    NotSymplectic { residual: f64, tolerance: f64 },

    #[error("NotBlockDiagonal: off-diagonal blocks reach {residual:e} (tolerance {tolerance:e})")]
    NotBlockDiagonal { residual: f64, tolerance: f64 },

    #[error("DegenerateGeodesic: endpoints coincide")]
    DegenerateGeodesic,

    #[error("InvalidProfile: need |a| <= r < 1, got a = {a}, r = {r}")]
    InvalidProfile { a: f64, r: f64 },

    #[error("EmptyData")]
    EmptyData,

    #[error("InvalidWeight: weight at index {index} is {weight} (must be positive and finite)")]
    InvalidWeight { index: usize, weight: f64 },

    #[error("PointNotInBall: point at index {index} has norm {norm} (must be < 1 - 1e-12)")]
    PointNotInBall { index: usize, norm: f64 },

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("InvalidRegion: {0}")]
    InvalidRegion(String),

    #[error("EmptyRegion: no proposal out of {proposals} landed in the region")]
    EmptyRegion { proposals: u64 },

    #[error("NotConverged: residual {residual_norm:e} after {iterations} iterations")]
    NotConverged { iterations: usize, residual_norm: f64 },

    #[error("OffGeodesic: barycenter is {gap:e} away from the geodesic through the two points")]
    OffGeodesic { gap: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
