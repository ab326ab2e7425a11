//! Conformal barycenters of point sets and regions in the quaternionic
//! hyperbolic unit ball.
//!
//! Conventions: quaternions are stored as `(w, x, y, z)`, vectors in ℍⁿ are
//! scaled on the right, matrices act on the left, and the Hermitian product
//! is `⟨z, w⟩ = Σ conj(wᵢ) zᵢ`.

// Guards are written `!(x < bound)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barycenter;
pub mod error;
pub mod geometry;
pub mod mobius;
pub mod quaternion;
pub mod random;
pub mod reduce;
pub mod sampling;
pub mod verify;

pub use barycenter::{energy, residual, solve, solve_from, SolverConfig, SolverResult, WeightedPoints};
pub use error::{Error, Result};
pub use geometry::{
    ball_volume, cosh2_half_distance, distance, geodesic_between, measure_density, midpoint, ConvexityProfile,
    GeodesicChart,
};
pub use mobius::{intertwine_factor, HuaInvolution, SpMatrix};
pub use quaternion::{HMatrix, HVector, Quaternion};
pub use sampling::{moment_estimate, region_barycenter, sample_region, Estimate, Region, RegionFile, SampleSet};
pub use verify::{run as run_verification, Report, VerifyConfig};
