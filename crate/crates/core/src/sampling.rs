//! Monte-Carlo discretization of regions under the invariant measure.
//!
//! Proposals are drawn uniformly from a bounding box of the region, kept when
//! they fall inside the region, and weighted by `λ_H(q)·V_box/N`, so that sums
//! over the kept points estimate integrals against the invariant measure.
//! Each chunk of [`SAMPLE_CHUNK`] proposals draws from its own ChaCha stream
//! keyed by `(seed, chunk index)`, which makes the output independent of how
//! chunks are scheduled across threads.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::barycenter::{self, SolverConfig, SolverResult, WeightedPoints, BOUNDARY_MARGIN};
use crate::error::{Error, Result};
use crate::geometry::{self, density_unchecked, distance, distance_from_radius};
use crate::mobius::{boundary_factor, HuaInvolution};
use crate::quaternion::HVector;

pub const SAMPLE_CHUNK: u64 = 4096;

type Membership = Arc<dyn Fn(&HVector) -> bool + Send + Sync>;

/// A measurable subset of the ball.
#[derive(Clone)]
pub enum Region {
    /// `{q : d_H(center, q) < radius}`.
    GeodesicBall { center: HVector, radius: f64 },
    /// `{q : |q − center| < radius}`, required to sit inside the open ball.
    EuclideanBall { center: HVector, radius: f64 },
    /// An arbitrary membership test with an explicit real bounding box.
    Indicator {
        dimension: usize,
        lower: Vec<f64>,
        upper: Vec<f64>,
        contains: Membership,
    },
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GeodesicBall { center, radius } => f
                .debug_struct("GeodesicBall")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            Self::EuclideanBall { center, radius } => f
                .debug_struct("EuclideanBall")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            Self::Indicator { dimension, .. } => f
                .debug_struct("Indicator")
                .field("dimension", dimension)
                .finish_non_exhaustive(),
        }
    }
}

impl Region {
    pub fn geodesic_ball(center: HVector, radius: f64) -> Result<Self> {
        let r = Self::GeodesicBall { center, radius };
        r.validate()?;
        Ok(r)
    }

    pub fn euclidean_ball(center: HVector, radius: f64) -> Result<Self> {
        let r = Self::EuclideanBall { center, radius };
        r.validate()?;
        Ok(r)
    }

    /// Membership test over the whole cube `[−1, 1]^(4n)`.
    pub fn indicator<F>(dimension: usize, contains: F) -> Self
    where
        F: Fn(&HVector) -> bool + Send + Sync + 'static,
    {
        Self::Indicator {
            dimension,
            lower: vec![-1.0; 4 * dimension],
            upper: vec![1.0; 4 * dimension],
            contains: Arc::new(contains),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::GeodesicBall { center, .. } | Self::EuclideanBall { center, .. } => center.dim(),
            Self::Indicator { dimension, .. } => *dimension,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::GeodesicBall { center, radius } => {
                if center.dim() == 0 {
                    return Err(Error::InvalidRegion("empty center".into()));
                }
                geometry::check_in_ball(center)?;
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidRegion(format!(
                        "geodesic radius must be positive and finite, got {radius}"
                    )));
                }
            }
            Self::EuclideanBall { center, radius } => {
                if center.dim() == 0 {
                    return Err(Error::InvalidRegion("empty center".into()));
                }
                if !(*radius > 0.0) {
                    return Err(Error::InvalidRegion(format!("radius must be positive, got {radius}")));
                }
                if !(center.norm() + radius < 1.0) {
                    return Err(Error::InvalidRegion(
                        "euclidean ball must lie inside the open unit ball".into(),
                    ));
                }
            }
            Self::Indicator {
                dimension,
                lower,
                upper,
                ..
            } => {
                if *dimension == 0 || lower.len() != 4 * dimension || upper.len() != 4 * dimension {
                    return Err(Error::InvalidRegion("bounding box must have 4n coordinates".into()));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
                    return Err(Error::InvalidRegion("bounding box has an empty side".into()));
                }
            }
        }
        Ok(())
    }

    /// Real bounding box `(lower, upper)`, clipped to `[−1, 1]^(4n)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let around = |center: &HVector, half: f64| {
            let c = center.to_reals();
            (
                c.iter().map(|x| (x - half).max(-1.0)).collect(),
                c.iter().map(|x| (x + half).min(1.0)).collect(),
            )
        };
        match self {
            // B(c, R) = Φ_c(B(0, R)) and |Φ_c(x) − c| ≤ s|x|/(1 − |c||x|)
            Self::GeodesicBall { center, radius } => {
                let rho = (radius / 2.0).tanh();
                let half = boundary_factor(center) * rho / (1.0 - center.norm() * rho);
                around(center, half)
            }
            Self::EuclideanBall { center, radius } => around(center, *radius),
            Self::Indicator { lower, upper, .. } => (lower.clone(), upper.clone()),
        }
    }

    pub fn contains(&self, q: &HVector) -> bool {
        match self {
            Self::GeodesicBall { center, radius } => distance(q, center).map(|d| d < *radius).unwrap_or(false),
            Self::EuclideanBall { center, radius } => q.dist_euclid(center) < *radius,
            Self::Indicator { contains, .. } => contains(q),
        }
    }
}

/// JSON form: `{"kind": "geodesic_ball"|"euclidean_ball", "center": [[w,x,y,z],..], "radius": r, "dimension": n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionFile {
    pub kind: RegionKind,
    pub center: HVector,
    pub radius: f64,
    pub dimension: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    GeodesicBall,
    EuclideanBall,
}

impl TryFrom<RegionFile> for Region {
    type Error = Error;

    fn try_from(f: RegionFile) -> Result<Self> {
        f.center.check_dim(f.dimension)?;
        match f.kind {
            RegionKind::GeodesicBall => Region::geodesic_ball(f.center, f.radius),
            RegionKind::EuclideanBall => Region::euclidean_ball(f.center, f.radius),
        }
    }
}

/// A Monte-Carlo value with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

impl Estimate {
    fn from_sums(sum: f64, sum_sq: f64, n: u64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            standard_error: (var / nf).sqrt(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampleSet {
    pub samples: WeightedPoints,
    pub seed: u64,
    pub count_requested: u64,
    pub count_accepted: u64,
    /// Estimate of `Λ_H(D)`.
    pub total_mass: Estimate,
    /// Estimate of `∫_D d_H(0, y) dΛ(y)`.
    pub moment: Estimate,
    pub box_volume: f64,
}

struct Chunk {
    points: Vec<HVector>,
    values: Vec<f64>,
    sums: [f64; 4],
}

fn sample_chunk(
    region: &Region,
    lower: &[f64],
    upper: &[f64],
    box_volume: f64,
    seed: u64,
    index: u64,
    len: u64,
) -> Chunk {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = region.dim();
    let mut coords = vec![0.0; 4 * n];
    let mut out = Chunk {
        points: Vec::new(),
        values: Vec::new(),
        sums: [0.0; 4],
    };
    for _ in 0..len {
        for (k, x) in coords.iter_mut().enumerate() {
            *x = rng.gen_range(lower[k]..upper[k]);
        }
        let q = HVector::from_reals(&coords).expect("4n coordinates");
        let r = q.norm();
        if !(r < 1.0 - BOUNDARY_MARGIN) || !region.contains(&q) {
            continue;
        }
        let f = density_unchecked(n, (1.0 - r) * (1.0 + r)) * box_volume;
        let m = f * distance_from_radius(r);
        out.sums[0] += f;
        out.sums[1] += f * f;
        out.sums[2] += m;
        out.sums[3] += m * m;
        out.points.push(q);
        out.values.push(f);
    }
    out
}

/// Importance-sampled discretization of `region` with `count` proposals.
pub fn sample_region(region: &Region, count: u64, seed: u64) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1".into()));
    }
    region.validate()?;
    let (lower, upper) = region.bounding_box();
    let box_volume: f64 = lower.iter().zip(&upper).map(|(l, u)| u - l).product();
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<Chunk> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            sample_chunk(region, &lower, &upper, box_volume, seed, c, len)
        })
        .collect();

    let mut sums = [0.0; 4];
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for part in parts {
        for (s, p) in sums.iter_mut().zip(part.sums) {
            *s += p;
        }
        points.extend(part.points);
        weights.extend(part.values.into_iter().map(|f| f / count as f64));
    }
    if points.is_empty() {
        return Err(Error::EmptyRegion { proposals: count });
    }
    let accepted = points.len() as u64;
    Ok(SampleSet {
        samples: WeightedPoints::new(points, weights)?,
        seed,
        count_requested: count,
        count_accepted: accepted,
        total_mass: Estimate::from_sums(sums[0], sums[1], count),
        moment: Estimate::from_sums(sums[2], sums[3], count),
        box_volume,
    })
}

/// Estimate of the first moment `∫_D d_H(0, y) dΛ(y)`.
pub fn moment_estimate(region: &Region, count: u64, seed: u64) -> Result<Estimate> {
    Ok(sample_region(region, count, seed)?.moment)
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionResult {
    #[serde(flatten)]
    pub solver: SolverResult,
    pub total_mass_estimate: f64,
    /// Standard error of the mass estimate.
    pub mass_standard_error: f64,
    pub moment_estimate: f64,
    /// Crude error bar on the barycenter: `SE(R(c))/W`.
    pub standard_error: f64,
    pub seed: u64,
    pub samples: u64,
    pub accepted: u64,
}

impl SampleSet {
    /// Standard error of `R(c) = Σ wⱼ Φ_c(qⱼ)` as an estimate of
    /// `∫_D Φ_c dΛ`, as the Euclidean norm of the coordinatewise errors.
    pub fn residual_standard_error(&self, c: &HVector) -> Result<f64> {
        let phi = HuaInvolution::new(c.clone())?;
        let n = self.count_requested as f64;
        let width = 4 * self.samples.dim();
        let mut sum = vec![0.0; width];
        let mut sum_sq = vec![0.0; width];
        for (q, w) in self.samples.points().iter().zip(self.samples.weights()) {
            let f = w * n;
            for (k, v) in phi.apply_unchecked(q).to_reals().into_iter().enumerate() {
                sum[k] += f * v;
                sum_sq[k] += (f * v) * (f * v);
            }
        }
        let var_total: f64 = sum
            .iter()
            .zip(&sum_sq)
            .map(|(&s, &s2)| Estimate::from_sums(s, s2, self.count_requested).standard_error.powi(2))
            .sum();
        Ok(var_total.sqrt())
    }
}

/// Sample `region`, then solve for the barycenter of the sampled measure.
pub fn region_barycenter(region: &Region, count: u64, seed: u64, config: &SolverConfig) -> Result<RegionResult> {
    let set = sample_region(region, count, seed)?;
    let solver = barycenter::solve(&set.samples, config)?;
    let se = set.residual_standard_error(&solver.barycenter)? / set.samples.total_weight();
    Ok(RegionResult {
        solver,
        total_mass_estimate: set.total_mass.value,
        mass_standard_error: set.total_mass.standard_error,
        moment_estimate: set.moment.value,
        standard_error: se,
        seed,
        samples: count,
        accepted: set.count_accepted,
    })
}
