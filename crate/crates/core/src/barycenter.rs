//! The conformal barycenter of a weighted point set.
//!
//! The barycenter `c` is the unique zero of the residual
//! `R(c) = Σ wᵢ Φ_c(qᵢ)` and the unique minimizer of the energy
//! `G(x) = Σ wᵢ log cosh²(d_H(x, qᵢ)/2)`. In the chart recentred by `Φ_c`
//! the energy gradient at the origin is `−2 R(c)`, so the solver moves from
//! `0` toward the chart mean `R(c)/W` and maps the step back through `Φ_c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, cosh2_half_unchecked, distance};
use crate::mobius::{HuaInvolution, SpMatrix};
use crate::quaternion::{HVector, Quaternion};
use crate::reduce;

/// Points closer than this to the unit sphere are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

/// Norm bound for the default starting point.
pub const START_CLIP: f64 = 0.9;

const MAX_HALVINGS: usize = 80;

/// A finite measure `Σ wᵢ δ_{qᵢ}` on the open ball.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPoints {
    points: Vec<HVector>,
    weights: Vec<f64>,
    total: f64,
}

impl WeightedPoints {
    pub fn new(points: Vec<HVector>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyData);
        }
        if weights.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: weights.len(),
            });
        }
        let n = points[0].dim();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for (index, (q, &w)) in points.iter().zip(&weights).enumerate() {
            q.check_dim(n)?;
            let norm = q.norm();
            if !(norm < 1.0 - BOUNDARY_MARGIN) || !q.is_finite() {
                return Err(Error::PointNotInBall { index, norm });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidWeight { index, weight: w });
            }
        }
        let total = reduce::sum(weights.len(), |i| weights[i]);
        Ok(Self { points, weights, total })
    }

    /// Unit weights.
    pub fn uniform(points: Vec<HVector>) -> Result<Self> {
        let weights = vec![1.0; points.len()];
        Self::new(points, weights)
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[HVector] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `W = Σ wᵢ`.
    pub fn total_weight(&self) -> f64 {
        self.total
    }

    /// The pushforward `g_* μ`, same weights.
    pub fn map(&self, g: &SpMatrix) -> Result<Self> {
        let points = self.points.iter().map(|q| g.apply(q)).collect::<Result<Vec<_>>>()?;
        Self::new(points, self.weights.clone())
    }

    pub fn scale_weights(&self, factor: f64) -> Result<Self> {
        Self::new(self.points.clone(), self.weights.iter().map(|w| w * factor).collect())
    }

    fn check_probe(&self, x: &HVector) -> Result<()> {
        x.check_dim(self.dim())?;
        geometry::check_in_ball(x)
    }

    /// The weighted Euclidean mean, pulled inside `|x| ≤ 0.9`.
    pub fn initial_guess(&self) -> HVector {
        let n = self.dim();
        let sums = reduce::sum_vec(self.len(), 4 * n, |i, acc| {
            for (a, v) in acc.iter_mut().zip(self.points[i].to_reals()) {
                *a += self.weights[i] * v;
            }
        });
        let mean = HVector::from_reals(&sums)
            .expect("4n coordinates")
            .scale(1.0 / self.total);
        let r = mean.norm();
        if r > START_CLIP {
            mean.scale(START_CLIP / r)
        } else {
            mean
        }
    }
}

/// `G(x) = Σ wᵢ log( |1 − ⟨x,qᵢ⟩|² / ((1 − |x|²)(1 − |qᵢ|²)) )`.
pub fn energy(data: &WeightedPoints, x: &HVector) -> Result<f64> {
    data.check_probe(x)?;
    Ok(reduce::sum(data.len(), |i| {
        data.weights[i] * cosh2_half_unchecked(x, &data.points[i]).ln()
    }))
}

fn weighted_vector_sum(weights: &[f64], vectors: &[HVector]) -> HVector {
    let n = vectors[0].dim();
    let sums = reduce::sum_vec(vectors.len(), 4 * n, |i, acc| {
        let w = weights[i];
        for (k, q) in vectors[i].iter().enumerate() {
            let a = &mut acc[4 * k..4 * k + 4];
            a[0] += w * q.w;
            a[1] += w * q.x;
            a[2] += w * q.y;
            a[3] += w * q.z;
        }
    });
    HVector::from_reals(&sums).expect("4n coordinates")
}

/// The points seen from `c`: `Φ_c(qᵢ)`.
fn chart_points(data: &WeightedPoints, phi: &HuaInvolution) -> Vec<HVector> {
    data.points.iter().map(|q| phi.apply_unchecked(q)).collect()
}

/// `R(c) = Σ wᵢ Φ_c(qᵢ)`.
pub fn residual(data: &WeightedPoints, c: &HVector) -> Result<HVector> {
    data.check_probe(c)?;
    let phi = HuaInvolution::new(c.clone())?;
    Ok(weighted_vector_sum(&data.weights, &chart_points(data, &phi)))
}

/// `G(Φ_c(x)) − G(c)`, evaluated in the chart at `c` as
/// `Σ wᵢ [log|1 − ⟨x,yᵢ⟩|² − log(1 − |x|²)]` with `yᵢ = Φ_c(qᵢ)`.
///
/// Both logarithms are formed with `ln_1p`, so the change keeps full relative
/// precision for small steps where a difference of two energies would not.
fn energy_change(weights: &[f64], chart: &[HVector], x: &HVector) -> f64 {
    let x2 = x.norm_sqr();
    let radial = (-x2).ln_1p();
    reduce::sum(chart.len(), |i| {
        let w = x.inner_unchecked(&chart[i]);
        weights[i] * ((w.norm_sqr() - 2.0 * w.re()).ln_1p() - radial)
    })
}

/// Largest coordinate gap between a 5-point finite-difference gradient of
/// `G_c = G ∘ Φ_c` at the origin and `−2 R(c)`.
pub fn gradient_check(data: &WeightedPoints, c: &HVector, h: f64) -> Result<f64> {
    let r = residual(data, c)?.to_reals();
    let phi = HuaInvolution::new(c.clone())?;
    let n = data.dim();
    let g_c = |x: &[f64]| -> f64 {
        let p = phi.apply_unchecked(&HVector::from_reals(x).expect("4n coordinates"));
        reduce::sum(data.len(), |i| {
            data.weights[i] * cosh2_half_unchecked(&p, &data.points[i]).ln()
        })
    };
    let mut worst: f64 = 0.0;
    let mut x = vec![0.0; 4 * n];
    for k in 0..4 * n {
        let mut at = |t: f64| {
            x[k] = t;
            let v = g_c(&x);
            x[k] = 0.0;
            v
        };
        let fd = (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
        worst = worst.max((fd + 2.0 * r[k]).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Chart step `η ∈ (0, 1]`.
    pub step: f64,
    pub max_iters: usize,
    /// Residual norm per unit weight at which to stop.
    pub tol: f64,
    /// Halve the step until the energy strictly decreases.
    pub line_search: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step: 1.0,
            max_iters: 500,
            tol: 1e-12,
            line_search: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "step must lie in (0, 1], got {}",
                self.step
            )));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub barycenter: HVector,
    /// `|R(c)|` at the returned point (not normalized by weight).
    pub residual_norm: f64,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `G(c_{k+1}) − G(c_k)` for every accepted step.
    #[serde(skip)]
    pub energy_changes: Vec<f64>,
}

impl SolverResult {
    /// Turns `converged == false` into [`Error::NotConverged`].
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                residual_norm: self.residual_norm,
            })
        }
    }
}

/// Solve from [`WeightedPoints::initial_guess`].
pub fn solve(data: &WeightedPoints, config: &SolverConfig) -> Result<SolverResult> {
    solve_from(data, config, data.initial_guess())
}

/// Recentred chart iteration `c ← Φ_c(η R(c)/W)` from an explicit start.
pub fn solve_from(data: &WeightedPoints, config: &SolverConfig, start: HVector) -> Result<SolverResult> {
    config.validate()?;
    data.check_probe(&start)?;
    let total = data.total_weight();
    let threshold = config.tol * total;

    let mut c = start;
    let mut energy_changes = Vec::new();
    let mut iterations = 0;
    let (residual_norm, converged) = loop {
        let phi = HuaInvolution::new(c.clone())?;
        let chart = chart_points(data, &phi);
        let r = weighted_vector_sum(&data.weights, &chart);
        let rn = r.norm();
        if rn <= threshold {
            break (rn, true);
        }
        if iterations >= config.max_iters {
            break (rn, false);
        }
        let mean = r.scale(1.0 / total);
        let mut eta = config.step;
        let step = if config.line_search {
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let x = mean.scale(eta);
                let dg = energy_change(&data.weights, &chart, &x);
                if dg < 0.0 {
                    energy_changes.push(dg);
                    accepted = Some(x);
                    break;
                }
                eta *= 0.5;
            }
            accepted
        } else {
            Some(mean.scale(eta))
        };
        let Some(x) = step else {
            // no representable decrease left along the chart direction
            break (rn, false);
        };
        c = phi.apply_unchecked(&x);
        iterations += 1;
    };

    let energy = energy(data, &c)?;
    Ok(SolverResult {
        barycenter: c,
        residual_norm,
        energy,
        iterations,
        converged,
        energy_changes,
    })
}

/// Residual of the two-point scalar relation
/// `|w_p tanh(d_H(c,p)/2) − w_q tanh(d_H(c,q)/2)|` at the solved barycenter.
///
/// Fails with [`Error::OffGeodesic`] if the barycenter is farther than
/// `1e-10` from the geodesic through `p` and `q`.
pub fn two_point_tanh_gap(p: &HVector, w_p: f64, q: &HVector, w_q: f64, config: &SolverConfig) -> Result<f64> {
    let data = WeightedPoints::new(vec![p.clone(), q.clone()], vec![w_p, w_q])?;
    let chart = geometry::geodesic_between(p, q)?;
    let c = solve(&data, config)?.ensure_converged()?.barycenter;
    let dp = distance(&c, p)?;
    let dq = distance(&c, q)?;
    let gap = (&chart.point(dp) - &c).norm();
    if !(gap <= 1e-10) {
        return Err(Error::OffGeodesic { gap });
    }
    Ok((w_p * (dp / 2.0).tanh() - w_q * (dq / 2.0).tanh()).abs())
}

/// `d_H(c(g·μ), g·c(μ))`.
pub fn pushforward_invariance(data: &WeightedPoints, g: &SpMatrix, config: &SolverConfig) -> Result<f64> {
    let c = solve(data, config)?.ensure_converged()?.barycenter;
    let moved = data.map(g)?;
    let c_moved = solve(&moved, config)?.ensure_converged()?.barycenter;
    distance(&c_moved, &g.apply(&c)?)
}

/// Convenience for real-axis data in ℍ¹.
pub fn real_points(values: &[(f64, f64)]) -> Result<WeightedPoints> {
    WeightedPoints::new(
        values
            .iter()
            .map(|&(x, _)| HVector::new(vec![Quaternion::real(x)]))
            .collect(),
        values.iter().map(|&(_, w)| w).collect(),
    )
}
