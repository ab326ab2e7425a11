//! Distance, geodesics and the invariant measure of the quaternionic
//! hyperbolic ball.
//!
//! The distance from the origin is `d(0, z) = log((1 + |z|)/(1 − |z|))` and
//! is transported to arbitrary pairs by the Hua involution. The invariant
//! measure has Lebesgue density `4^(2n) (1 − |z|²)^(−2n−2)` on ℝ⁴ⁿ.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::mobius::HuaInvolution;
use crate::quaternion::{HVector, Quaternion};

pub(crate) fn check_in_ball(z: &HVector) -> Result<()> {
    let norm = z.norm();
    if !(norm < 1.0) {
        return Err(Error::NotInBall { norm });
    }
    Ok(())
}

/// `1 − |z|²` evaluated as `(1 − |z|)(1 + |z|)`.
#[inline]
pub(crate) fn one_minus_norm_sqr(z: &HVector) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

/// `log((1 + m)/(1 − m)) = 2 artanh(m)` for `0 ≤ m < 1`.
#[inline]
pub fn distance_from_radius(m: f64) -> f64 {
    if m < 0.5 {
        2.0 * m.atanh()
    } else {
        // 1 − m is exact here, so the quotient carries a single rounding
        ((1.0 + m) / (1.0 - m)).ln()
    }
}

/// Hyperbolic distance `d_H(p, q) = log((1 + |Φ_q(p)|)/(1 − |Φ_q(p)|))`.
pub fn distance(p: &HVector, q: &HVector) -> Result<f64> {
    p.check_dim(q.dim())?;
    check_in_ball(p)?;
    if p == q {
        return Ok(0.0);
    }
    let m = HuaInvolution::new(q.clone())?.apply_unchecked(p).norm();
    Ok(distance_from_radius(m.min(1.0)))
}

/// `cosh²(d_H(x, y)/2) = |1 − ⟨x,y⟩|² / ((1 − |x|²)(1 − |y|²))`.
pub fn cosh2_half_distance(x: &HVector, y: &HVector) -> Result<f64> {
    x.check_dim(y.dim())?;
    check_in_ball(x)?;
    check_in_ball(y)?;
    Ok(cosh2_half_unchecked(x, y))
}

#[inline]
pub(crate) fn cosh2_half_unchecked(x: &HVector, y: &HVector) -> f64 {
    let num = (Quaternion::ONE - x.inner_unchecked(y)).norm_sqr();
    // the exact value is ≥ 1; rounding near x = y must not push it below
    (num / (one_minus_norm_sqr(x) * one_minus_norm_sqr(y))).max(1.0)
}

/// `log cosh²(t/2)` without overflow for large `|t|`.
pub fn log_cosh2_half(t: f64) -> f64 {
    let a = t.abs();
    a - 2.0 * LN_2 + 2.0 * (-a).exp().ln_1p()
}

/// A unit-speed geodesic `t ↦ Φ_base(−tanh(t/2)·direction)`.
///
/// At `base = 0` this is `tanh(t/2)·direction`; in general `t = 0` maps to
/// `base` and `t` is arc length.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicChart {
    base: HuaInvolution,
    direction: HVector,
}

impl GeodesicChart {
    /// `direction` is normalized; it must be nonzero.
    pub fn new(base: HVector, direction: HVector) -> Result<Self> {
        direction.check_dim(base.dim())?;
        let len = direction.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::DegenerateGeodesic);
        }
        Ok(Self {
            base: HuaInvolution::new(base)?,
            direction: direction.scale(1.0 / len),
        })
    }

    pub fn base(&self) -> &HVector {
        self.base.u()
    }

    pub fn direction(&self) -> &HVector {
        &self.direction
    }

    /// The point at arc length `t`. Infinite `t` lands on the boundary sphere.
    pub fn point(&self, t: f64) -> HVector {
        let origin_point = self.direction.scale(-(t / 2.0).tanh());
        self.base.apply_unchecked(&origin_point)
    }
}

/// The geodesic from `p` through `q`, with `q` at `t = d_H(p, q)`.
pub fn geodesic_between(p: &HVector, q: &HVector) -> Result<GeodesicChart> {
    p.check_dim(q.dim())?;
    check_in_ball(q)?;
    let phi = HuaInvolution::new(p.clone())?;
    let image = phi.apply_unchecked(q);
    if image.norm() == 0.0 {
        return Err(Error::DegenerateGeodesic);
    }
    Ok(GeodesicChart {
        base: phi,
        direction: image.scale(-1.0 / image.norm()),
    })
}

/// The hyperbolic midpoint of `p` and `q`.
pub fn midpoint(p: &HVector, q: &HVector) -> Result<HVector> {
    if p == q {
        check_in_ball(p)?;
        return Ok(p.clone());
    }
    let d = distance(p, q)?;
    Ok(geodesic_between(p, q)?.point(d / 2.0))
}

/// Density of the invariant measure against Lebesgue measure on ℝ⁴ⁿ.
pub fn measure_density(z: &HVector) -> Result<f64> {
    check_in_ball(z)?;
    Ok(density_unchecked(z.dim(), one_minus_norm_sqr(z)))
}

#[inline]
pub(crate) fn density_unchecked(n: usize, one_minus_r2: f64) -> f64 {
    let n = n as i32;
    16f64.powi(n) / one_minus_r2.powi(2 * n + 2)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Volume of a geodesic ball of radius `rho` in ℍⁿ:
/// `(4π)^(2n)/(2n+1)! · sinh^(4n)(ρ/2) · (1 + 2n cosh²(ρ/2))`.
pub fn ball_volume(rho: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("dimension must be at least 1".into()));
    }
    if !(rho >= 0.0) {
        return Err(Error::InvalidConfig(format!("radius must be non-negative, got {rho}")));
    }
    let k = n as i32;
    let half = rho / 2.0;
    let prefactor = (4.0 * PI).powi(2 * k) / factorial(2 * n as u32 + 1);
    Ok(prefactor * half.sinh().powi(4 * k) * (1.0 + 2.0 * n as f64 * half.cosh().powi(2)))
}

/// Euclidean volume of the unit sphere `S^(4n−1)`: `2π^(2n)/(2n−1)!`.
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * PI.powi(2 * n as i32) / factorial(2 * n as u32 - 1)
}

/// The data `(a, r) = (Re⟨v,y⟩, |⟨v,y⟩|)` that determines the energy kernel
/// `f(t) = log cosh²(d_H(tanh(t/2) v, y)/2)` along an origin geodesic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexityProfile {
    a: f64,
    r: f64,
}

impl ConvexityProfile {
    pub fn new(a: f64, r: f64) -> Result<Self> {
        if !(r < 1.0) || !(a.abs() <= r) {
            return Err(Error::InvalidProfile { a, r });
        }
        Ok(Self { a, r })
    }

    /// Profile of the point `y` seen along the unit direction `v`.
    pub fn along(v: &HVector, y: &HVector) -> Result<Self> {
        let w = v.inner(y)?;
        let r = w.norm();
        Self::new(w.re().clamp(-r, r), r)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `P(u) = 1 − 2au + r²u²`.
    pub fn p(&self, u: f64) -> f64 {
        1.0 - 2.0 * self.a * u + self.r * self.r * u * u
    }

    /// `N(u) = (1 + r² − 2a²) − 2a(1 − r²)u + (2a² − r⁴ − r²)u²`.
    pub fn n(&self, u: f64) -> f64 {
        let (a, r2) = (self.a, self.r * self.r);
        (1.0 + r2 - 2.0 * a * a) - 2.0 * a * (1.0 - r2) * u + (2.0 * a * a - r2 * r2 - r2) * u * u
    }

    /// `f''(t) = ((1 − u²)/2) N(u)/P(u)²` with `u = tanh(t/2)`.
    pub fn second_derivative(&self, t: f64) -> f64 {
        let u = (t / 2.0).tanh();
        let sech2 = 1.0 / (t / 2.0).cosh().powi(2);
        let p = self.p(u);
        0.5 * sech2 * self.n(u) / (p * p)
    }
}
