//! Quaternion arithmetic and the right ℍ-module structure on ℍⁿ.
//!
//! Storage order is always `(w, x, y, z)`, the coefficients of `1, i, j, k`.
//! The same order is used on the wire: a quaternion serializes as the JSON
//! array `[w, x, y, z]` and a vector in ℍⁿ as an array of `n` such arrays.
//!
//! Vectors are scaled by quaternions on the **right** and matrices act on the
//! **left**, so `M (z λ) = (M z) λ`. The Hermitian product is
//! `⟨z, w⟩ = w* z = Σ conj(wᵢ) zᵢ`, in that factor order.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Moduli below this are treated as an algebraic zero by [`Quaternion::inv`].
pub const INVERSION_EPSILON: f64 = 1e-300;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for Quaternion {
    fn from([w, x, y, z]: [f64; 4]) -> Self {
        Self { w, x, y, z }
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        self.into()
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Modulus, computed with scaling so that tiny and huge inputs neither
    /// underflow nor overflow.
    pub fn norm(self) -> f64 {
        let m = self.w.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs());
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        (self / m).norm_sqr().sqrt() * m
    }

    /// `q⁻¹ = conj(q) / |q|²`; two-sided.
    pub fn inv(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 > 1e-280 && n2.is_finite() {
            return Ok(self.conj() / n2);
        }
        let modulus = self.norm();
        if !(modulus >= INVERSION_EPSILON) {
            return Err(Error::DivisionByZero { modulus });
        }
        Ok(self.conj() / modulus / modulus)
    }

    /// Real part of `q`.
    #[inline]
    pub fn re(self) -> f64 {
        self.w
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Hamilton product; `i·j = k`, `j·i = −k`.
impl Mul for Quaternion {
    type Output = Self;

    #[inline]
    fn mul(self, q: Self) -> Self {
        let p = self;
        Self::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;

    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;

    #[inline]
    fn div(self, s: f64) -> Self {
        Self::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl Add for Quaternion {
    type Output = Self;

    #[inline]
    fn add(self, q: Self) -> Self {
        Self::new(self.w + q.w, self.x + q.x, self.y + q.y, self.z + q.z)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, q: Self) {
        *self = *self + q;
    }
}

impl Sub for Quaternion {
    type Output = Self;

    #[inline]
    fn sub(self, q: Self) -> Self {
        Self::new(self.w - q.w, self.x - q.x, self.y - q.y, self.z - q.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

/// An element of ℍⁿ, viewed as a right ℍ-module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HVector(Vec<Quaternion>);

impl HVector {
    pub fn new(components: Vec<Quaternion>) -> Self {
        Self(components)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Quaternion::ZERO; n])
    }

    /// The real unit vector along quaternionic coordinate `k`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = Quaternion::ONE;
        v
    }

    /// A vector whose coordinates are the given real numbers.
    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&v| Quaternion::real(v)).collect())
    }

    /// Inverse of [`HVector::to_reals`]; the length must be a multiple of 4.
    pub fn from_reals(values: &[f64]) -> Result<Self> {
        if values.is_empty() || !values.len().is_multiple_of(4) {
            return Err(Error::DimensionMismatch {
                expected: 4 * (values.len() / 4).max(1),
                found: values.len(),
            });
        }
        Ok(Self(
            values
                .chunks_exact(4)
                .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
                .collect(),
        ))
    }

    /// The 4n real coordinates under ℍⁿ ≅ ℝ⁴ⁿ.
    pub fn to_reals(&self) -> Vec<f64> {
        self.0.iter().flat_map(|q| q.to_array()).collect()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn components(&self) -> &[Quaternion] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Quaternion> {
        self.0.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|q| q.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|q| q.is_finite())
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// `⟨self, w⟩ = Σ conj(wᵢ)·selfᵢ`.
    pub fn inner(&self, w: &HVector) -> Result<Quaternion> {
        w.check_dim(self.dim())?;
        Ok(self.inner_unchecked(w))
    }

    pub(crate) fn inner_unchecked(&self, w: &HVector) -> Quaternion {
        self.0
            .iter()
            .zip(&w.0)
            .fold(Quaternion::ZERO, |acc, (&z, &wi)| acc + wi.conj() * z)
    }

    /// Right scalar multiplication `z·λ`.
    pub fn mul_right(&self, lambda: Quaternion) -> Self {
        Self(self.0.iter().map(|&q| q * lambda).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|&q| q * s).collect())
    }

    pub fn dist_euclid(&self, other: &HVector) -> f64 {
        (self - other).norm()
    }
}

impl Index<usize> for HVector {
    type Output = Quaternion;

    fn index(&self, i: usize) -> &Quaternion {
        &self.0[i]
    }
}

impl From<Vec<Quaternion>> for HVector {
    fn from(v: Vec<Quaternion>) -> Self {
        Self(v)
    }
}

// Elementwise operators panic on dimension mismatch; the public geometric
// entry points validate dimensions before reaching them.
impl Add for &HVector {
    type Output = HVector;

    fn add(self, rhs: &HVector) -> HVector {
        assert_eq!(self.dim(), rhs.dim(), "HVector dimension mismatch");
        HVector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a + b).collect())
    }
}

impl Sub for &HVector {
    type Output = HVector;

    fn sub(self, rhs: &HVector) -> HVector {
        assert_eq!(self.dim(), rhs.dim(), "HVector dimension mismatch");
        HVector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a - b).collect())
    }
}

impl Neg for &HVector {
    type Output = HVector;

    fn neg(self) -> HVector {
        HVector(self.0.iter().map(|&q| -q).collect())
    }
}

/// A dense quaternionic matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl HMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    pub fn diag(entries: &[Quaternion]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &q) in entries.iter().enumerate() {
            m[(i, i)] = q;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn to_rows(&self) -> Vec<Vec<Quaternion>> {
        self.data.chunks(self.cols.max(1)).map(<[_]>::to_vec).collect()
    }

    /// `u v*`, i.e. entry `(i, j)` is `uᵢ conj(vⱼ)`.
    pub fn outer(u: &HVector, v: &HVector) -> Self {
        let mut m = Self::zeros(u.dim(), v.dim());
        for i in 0..u.dim() {
            for j in 0..v.dim() {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `(M z)ᵢ = Σⱼ Mᵢⱼ zⱼ`.
    pub fn apply(&self, z: &HVector) -> Result<HVector> {
        z.check_dim(self.cols)?;
        Ok(HVector::new(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(z.iter())
                        .fold(Quaternion::ZERO, |acc, (&m, &zj)| acc + m * zj)
                })
                .collect(),
        ))
    }

    pub fn matmul(&self, rhs: &HMatrix) -> Result<HMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> HMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> HMatrix {
        HMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&q| q * s).collect(),
        }
    }

    pub fn add(&self, rhs: &HMatrix) -> Result<HMatrix> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(HMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        })
    }

    /// Largest entrywise modulus of `self − rhs`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &HMatrix) -> f64 {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    pub fn row(&self, i: usize) -> &[Quaternion] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }
}

impl Index<(usize, usize)> for HMatrix {
    type Output = Quaternion;

    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for HMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        &mut self.data[i * self.cols + j]
    }
}
