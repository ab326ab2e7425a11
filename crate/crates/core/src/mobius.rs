//! Hua involutions and the projective action of Sp(n,1) on the unit ball.
//!
//! An [`SpMatrix`] is an `(n+1)×(n+1)` quaternionic matrix `M` with
//! `M* J M = J`, `J = diag(Iₙ, −1)`, written in blocks as
//!
//! ```text
//!     ⎛ A  α ⎞
//! M = ⎝ β  a ⎠ ,      M·z = (A z + α)(β z + a)⁻¹
//! ```
//!
//! where the quaternion inverse multiplies on the right.
//!
//! For `|u| < 1` with `s = √(1 − |u|²)` and `A_u = u u*/(1 + s) + s Iₙ`, the
//! Hua involution is
//!
//! ```text
//! Φ_u(z) = (u − A_u z)(1 − ⟨z, u⟩)⁻¹
//! ```
//!
//! It swaps `0` and `u`, squares to the identity, and is realized by the
//! matrix `(−A_u/s, u/s; −u*/s, 1/s)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::{HMatrix, HVector, Quaternion};

/// Default entrywise tolerance for `M* J M = J`, relative to `max(1, |M|²)`.
pub const SP_TOLERANCE: f64 = 1e-10;

/// Tolerance for the off-diagonal blocks in [`intertwine_factor`].
pub const INTERTWINE_TOLERANCE: f64 = 1e-10;

/// `√(1 − |u|²)` without cancellation near the boundary.
pub(crate) fn boundary_factor(u: &HVector) -> f64 {
    let r = u.norm();
    ((1.0 - r) * (1.0 + r)).max(0.0).sqrt()
}

/// The involutive isometry `Φ_u`.
#[derive(Clone, Debug, PartialEq)]
pub struct HuaInvolution {
    u: HVector,
    s: f64,
}

impl HuaInvolution {
    pub fn new(u: HVector) -> Result<Self> {
        Self::with_margin(u, 0.0)
    }

    /// Like [`HuaInvolution::new`] but rejects `|u| ≥ 1 − margin`.
    pub fn with_margin(u: HVector, margin: f64) -> Result<Self> {
        let norm = u.norm();
        if u.dim() == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if !(norm < 1.0 - margin) || !u.is_finite() {
            return Err(Error::NotInBall { norm });
        }
        let s = boundary_factor(&u);
        Ok(Self { u, s })
    }

    #[inline]
    pub fn u(&self) -> &HVector {
        &self.u
    }

    /// `s = √(1 − |u|²)`.
    #[inline]
    pub fn s(&self) -> f64 {
        self.s
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// `A_u = u u*/(1 + s) + s I`.
    pub fn a_matrix(&self) -> HMatrix {
        let n = self.dim();
        HMatrix::outer(&self.u, &self.u)
            .scale(1.0 / (1.0 + self.s))
            .add(&HMatrix::identity(n).scale(self.s))
            .expect("square blocks of equal size")
    }

    /// Closed-form `A_u⁻¹ = −u u*/((1 + s) s) + I/s`.
    pub fn a_inverse_matrix(&self) -> HMatrix {
        let n = self.dim();
        let s = self.s;
        HMatrix::outer(&self.u, &self.u)
            .scale(-1.0 / ((1.0 + s) * s))
            .add(&HMatrix::identity(n).scale(1.0 / s))
            .expect("square blocks of equal size")
    }

    /// `A_u z` through the rank-one form, without materializing `A_u`.
    pub(crate) fn a_apply(&self, z: &HVector) -> HVector {
        let uz = z.inner_unchecked(&self.u);
        let coef = 1.0 / (1.0 + self.s);
        HVector::new(
            self.u
                .iter()
                .zip(z.iter())
                .map(|(&ui, &zi)| ui * uz * coef + zi * self.s)
                .collect(),
        )
    }

    /// `Φ_u(z)` on the closed ball `|z| ≤ 1`.
    pub fn apply(&self, z: &HVector) -> Result<HVector> {
        z.check_dim(self.dim())?;
        let norm = z.norm();
        if !(norm <= 1.0) {
            return Err(Error::NotInBall { norm });
        }
        Ok(self.apply_unchecked(z))
    }

    pub(crate) fn apply_unchecked(&self, z: &HVector) -> HVector {
        let denom = (Quaternion::ONE - z.inner_unchecked(&self.u))
            .inv()
            .expect("|1 - <z,u>| >= 1 - |z||u| > 0 on the closed ball");
        let az = self.a_apply(z);
        HVector::new(
            self.u
                .iter()
                .zip(az.iter())
                .map(|(&ui, &ai)| (ui - ai) * denom)
                .collect(),
        )
    }

    /// The block matrix realizing `Φ_u` in Sp(n,1).
    pub fn matrix(&self) -> SpMatrix {
        let n = self.dim();
        let s = self.s;
        let mut m = HMatrix::zeros(n + 1, n + 1);
        let a = self.a_matrix();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = a[(i, j)] * (-1.0 / s);
            }
            m[(i, n)] = self.u[i] / s;
            m[(n, i)] = self.u[i].conj() * (-1.0 / s);
        }
        m[(n, n)] = Quaternion::real(1.0 / s);
        SpMatrix { m }
    }

    /// The unique interior fixed point `u/(1 + s)`, where `Φ_u` is the
    /// geodesic symmetry.
    pub fn fixed_point(&self) -> HVector {
        self.u.scale(1.0 / (1.0 + self.s))
    }

    /// Real Jacobian determinant of `Φ_u` at `z`, as a map of ℝ⁴ⁿ:
    /// `(1 − |u|²)^(2n+2) / |1 − ⟨z,u⟩|^(4n+4)`.
    pub fn jacobian_det(&self, z: &HVector) -> Result<f64> {
        z.check_dim(self.dim())?;
        let norm = z.norm();
        if !(norm < 1.0) {
            return Err(Error::NotInBall { norm });
        }
        let denom = (Quaternion::ONE - z.inner_unchecked(&self.u)).norm_sqr();
        let ratio = self.s * self.s / denom;
        Ok(ratio.powi(2 * self.dim() as i32 + 2))
    }
}

/// An element of Sp(n,1).
#[derive(Clone, Debug, PartialEq)]
pub struct SpMatrix {
    m: HMatrix,
}

impl SpMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            m: HMatrix::identity(n + 1),
        }
    }

    /// Validates `M* J M = J` with [`SP_TOLERANCE`].
    pub fn from_matrix(m: HMatrix) -> Result<Self> {
        Self::from_matrix_with_tolerance(m, SP_TOLERANCE)
    }

    pub fn from_matrix_with_tolerance(m: HMatrix, tolerance: f64) -> Result<Self> {
        if m.rows() != m.cols() || m.rows() < 2 {
            return Err(Error::DimensionMismatch {
                expected: m.rows().max(2),
                found: m.cols(),
            });
        }
        let g = Self { m };
        let residual = g.j_residual();
        let scale = g.m.max_abs().powi(2).max(1.0);
        if !(residual <= tolerance * scale) {
            return Err(Error::NotSymplectic {
                residual,
                tolerance: tolerance * scale,
            });
        }
        Ok(g)
    }

    pub fn from_blocks(a: HMatrix, alpha: HVector, beta: HVector, corner: Quaternion) -> Result<Self> {
        let n = alpha.dim();
        if a.rows() != n || a.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.rows(),
            });
        }
        beta.check_dim(n)?;
        let mut m = HMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = a[(i, j)];
            }
            m[(i, n)] = alpha[i];
            m[(n, i)] = beta[i];
        }
        m[(n, n)] = corner;
        Self::from_matrix(m)
    }

    /// The real hyperbolic translation `z₁ ↦ (z₁ + t)(1 + t z₁)⁻¹` along the
    /// first coordinate axis; its matrix is `(1 − t²)^(−1/2) (1, t; t, 1)`
    /// on the `(e₁, e_{n+1})` plane.
    pub fn translation(n: usize, t: f64) -> Result<Self> {
        if !(t.abs() < 1.0) || n == 0 {
            return Err(Error::NotInBall { norm: t.abs() });
        }
        let gamma = 1.0 / ((1.0 - t) * (1.0 + t)).sqrt();
        let mut m = HMatrix::identity(n + 1);
        m[(0, 0)] = Quaternion::real(gamma);
        m[(0, n)] = Quaternion::real(gamma * t);
        m[(n, 0)] = Quaternion::real(gamma * t);
        m[(n, n)] = Quaternion::real(gamma);
        Ok(Self { m })
    }

    /// A block-diagonal isometry fixing the origin, `diag(U, λ)`. Validated.
    pub fn rotation(u: HMatrix, lambda: Quaternion) -> Result<Self> {
        let n = u.rows();
        Self::from_blocks(u, HVector::zeros(n), HVector::zeros(n), lambda)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.rows() - 1
    }

    #[inline]
    pub fn matrix(&self) -> &HMatrix {
        &self.m
    }

    pub fn a_block(&self) -> HMatrix {
        let n = self.dim();
        let rows = (0..n).map(|i| self.m.row(i)[..n].to_vec()).collect();
        HMatrix::from_rows(rows).expect("rectangular")
    }

    pub fn alpha(&self) -> HVector {
        let n = self.dim();
        HVector::new((0..n).map(|i| self.m[(i, n)]).collect())
    }

    pub fn beta(&self) -> HVector {
        let n = self.dim();
        HVector::new(self.m.row(n)[..n].to_vec())
    }

    pub fn corner(&self) -> Quaternion {
        let n = self.dim();
        self.m[(n, n)]
    }

    /// `J M* J`.
    fn j_conjugate_adjoint(&self) -> HMatrix {
        let n = self.dim();
        let mut adj = self.m.adjoint();
        for i in 0..=n {
            for j in 0..=n {
                if (i == n) != (j == n) {
                    adj[(i, j)] = -adj[(i, j)];
                }
            }
        }
        adj
    }

    /// Max entry of `|M* J M − J|`.
    pub fn j_residual(&self) -> f64 {
        let n = self.dim();
        let mut jm = self.m.clone();
        for j in 0..=n {
            jm[(n, j)] = -jm[(n, j)];
        }
        let mut j = HMatrix::identity(n + 1);
        j[(n, n)] = -Quaternion::ONE;
        self.m.adjoint().matmul(&jm).expect("square").max_abs_diff(&j)
    }

    /// `g⁻¹ = J g* J`, i.e. blocks `(A*, −β*; −α*, ā)`.
    pub fn inverse(&self) -> SpMatrix {
        SpMatrix {
            m: self.j_conjugate_adjoint(),
        }
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &SpMatrix) -> Result<SpMatrix> {
        Ok(SpMatrix {
            m: self.m.matmul(&rhs.m)?,
        })
    }

    /// Projective action `(A z + α)(β z + a)⁻¹` on the open ball.
    pub fn apply(&self, z: &HVector) -> Result<HVector> {
        z.check_dim(self.dim())?;
        let norm = z.norm();
        if !(norm < 1.0) {
            return Err(Error::NotInBall { norm });
        }
        let n = self.dim();
        let mut homogeneous = z.components().to_vec();
        homogeneous.push(Quaternion::ONE);
        let image = self.m.apply(&HVector::new(homogeneous))?;
        let last = image[n].inv().map_err(|_| Error::Singular)?;
        Ok(HVector::new(image.iter().take(n).map(|&q| q * last).collect()))
    }

    /// Largest modulus among the `α` and `β` entries.
    pub fn off_diagonal_norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| self.m[(i, n)].norm().max(self.m[(n, i)].norm()))
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|A A* − I|` and `||a| − 1|` for a block-diagonal matrix.
    pub fn unitary_defect(&self) -> f64 {
        let a = self.a_block();
        let aa = a.matmul(&a.adjoint()).expect("square");
        aa.max_abs_diff(&HMatrix::identity(self.dim()))
            .max((self.corner().norm() - 1.0).abs())
    }

    pub fn max_abs_diff(&self, rhs: &SpMatrix) -> f64 {
        self.m.max_abs_diff(&rhs.m)
    }
}

/// `U = Φ_{g(c)} · g · Φ_c` together with the size of its off-diagonal blocks,
/// before any cleanup.
pub fn intertwine_raw(g: &SpMatrix, c: &HVector) -> Result<(SpMatrix, f64)> {
    let gc = g.apply(c)?;
    let left = HuaInvolution::new(gc)?.matrix();
    let right = HuaInvolution::new(c.clone())?.matrix();
    let u = left.compose(g)?.compose(&right)?;
    let off = u.off_diagonal_norm();
    Ok((u, off))
}

/// The origin-fixing factor `U` in `Φ_{g(c)} ∘ g = U ∘ Φ_c`.
///
/// The off-diagonal blocks are checked against [`INTERTWINE_TOLERANCE`] and
/// then set to exactly zero.
pub fn intertwine_factor(g: &SpMatrix, c: &HVector) -> Result<SpMatrix> {
    let (mut u, off) = intertwine_raw(g, c)?;
    if !(off <= INTERTWINE_TOLERANCE) {
        return Err(Error::NotBlockDiagonal {
            residual: off,
            tolerance: INTERTWINE_TOLERANCE,
        });
    }
    let n = u.dim();
    for i in 0..n {
        u.m[(i, n)] = Quaternion::ZERO;
        u.m[(n, i)] = Quaternion::ZERO;
    }
    Ok(u)
}

/// Wire form of an [`SpMatrix`]: `{"A": [[q..]..], "alpha": [..], "beta": [..], "a": q}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpMatrixFile {
    #[serde(rename = "A")]
    pub a_block: Vec<Vec<Quaternion>>,
    pub alpha: Vec<Quaternion>,
    pub beta: Vec<Quaternion>,
    pub a: Quaternion,
}

impl From<&SpMatrix> for SpMatrixFile {
    fn from(g: &SpMatrix) -> Self {
        Self {
            a_block: g.a_block().to_rows(),
            alpha: g.alpha().components().to_vec(),
            beta: g.beta().components().to_vec(),
            a: g.corner(),
        }
    }
}

impl TryFrom<SpMatrixFile> for SpMatrix {
    type Error = Error;

    fn try_from(f: SpMatrixFile) -> Result<Self> {
        let n = f.alpha.len();
        let a = if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        } else {
            HMatrix::from_rows(f.a_block)?
        };
        SpMatrix::from_blocks(a, HVector::new(f.alpha), HVector::new(f.beta), f.a)
    }
}

impl Serialize for SpMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SpMatrixFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = SpMatrixFile::deserialize(deserializer)?;
        SpMatrix::try_from(file).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_ball_point, random_hua_product};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real1(x: f64) -> HVector {
        HVector::from_real(&[x])
    }

    #[test]
    fn hua_at_origin_is_negation() {
        let phi = HuaInvolution::new(HVector::zeros(2)).unwrap();
        assert_eq!(phi.s(), 1.0);
        assert_eq!(phi.a_matrix(), HMatrix::identity(2));
        let z = HVector::new(vec![Quaternion::new(0.1, 0.2, 0.3, 0.0), Quaternion::K * 0.4]);
        assert_eq!(phi.apply(&z).unwrap(), -&z);

        let mut expected = HMatrix::identity(3).scale(-1.0);
        expected[(2, 2)] = Quaternion::ONE;
        assert_eq!(phi.matrix().matrix(), &expected);
    }

    #[test]
    fn n1_half_gives_unit_a() {
        let phi = HuaInvolution::new(real1(0.5)).unwrap();
        assert!((phi.s() - 3f64.sqrt() / 2.0).abs() < 1e-16);
        assert!((phi.a_matrix()[(0, 0)] - Quaternion::ONE).norm() < 1e-15);
    }

    #[test]
    fn a_scales_perpendicular_directions_by_s() {
        let phi = HuaInvolution::new(HVector::from_real(&[0.5, 0.0])).unwrap();
        let v = phi.a_matrix().apply(&HVector::basis(2, 1)).unwrap();
        assert!((&v - &HVector::from_real(&[0.0, 3f64.sqrt() / 2.0])).norm() < 1e-16);
        let fixed = phi.a_matrix().apply(phi.u()).unwrap();
        assert!((&fixed - phi.u()).norm() < 1e-16);
    }

    #[test]
    fn swaps_origin_and_u() {
        let u = HVector::new(vec![
            Quaternion::new(0.2, -0.1, 0.3, 0.25),
            Quaternion::new(0.0, 0.1, 0.0, -0.2),
        ]);
        let phi = HuaInvolution::new(u.clone()).unwrap();
        assert!((&phi.apply(&HVector::zeros(2)).unwrap() - &u).norm() < 1e-15);
        assert!(phi.apply(&u).unwrap().norm() < 1e-15);
    }

    #[test]
    fn real_axis_rational_values() {
        // (c − x)/(1 − c x) with c = 2/7
        let phi = HuaInvolution::new(real1(2.0 / 7.0)).unwrap();
        let a = phi.apply(&real1(0.5)).unwrap();
        assert!((a[0] - Quaternion::real(-0.25)).norm() < 1e-15);
        let b = phi.apply(&real1(-0.25)).unwrap();
        assert!((b[0] - Quaternion::real(0.5)).norm() < 1e-15);
    }

    #[test]
    fn boundary_is_allowed_outside_is_not() {
        let phi = HuaInvolution::new(real1(0.3)).unwrap();
        let on = phi.apply(&HVector::new(vec![Quaternion::J])).unwrap();
        assert!((on.norm() - 1.0).abs() < 1e-15);
        assert!(matches!(phi.apply(&real1(1.01)), Err(Error::NotInBall { .. })));
        assert!(matches!(HuaInvolution::new(real1(1.0)), Err(Error::NotInBall { .. })));
        assert!(HuaInvolution::with_margin(real1(0.95), 0.1).is_err());
        assert!(phi.jacobian_det(&HVector::new(vec![Quaternion::J])).is_err());
    }

    #[test]
    fn dimension_is_checked() {
        let phi = HuaInvolution::new(real1(0.3)).unwrap();
        assert!(matches!(
            phi.apply(&HVector::zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fixed_point_examples() {
        let phi = HuaInvolution::new(real1(0.5)).unwrap();
        let p = phi.fixed_point();
        assert!((p[0].w - (2.0 - 3f64.sqrt())).abs() < 1e-15);
        assert_eq!(
            HuaInvolution::new(HVector::zeros(1)).unwrap().fixed_point(),
            HVector::zeros(1)
        );

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..4 {
            for _ in 0..50 {
                let phi = HuaInvolution::new(random_ball_point(&mut rng, n, 0.95)).unwrap();
                let p = phi.fixed_point();
                assert!((&phi.apply(&p).unwrap() - &p).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hua_matrix_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..4 {
            for _ in 0..30 {
                let phi = HuaInvolution::new(random_ball_point(&mut rng, n, 0.9)).unwrap();
                let m = phi.matrix();
                assert!(m.j_residual() < 1e-12);
                let sq = m.compose(&m).unwrap();
                assert!(sq.max_abs_diff(&SpMatrix::identity(n)) < 1e-12);
                assert!(m.inverse().max_abs_diff(&m) < 1e-14);

                // eigenvector (u, 1 + s)
                let mut v = phi.u().components().to_vec();
                v.push(Quaternion::real(1.0 + phi.s()));
                let v = HVector::new(v);
                let mv = m.matrix().apply(&v).unwrap();
                assert!((&mv - &v).norm() < 1e-12);

                // A_u Hermitian, A_u² = s²I + uu*, closed-form inverse
                let a = phi.a_matrix();
                assert!(a.max_abs_diff(&a.adjoint()) < 1e-15);
                let a2 = HMatrix::identity(n)
                    .scale(phi.s() * phi.s())
                    .add(&HMatrix::outer(phi.u(), phi.u()))
                    .unwrap();
                assert!(a.matmul(&a).unwrap().max_abs_diff(&a2) < 1e-12);
                let prod = a.matmul(&phi.a_inverse_matrix()).unwrap();
                assert!(prod.max_abs_diff(&HMatrix::identity(n)) < 1e-12);
            }
        }
    }

    #[test]
    fn translation_example() {
        let g = SpMatrix::translation(1, 1.0 / 3.0).unwrap();
        assert!(g.j_residual() < 1e-15);
        let a = g.apply(&real1(0.5)).unwrap();
        assert!((a[0].w - 5.0 / 7.0).abs() < 1e-15);
        let b = g.apply(&HVector::zeros(1)).unwrap();
        assert!((b[0].w - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(SpMatrix::identity(1).apply(&real1(0.5)).unwrap(), real1(0.5));
        assert!(g.apply(&real1(1.0)).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        assert_eq!(SpMatrix::identity(2).inverse(), SpMatrix::identity(2));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..4 {
            for _ in 0..30 {
                let g = random_hua_product(&mut rng, n, 3, 0.8);
                let gi = g.inverse();
                assert!(g.compose(&gi).unwrap().max_abs_diff(&SpMatrix::identity(n)) < 1e-12);
                let z = random_ball_point(&mut rng, n, 0.9);
                let back = gi.apply(&g.apply(&z).unwrap()).unwrap();
                assert!((&back - &z).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn projective_action_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..4 {
            for _ in 0..50 {
                let phi = HuaInvolution::new(random_ball_point(&mut rng, n, 0.95)).unwrap();
                let z = random_ball_point(&mut rng, n, 0.95);
                let a = phi.apply(&z).unwrap();
                let b = phi.matrix().apply(&z).unwrap();
                assert!((&a - &b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn intertwining_examples() {
        let g = SpMatrix::translation(1, 1.0 / 3.0).unwrap();
        let (raw, off) = intertwine_raw(&g, &HVector::zeros(1)).unwrap();
        assert!(off < 1e-12);
        assert!((raw.corner().norm() - 1.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..4 {
            for _ in 0..30 {
                let g = random_hua_product(&mut rng, n, 2, 0.8);
                let c = random_ball_point(&mut rng, n, 0.8);
                let u = intertwine_factor(&g, &c).unwrap();
                assert_eq!(u.off_diagonal_norm(), 0.0);
                assert!(u.unitary_defect() < 1e-10);
                let z = random_ball_point(&mut rng, n, 0.9);
                let phi_c = HuaInvolution::new(c.clone()).unwrap();
                let phi_gc = HuaInvolution::new(g.apply(&c).unwrap()).unwrap();
                let lhs = u.apply(&phi_c.apply(&z).unwrap()).unwrap();
                let rhs = phi_gc.apply(&g.apply(&z).unwrap()).unwrap();
                assert!((&lhs - &rhs).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn jacobian_examples() {
        let phi = HuaInvolution::new(real1(0.5)).unwrap();
        assert!((phi.jacobian_det(&HVector::zeros(1)).unwrap() - 0.31640625).abs() < 1e-15);
        let id = HuaInvolution::new(HVector::zeros(2)).unwrap();
        let z = HVector::from_real(&[0.3, -0.6]);
        assert_eq!(id.jacobian_det(&z).unwrap(), 1.0);
    }

    #[test]
    fn loader_rejects_non_symplectic() {
        let g = HuaInvolution::new(HVector::from_real(&[0.3, 0.2])).unwrap().matrix();
        let text = serde_json::to_string(&g).unwrap();
        let back: SpMatrix = serde_json::from_str(&text).unwrap();
        assert!(back.max_abs_diff(&g) < 1e-15);

        let bad = r#"{"A": [[[2,0,0,0]]], "alpha": [[0,0,0,0]], "beta": [[0,0,0,0]], "a": [1,0,0,0]}"#;
        let err = serde_json::from_str::<SpMatrix>(bad).unwrap_err();
        assert!(err.to_string().contains("NotSymplectic"));
        let ragged = r#"{"A": [[[1,0,0,0]]], "alpha": [[0,0,0,0],[0,0,0,0]], "beta": [[0,0,0,0]], "a": [1,0,0,0]}"#;
        assert!(serde_json::from_str::<SpMatrix>(ragged).is_err());
    }
}
