//! Random inputs for property checks and solver restarts.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::mobius::{HuaInvolution, SpMatrix};
use crate::quaternion::{HVector, Quaternion};

pub fn random_quaternion<R: Rng + ?Sized>(rng: &mut R, bound: f64) -> Quaternion {
    Quaternion::new(
        rng.gen_range(-bound..bound),
        rng.gen_range(-bound..bound),
        rng.gen_range(-bound..bound),
        rng.gen_range(-bound..bound),
    )
}

/// A uniformly distributed direction on the unit sphere of ℝ⁴ⁿ
/// (a normalized standard Gaussian vector).
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HVector {
    loop {
        let reals: Vec<f64> = (0..4 * n).map(|_| rng.sample(StandardNormal)).collect();
        let v = HVector::from_reals(&reals).expect("length is a multiple of 4");
        let r = v.norm();
        if r > 1e-6 {
            return v.scale(1.0 / r);
        }
    }
}

/// A point with uniform direction and Euclidean norm uniform in `[0, max_radius)`.
pub fn random_ball_point<R: Rng + ?Sized>(rng: &mut R, n: usize, max_radius: f64) -> HVector {
    let r = rng.gen_range(0.0..max_radius);
    random_unit_vector(rng, n).scale(r)
}

/// Product of `factors` Hua matrices with centers of norm below `max_radius`.
pub fn random_hua_product<R: Rng + ?Sized>(rng: &mut R, n: usize, factors: usize, max_radius: f64) -> SpMatrix {
    (0..factors).fold(SpMatrix::identity(n), |acc, _| {
        let phi = HuaInvolution::new(random_ball_point(rng, n, max_radius)).expect("interior center");
        acc.compose(&phi.matrix()).expect("same dimension")
    })
}
