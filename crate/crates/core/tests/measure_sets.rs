use std::f64::consts::PI;

use nalgebra::Matrix4;
use qhb_core::random::random_ball_point;
use qhb_core::{
    ball_volume, moment_estimate, region_barycenter, sample_region, Error, HVector, HuaInvolution, Region, SolverConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let inner: f64 = (1..intervals)
        .map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    h / 3.0 * (f(a) + inner + f(b))
}

#[test]
fn moment_matches_radial_quadrature() {
    // in the unit ball of ℍ¹, d(0, y) = 2 artanh|y| and the density is 16/(1 − |y|²)⁴
    let radius = 0.5;
    let sphere = 2.0 * PI * PI;
    let integrand = |t: f64| sphere * 16.0 * t.powi(3) / (1.0 - t * t).powi(4) * 2.0 * t.atanh();
    let exact = simpson(&integrand, 0.0, radius, 2000);

    let region = Region::geodesic_ball(HVector::zeros(1), 3f64.ln()).unwrap();
    let est = moment_estimate(&region, 400_000, 3).unwrap();
    assert!(
        (est.value - exact).abs() <= 3.0 * est.standard_error,
        "{} vs {exact} (SE {})",
        est.value,
        est.standard_error
    );
}

#[test]
fn mass_error_shrinks_at_the_monte_carlo_rate() {
    let region = Region::geodesic_ball(HVector::zeros(1), 1.0).unwrap();
    let exact = ball_volume(1.0, 1).unwrap();
    let coarse = sample_region(&region, 100_000, 21).unwrap().total_mass;
    let fine = sample_region(&region, 1_000_000, 21).unwrap().total_mass;
    for est in [coarse, fine] {
        assert!(
            (est.value - exact).abs() <= 3.0 * est.standard_error,
            "{est:?} vs {exact}"
        );
    }
    // ten times the samples: the standard error drops by about √10
    let ratio = coarse.standard_error / fine.standard_error;
    assert!((ratio - 10f64.sqrt()).abs() < 0.3, "SE ratio {ratio}");
}

#[test]
fn random_geodesic_balls_are_self_centred() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..10 {
        let center = random_ball_point(&mut rng, 1, 0.5);
        let region = Region::geodesic_ball(center.clone(), 0.8).unwrap();
        let r = region_barycenter(&region, 100_000, 100 + k, &SolverConfig::default()).unwrap();
        assert!(r.solver.converged);
        let err = r.solver.barycenter.dist_euclid(&center);
        assert!(
            err <= 3.0 * r.standard_error,
            "center {k}: {err} vs 3 SE {}",
            3.0 * r.standard_error
        );
    }
}

/// Largest singular value of the real Jacobian of `phi` at `z` (n = 1).
fn operator_norm(phi: &HuaInvolution, z: &HVector) -> f64 {
    let h = 1e-6;
    let x = z.to_reals();
    let mut jac = Matrix4::zeros();
    for k in 0..4 {
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[k] += h;
        xm[k] -= h;
        let fp = phi.apply(&HVector::from_reals(&xp).unwrap()).unwrap().to_reals();
        let fm = phi.apply(&HVector::from_reals(&xm).unwrap()).unwrap().to_reals();
        for i in 0..4 {
            jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac.singular_values().max()
}

#[test]
fn barycenter_commutes_with_an_isometry_of_the_region() {
    let base = Region::euclidean_ball(HVector::from_reals(&[0.2, 0.1, 0.0, 0.0]).unwrap(), 0.3).unwrap();
    let phi = HuaInvolution::new(HVector::from_reals(&[-0.3, 0.0, 0.25, 0.1]).unwrap()).unwrap();
    // Φ is an involution, so q ∈ Φ(D) exactly when Φ(q) ∈ D
    let image = {
        let (base, phi) = (base.clone(), phi.clone());
        Region::indicator(1, move |q| base.contains(&phi.apply(q).unwrap()))
    };
    let cfg = SolverConfig::default();
    let c_base = region_barycenter(&base, 400_000, 5, &cfg).unwrap();
    let c_image = region_barycenter(&image, 400_000, 6, &cfg).unwrap();

    // compare in the image: Φ(c(D)) against c(Φ(D))
    let mapped = phi.apply(&c_base.solver.barycenter).unwrap();
    let stretch = operator_norm(&phi, &c_base.solver.barycenter);
    let combined = (c_image.standard_error.powi(2) + (stretch * c_base.standard_error).powi(2)).sqrt();
    let gap = mapped.dist_euclid(&c_image.solver.barycenter);
    assert!(gap <= 3.0 * combined, "gap {gap} vs 3 SE {}", 3.0 * combined);
}

#[test]
fn sampling_is_reproducible_and_seed_sensitive() {
    let region = Region::geodesic_ball(HVector::from_real(&[0.3]), 1.0).unwrap();
    let a = sample_region(&region, 50_000, 1).unwrap();
    let b = sample_region(&region, 50_000, 1).unwrap();
    let c = sample_region(&region, 50_000, 2).unwrap();
    assert_eq!(a.total_mass.value.to_bits(), b.total_mass.value.to_bits());
    assert_eq!(a.samples.points(), b.samples.points());
    assert_ne!(a.total_mass.value, c.total_mass.value);
    assert!(a.samples.weights().iter().all(|&w| w > 0.0));
    assert!(a.count_accepted <= a.count_requested);
}

#[test]
fn empty_regions_are_reported() {
    let empty = Region::indicator(1, |_| false);
    assert!(matches!(sample_region(&empty, 1000, 0), Err(Error::EmptyRegion { .. })));
    assert!(matches!(
        moment_estimate(&empty, 1000, 0),
        Err(Error::EmptyRegion { .. })
    ));
    assert!(matches!(
        region_barycenter(&empty, 1000, 0, &SolverConfig::default()),
        Err(Error::EmptyRegion { .. })
    ));
}
