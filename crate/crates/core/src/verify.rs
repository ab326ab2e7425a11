//! Randomized self-checks of every algebraic and geometric identity the
//! library relies on. Each check reports the worst value it observed.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::barycenter::{energy, gradient_check, WeightedPoints};
use crate::geometry::{
    cosh2_half_distance, distance, geodesic_between, log_cosh2_half, measure_density, ConvexityProfile, GeodesicChart,
};
use crate::mobius::{intertwine_raw, HuaInvolution};
use crate::quaternion::{HMatrix, HVector, Quaternion};
use crate::random::{random_ball_point, random_hua_product, random_quaternion, random_unit_vector};

/// Deliberate defects used to confirm the suites can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of the rank-one term of `A_u`.
    FlipRankOneTerm,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 10_000,
            fault: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Above,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Worst observed value: a maximum for `<=` checks, a minimum for `>`.
    pub observed: f64,
    pub comparison: Comparison,
    pub limit: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "identity checks (seed {}, {} trials)", self.seed, self.trials)?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for c in &self.checks {
            let (label, op) = match c.comparison {
                Comparison::AtMost => ("max", "<="),
                Comparison::Above => ("min", ">"),
            };
            writeln!(
                f,
                "[{}] {}: {} {:.3e} (need {} {:.1e}, {} samples)",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                label,
                c.observed,
                op,
                c.limit,
                c.samples
            )?;
        }
        write!(
            f,
            "{}",
            if self.passed() {
                "all checks passed"
            } else {
                "some checks FAILED"
            }
        )
    }
}

struct Tally {
    name: &'static str,
    comparison: Comparison,
    limit: f64,
    worst: f64,
    samples: usize,
}

impl Tally {
    fn at_most(name: &'static str, limit: f64) -> Self {
        Self {
            name,
            comparison: Comparison::AtMost,
            limit,
            worst: 0.0,
            samples: 0,
        }
    }

    fn above(name: &'static str, limit: f64) -> Self {
        Self {
            name,
            comparison: Comparison::Above,
            limit,
            worst: f64::INFINITY,
            samples: 0,
        }
    }

    fn record(&mut self, value: f64) {
        self.samples += 1;
        self.worst = match self.comparison {
            // NaN must surface as a failure
            Comparison::AtMost if value.is_nan() || self.worst.is_nan() => f64::NAN,
            Comparison::AtMost => self.worst.max(value),
            Comparison::Above if value.is_nan() || self.worst.is_nan() => f64::NAN,
            Comparison::Above => self.worst.min(value),
        };
    }

    fn finish(self) -> Check {
        let passed = match self.comparison {
            Comparison::AtMost => self.worst <= self.limit,
            Comparison::Above => self.worst > self.limit,
        };
        Check {
            name: self.name,
            observed: self.worst,
            comparison: self.comparison,
            limit: self.limit,
            samples: self.samples,
            passed,
        }
    }
}

/// `Φ_u`, optionally with an injected defect.
fn hua(phi: &HuaInvolution, z: &HVector, fault: Option<Fault>) -> HVector {
    match fault {
        None => phi.apply(z).expect("closed ball"),
        Some(Fault::FlipRankOneTerm) => {
            let u = phi.u();
            let s = phi.s();
            let a = HMatrix::outer(u, u)
                .scale(-1.0 / (1.0 + s))
                .add(&HMatrix::identity(u.dim()).scale(s))
                .expect("square");
            let az = a.apply(z).expect("same dimension");
            let denom = (Quaternion::ONE - z.inner(u).expect("same dimension"))
                .inv()
                .expect("nonzero");
            HVector::new(u.iter().zip(az.iter()).map(|(&ui, &ai)| (ui - ai) * denom).collect())
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_dim(rng: &mut ChaCha8Rng) -> usize {
    rng.gen_range(1..=3)
}

fn quaternion_suites(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    let mut rng = rng_for(cfg.seed, 1);
    let mut mult = Tally::at_most("quaternion multiplicativity |pq| = |p||q|", 1e-12);
    let mut anti = Tally::at_most("conjugation reverses products", 1e-12);
    let mut assoc = Tally::at_most("quaternion associativity", 1e-12);
    let mut herm = Tally::at_most("Hermitian symmetry of the inner product", 1e-12);
    for _ in 0..cfg.trials {
        let p = random_quaternion(&mut rng, 10.0 / 2.0);
        let q = random_quaternion(&mut rng, 10.0 / 2.0);
        mult.record(((p * q).norm() - p.norm() * q.norm()).abs());
        anti.record(((p * q).conj() - q.conj() * p.conj()).norm());
        let (a, b, c) = (
            random_quaternion(&mut rng, 2.0),
            random_quaternion(&mut rng, 2.0),
            random_quaternion(&mut rng, 2.0),
        );
        assoc.record(((a * b) * c - a * (b * c)).norm());
        let n = random_dim(&mut rng);
        let z = random_ball_point(&mut rng, n, 1.0);
        let w = random_ball_point(&mut rng, n, 1.0);
        herm.record((z.inner(&w).unwrap().conj() - w.inner(&z).unwrap()).norm());
    }
    out.extend([mult.finish(), anti.finish(), assoc.finish(), herm.finish()]);
}

fn real_jacobian_det(f: impl Fn(&HVector) -> HVector, z: &HVector, h: f64) -> f64 {
    let x = z.to_reals();
    let m = x.len();
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += h;
        xm[k] -= h;
        let fp = f(&HVector::from_reals(&xp).unwrap()).to_reals();
        let fm = f(&HVector::from_reals(&xm).unwrap()).to_reals();
        for i in 0..m {
            jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac.determinant().abs()
}

fn mobius_suites(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    let mut rng = rng_for(cfg.seed, 2);
    let fault = cfg.fault;
    let mut involution = Tally::at_most("involution", 1e-12);
    let mut norm_rel = Tally::at_most("norm relation", 1e-12);
    let mut swap = Tally::at_most("Phi_u swaps 0 and u", 1e-12);
    let mut fixed = Tally::at_most("fixed point u/(1+s)", 1e-12);
    let mut sp = Tally::at_most("Sp(n,1) membership", 1e-10);
    let mut square = Tally::at_most("Hua matrix squares to identity", 1e-10);
    let mut consistency = Tally::at_most("projective action matches closed form", 1e-12);
    let mut a_inv = Tally::at_most("A_u closed-form inverse", 1e-12);
    let mut a_sq = Tally::at_most("A_u^2 = s^2 I + uu*", 1e-12);
    let mut inverse = Tally::at_most("Sp inverse round trip", 1e-10);
    let mut jacobian = Tally::at_most("Jacobian formula vs finite differences (relative)", 1e-6);
    let mut measure = Tally::at_most("measure invariance (relative)", 1e-10);
    let mut intertwine = Tally::at_most("intertwining off-diagonal blocks", 1e-10);
    let mut intertwine_pt = Tally::at_most("intertwining pointwise identity", 1e-10);

    for _ in 0..cfg.trials {
        let n = random_dim(&mut rng);
        let phi = HuaInvolution::new(random_ball_point(&mut rng, n, 0.95)).unwrap();
        let z = random_ball_point(&mut rng, n, 0.95);

        let image = hua(&phi, &z, fault);
        let back = hua(&phi, &image, fault);
        involution.record((&back - &z).norm());

        let u = phi.u();
        let denom = (Quaternion::ONE - z.inner(u).unwrap()).norm_sqr();
        let predicted = (1.0 - u.norm_sqr()) * (1.0 - z.norm_sqr()) / denom;
        norm_rel.record((image.norm_sqr() + predicted - 1.0).abs());

        swap.record(
            hua(&phi, &HVector::zeros(n), fault)
                .dist_euclid(u)
                .max(hua(&phi, u, fault).norm()),
        );
        let p = phi.fixed_point();
        fixed.record(hua(&phi, &p, fault).dist_euclid(&p));

        let m = phi.matrix();
        sp.record(m.j_residual());
        square.record(m.compose(&m).unwrap().max_abs_diff(&crate::SpMatrix::identity(n)));
        consistency.record(m.apply(&z).unwrap().dist_euclid(&phi.apply(&z).unwrap()));

        let a = phi.a_matrix();
        a_inv.record(
            a.matmul(&phi.a_inverse_matrix())
                .unwrap()
                .max_abs_diff(&HMatrix::identity(n)),
        );
        let a2 = HMatrix::identity(n)
            .scale(phi.s() * phi.s())
            .add(&HMatrix::outer(u, u))
            .unwrap();
        a_sq.record(a.matmul(&a).unwrap().max_abs_diff(&a2));

        let g = random_hua_product(&mut rng, n, 3, 0.8);
        sp.record(g.j_residual());
        let w = random_ball_point(&mut rng, n, 0.9);
        inverse.record(g.inverse().apply(&g.apply(&w).unwrap()).unwrap().dist_euclid(&w));

        let phi_j = HuaInvolution::new(random_ball_point(&mut rng, n, 0.9)).unwrap();
        let zj = random_ball_point(&mut rng, n, 0.9);
        let exact = phi_j.jacobian_det(&zj).unwrap();
        let fd = real_jacobian_det(|x| hua(&phi_j, x, fault), &zj, 1e-5);
        jacobian.record((fd / exact - 1.0).abs());
        let lhs = measure_density(&phi_j.apply(&zj).unwrap()).unwrap() * exact;
        measure.record((lhs / measure_density(&zj).unwrap() - 1.0).abs());

        let g2 = random_hua_product(&mut rng, n, 2, 0.8);
        let c = random_ball_point(&mut rng, n, 0.8);
        let (big_u, off) = intertwine_raw(&g2, &c).unwrap();
        intertwine.record(off);
        let phi_c = HuaInvolution::new(c.clone()).unwrap();
        let phi_gc = HuaInvolution::new(g2.apply(&c).unwrap()).unwrap();
        let lhs = big_u.apply(&hua(&phi_c, &w, fault)).unwrap();
        let rhs = hua(&phi_gc, &g2.apply(&w).unwrap(), fault);
        intertwine_pt.record(lhs.dist_euclid(&rhs));
    }
    out.extend([
        involution.finish(),
        norm_rel.finish(),
        swap.finish(),
        fixed.finish(),
        sp.finish(),
        square.finish(),
        consistency.finish(),
        a_inv.finish(),
        a_sq.finish(),
        inverse.finish(),
        jacobian.finish(),
        measure.finish(),
        intertwine.finish(),
        intertwine_pt.finish(),
    ]);
}

fn kernel_along(v: &HVector, y: &HVector, t: f64) -> f64 {
    let u = (t / 2.0).tanh();
    let w = v.inner(y).unwrap();
    (Quaternion::ONE - w * u).norm_sqr().ln() + 2.0 * (t / 2.0).cosh().ln() - (1.0 - y.norm_sqr()).ln()
}

fn geometry_suites(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    let mut rng = rng_for(cfg.seed, 3);
    let mut poisson = Tally::at_most("Poisson-distance consistency", 1e-12);
    let mut triangle = Tally::at_most("triangle inequality excess", 1e-10);
    let mut isometry = Tally::at_most("distance invariance under Sp(n,1)", 1e-10);
    let mut speed = Tally::at_most("geodesic arc length", 1e-10);
    let mut endpoint = Tally::at_most("geodesic endpoint recovery", 1e-10);
    let mut f2 = Tally::at_most("closed-form f'' vs finite differences", 1e-5);
    let mut f2_pos = Tally::above("closed-form f'' positivity", 0.0);
    let mut coercive = Tally::at_most("coercivity bound log cosh^2(t/2) >= t - 2 log 2", 0.0);

    if cfg.trials > 0 {
        for k in 0..=5000 {
            let t = k as f64 * 0.01;
            coercive.record((t - 2.0 * std::f64::consts::LN_2 - log_cosh2_half(t)).max(0.0));
        }
    }

    for _ in 0..cfg.trials {
        let n = random_dim(&mut rng);
        let p = random_ball_point(&mut rng, n, 0.9);
        let q = random_ball_point(&mut rng, n, 0.9);
        let r = random_ball_point(&mut rng, n, 0.9);
        let dpq = distance(&p, &q).unwrap();
        let lhs = cosh2_half_distance(&p, &q).unwrap().ln();
        poisson.record((lhs - log_cosh2_half(dpq)).abs());
        let excess = distance(&p, &r).unwrap() - dpq - distance(&q, &r).unwrap();
        triangle.record(excess.max(0.0));
        let g = random_hua_product(&mut rng, n, 2, 0.7);
        isometry.record((distance(&g.apply(&p).unwrap(), &g.apply(&q).unwrap()).unwrap() - dpq).abs());

        let chart = GeodesicChart::new(p.clone(), random_unit_vector(&mut rng, n)).unwrap();
        let t: f64 = rng.gen_range(-4.0..4.0);
        speed.record((distance(&chart.point(0.0), &chart.point(t)).unwrap() - t.abs()).abs());
        if dpq > 0.0 {
            endpoint.record(geodesic_between(&p, &q).unwrap().point(dpq).dist_euclid(&q));
        }

        let v = random_unit_vector(&mut rng, n);
        let y = random_ball_point(&mut rng, n, 0.95);
        let profile = ConvexityProfile::along(&v, &y).unwrap();
        let t: f64 = rng.gen_range(-10.0..10.0);
        let h = 1e-3;
        let f = |s: f64| kernel_along(&v, &y, s);
        let fd = (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h)) / (12.0 * h * h);
        f2.record((fd - profile.second_derivative(t)).abs());

        let r_abs: f64 = rng.gen_range(0.0..1.0);
        let a = rng.gen_range(-r_abs..=r_abs);
        let grid = ConvexityProfile::new(a, r_abs).unwrap();
        for k in -10..=10 {
            f2_pos.record(grid.second_derivative(k as f64));
        }
    }
    out.extend([
        poisson.finish(),
        triangle.finish(),
        isometry.finish(),
        speed.finish(),
        endpoint.finish(),
        f2.finish(),
        f2_pos.finish(),
        coercive.finish(),
    ]);
}

fn barycenter_suites(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    let mut rng = rng_for(cfg.seed, 4);
    let mut grad = Tally::at_most("residual-gradient identity", 1e-5);
    let mut convex = Tally::above("energy second difference along geodesics", 0.0);
    for _ in 0..cfg.trials {
        let n = random_dim(&mut rng);
        let k = rng.gen_range(1..=5);
        let pts: Vec<_> = (0..k).map(|_| random_ball_point(&mut rng, n, 0.9)).collect();
        let ws: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..3.0)).collect();
        let data = WeightedPoints::new(pts, ws).unwrap();
        let c = random_ball_point(&mut rng, n, 0.8);
        grad.record(gradient_check(&data, &c, 1e-5).unwrap());

        let chart = GeodesicChart::new(c, random_unit_vector(&mut rng, n)).unwrap();
        let t: f64 = rng.gen_range(-2.0..2.0);
        let h = 0.05;
        let g = |s: f64| energy(&data, &chart.point(s)).unwrap();
        convex.record(g(t + h) - 2.0 * g(t) + g(t - h));
    }
    out.extend([grad.finish(), convex.finish()]);
}

/// Run every suite with `cfg.trials` random trials each.
pub fn run(cfg: &VerifyConfig) -> Report {
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    if cfg.trials == 0 {
        warnings.push("no trials requested; every check passes vacuously".to_string());
    } else {
        quaternion_suites(cfg, &mut checks);
        mobius_suites(cfg, &mut checks);
        geometry_suites(cfg, &mut checks);
        barycenter_suites(cfg, &mut checks);
    }
    Report {
        seed: cfg.seed,
        trials: cfg.trials,
        checks,
        warnings,
    }
}
