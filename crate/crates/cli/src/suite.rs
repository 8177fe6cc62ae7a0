//! Built-in acceptance checks run by `elstat check`.
//!
//! Each check pairs a closed form with an independent route and reports the worst
//! discrepancy it saw. `Quick` shrinks the Monte Carlo budgets and sample counts so the
//! whole suite finishes in seconds; `Full` runs the sizes that the published
//! tolerances were set for.

use std::f64::consts::PI;
use std::time::Instant;

use elstat_core::balayage::{
    annulus_weights, balayage_measure, hole_energy, hole_energy_quadrature, log_gap_probability, tail_exponent,
    HoleSpec,
};
use elstat_core::conformal::{green3d, green_two_point, LaurentMap, PlanarDomain, SpatialDomain};
use elstat_core::domains::{cube_self_energy, cube_self_energy_mc, hyperellipsoid_coefficients, Geometry, Kernel, UniformDomain};
use elstat_core::fluctuations::{
    covariance_circle, disk_correlation_linear_response, surface_correlation, LinearStatistic, Route, SurfaceGeometry,
};
use elstat_core::gas::{
    exact_log_partition, free_energy_remainder, run_chain_with, sinh_pair_quadrature, Ensemble, GasModel,
    RadialHistogram, SamplerConfig,
};
use elstat_core::riesz::{PointMode, RieszCircle};
use elstat_core::rng::Stream;
use elstat_core::specfun::unit_ball_volume;
use elstat_core::{Complex64, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Quick,
    Full,
}

impl Suite {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Suite::Quick => quick,
            Suite::Full => full,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub runtime_ms: u64,
}

type Check = fn(Suite) -> Result<(bool, String), Error>;

const CHECKS: [(u32, &str, Check); 11] = [
    (1, "closed-form potentials vs quadrature", closed_forms),
    (2, "quadratic coefficients: sum rule and scale invariance", coefficients),
    (3, "cube self energy vs Monte Carlo", cube),
    (4, "Riesz circle energies", riesz),
    (5, "free-energy remainders", free_energy),
    (6, "sinh model partition function", sinh_model),
    (7, "fluctuation formulas", fluctuations),
    (8, "balayage exterior potentials", balayage),
    (9, "hole probabilities", holes),
    (10, "Metropolis sampler", sampler),
    (11, "Green functions", green_functions),
];

/// Run every check; numerical errors count as failures.
pub fn run_suite(suite: Suite) -> Vec<Outcome> {
    CHECKS.iter().map(|&(id, name, f)| run_one(suite, id, name, f)).collect()
}

/// Run a single check by number.
pub fn run_check(suite: Suite, id: u32) -> Option<Outcome> {
    CHECKS.iter().find(|c| c.0 == id).map(|&(id, name, f)| run_one(suite, id, name, f))
}

fn run_one(suite: Suite, id: u32, name: &'static str, f: Check) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match f(suite) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id, name, passed, detail, runtime_ms: start.elapsed().as_millis() as u64 }
}

fn random_point(st: &mut Stream, lo: f64, hi: f64, d: usize) -> Vec<f64> {
    (0..d).map(|_| lo + (hi - lo) * st.uniform()).collect()
}

fn closed_forms(suite: Suite) -> Result<(bool, String), Error> {
    let geoms = [
        Geometry::Ball { d: 2, radius: 1.0 },
        Geometry::Ball { d: 3, radius: 1.0 },
        Geometry::Ball { d: 5, radius: 1.0 },
        Geometry::Ellipse { a1: 2.0, a2: 1.0 },
        Geometry::Annulus { radius: 1.0, c: 0.5 },
        Geometry::Segment { radius: 1.0 },
        Geometry::Rectangle { lo: [0.0; 2], hi: [1.0; 2] },
        Geometry::Cuboid { lo: [0.0; 3], hi: [1.0; 3] },
    ];
    let count = suite.pick(5, 20);
    let mut worst = 0.0f64;
    let mut where_ = String::new();
    for (gi, g) in geoms.iter().enumerate() {
        let dom = UniformDomain::new(g.clone(), 1.0)?;
        let d = g.dim();
        let (lo, hi) = match g {
            Geometry::Rectangle { .. } | Geometry::Cuboid { .. } => (-1.0, 2.0),
            Geometry::Ellipse { a1, .. } => (-a1, *a1),
            _ => (-2.0, 2.0),
        };
        let mut st = Stream::new(1, 0, gi as u64, 0);
        let mut done = 0;
        while done < count {
            let p = random_point(&mut st, lo, hi, d);
            let closed = match dom.background_potential(&p) {
                Ok(v) => v,
                // outside the validity region of the closed form
                Err(Error::UnsupportedRegion(_)) => continue,
                Err(e) => return Err(e),
            };
            let oracle = dom.potential_oracle(&p, 1e-10)?.value;
            // relative error, measured against max(|V|, 1) because logarithmic
            // potentials cross zero
            let rel = (closed - oracle).abs() / oracle.abs().max(1.0);
            if rel > worst {
                worst = rel;
                where_ = format!("{g:?} at {p:?}");
            }
            done += 1;
        }
    }
    Ok((worst <= 1e-6, format!("worst relative error {worst:.3e} ({where_}), {count} points per geometry")))
}

fn coefficients(suite: Suite) -> Result<(bool, String), Error> {
    let sets = suite.pick(4, 10);
    let mut sum_err = 0.0f64;
    let mut scale_err = 0.0f64;
    for d in [3usize, 4] {
        let mut st = Stream::new(2, 0, d as u64, 0);
        let k = Kernel::coulomb(d as u32);
        for _ in 0..sets {
            let axes = random_point(&mut st, 0.5, 3.0, d);
            let n = 0.5 + 2.0 * st.uniform();
            let c = hyperellipsoid_coefficients(&axes, n)?;
            let rho = n / (unit_ball_volume(d as u32) * axes.iter().product::<f64>());
            let target = rho * k.c_d() * k.chi_d() / 2.0;
            sum_err = sum_err.max((c.alpha.iter().sum::<f64>() - target).abs());
            // same density after scaling: N grows as s^d
            let s = 0.3 + 2.7 * st.uniform();
            let scaled: Vec<f64> = axes.iter().map(|a| s * a).collect();
            let cs = hyperellipsoid_coefficients(&scaled, n * s.powi(d as i32))?;
            for (a, b) in c.alpha.iter().zip(&cs.alpha) {
                scale_err = scale_err.max((a - b).abs());
            }
        }
    }
    Ok((
        sum_err <= 1e-10 && scale_err <= 1e-10,
        format!("sum-rule error {sum_err:.3e}, scale-invariance error {scale_err:.3e} over {sets} axis sets in d = 3, 4"),
    ))
}

fn cube(suite: Suite) -> Result<(bool, String), Error> {
    let samples = suite.pick(1_000_000, 10_000_000);
    let mc = cube_self_energy_mc(1.0, samples, 17)?;
    let exact = cube_self_energy();
    let dev = (mc.value - exact).abs();
    let within = dev <= 3.0 * mc.est_error;
    let budget = suite == Suite::Quick || mc.est_error <= 1e-3;
    Ok((
        within && budget,
        format!("closed form {exact:.12}, Monte Carlo {:.6} ± {:.2e} ({samples} samples), deviation {:.2}σ", mc.value, mc.est_error, dev / mc.est_error),
    ))
}

fn riesz(suite: Suite) -> Result<(bool, String), Error> {
    let mut log_err = 0.0f64;
    for radius in [1.0, 2.5] {
        for n in 1..=64u64 {
            let g = RieszCircle::new(0.0, n, radius)?;
            let exact = g.static_energy().exact.ok_or(Error::Construction("missing exact sum"))?;
            let want = -(n as f64) / 2.0 * (2.0 * PI * g.rho_b()).ln();
            log_err = log_err.max((exact - want).abs());
        }
    }
    let sizes: &[u64] = suite.pick(&[100, 1000], &[100, 1000, 10_000]);
    let mut monotone = true;
    let mut trail = Vec::new();
    for x in [0.25, 0.5] {
        let mut prev = f64::INFINITY;
        for &n in sizes {
            let g = RieszCircle::unit_density(0.5, n)?;
            let d = (g.point_energy(x, PointMode::FiniteN)? - g.point_energy(x, PointMode::Limit)?).abs();
            monotone &= d < prev;
            prev = d;
            trail.push(format!("x={x} N={n}: {d:.2e}"));
        }
    }
    Ok((
        log_err <= 1e-12 && monotone,
        format!("s = 0 worst error {log_err:.2e}; distance to limit {}", trail.join(", ")),
    ))
}

fn free_energy(_: Suite) -> Result<(bool, String), Error> {
    let mut ok = true;
    let mut parts = Vec::new();
    for ens in [Ensemble::Ginibre, Ensemble::Elliptic { tau: 0.5 }, Ensemble::Induced { alpha: 1.0 }] {
        let r50 = free_energy_remainder(&GasModel::new(2.0, 50, ens.clone())?)?;
        let r200 = free_energy_remainder(&GasModel::new(2.0, 200, ens.clone())?)?;
        ok &= r200.abs() <= 0.05 && r200.abs() < r50.abs();
        parts.push(format!("{}: r(50) = {r50:.4}, r(200) = {r200:.4}", ens.name()));
    }
    Ok((ok, parts.join("; ")))
}

fn sinh_model(_: Suite) -> Result<(bool, String), Error> {
    let (c, l) = (1.0, 2.0 * PI);
    let two = exact_log_partition(&GasModel::new(2.0, 2, Ensemble::Sinh { c, l })?)?.exp();
    let quad = sinh_pair_quadrature(c, l, 2.0, 1e-12)?;
    let pair_err = (two - quad.value).abs();
    let mut one_err = 0.0f64;
    for c in [0.5, 1.0, 3.0] {
        let z1 = exact_log_partition(&GasModel::new(2.0, 1, Ensemble::Sinh { c, l })?)?.exp();
        let want = (PI / c).sqrt();
        one_err = one_err.max((z1 - want).abs() / want);
    }
    Ok((
        pair_err <= 1e-8 && one_err <= 8.0 * f64::EPSILON,
        format!("N = 2: closed {two:.14} vs quadrature {:.14} (diff {pair_err:.2e}); N = 1 relative error {one_err:.2e}", quad.value),
    ))
}

fn fluctuations(_: Suite) -> Result<(bool, String), Error> {
    let polys: [fn(f64) -> f64; 5] = [
        |t| t.cos(),
        |t| (2.0 * t).sin() + 0.5 * t.cos(),
        |t| 1.0 + (3.0 * t).cos() - 0.2 * (5.0 * t).sin(),
        |t| t.cos().powi(3),
        |t| 0.7 * (7.0 * t).cos() * t.sin(),
    ];
    let mut route_err = 0.0f64;
    for p in polys {
        let s = LinearStatistic::new(p);
        let q = covariance_circle(&s, &s, 2.0, Route::Quadrature)?;
        let f = covariance_circle(&s, &s, 2.0, Route::Fourier)?;
        route_err = route_err.max((q - f).abs());
    }
    let cos = LinearStatistic::new(f64::cos);
    let cos_err = [Route::Quadrature, Route::Fourier]
        .into_iter()
        .map(|r| covariance_circle(&cos, &cos, 2.0, r).map(|v| (v - 0.5).abs()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let surf = surface_correlation(&SurfaceGeometry::Disk { radius: 1.0 }, 2.0, &[PI], &[0.0])?.value;
    let surf_err = (surf + 1.0 / (16.0 * PI * PI)).abs();
    let fd = disk_correlation_linear_response(1.0, 2.0, PI, 0.0, 1e-4)?;
    let fd_err = (fd - surf).abs();
    Ok((
        route_err <= 1e-8 && cos_err <= 1e-10 && surf_err <= 1e-12 && fd_err <= 1e-6,
        format!(
            "route agreement {route_err:.2e}; cos θ variance error {cos_err:.2e}; surface correlation error {surf_err:.2e}; linear response gap {fd_err:.2e}"
        ),
    ))
}

fn body_potential(dom: &UniformDomain, p: &[f64]) -> Result<f64, Error> {
    match dom.background_potential(p) {
        Ok(v) => Ok(-v),
        Err(Error::UnsupportedRegion(_)) => Ok(-dom.potential_oracle(p, 1e-11)?.value),
        Err(e) => Err(e),
    }
}

fn balayage(suite: Suite) -> Result<(bool, String), Error> {
    let geoms = [
        Geometry::Ball { d: 3, radius: 1.0 },
        Geometry::Annulus { radius: 2.0, c: 0.3 },
        Geometry::Annulus { radius: 2.0, c: 0.5 },
        Geometry::Annulus { radius: 2.0, c: 0.7 },
        Geometry::Ellipse { a1: 2.0, a2: 1.0 },
        Geometry::Ellipse { a1: 3.0, a2: 1.0 },
    ];
    let count = suite.pick(8, 20);
    let mut worst = 0.0f64;
    for (gi, g) in geoms.iter().enumerate() {
        let dom = UniformDomain::new(g.clone(), 2.5)?;
        let mu = balayage_measure(&dom)?;
        let mut st = Stream::new(8, 0, gi as u64, 0);
        let mut pts = Vec::new();
        if let Geometry::Annulus { radius, c } = g {
            // the central cavity is part of the exterior
            for t in [0.0, 0.3, 0.6, 0.9] {
                pts.push(vec![t * c * radius * 0.8, t * c * radius * 0.6]);
            }
        }
        while pts.len() < count {
            let p = random_point(&mut st, -4.0, 4.0, g.dim());
            if !g.contains(&p) {
                pts.push(p);
            }
        }
        for p in &pts {
            worst = worst.max((mu.potential(p)? - body_potential(&dom, p)?).abs());
        }
    }
    let (a, b) = annulus_weights(0.5)?;
    let c: f64 = 0.5;
    let r1 = (a + b - 1.0).abs();
    let r2 = (-b * c.ln() - (0.5 + c * c / (1.0 - c * c) * c.ln())).abs();
    Ok((
        worst <= 1e-6 && r1 <= 1e-12 && r2 <= 1e-12,
        format!("worst potential gap {worst:.2e} over {count} exterior points per body; annulus(1/2) weights ({a:.12}, {b:.12}) residuals {r1:.1e}, {r2:.1e}"),
    ))
}

fn holes(_: Suite) -> Result<(bool, String), Error> {
    let mut energy_err = 0.0f64;
    for a in [0.5, 0.8, 1.0, 1.7] {
        let disk = Geometry::Ball { d: 2, radius: a };
        let oracle = PI * PI * a.powi(4) / 8.0;
        energy_err = energy_err.max((hole_energy_quadrature(&disk)? - oracle).abs());
        energy_err = energy_err.max((hole_energy(&disk)? - oracle).abs());
    }
    let mut gap_err = 0.0f64;
    let beta = 2.0;
    for n in [10.0f64, 100.0, 1000.0] {
        for r in [0.1, 0.3, 0.7] {
            let spec = HoleSpec::new(Geometry::Ball { d: 2, radius: r * n.sqrt() }, 1.0 / PI, beta)?;
            let want = -beta * n * n * r.powi(4) / 8.0;
            gap_err = gap_err.max(((log_gap_probability(&spec)? - want) / want).abs());
        }
    }
    let tail = tail_exponent(2.0, 3.0, 1.0, 10.0)?;
    // −(β/4)(γ−2)α²R^{2γ} ln R = −(1/2)·10⁶·ln 10
    let hand = -0.5e6 * 10f64.ln();
    Ok((
        energy_err <= 1e-8 && gap_err <= 1e-13 && tail == hand,
        format!("disk energy error {energy_err:.2e}; gap-rate relative error {gap_err:.1e}; tail {tail} vs {hand}"),
    ))
}

fn radial_density(model: &GasModel, sweeps: u64, seed: u64) -> Result<elstat_core::gas::RadialDensity, Error> {
    let n = model.n() as f64;
    let mut hist = RadialHistogram::new(2.5 * n.sqrt(), 400)?;
    run_chain_with(model, sweeps, seed, &SamplerConfig::default(), |_, pos| hist.push(pos))?;
    hist.finish()
}

fn sampler(suite: Suite) -> Result<(bool, String), Error> {
    let n = 32usize;
    let sq = (n as f64).sqrt();
    let sweeps = suite.pick(20_000, 200_000);
    let gin = radial_density(&GasModel::new(2.0, n, Ensemble::Ginibre)?, sweeps, 2024)?;
    let edge = gin.half_density_edge.unwrap_or(f64::NAN);
    let edge_ok = (edge / sq - 1.0).abs() <= 0.05;
    let bulk = gin.mean_density(0.2 * sq, 0.8 * sq).unwrap_or(f64::NAN);
    let bulk_ok = (bulk * PI - 1.0).abs() <= 0.10;
    let alpha = 1.0;
    let ind = radial_density(&GasModel::new(2.0, n, Ensemble::Induced { alpha })?, sweeps, 2025)?;
    let hole = ind.density_within(0.9 * (alpha * n as f64).sqrt());
    let hole_ok = hole < 0.05 / PI;

    let pairs = suite.pick(1000, 10_000);
    let m = GasModel::new(2.0, 8, Ensemble::Elliptic { tau: 0.4 })?;
    let mut rng = Stream::new(99, 0, 0, 0);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let x: Vec<Complex64> = (0..8).map(|_| Complex64::new(3.0 * rng.normal(), 3.0 * rng.normal())).collect();
        let i = rng.below(8) as usize;
        let to = x[i] + Complex64::new(rng.normal(), rng.normal());
        let mut y = x.clone();
        y[i] = to;
        let fwd = m.acceptance_probability(&x, i, to);
        let bwd = m.acceptance_probability(&y, i, x[i]);
        let want = (-m.beta() * (m.total_energy(&y) - m.total_energy(&x))).exp();
        worst = worst.max((fwd / bwd / want - 1.0).abs());
    }
    Ok((
        edge_ok && bulk_ok && hole_ok && worst <= 1e-12,
        format!(
            "GinUE ({sweeps} sweeps): edge {:.4}·√N, bulk density {:.4}/π; induced hole density {:.4}/π; detailed balance {worst:.1e} over {pairs} pairs",
            edge / sq,
            bulk * PI,
            hole * PI
        ),
    ))
}

fn green_functions(_: Suite) -> Result<(bool, String), Error> {
    let pairs = 200;
    let mut sym = 0.0f64;
    let mut edge = 0.0f64;
    let c = Complex64::new;
    let mut st = Stream::new(11, 0, 0, 0);
    let mut polar = |r0: f64, r1: f64| Complex64::from_polar(r0 + (r1 - r0) * st.uniform(), 2.0 * PI * st.uniform());

    let disk = PlanarDomain::Disk { radius: 1.5 };
    let map = LaurentMap::ellipse(2.0, 1.0)?;
    let mapped = PlanarDomain::Mapped(map.clone());
    for _ in 0..pairs {
        let (z, w) = (polar(1.5, 6.0), polar(1.5, 6.0));
        sym = sym.max((green_two_point(&disk, z, w)? - green_two_point(&disk, w, z)?).abs());
        edge = edge.max(green_two_point(&disk, polar(1.5, 1.5), w)?.abs());
        let (zm, wm) = (map.xi(polar(1.0, 4.0)), map.xi(polar(1.0, 4.0)));
        sym = sym.max((green_two_point(&mapped, zm, wm)? - green_two_point(&mapped, wm, zm)?).abs());
        edge = edge.max(green_two_point(&mapped, map.xi(polar(1.0, 1.0)), wm)?.abs());
    }
    let mut st = Stream::new(12, 0, 0, 0);
    let mut u = move || st.uniform();
    let mut transport = 0.0f64;
    let to_disk = |z: Complex64| (z + c(0.0, 1.0)) / (z - c(0.0, 1.0));
    let unit = PlanarDomain::Disk { radius: 1.0 };
    for _ in 0..pairs {
        let z = c(4.0 * u() - 2.0, 3.0 * u() + 1e-3);
        let w = c(4.0 * u() - 2.0, 3.0 * u() + 1e-3);
        let h = green_two_point(&PlanarDomain::HalfPlane, z, w)?;
        sym = sym.max((h - green_two_point(&PlanarDomain::HalfPlane, w, z)?).abs());
        edge = edge.max(green_two_point(&PlanarDomain::HalfPlane, c(10.0 * u() - 5.0, 0.0), w)?.abs());
        transport = transport.max((h - green_two_point(&unit, to_disk(z), to_disk(w))?).abs());

        let sphere = SpatialDomain::Sphere { radius: 1.0 };
        let dir = |u1: f64, u2: f64| {
            let ct = 2.0 * u1 - 1.0;
            let st = (1.0 - ct * ct).sqrt();
            let ph = 2.0 * PI * u2;
            [st * ph.cos(), st * ph.sin(), ct]
        };
        let scale = |v: [f64; 3], r: f64| [v[0] * r, v[1] * r, v[2] * r];
        let p = scale(dir(u(), u()), 1.0 + 4.0 * u());
        let q = scale(dir(u(), u()), 1.0 + 4.0 * u());
        sym = sym.max((green3d(sphere, &p, &q)? - green3d(sphere, &q, &p)?).abs());
        edge = edge.max(green3d(sphere, &dir(u(), u()), &q)?.abs());
        let hp = [4.0 * u() - 2.0, 4.0 * u() - 2.0, 3.0 * u() + 1e-3];
        let hq = [4.0 * u() - 2.0, 4.0 * u() - 2.0, 3.0 * u() + 1e-3];
        sym = sym.max((green3d(SpatialDomain::HalfSpace, &hp, &hq)? - green3d(SpatialDomain::HalfSpace, &hq, &hp)?).abs());
        edge = edge.max(green3d(SpatialDomain::HalfSpace, &[hp[0], hp[1], 0.0], &hq)?.abs());
    }
    Ok((
        sym <= 1e-12 && edge <= 1e-12 && transport <= 1e-12,
        format!("symmetry {sym:.1e}, boundary values {edge:.1e}, disk↔half-plane transport {transport:.1e} over {pairs} pairs per geometry"),
    ))
}
