//! Uniformly charged domains: closed-form background potentials and energies, and a
//! direct-quadrature oracle for the defining integral `V(r) = −ρ_b ∫_Ω Φ_d(r, r') dr'`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::quad::{MeanVar, Quad};
use crate::riesz::riesz_kernel;
use crate::rng::Stream;
use crate::specfun::{carlson_rd, carlson_rf, unit_ball_volume, unit_sphere_area};
use crate::{Error, EvalResult, Result};

/// Coulomb (`s = d − 2`) or general Riesz pair kernel in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub d: u32,
    pub s: f64,
}

impl Kernel {
    pub fn coulomb(d: u32) -> Self {
        Self { d, s: d as f64 - 2.0 }
    }

    pub fn riesz(d: u32, s: f64) -> Self {
        Self { d, s }
    }

    /// `c_d`, the area of the unit sphere in `R^d`.
    pub fn c_d(&self) -> f64 {
        unit_sphere_area(self.d)
    }

    /// `χ_d = d − 2` for `d > 2`, else 1.
    pub fn chi_d(&self) -> f64 {
        if self.d > 2 { self.d as f64 - 2.0 } else { 1.0 }
    }

    pub fn eval(&self, r: &[f64], rp: &[f64]) -> Result<f64> {
        if r.len() != self.d as usize || rp.len() != self.d as usize {
            return Err(Error::Domain("point dimension does not match kernel"));
        }
        let dist = distance(r, rp);
        if dist == 0.0 {
            return Err(Error::Singularity("kernel evaluated at coincident points"));
        }
        Ok(riesz_kernel(self.s, dist))
    }
}

/// The Coulomb potential `Φ_d(r)` of a unit charge at distance `r`.
pub fn coulomb(d: u32, r: f64) -> f64 {
    riesz_kernel(d as f64 - 2.0, r)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// Ball of radius `R` centred at the origin of `R^d`.
    Ball { d: u32, radius: f64 },
    /// `cR ≤ |r| ≤ R` in the plane.
    Annulus { radius: f64, c: f64 },
    /// `[−R, R]`.
    Segment { radius: f64 },
    /// `Σ x_j²/a_j² ≤ 1` in `R^d`, `d = axes.len()`.
    Hyperellipsoid { axes: Vec<f64> },
    /// `x²/a1² + y²/a2² ≤ 1`.
    Ellipse { a1: f64, a2: f64 },
    /// `[lo_1, hi_1] × [lo_2, hi_2] × [lo_3, hi_3]`.
    Cuboid { lo: [f64; 3], hi: [f64; 3] },
    /// `[lo_1, hi_1] × [lo_2, hi_2]`.
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Ball { d, .. } => *d as usize,
            Geometry::Annulus { .. } | Geometry::Ellipse { .. } | Geometry::Rectangle { .. } => 2,
            Geometry::Segment { .. } => 1,
            Geometry::Hyperellipsoid { axes } => axes.len(),
            Geometry::Cuboid { .. } => 3,
        }
    }

    /// `|Ω|` in closed form.
    pub fn volume(&self) -> f64 {
        match self {
            Geometry::Ball { d, radius } => unit_ball_volume(*d) * radius.powi(*d as i32),
            Geometry::Annulus { radius, c } => PI * radius * radius * (1.0 - c * c),
            Geometry::Segment { radius } => 2.0 * radius,
            Geometry::Hyperellipsoid { axes } => {
                unit_ball_volume(axes.len() as u32) * axes.iter().product::<f64>()
            }
            Geometry::Ellipse { a1, a2 } => PI * a1 * a2,
            Geometry::Cuboid { lo, hi } => (0..3).map(|i| hi[i] - lo[i]).product(),
            Geometry::Rectangle { lo, hi } => (0..2).map(|i| hi[i] - lo[i]).product(),
        }
    }

    pub fn contains(&self, r: &[f64]) -> bool {
        match self {
            Geometry::Ball { radius, .. } => norm(r) <= *radius,
            Geometry::Annulus { radius, c } => {
                let n = norm(r);
                n <= *radius && n >= c * radius
            }
            Geometry::Segment { radius } => r[0].abs() <= *radius,
            Geometry::Hyperellipsoid { axes } => ellipsoid_form(axes, r, 0.0) <= 1.0,
            Geometry::Ellipse { a1, a2 } => ellipsoid_form(&[*a1, *a2], r, 0.0) <= 1.0,
            Geometry::Cuboid { lo, hi } => (0..3).all(|i| r[i] >= lo[i] && r[i] <= hi[i]),
            Geometry::Rectangle { lo, hi } => (0..2).all(|i| r[i] >= lo[i] && r[i] <= hi[i]),
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let ok = match self {
            Geometry::Ball { d, radius } => *d >= 1 && positive(*radius),
            Geometry::Annulus { radius, c } => positive(*radius) && *c > 0.0 && *c < 1.0,
            Geometry::Segment { radius } => positive(*radius),
            Geometry::Hyperellipsoid { axes } => axes.len() >= 2 && axes.iter().all(|&a| positive(a)),
            Geometry::Ellipse { a1, a2 } => positive(*a1) && positive(*a2),
            Geometry::Cuboid { lo, hi } => (0..3).all(|i| positive(hi[i] - lo[i])),
            Geometry::Rectangle { lo, hi } => (0..2).all(|i| positive(hi[i] - lo[i])),
        };
        if ok { Ok(()) } else { Err(Error::Parameter("geometry lengths must be positive (and 0 < c < 1)")) }
    }
}

/// `S_1(λ) = Σ x_j²/(a_j² + λ)`.
fn ellipsoid_form(axes: &[f64], r: &[f64], lambda: f64) -> f64 {
    axes.iter().zip(r).map(|(a, x)| x * x / (a * a + lambda)).sum()
}

fn inv_sqrt_s0(axes: &[f64], lambda: f64) -> f64 {
    axes.iter().map(|a| 1.0 / (a * a + lambda).sqrt()).product()
}

/// Quadratic interior potential `V = Σ α_j x_j² + α_0` of a uniform hyperellipsoid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCoefficients {
    pub alpha0: f64,
    pub alpha: Vec<f64>,
}

/// Uniform background of total charge `−N` filling a geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformDomain {
    geometry: Geometry,
    n: f64,
}

const TIGHT: Quad = Quad { abs_tol: 1e-14, rel_tol: 1e-13, max_segments: 4000 };

impl UniformDomain {
    pub fn new(geometry: Geometry, n: f64) -> Result<Self> {
        geometry.validate()?;
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Parameter("total charge N must be positive"));
        }
        Ok(Self { geometry, n })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn volume(&self) -> f64 {
        self.geometry.volume()
    }

    pub fn rho_b(&self) -> f64 {
        self.n / self.volume()
    }

    fn check_point(&self, r: &[f64]) -> Result<()> {
        if r.len() != self.dim() {
            return Err(Error::Domain("point dimension does not match the domain"));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("point coordinates must be finite"));
        }
        Ok(())
    }

    /// Closed-form potential of the background at `r`.
    pub fn background_potential(&self, r: &[f64]) -> Result<f64> {
        self.check_point(r)?;
        let rho = self.rho_b();
        let n = self.n;
        match &self.geometry {
            Geometry::Ball { d, radius } => Ok(ball_potential(*d, *radius, n, r)),
            Geometry::Segment { radius } => Ok(ball_potential(1, *radius, n, r)),
            Geometry::Annulus { radius, c } => {
                let t = norm(r);
                let big_r = *radius;
                Ok(if t > big_r {
                    n * t.ln()
                } else if t >= c * big_r {
                    0.5 * PI * rho * (t * t - big_r * big_r) + PI * big_r * big_r * rho * (big_r.ln() - c * c * t.ln())
                } else {
                    n * (-0.5 + big_r.ln() - c * c * c.ln() / (1.0 - c * c))
                })
            }
            Geometry::Ellipse { a1, a2 } => ellipse_potential(*a1, *a2, rho, r),
            Geometry::Hyperellipsoid { axes } if axes.len() == 2 => ellipse_potential(axes[0], axes[1], rho, r),
            Geometry::Hyperellipsoid { axes } => hyperellipsoid_potential(axes, n, r),
            Geometry::Cuboid { lo, hi } => Ok(-rho * cuboid_unit_potential(lo, hi, r)),
            Geometry::Rectangle { lo, hi } => {
                let a = [lo[0] - r[0], hi[0] - r[0]];
                let b = [lo[1] - r[1], hi[1] - r[1]];
                let mut s = 0.0;
                for (i, ai) in a.iter().enumerate() {
                    for (j, bj) in b.iter().enumerate() {
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        s += sign * log_antiderivative(*ai, *bj);
                    }
                }
                Ok(rho * s)
            }
        }
    }

    /// `U_bb + U_pb` for unit charges at `points`.
    pub fn interaction_energy<P: AsRef<[f64]>>(&self, points: &[P]) -> Result<f64> {
        let mut upb = 0.0;
        for p in points {
            upb += self.background_potential(p.as_ref())?;
        }
        Ok(upb + self.self_energy()?)
    }

    /// Background–background energy `U_bb = −(ρ_b/2)∫_Ω V`.
    pub fn self_energy(&self) -> Result<f64> {
        let n = self.n;
        match &self.geometry {
            Geometry::Ball { d, radius } => Ok(ball_self_energy(*d, *radius, n)),
            Geometry::Segment { radius } => Ok(ball_self_energy(1, *radius, n)),
            Geometry::Annulus { radius, c } => {
                let c2 = c * c;
                let omc = 1.0 - c2;
                Ok(-n * n * (-0.125 + 0.5 * radius.ln() + c2 * c2 * c.ln() / (2.0 * omc * omc) + c2 / (4.0 * omc)))
            }
            Geometry::Ellipse { a1, a2 } => Ok(ellipse_self_energy(*a1, *a2, n)),
            Geometry::Hyperellipsoid { axes } if axes.len() == 2 => Ok(ellipse_self_energy(axes[0], axes[1], n)),
            Geometry::Hyperellipsoid { axes } => {
                let d = axes.len() as f64;
                let q = hyperellipsoid_coefficients(axes, n)?;
                let quad: f64 = q.alpha.iter().zip(axes).map(|(al, a)| al * a * a).sum();
                Ok(-0.5 * n * (quad / (d + 2.0) + q.alpha0))
            }
            Geometry::Cuboid { lo, hi } => {
                let side = hi[0] - lo[0];
                let cube = (0..3).all(|i| ((hi[i] - lo[i]) - side).abs() <= 1e-12 * side);
                if !cube {
                    return Err(Error::UnsupportedGeometry("closed-form self energy exists only for cubes"));
                }
                let rho = self.rho_b();
                Ok(rho * rho * side.powi(5) * cube_self_energy())
            }
            Geometry::Rectangle { .. } => {
                Err(Error::UnsupportedGeometry("no closed-form self energy for rectangles"))
            }
        }
    }

    /// Direct numerical evaluation of `−ρ_b ∫_Ω Φ_d(r, r') dr'`.
    ///
    /// Planar and ball domains use nested adaptive Gauss–Kronrod rules split along the
    /// singular lines; boxes are reduced to signed corner integrals; ellipsoids are
    /// integrated over ray directions from `r`, which removes the singularity exactly
    /// (adaptive on the sphere for `d = 3`, randomly shifted lattice rules for `d > 3`).
    pub fn potential_oracle(&self, r: &[f64], tol: f64) -> Result<EvalResult> {
        self.check_point(r)?;
        if !(tol > 0.0) {
            return Err(Error::Parameter("tolerance must be positive"));
        }
        let rho = self.rho_b();
        let scaled = tol / rho;
        let raw = match &self.geometry {
            Geometry::Segment { radius } | Geometry::Ball { d: 1, radius } => {
                let x = r[0];
                let q = Quad::new(scaled, 1e-14);
                q.integrate_split(|xp| -(x - xp).abs(), -radius, *radius, &[x])?
            }
            Geometry::Ball { d, radius } => ball_oracle(*d, *radius, r, scaled)?,
            Geometry::Annulus { radius, c } => {
                let (t0, th0) = polar(r);
                planar_polar_oracle(|t, th| (t * th.cos(), t * th.sin(), t), c * radius, *radius, t0, th0, r, scaled)?
            }
            Geometry::Ellipse { a1, a2 } => ellipse_oracle(*a1, *a2, r, scaled)?,
            Geometry::Hyperellipsoid { axes } if axes.len() == 2 => ellipse_oracle(axes[0], axes[1], r, scaled)?,
            Geometry::Hyperellipsoid { axes } if axes.len() == 3 => {
                if ellipsoid_form(axes, r, 0.0) < 1.0 {
                    ray_oracle_3d(axes, r, scaled)?
                } else {
                    exterior_oracle_3d(axes, r, scaled)?
                }
            }
            Geometry::Hyperellipsoid { axes } => ray_oracle_qmc(axes, r, scaled)?,
            Geometry::Rectangle { lo, hi } => {
                let mut value = 0.0;
                let mut err = 0.0;
                for (i, a) in [lo[0], hi[0]].iter().enumerate() {
                    for (j, b) in [lo[1], hi[1]].iter().enumerate() {
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        let g = corner_log_integral(a - r[0], b - r[1], 0.25 * scaled)?;
                        value += sign * g.value;
                        err += g.est_error;
                    }
                }
                // ∫ −ln|r − r'| over the box, as −Σ±∫∫ln.
                EvalResult::new(-value, err)
            }
            Geometry::Cuboid { lo, hi } => {
                let mut value = 0.0;
                let mut err = 0.0;
                for mask in 0..8u32 {
                    let mut dl = [0.0; 3];
                    for k in 0..3 {
                        dl[k] = if mask >> k & 1 == 0 { r[k] - lo[k] } else { hi[k] - r[k] };
                    }
                    let g = corner_inverse_distance_integral(dl, scaled / 8.0)?;
                    value += g.value;
                    err += g.est_error;
                }
                EvalResult::new(value, err)
            }
        };
        Ok(EvalResult::new(-rho * raw.value, rho * raw.est_error))
    }
}

fn ball_potential(d: u32, radius: f64, n: f64, r: &[f64]) -> f64 {
    let t = norm(r);
    if t <= radius {
        let k = Kernel::coulomb(d);
        let rho = n / (unit_ball_volume(d) * radius.powi(d as i32));
        rho * k.c_d() * k.chi_d() / (2.0 * d as f64) * (t * t - radius * radius) - n * coulomb(d, radius)
    } else {
        -n * coulomb(d, t)
    }
}

fn ball_self_energy(d: u32, radius: f64, n: f64) -> f64 {
    let k = Kernel::coulomb(d);
    let df = d as f64;
    let rho = n / (unit_ball_volume(d) * radius.powi(d as i32));
    n * rho * k.c_d() * k.chi_d() * radius * radius / (2.0 * df * (df + 2.0)) + 0.5 * n * n * coulomb(d, radius)
}

fn ellipse_potential(a1: f64, a2: f64, rho: f64, r: &[f64]) -> Result<f64> {
    if ellipsoid_form(&[a1, a2], r, 0.0) > 1.0 + 1e-12 {
        return Err(Error::UnsupportedRegion(
            "the ellipse closed form holds inside the ellipse only; use the quadrature oracle",
        ));
    }
    let (x, y) = (r[0], r[1]);
    let k = (a1 - a2) / (a1 + a2);
    Ok(0.5 * PI * rho * (x * x + y * y - k * (x * x - y * y) + 2.0 * a1 * a2 * (0.5 * (a1 + a2)).ln() - a1 * a2))
}

fn ellipse_self_energy(a1: f64, a2: f64, n: f64) -> f64 {
    n * n * (0.125 - 0.5 * (0.5 * (a1 + a2)).ln())
}

/// `d(d−2)/4 · N`, the prefactor of the λ-integral representation.
fn hyper_prefactor(d: usize, n: f64) -> f64 {
    let d = d as f64;
    n * d * (d - 2.0) / 4.0
}

fn hyperellipsoid_potential(axes: &[f64], n: f64, r: &[f64]) -> Result<f64> {
    let d = axes.len();
    let pre = hyper_prefactor(d, n);
    let s1 = |lam: f64| ellipsoid_form(axes, r, lam);
    let lam_star = if s1(0.0) < 1.0 {
        0.0
    } else {
        // S_1 is strictly decreasing in λ; bracket and bisect S_1(λ) = 1.
        let mut hi = axes.iter().fold(0.0f64, |m, a| m.max(a * a)).max(1.0);
        while s1(hi) >= 1.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if s1(mid) >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * hi {
                break;
            }
        }
        hi
    };
    // Rescale λ so the integrand varies on an O(1) scale.
    let scale = axes.iter().fold(lam_star, |m, a| m.max(a * a));
    let v = TIGHT.integrate_to_infinity(
        |mu| {
            let lam = scale * mu;
            scale * (1.0 - s1(lam)).max(0.0) * inv_sqrt_s0(axes, lam)
        },
        lam_star / scale,
    );
    let v = match v {
        Ok(v) => v.value,
        Err(Error::Budget { estimate, .. }) => estimate,
        Err(e) => return Err(e),
    };
    Ok(-pre * v)
}

/// Coefficients of the interior quadratic potential `Σ α_j x_j² + α_0`.
///
/// For `d ≥ 3` the λ-integrals are evaluated by adaptive quadrature; for `d = 2` the
/// ellipse closed form is used.
pub fn hyperellipsoid_coefficients(axes: &[f64], n: f64) -> Result<QuadraticCoefficients> {
    Geometry::Hyperellipsoid { axes: axes.to_vec() }.validate()?;
    let d = axes.len();
    if d == 2 {
        let (a1, a2) = (axes[0], axes[1]);
        let rho = n / (PI * a1 * a2);
        let k = (a1 - a2) / (a1 + a2);
        let h = 0.5 * PI * rho;
        return Ok(QuadraticCoefficients {
            alpha0: h * (2.0 * a1 * a2 * (0.5 * (a1 + a2)).ln() - a1 * a2),
            alpha: alloc::vec![h * (1.0 - k), h * (1.0 + k)],
        });
    }
    let pre = hyper_prefactor(d, n);
    let scale = axes.iter().fold(0.0f64, |m, a| m.max(a * a));
    let integral = |j: Option<usize>| -> Result<f64> {
        TIGHT
            .integrate_to_infinity(
                |mu| {
                    let lam = scale * mu;
                    let w = j.map_or(1.0, |j| 1.0 / (axes[j] * axes[j] + lam));
                    scale * w * inv_sqrt_s0(axes, lam)
                },
                0.0,
            )
            .map(|r| r.value)
    };
    let alpha = (0..d).map(|j| integral(Some(j)).map(|v| pre * v)).collect::<Result<Vec<_>>>()?;
    Ok(QuadraticCoefficients { alpha0: -pre * integral(None)?, alpha })
}

/// The `d = 3` coefficients through Carlson's symmetric integrals (demagnetising factors).
pub fn ellipsoid_coefficients_carlson(axes: [f64; 3], n: f64) -> Result<QuadraticCoefficients> {
    let sq = axes.map(|a| a * a);
    let pre = hyper_prefactor(3, n);
    let mut alpha = Vec::with_capacity(3);
    for j in 0..3 {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        alpha.push(pre * 2.0 / 3.0 * carlson_rd(sq[k], sq[l], sq[j])?);
    }
    Ok(QuadraticCoefficients { alpha0: -pre * 2.0 * carlson_rf(sq[0], sq[1], sq[2])?, alpha })
}

/// `(3.16)`-type closed form of `∫_box dr'/|r − r'|` at unit density.
fn cuboid_unit_potential(lo: &[f64; 3], hi: &[f64; 3], y: &[f64]) -> f64 {
    let mut total = 0.0;
    for mask in 0..8u32 {
        let mut dl = [0.0; 3];
        for k in 0..3 {
            dl[k] = if mask >> k & 1 == 0 { y[k] - lo[k] } else { hi[k] - y[k] };
        }
        let rho = (dl[0] * dl[0] + dl[1] * dl[1] + dl[2] * dl[2]).sqrt();
        if rho == 0.0 {
            continue;
        }
        for c in 0..3 {
            let (d1, d2, d3) = (dl[c], dl[(c + 1) % 3], dl[(c + 2) % 3]);
            if d1 != 0.0 && d2 != 0.0 {
                total += d1 * d2 * guarded_atanh(d3 / rho);
            }
            if d1 != 0.0 {
                total -= 0.5 * d1 * d1 * (d2 * d3 / (d1 * rho)).atan();
            }
        }
    }
    total
}

/// `atanh(x) = ½ ln((1+x)/(1−x))` with a floor on the vanishing factor, so that face,
/// edge and corner points stay finite.
fn guarded_atanh(x: f64) -> f64 {
    let floor = 1e-300;
    0.5 * ((1.0 + x).max(floor) / (1.0 - x).max(floor)).ln()
}

/// `F(a, b) = ½[ab ln(a²+b²) − 3ab + b² arctan(a/b) + a² arctan(b/a)]`, a planar
/// antiderivative of `ln √(a²+b²)` in both variables.
fn log_antiderivative(a: f64, b: f64) -> f64 {
    let mut v = 0.0;
    if a != 0.0 && b != 0.0 {
        v += a * b * (a * a + b * b).ln() - 3.0 * a * b;
        v += b * b * (a / b).atan() + a * a * (b / a).atan();
    }
    0.5 * v
}

/// Exact closed form of `½∫∫ dr dr'/|r − r'|` over the unit cube.
pub fn cube_self_energy() -> f64 {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    0.2 * (1.0 + s2 - 2.0 * s3) + ((1.0 + s2) * (2.0 + s3)).ln() - PI / 3.0
}

/// Monte Carlo estimate of `½∫∫ dr dr'/|r − r'|` over a cube of side `side`.
///
/// Sample `k` uses random-stream block `k / 256`, so results are reproducible for a given
/// seed and independent of any threading used by callers.
pub fn cube_self_energy_mc(side: f64, samples: u64, seed: u64) -> Result<EvalResult> {
    if samples < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: samples as usize });
    }
    let mut acc = MeanVar::default();
    let per_block = 256u64;
    let mut block = 0;
    let mut done = 0;
    while done < samples {
        let mut st = Stream::new(seed, 0, 0x00C0_BE00, block);
        let m = per_block.min(samples - done);
        for _ in 0..m {
            let mut d2 = 0.0;
            for _ in 0..3 {
                let dx = st.uniform() - st.uniform();
                d2 += dx * dx;
            }
            acc.push(if d2 > 0.0 { 1.0 / d2.sqrt() } else { 0.0 });
        }
        done += m;
        block += 1;
    }
    // E[1/|r−r'|] over unit-cube pairs; (1/2)·|cube|²·E scaled by side^5.
    let f = 0.5 * side.powi(5);
    Ok(EvalResult::new(f * acc.mean(), f * acc.stderr()))
}

fn polar(r: &[f64]) -> (f64, f64) {
    (r[0].hypot(r[1]), r[1].atan2(r[0]))
}

/// Nested adaptive rule for `∫∫ −ln|r − m(t, θ)| J dt dθ` with `(x, y, J) = m(t, θ)`,
/// `t ∈ [t_lo, t_hi]`, `θ` over a full turn starting at `θ0 − π`, split at `t0` / `θ0`.
fn planar_polar_oracle<M: Fn(f64, f64) -> (f64, f64, f64) + Copy>(
    map: M,
    t_lo: f64,
    t_hi: f64,
    t0: f64,
    th0: f64,
    r: &[f64],
    tol: f64,
) -> Result<EvalResult> {
    let inner = Quad::new(tol * 1e-3, 1e-13).with_max_segments(400);
    let outer = Quad::new(tol, 1e-13);
    outer.integrate_split(
        |t| {
            inner
                .integrate_split_lenient(
                    |th| {
                        let (x, y, jac) = map(t, th);
                        let d = (x - r[0]).hypot(y - r[1]);
                        if d == 0.0 { 0.0 } else { -d.ln() * jac }
                    },
                    th0 - PI,
                    th0 + PI,
                    &[th0],
                )
                .value
        },
        t_lo,
        t_hi,
        &[t0],
    )
}

fn ellipse_oracle(a1: f64, a2: f64, r: &[f64], tol: f64) -> Result<EvalResult> {
    let (t0, th0) = polar(&[r[0] / a1, r[1] / a2]);
    planar_polar_oracle(
        move |t, th| (a1 * t * th.cos(), a2 * t * th.sin(), a1 * a2 * t),
        0.0,
        1.0,
        t0,
        th0,
        r,
        tol,
    )
}

/// `∫_{B_R} Φ_d(|r − r'|) dr'` in polar coordinates about the centre, with the angle
/// measured from `r`: `c_{d−1} ∫ρ^{d−1}dρ ∫₀^π Φ_d sin^{d−2}θ dθ`.
fn ball_oracle(d: u32, radius: f64, r: &[f64], tol: f64) -> Result<EvalResult> {
    let t = norm(r);
    let cdm1 = unit_sphere_area(d - 1);
    let inner = Quad::new(tol * 1e-3, 1e-13).with_max_segments(400);
    let outer = Quad::new(tol / cdm1, 1e-13);
    let res = outer.integrate_split(
        |p| {
            if t == 0.0 {
                return PI.powi(0) * angular_mass(d) * coulomb(d, p) * p.powi(d as i32 - 1);
            }
            let ang = inner
                .integrate_lenient(
                    |th| {
                        let dist2 = (t * t + p * p - 2.0 * t * p * th.cos()).max(0.0);
                        let dist = dist2.sqrt();
                        if dist == 0.0 { 0.0 } else { coulomb(d, dist) * th.sin().powi(d as i32 - 2) }
                    },
                    0.0,
                    PI,
                )
                .value;
            ang * p.powi(d as i32 - 1)
        },
        0.0,
        radius,
        &[t],
    )?;
    Ok(EvalResult::new(cdm1 * res.value, cdm1 * res.est_error))
}

/// `∫₀^π sin^{d−2}θ dθ`.
fn angular_mass(d: u32) -> f64 {
    unit_sphere_area(d) / unit_sphere_area(d - 1)
}

/// Radial part of `∫ |r − r'|^{2−d}` along the ray `r + ρu`: `∫ρ dρ` over the chord.
fn ray_chord(axes: &[f64], r: &[f64], u: &[f64]) -> f64 {
    let (mut a, mut b, mut c) = (0.0, 0.0, -1.0);
    for ((ax, x), v) in axes.iter().zip(r).zip(u) {
        let w = 1.0 / (ax * ax);
        a += v * v * w;
        b += 2.0 * x * v * w;
        c += x * x * w;
    }
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    let lo = ((-b - sq) / (2.0 * a)).max(0.0);
    let hi = ((-b + sq) / (2.0 * a)).max(0.0);
    0.5 * (hi * hi - lo * lo)
}

fn ray_oracle_3d(axes: &[f64], r: &[f64], tol: f64) -> Result<EvalResult> {
    let inner = Quad::new(tol * 1e-3, 1e-13).with_max_segments(400);
    let outer = Quad::new(tol, 1e-13);
    outer.integrate(
        |th| {
            let (s, c) = th.sin_cos();
            inner
                .integrate_lenient(
                    |ph| {
                        let (sp, cp) = ph.sin_cos();
                        ray_chord(axes, r, &[s * cp, s * sp, c])
                    },
                    0.0,
                    2.0 * PI,
                )
                .value
                * s
        },
        0.0,
        PI,
    )
}

/// For points outside the ellipsoid the integrand is smooth on the body, so plain
/// nested quadrature in ellipsoidal polar coordinates is used.
fn exterior_oracle_3d(axes: &[f64], r: &[f64], tol: f64) -> Result<EvalResult> {
    let (a1, a2, a3) = (axes[0], axes[1], axes[2]);
    let q3 = Quad::new(tol * 1e-6, 1e-13).with_max_segments(200);
    let q2 = Quad::new(tol * 1e-3, 1e-13).with_max_segments(200);
    let q1 = Quad::new(tol, 1e-13);
    q1.integrate(
        |t| {
            q2.integrate_lenient(
                |th| {
                    let (s, c) = th.sin_cos();
                    q3.integrate_lenient(
                        |ph| {
                            let (sp, cp) = ph.sin_cos();
                            let p = [a1 * t * s * cp, a2 * t * s * sp, a3 * t * c];
                            let dist = distance(r, &p);
                            if dist == 0.0 { 0.0 } else { 1.0 / dist }
                        },
                        0.0,
                        2.0 * PI,
                    )
                    .value
                        * s
                },
                0.0,
                PI,
            )
            .value
                * a1
                * a2
                * a3
                * t
                * t
        },
        0.0,
        1.0,
    )
}

/// Randomly shifted Kronecker lattice over directions; the spread of the shifted
/// replicas gives the error estimate.
fn ray_oracle_qmc(axes: &[f64], r: &[f64], tol: f64) -> Result<EvalResult> {
    let d = axes.len();
    let m = d + d % 2;
    // Generalised golden ratio: the root of x^{m+1} = x + 1.
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (m as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=m).map(|k| (1.0 / phi).powi(k as i32) % 1.0).collect();
    let area = unit_sphere_area(d as u32);
    let replicas = 16;
    let mut points = 1u64 << 14;
    let mut last = EvalResult::new(f64::NAN, f64::INFINITY);
    let mut u = alloc::vec![0.0; m];
    let mut dir = alloc::vec![0.0; d];
    while points <= 1 << 22 {
        let mut mv = MeanVar::default();
        for rep in 0..replicas {
            let mut st = Stream::new(0x0E11_1950, rep, 0, 0);
            let shift: Vec<f64> = (0..m).map(|_| st.uniform()).collect();
            let mut sum = 0.0;
            for i in 0..points {
                for k in 0..m {
                    u[k] = (shift[k] + alpha[k] * (i + 1) as f64).fract();
                }
                for k in 0..d {
                    let pair = k / 2;
                    let rad = (-2.0 * (1.0 - u[2 * pair]).ln()).sqrt();
                    let ang = 2.0 * PI * u[2 * pair + 1];
                    dir[k] = if k % 2 == 0 { rad * ang.cos() } else { rad * ang.sin() };
                }
                let len = norm(&dir);
                if len == 0.0 {
                    continue;
                }
                dir.iter_mut().for_each(|x| *x /= len);
                sum += ray_chord(axes, r, &dir);
            }
            mv.push(area * sum / points as f64);
        }
        last = mv.result();
        if last.est_error <= tol {
            return Ok(last);
        }
        points <<= 2;
    }
    Err(Error::Budget { estimate: last.value, error: last.est_error })
}

/// `∫₀^a∫₀^b ln √(x² + y²) dy dx` (signed for negative limits) by nested quadrature.
fn corner_log_integral(a: f64, b: f64, tol: f64) -> Result<EvalResult> {
    let inner = Quad::new(tol * 1e-3, 1e-13).with_max_segments(400);
    let outer = Quad::new(tol, 1e-13);
    outer.integrate(
        |x| {
            inner
                .integrate_lenient(
                    |y| {
                        let h = x.hypot(y);
                        if h == 0.0 { 0.0 } else { h.ln() }
                    },
                    0.0,
                    b,
                )
                .value
        },
        0.0,
        a,
    )
}

/// `∫₀^A∫₀^B∫₀^C dx dy dz/|(x,y,z)|` with the innermost integral in closed form
/// (`asinh`), the remaining two by nested quadrature.
fn corner_inverse_distance_integral(l: [f64; 3], tol: f64) -> Result<EvalResult> {
    if l.iter().any(|&v| v == 0.0) {
        return Ok(EvalResult::new(0.0, 0.0));
    }
    let inner = Quad::new(tol * 1e-3, 1e-13).with_max_segments(400);
    let outer = Quad::new(tol, 1e-13);
    outer.integrate(
        |x| {
            inner
                .integrate_lenient(
                    |y| {
                        let h = x.hypot(y);
                        if h == 0.0 { 0.0 } else { (l[2] / h).asinh() }
                    },
                    0.0,
                    l[1],
                )
                .value
        },
        0.0,
        l[0],
    )
}
