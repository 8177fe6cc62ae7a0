//! Equilibrium surface charges of spheres and hyperellipsoids, and projections of
//! uniformly charged bodies onto lower-dimensional equilibrium measures.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::domains::{coulomb, hyperellipsoid_coefficients};
use crate::quad::Quad;
use crate::specfun::{beta, carlson_rf, log_gamma, unit_sphere_area};
use crate::{Error, EvalResult, Result};

/// Relative tolerance for "on the surface".
pub const SURFACE_TOL: f64 = 1e-10;

/// Potential of charge `Q` spread uniformly over the sphere `|r| = R` in `R^d`.
pub fn shell_potential(d: u32, radius: f64, q: f64, r: &[f64]) -> Result<f64> {
    if d < 2 || r.len() != d as usize {
        return Err(Error::Domain("shell potential needs d >= 2 and a d-dimensional point"));
    }
    let t = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(q * coulomb(d, t.max(radius)))
}

fn surface_residual(axes: &[f64], r: &[f64]) -> f64 {
    axes.iter().zip(r).map(|(a, x)| x * x / (a * a)).sum::<f64>() - 1.0
}

/// Equilibrium density of charge `Q` on the hyperellipsoid surface `Σ x_j²/a_j² = 1`.
pub fn ellipsoid_surface_density(axes: &[f64], q: f64, r: &[f64]) -> Result<f64> {
    if axes.len() < 2 || r.len() != axes.len() {
        return Err(Error::Domain("point dimension does not match the axes"));
    }
    let res = surface_residual(axes, r);
    if res.abs() > SURFACE_TOL {
        return Err(Error::OffSurface(res));
    }
    let d = axes.len() as u32;
    let g: f64 = axes.iter().zip(r).map(|(a, x)| x * x / a.powi(4)).sum();
    Ok(q / (unit_sphere_area(d) * axes.iter().product::<f64>()) / g.sqrt())
}

/// Potential of the equilibrium surface charge `Q` on a hyperellipsoid (`d > 2`):
/// `Q(d−2)/2 ∫_{λ*}^∞ S_0(λ)^{−1/2} dλ`, where `λ* = 0` inside (the constant interior
/// value) and `S_1(λ*) = 1` outside.
pub fn ellipsoid_surface_potential(axes: &[f64], q: f64, r: &[f64]) -> Result<f64> {
    let d = axes.len();
    if d < 3 || r.len() != d {
        return Err(Error::Domain("surface potential closed form needs d > 2"));
    }
    let s1 = |lam: f64| axes.iter().zip(r).map(|(a, x)| x * x / (a * a + lam)).sum::<f64>();
    let lam_star = if s1(0.0) <= 1.0 {
        0.0
    } else {
        let mut hi = axes.iter().fold(1.0f64, |m, a| m.max(a * a));
        while s1(hi) >= 1.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if s1(mid) >= 1.0 { lo = mid } else { hi = mid }
            if hi - lo <= 1e-16 * hi {
                break;
            }
        }
        hi
    };
    let scale = axes.iter().fold(lam_star, |m, a| m.max(a * a));
    let quad = Quad::new(1e-15, 1e-13).with_max_segments(4000);
    let v = quad
        .integrate_to_infinity(
            |mu| {
                let lam = scale * mu;
                scale * axes.iter().map(|a| 1.0 / (a * a + lam).sqrt()).product::<f64>()
            },
            lam_star / scale,
        )
        .or_else(|e| match e {
            Error::Budget { estimate, .. } => Ok(EvalResult::new(estimate, 0.0)),
            e => Err(e),
        })?;
    Ok(0.5 * q * (d as f64 - 2.0) * v.value)
}

/// `∫_{∂Ω} f dS` over an ellipse (`d = 2`) or ellipsoid (`d = 3`) surface using the
/// angular parameterisation `x = A u`, `dS = (Π a_j)·(Σ u_j²/a_j²)^{1/2} dΩ(u)`.
pub fn surface_integral<F: FnMut(&[f64]) -> f64>(axes: &[f64], mut f: F, tol: f64) -> Result<EvalResult> {
    let prod: f64 = axes.iter().product();
    match axes.len() {
        2 => Quad::new(tol, 1e-13).integrate(
            |t| {
                let (s, c) = t.sin_cos();
                let w = prod * (c * c / (axes[0] * axes[0]) + s * s / (axes[1] * axes[1])).sqrt();
                f(&[axes[0] * c, axes[1] * s]) * w
            },
            0.0,
            2.0 * PI,
        ),
        3 => {
            let inner = Quad::new(tol * 1e-3, 1e-13).with_max_segments(400);
            Quad::new(tol, 1e-13).integrate(
                |th| {
                    let (st, ct) = th.sin_cos();
                    inner
                        .integrate_lenient(
                            |ph| {
                                let (sp, cp) = ph.sin_cos();
                                let u = [st * cp, st * sp, ct];
                                let w = prod
                                    * u.iter().zip(axes).map(|(v, a)| v * v / (a * a)).sum::<f64>().sqrt();
                                f(&[axes[0] * u[0], axes[1] * u[1], axes[2] * u[2]]) * w
                            },
                            0.0,
                            2.0 * PI,
                        )
                        .value
                        * st
                },
                0.0,
                PI,
            )
        }
        _ => Err(Error::UnsupportedGeometry("surface quadrature is implemented for d = 2, 3")),
    }
}

/// Normalisation `∫_{|r|<R} (1 − |r|²/R²)^{−1/2} dr` over the ball of dimension `d − 1`.
fn projection_normaliser(d: u32, radius: f64) -> f64 {
    let m = d - 1;
    unit_sphere_area(m) * radius.powi(m as i32) * 0.5 * beta(0.5 * m as f64, 0.5).unwrap_or(f64::NAN)
}

/// Equilibrium density on the `(d−1)`-ball of radius `R` obtained by projecting a uniform
/// `d`-sphere shell: `Q·(1 − |r|²/R²)^{−1/2}/Z` with total charge `Q`.
pub fn projection_density(d: u32, radius: f64, q: f64, r: &[f64]) -> Result<f64> {
    if d < 2 || r.len() != d as usize - 1 {
        return Err(Error::Domain("projection density lives in dimension d - 1"));
    }
    let t2: f64 = r.iter().map(|x| x * x).sum::<f64>() / (radius * radius);
    if t2 >= 1.0 {
        return Err(Error::Domain("projection density is supported on |r| < R"));
    }
    Ok(q / projection_normaliser(d, radius) / (1.0 - t2).sqrt())
}

/// One of the projection identities.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionCase {
    /// The projected density on the `(d−1)`-ball has constant `d`-dimensional Coulomb
    /// potential (`d ∈ {2, 3}`).
    ConstantPotential { d: u32, radius: f64 },
    /// In `d = 3` the log potential of `(1 − |r|²/R²)^{−1/2}` on the ball is `c₀ − γ|r|²`.
    RieszQuadratic { radius: f64 },
    /// Semicircle log-potential identity on `[−a, a]`.
    Semicircle { a: f64 },
    /// Thin-ellipsoid limit in `d = 3`: the quadratic potential at `x₃ = 0` from the
    /// `a₃ → 0` coefficients against the weighted planar integral.
    ThinSlab { a1: f64, a2: f64, n: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentitySample {
    pub point: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub samples: Vec<IdentitySample>,
    pub max_residual: f64,
    /// Fitted constants (name, value), e.g. the constant potential `C` or `γ`.
    pub fitted: Vec<(&'static str, f64)>,
}

impl IdentityReport {
    fn from_samples(samples: Vec<IdentitySample>, fitted: Vec<(&'static str, f64)>) -> Self {
        let max_residual = samples.iter().map(|s| (s.lhs - s.rhs).abs()).fold(0.0, f64::max);
        Self { samples, max_residual, fitted }
    }
}

/// Complete elliptic integral `K` from the complementary parameter `k'² = 1 − k²`.
fn ellip_k_comp(kc2: f64) -> f64 {
    carlson_rf(0.0, kc2, 1.0).unwrap_or(f64::INFINITY)
}

/// Potential of the unit-mass projected density on the `(d−1)`-ball at the interior
/// point at distance `t` from the centre.
pub fn projected_potential(d: u32, radius: f64, t: f64) -> Result<f64> {
    let quad = Quad::new(1e-13, 1e-12).with_max_segments(4000);
    match d {
        2 => {
            // y = R sin u; the density's endpoint singularity cancels the Jacobian.
            let u0 = (t / radius).clamp(-1.0, 1.0).asin();
            let v = quad.integrate_split_lenient(
                |u| {
                    let dist = (t - radius * u.sin()).abs();
                    if dist == 0.0 { 0.0 } else { -dist.ln() / PI }
                },
                -0.5 * PI,
                0.5 * PI,
                &[u0],
            );
            Ok(v.value)
        }
        3 => {
            // ρ = R sin u; the angular integral is 4K(k)/(t+ρ), k² = 4tρ/(t+ρ)².
            let z = projection_normaliser(3, radius);
            let u0 = (t / radius).clamp(0.0, 1.0).asin();
            let v = quad.integrate_split_lenient(
                |u| {
                    let rho = radius * u.sin();
                    let s = t + rho;
                    if s == 0.0 {
                        return 0.0;
                    }
                    let kc = (t - rho) / s;
                    if kc == 0.0 {
                        return 0.0;
                    }
                    rho * 4.0 * ellip_k_comp(kc * kc) / s * radius
                },
                0.0,
                0.5 * PI,
                &[u0],
            );
            Ok(v.value / z)
        }
        _ => Err(Error::UnsupportedGeometry("projected potentials are implemented for d = 2, 3")),
    }
}

/// Spherical average of `−ln|r − r'|` over `|r'| = t`, `|r| = r`, in three dimensions.
fn log_sphere_average(r: f64, t: f64) -> f64 {
    if r == 0.0 || t == 0.0 {
        return -(r + t).ln();
    }
    let f = |w: f64| if w == 0.0 { 0.0 } else { w * w.ln() - w };
    -(f((r + t) * (r + t)) - f((r - t) * (r - t))) / (8.0 * r * t)
}

/// `∫_{B_R} (1 − |r'|²/R²)^{−1/2} (−ln|r − r'|) d³r'` at `|r| = r`.
fn riesz_log_potential(radius: f64, r: f64) -> Result<f64> {
    let quad = Quad::new(1e-13, 1e-12);
    let u0 = (r / radius).clamp(0.0, 1.0).asin();
    let v = quad.integrate_split(
        |u| {
            let t = radius * u.sin();
            4.0 * PI * t * t * log_sphere_average(r, t) * radius
        },
        0.0,
        0.5 * PI,
        &[u0],
    )?;
    Ok(v.value)
}

/// Evaluate both sides of a projection identity on a small grid.
pub fn projection_identities(case: &ProjectionCase) -> Result<IdentityReport> {
    match *case {
        ProjectionCase::ConstantPotential { d, radius } => {
            let ts: Vec<f64> = (0..10).map(|i| radius * 0.09 * i as f64).collect();
            let vals = ts.iter().map(|&t| projected_potential(d, radius, t)).collect::<Result<Vec<_>>>()?;
            let c = vals.iter().sum::<f64>() / vals.len() as f64;
            let samples = ts
                .iter()
                .zip(&vals)
                .map(|(&t, &v)| IdentitySample { point: alloc::vec![t], lhs: v, rhs: c })
                .collect();
            Ok(IdentityReport::from_samples(samples, alloc::vec![("C", c)]))
        }
        ProjectionCase::RieszQuadratic { radius } => {
            let p = |r: f64| riesz_log_potential(radius, r);
            // Three-point fit of c₀ − γr², then residuals on ten further points.
            let (r1, r2) = (0.3 * radius, 0.7 * radius);
            let (p0, p1, p2) = (p(0.0)?, p(r1)?, p(r2)?);
            let g1 = (p0 - p1) / (r1 * r1);
            let g2 = (p0 - p2) / (r2 * r2);
            let gamma = 0.5 * (g1 + g2);
            let samples = (0..10)
                .map(|i| {
                    let r = radius * (0.05 + 0.09 * i as f64);
                    p(r).map(|v| IdentitySample { point: alloc::vec![r], lhs: v, rhs: p0 - gamma * r * r })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(IdentityReport::from_samples(
                samples,
                alloc::vec![("c0", p0), ("gamma", gamma), ("gamma_spread", (g1 - g2).abs())],
            ))
        }
        ProjectionCase::Semicircle { a } => {
            let quad = Quad::new(1e-14, 1e-13);
            let samples = (0..11)
                .map(|i| {
                    let x = a * (-0.9 + 0.18 * i as f64);
                    let u0 = (x / a).asin();
                    // s = a sin u.
                    let v = quad.integrate_split_lenient(
                        |u| {
                            let dist = (x - a * u.sin()).abs();
                            let c = u.cos();
                            if dist == 0.0 { 0.0 } else { dist.ln() * c * c * a }
                        },
                        -0.5 * PI,
                        0.5 * PI,
                        &[u0],
                    );
                    Ok(IdentitySample {
                        point: alloc::vec![x],
                        lhs: 0.5 * x * x + 0.5 * a * a * (0.5 * a).ln() - 0.25 * a * a,
                        rhs: a / PI * v.value,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(IdentityReport::from_samples(samples, Vec::new()))
        }
        ProjectionCase::ThinSlab { a1, a2, n } => {
            let coeffs = hyperellipsoid_coefficients_degenerate(a1, a2, n)?;
            let pre = -2.0 * n * log_gamma(2.5)?.exp() / (PI.powf(1.5) * a1 * a2);
            let mut samples = Vec::new();
            for (u, ph) in [(0.0, 0.0), (0.3, 0.4), (0.5, 2.0), (0.7, 4.0), (0.85, 5.5)] {
                let s = [a1 * u * f64::cos(ph), a2 * u * f64::sin(ph)];
                let lhs = coeffs.0 + coeffs.1 * s[0] * s[0] + coeffs.2 * s[1] * s[1];
                let rhs = pre * slab_integral(a1, a2, &s)?;
                samples.push(IdentitySample { point: s.to_vec(), lhs, rhs });
            }
            Ok(IdentityReport::from_samples(
                samples,
                alloc::vec![("alpha0", coeffs.0), ("alpha1", coeffs.1), ("alpha2", coeffs.2)],
            ))
        }
    }
}

/// `(α₀, α₁, α₂)` of the `d = 3` ellipsoid with `a₃ = 0`.
fn hyperellipsoid_coefficients_degenerate(a1: f64, a2: f64, n: f64) -> Result<(f64, f64, f64)> {
    // The λ-integrals stay finite at a₃ = 0 (integrable λ^{−1/2} at the origin); a tiny
    // positive a₃ is used only to pass geometry validation and is below rounding.
    let c = hyperellipsoid_coefficients(&[a1, a2, 1e-300], n)?;
    Ok((c.alpha0, c.alpha[0], c.alpha[1]))
}

/// `∫_{ellipse} μ(s')/|s − s'| d²s'` with `μ = (1 − x²/a1² − y²/a2²)^{1/2}`.
fn slab_integral(a1: f64, a2: f64, s: &[f64; 2]) -> Result<f64> {
    let t0 = (s[0] / a1).hypot(s[1] / a2);
    let th0 = (s[1] / a2).atan2(s[0] / a1);
    let inner = Quad::new(1e-13, 1e-12).with_max_segments(400);
    let outer = Quad::new(1e-11, 1e-12);
    let v = outer.integrate_split(
        |t| {
            let mu = (1.0 - t * t).max(0.0).sqrt();
            inner
                .integrate_split_lenient(
                    |th| {
                        let (sn, cs) = th.sin_cos();
                        let d = (a1 * t * cs - s[0]).hypot(a2 * t * sn - s[1]);
                        if d == 0.0 { 0.0 } else { a1 * a2 * t / d }
                    },
                    th0 - PI,
                    th0 + PI,
                    &[th0],
                )
                .value
                * mu
        },
        0.0,
        1.0,
        &[t0],
    )?;
    Ok(v.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn shell_reference_values() {
        assert_abs_diff_eq!(shell_potential(3, 1.0, 1.0, &[0.0; 3]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(shell_potential(3, 1.0, 1.0, &[2.0, 0.0, 0.0]).unwrap(), 0.5, epsilon = 1e-15);
        let a = shell_potential(4, 1.5, 2.0, &[1.5, 0.0, 0.0, 0.0]).unwrap();
        let b = shell_potential(4, 1.5, 2.0, &[0.0, 1.5 + 1e-14, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn density_reduces_to_sphere_and_integrates_to_q() {
        let s = ellipsoid_surface_density(&[2.0; 3], 3.0, &[0.0, 2.0, 0.0]).unwrap();
        assert_abs_diff_eq!(s, 3.0 / (4.0 * PI * 4.0), epsilon = 1e-15);
        let axes = [2.0, 1.0, 1.0];
        let tot = surface_integral(&axes, |p| ellipsoid_surface_density(&axes, 1.5, p).unwrap(), 1e-10).unwrap();
        assert_abs_diff_eq!(tot.value, 1.5, epsilon = 1e-8);
        assert!(matches!(ellipsoid_surface_density(&axes, 1.0, &[0.0; 3]), Err(Error::OffSurface(_))));
    }

    #[test]
    fn surface_area_of_sphere() {
        let a = surface_integral(&[1.3; 3], |_| 1.0, 1e-11).unwrap();
        assert_relative_eq!(a.value, 4.0 * PI * 1.69, max_relative = 1e-11);
        let a = surface_integral(&[1.3; 2], |_| 1.0, 1e-12).unwrap();
        assert_relative_eq!(a.value, 2.0 * PI * 1.3, max_relative = 1e-12);
    }

    #[test]
    fn surface_potential_matches_shell_and_quadrature() {
        for p in [[0.0, 0.0, 0.0], [0.3, 0.1, 0.2], [2.0, 1.0, -0.5]] {
            assert_relative_eq!(
                ellipsoid_surface_potential(&[1.2; 3], 2.0, &p).unwrap(),
                shell_potential(3, 1.2, 2.0, &p).unwrap(),
                max_relative = 1e-10
            );
        }
        let axes = [1.0, 1.0, 2.0];
        let r = [3.0, 0.0, 0.0];
        let closed = ellipsoid_surface_potential(&axes, 1.0, &r).unwrap();
        let quad = surface_integral(
            &axes,
            |p| {
                let d = ((p[0] - r[0]).powi(2) + (p[1] - r[1]).powi(2) + (p[2] - r[2]).powi(2)).sqrt();
                ellipsoid_surface_density(&axes, 1.0, p).unwrap() / d
            },
            1e-10,
        )
        .unwrap();
        assert_abs_diff_eq!(closed, quad.value, epsilon = 1e-6);
        let a = ellipsoid_surface_potential(&axes, 1.0, &[0.0; 3]).unwrap();
        let b = ellipsoid_surface_potential(&axes, 1.0, &[0.2, 0.1, 0.5]).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-8);
    }

    #[test]
    fn surface_potential_far_field() {
        let axes = [1.0, 0.7, 1.8];
        for t in [10.0, 100.0] {
            let p = [t / 3f64.sqrt(); 3];
            let v = ellipsoid_surface_potential(&axes, 2.0, &p).unwrap();
            assert_relative_eq!(v, 2.0 / t, max_relative = 2.0 / (t * t) + 1e-9);
        }
    }

    #[test]
    fn projection_density_is_arcsine_and_normalised() {
        for x in [0.0, 0.3, -0.8] {
            let v = projection_density(2, 1.0, 1.0, &[x]).unwrap();
            assert_abs_diff_eq!(v, 1.0 / (PI * (1.0 - x * x).sqrt()), epsilon = 1e-14);
        }
        let quad = Quad::new(1e-12, 1e-12);
        // Disk of radius 2 in the plane (d = 3), ρ = 2 sin u.
        let tot = quad
            .integrate(|u| 2.0 * PI * 2.0 * u.sin() * projection_density(3, 2.0, 1.0, &[2.0 * u.sin(), 0.0]).unwrap() * 2.0 * u.cos(), 0.0, 0.5 * PI - 1e-300)
            .unwrap();
        assert_abs_diff_eq!(tot.value, 1.0, epsilon = 1e-8);
        assert!(projection_density(3, 1.0, 1.0, &[1.0, 0.0]).is_err());
        let c = projection_density(3, 1.0, 1.0, &[0.0, 0.0]).unwrap();
        assert!(c < projection_density(3, 1.0, 1.0, &[0.5, 0.0]).unwrap());
    }

    #[test]
    fn projected_potentials_are_constant() {
        let r = projection_identities(&ProjectionCase::ConstantPotential { d: 3, radius: 1.0 }).unwrap();
        assert!(r.max_residual < 1e-5, "{r:?}");
        let r = projection_identities(&ProjectionCase::ConstantPotential { d: 2, radius: 1.0 }).unwrap();
        assert!(r.max_residual < 1e-5);
        // Robin constant of [−1, 1].
        assert_abs_diff_eq!(r.fitted[0].1, 2f64.ln(), epsilon = 1e-10);
    }

    #[test]
    fn conducting_disk_potential_value() {
        // A unit disk carrying unit charge has 3D potential π/(2R)·(1/π)… = 1/(… ); the
        // classical capacitance of a disk is 2R/π, so the potential is π/(2R).
        let r = projection_identities(&ProjectionCase::ConstantPotential { d: 3, radius: 1.0 }).unwrap();
        assert_abs_diff_eq!(r.fitted[0].1, 0.5 * PI, epsilon = 1e-9);
    }

    #[test]
    fn semicircle_identity() {
        for a in [1.0, 2.5] {
            let r = projection_identities(&ProjectionCase::Semicircle { a }).unwrap();
            assert!(r.max_residual < 1e-10, "{r:?}");
        }
        let r = projection_identities(&ProjectionCase::Semicircle { a: 1.0 }).unwrap();
        let mid = &r.samples[5];
        assert_abs_diff_eq!(mid.point[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mid.lhs, 0.5 * 0.5f64.ln() - 0.25, epsilon = 1e-15);
    }

    #[test]
    fn riesz_quadratic_identity() {
        let r = projection_identities(&ProjectionCase::RieszQuadratic { radius: 1.0 }).unwrap();
        assert!(r.max_residual <= 1e-5, "{r:?}");
        let gamma = r.fitted.iter().find(|f| f.0 == "gamma").unwrap().1;
        assert!(gamma > 0.0);
    }

    #[test]
    fn thin_slab_identity() {
        let r = projection_identities(&ProjectionCase::ThinSlab { a1: 1.0, a2: 1.0, n: 1.0 }).unwrap();
        assert!(r.max_residual < 1e-7, "{r:?}");
        let r = projection_identities(&ProjectionCase::ThinSlab { a1: 1.5, a2: 0.8, n: 2.0 }).unwrap();
        assert!(r.max_residual < 1e-7, "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(5))]
        #[test]
        fn density_integrates_for_random_axes(a in 0.5f64..2.0, b in 0.5f64..2.0, c in 0.5f64..2.0) {
            let axes = [a, b, c];
            let tot = surface_integral(&axes, |p| ellipsoid_surface_density(&axes, 1.0, p).unwrap(), 1e-9).unwrap();
            prop_assert!((tot.value - 1.0).abs() < 1e-6);
        }
    }
}
