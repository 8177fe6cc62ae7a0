//! Exterior conformal maps and the planar potential theory they carry: capacity, Robin
//! constant, Green functions with pole at infinity and two-point Dirichlet Green
//! functions. Also droplet shapes for quadratic and radial potentials.
//!
//! Conventions: `ξ` maps `{|w| > 1}` onto the exterior of a compact set `K`, `ζ = ξ⁻¹`.
//! The Green function with pole at infinity is `g(z) = ln|ζ(z)| ≥ 0`, the capacity is
//! the leading coefficient `c` of `ξ(w) = c·w + …` and the Robin constant is `−ln c`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Complex64, Error, Result};

/// Number of boundary samples used by the univalence check.
pub const UNIVALENCE_GRID: usize = 720;

const NEWTON_ITERS: usize = 50;
const NEWTON_TOL: f64 = 1e-13;
/// Slack for treating a point as lying on the boundary (`|ζ(z)| = 1`).
const BOUNDARY_SLACK: f64 = 1e-10;

/// `ξ(w) = c·w + a₀ + a₋₁/w + a₋₂/w² + …`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMap {
    scale: f64,
    /// `coeffs[k]` multiplies `w^{−k}`.
    coeffs: Vec<Complex64>,
}

/// Result of [`green_infinity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenInfinity {
    pub g: f64,
    pub capacity: f64,
    pub robin: f64,
}

impl LaurentMap {
    /// Build a map, checking `c > 0` and that the boundary image is a simple curve.
    pub fn new(scale: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Parameter("the map scale must be positive"));
        }
        if coeffs.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Parameter("map coefficients must be finite"));
        }
        let map = Self { scale, coeffs };
        if !map.is_simple_boundary() {
            return Err(Error::Construction("boundary image self-intersects; the map is not univalent"));
        }
        Ok(map)
    }

    /// The identity map of the unit circle scaled to radius `r`.
    pub fn circle(r: f64) -> Result<Self> {
        Self::new(r, Vec::new())
    }

    /// The Joukowski map `(w + 1/w)·h/2` onto the exterior of `[−h, h]`.
    pub fn interval(half_length: f64) -> Result<Self> {
        let h = 0.5 * half_length;
        Self::new(h, alloc::vec![Complex64::new(0.0, 0.0), Complex64::new(h, 0.0)])
    }

    /// Exterior of the ellipse with semi-axes `a₁ ≥ a₂` along the real and imaginary
    /// axes: `ξ(w) = R(w + c²/w)` with `R = (a₁+a₂)/2`, `c² = (a₁−a₂)/(a₁+a₂)`.
    pub fn ellipse(a1: f64, a2: f64) -> Result<Self> {
        if !(a1 > 0.0 && a2 > 0.0) {
            return Err(Error::Parameter("ellipse semi-axes must be positive"));
        }
        let r = 0.5 * (a1 + a2);
        let c2 = (a1 - a2) / (a1 + a2);
        Self::new(r, alloc::vec![Complex64::new(0.0, 0.0), Complex64::new(r * c2, 0.0)])
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn capacity(&self) -> f64 {
        self.scale
    }

    pub fn robin(&self) -> f64 {
        -self.scale.ln()
    }

    /// Area enclosed by the boundary image, `π(c² − Σ k|a₋ₖ|²)`.
    pub fn area(&self) -> f64 {
        let tail: f64 = self.coeffs.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a.norm_sqr()).sum();
        PI * (self.scale * self.scale - tail)
    }

    pub fn xi(&self, w: Complex64) -> Complex64 {
        let inv = w.inv();
        let mut p = Complex64::new(1.0, 0.0);
        let mut acc = w * self.scale;
        for a in &self.coeffs {
            acc += a * p;
            p *= inv;
        }
        acc
    }

    pub fn xi_prime(&self, w: Complex64) -> Complex64 {
        let inv = w.inv();
        let mut acc = Complex64::new(self.scale, 0.0);
        let mut p = inv * inv;
        for (k, a) in self.coeffs.iter().enumerate().skip(1) {
            acc -= a * p * k as f64;
            p *= inv;
        }
        acc
    }

    /// Boundary image at `n` equally spaced angles.
    pub fn boundary(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|j| self.xi(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))).collect()
    }

    fn is_simple_boundary(&self) -> bool {
        let pts = self.boundary(UNIVALENCE_GRID);
        let n = pts.len();
        let scale = pts.iter().fold(0.0f64, |m, p| m.max(p.norm()));
        let eps = 1e-12 * scale.max(1e-300);
        // A collapsed (slit) image traverses the same segment twice; that is the limit
        // of univalent maps and is accepted when consecutive points retrace exactly.
        let orient = |a: Complex64, b: Complex64, c: Complex64| (b - a).im * (c - a).re - (b - a).re * (c - a).im;
        let area2: f64 = (0..n).map(|i| pts[i].re * pts[(i + 1) % n].im - pts[(i + 1) % n].re * pts[i].im).sum();
        if area2.abs() <= eps * scale {
            return true;
        }
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (c, d) = (pts[j], pts[(j + 1) % n]);
                let o1 = orient(a, b, c);
                let o2 = orient(a, b, d);
                let o3 = orient(c, d, a);
                let o4 = orient(c, d, b);
                if o1 * o2 < -eps * eps && o3 * o4 < -eps * eps {
                    return false;
                }
            }
        }
        true
    }

    fn newton(&self, z: Complex64, seed: Complex64) -> Option<Complex64> {
        let mut w = seed;
        let tol = NEWTON_TOL * z.norm().max(self.scale);
        for _ in 0..NEWTON_ITERS {
            if w.norm() < 1e-8 {
                return None;
            }
            let f = self.xi(w) - z;
            if f.norm() <= tol {
                return Some(w);
            }
            let dp = self.xi_prime(w);
            if dp.norm() == 0.0 {
                return None;
            }
            w -= f / dp;
            if !(w.re.is_finite() && w.im.is_finite()) {
                return None;
            }
        }
        ((self.xi(w) - z).norm() <= 1e3 * tol).then_some(w)
    }

    /// `ζ(z) = ξ⁻¹(z)` on the closed exterior. Newton iteration is seeded with `z/c` and
    /// a few perturbations of it; the exterior preimage is the root of largest modulus.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        let base = z / self.scale;
        let bump = 0.5 * (base.norm() + 1.0);
        let seeds = [
            base,
            base + Complex64::new(0.0, bump),
            base - Complex64::new(0.0, bump),
            base * 1.5 + Complex64::new(0.3, 0.2),
            Complex64::new(2.0, 1.0),
            Complex64::new(-2.0, -1.0),
        ];
        let best = seeds
            .iter()
            .filter_map(|&s| self.newton(z, s))
            .fold(None::<Complex64>, |best, w| match best {
                Some(b) if b.norm() >= w.norm() => Some(b),
                _ => Some(w),
            });
        match best {
            Some(w) if w.norm() >= 1.0 - BOUNDARY_SLACK => Ok(w),
            _ => Err(Error::NotExterior("no preimage in |w| >= 1")),
        }
    }

    pub fn zeta_prime(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.xi_prime(self.zeta(z)?).inv())
    }
}

/// Green function of the exterior with pole at infinity, with capacity and Robin constant.
pub fn green_infinity(map: &LaurentMap, z: Complex64) -> Result<GreenInfinity> {
    let w = map.zeta(z)?;
    Ok(GreenInfinity { g: w.norm().ln(), capacity: map.capacity(), robin: map.robin() })
}

/// Equilibrium density per unit arc length at a boundary point, `|ζ'(z)|/2π`.
pub fn surface_density(map: &LaurentMap, z: Complex64) -> Result<f64> {
    let w = map.zeta(z).map_err(|_| Error::OffSurface(f64::NAN))?;
    let off = w.norm() - 1.0;
    if off.abs() > 1e-8 {
        return Err(Error::OffSurface(off));
    }
    Ok(1.0 / (2.0 * PI * map.xi_prime(w).norm()))
}

/// Geometries carrying a planar Dirichlet Green function.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarDomain {
    /// Exterior of the disk of radius `R` about the origin.
    Disk { radius: f64 },
    /// The upper half plane.
    HalfPlane,
    /// Exterior of the image of the unit disk under a Laurent map.
    Mapped(LaurentMap),
}

fn check_pair(z: Complex64, w: Complex64) -> Result<()> {
    if z == w {
        return Err(Error::Singularity("Green function at coincident points"));
    }
    Ok(())
}

/// Dirichlet Green function with singularity `−ln|z−w|` and zero boundary values.
pub fn green_two_point(dom: &PlanarDomain, z: Complex64, w: Complex64) -> Result<f64> {
    check_pair(z, w)?;
    match dom {
        PlanarDomain::Disk { radius } => {
            let r = *radius;
            if !(r > 0.0) {
                return Err(Error::Parameter("disk radius must be positive"));
            }
            let slack = r * (1.0 - BOUNDARY_SLACK);
            if z.norm() < slack || w.norm() < slack {
                return Err(Error::NotExterior("points must lie outside the disk"));
            }
            Ok(-((z - w).norm() * r / (r * r - z * w.conj()).norm()).ln())
        }
        PlanarDomain::HalfPlane => {
            if z.im < 0.0 || w.im < 0.0 {
                return Err(Error::Domain("points must lie in the closed upper half plane"));
            }
            Ok(-((z - w).norm() / (z - w.conj()).norm()).ln())
        }
        PlanarDomain::Mapped(map) => {
            let (a, b) = (map.zeta(z)?, map.zeta(w)?);
            Ok(-((a - b).norm() / (Complex64::new(1.0, 0.0) - a * b.conj()).norm()).ln())
        }
    }
}

/// Three-dimensional conductors handled by images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialDomain {
    /// Exterior of the sphere of radius `R` about the origin.
    Sphere { radius: f64 },
    /// The half space `x₃ > 0`.
    HalfSpace,
}

fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Image-charge Green function of a grounded conductor in three dimensions.
pub fn green3d(dom: SpatialDomain, r: &[f64; 3], rp: &[f64; 3]) -> Result<f64> {
    if r == rp {
        return Err(Error::Singularity("Green function at coincident points"));
    }
    match dom {
        SpatialDomain::Sphere { radius } => {
            let n2 = rp.iter().map(|x| x * x).sum::<f64>();
            let nr = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            let slack = radius * (1.0 - BOUNDARY_SLACK);
            if nr < slack || n2.sqrt() < slack {
                return Err(Error::NotExterior("points must lie outside the sphere"));
            }
            let k = radius * radius / n2;
            let image = [rp[0] * k, rp[1] * k, rp[2] * k];
            Ok(1.0 / dist3(r, rp) - radius / n2.sqrt() / dist3(r, &image))
        }
        SpatialDomain::HalfSpace => {
            if r[2] < 0.0 || rp[2] < 0.0 {
                return Err(Error::Domain("points must lie in the closed upper half space"));
            }
            let image = [rp[0], rp[1], -rp[2]];
            Ok(1.0 / dist3(r, rp) - 1.0 / dist3(r, &image))
        }
    }
}

/// Droplet of `|z|² − 2α Re z²`-type potentials: the ellipse map with
/// `a₁² = area/(π(1−4α²))` and `a₋₁ = −2α·a₁`.
pub fn quadratic_droplet(alpha: f64, area: f64) -> Result<LaurentMap> {
    if !(area > 0.0) {
        return Err(Error::Parameter("droplet area must be positive"));
    }
    if !(alpha.abs() < 0.5) {
        return Err(Error::Parameter("need |2α| < 1"));
    }
    let a1 = (area / (PI * (1.0 - 4.0 * alpha * alpha))).sqrt();
    LaurentMap::new(a1, alloc::vec![Complex64::new(0.0, 0.0), Complex64::new(-2.0 * alpha * a1, 0.0)])
}

/// Inner and outer radii of the annular droplet of a radial potential `q(r)`: the roots
/// of `r q'(r) = 0` and `r q'(r) = 2` in `[lo, hi]`. When `lo = 0` and `r q'(r) ≥ 0`
/// there, the droplet is a disk and `r₀ = 0`.
pub fn droplet_radii<F: Fn(f64) -> f64>(q_prime: F, lo: f64, hi: f64) -> Result<(f64, f64)> {
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::Parameter("need 0 <= lo < hi"));
    }
    let f = |r: f64| if r == 0.0 { 0.0 } else { r * q_prime(r) };
    let mut prev = f(lo);
    for j in 1..=200 {
        let r = lo + (hi - lo) * j as f64 / 200.0;
        let v = f(r);
        if !(v.is_finite() && v >= prev - 1e-12 * v.abs().max(1.0)) {
            return Err(Error::Parameter("r q'(r) must increase (q strictly subharmonic)"));
        }
        prev = v;
    }
    let root = |target: f64| -> Result<f64> {
        let (mut a, mut b) = (lo, hi);
        let fa = f(a) - target;
        if fa == 0.0 || (fa > 0.0 && lo == 0.0 && target == 0.0) {
            return Ok(lo);
        }
        if fa > 0.0 || f(b) - target < 0.0 {
            return Err(Error::NoRoot);
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m) < target { a = m } else { b = m }
            if b - a <= 4.0 * f64::EPSILON * b {
                break;
            }
        }
        Ok(0.5 * (a + b))
    };
    Ok((root(0.0)?, root(2.0)?))
}
