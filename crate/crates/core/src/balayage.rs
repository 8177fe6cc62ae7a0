//! Balayage (sweeping) of uniform charge onto the boundary of its support, exterior
//! moments, and the electrostatic energies behind gap probabilities.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::domains::{Geometry, UniformDomain};
use crate::quad::Quad;
use crate::specfun::unit_sphere_area;
use crate::surfaces::shell_potential;
use crate::{Complex64, Error, Result};

/// Support of one piece of a balayage measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    /// The sphere `|r| = R` in `R^d` (`d = 1`: the two endpoints `±R`; `d = 2`: a circle).
    Sphere { d: u32, radius: f64 },
    /// The ellipse `x = a₁ cos θ`, `y = a₂ sin θ`.
    Ellipse { a1: f64, a2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub curve: Curve,
    pub mass: f64,
}

impl Component {
    /// Ellipse anisotropy `e = (a₁²−a₂²)/(a₁²+a₂²)`; zero for spheres.
    fn anisotropy(&self) -> f64 {
        match self.curve {
            Curve::Ellipse { a1, a2 } => (a1 * a1 - a2 * a2) / (a1 * a1 + a2 * a2),
            Curve::Sphere { .. } => 0.0,
        }
    }

    /// Planar density per unit parameter angle, `(m/2π)(1 − e cos 2θ)`.
    pub fn density_per_angle(&self, theta: f64) -> Result<f64> {
        match self.curve {
            Curve::Sphere { d: 2, .. } | Curve::Ellipse { .. } => {
                Ok(self.mass / (2.0 * PI) * (1.0 - self.anisotropy() * (2.0 * theta).cos()))
            }
            Curve::Sphere { .. } => Err(Error::Domain("angular density is defined for planar curves")),
        }
    }

    /// Density per unit surface measure (arc length in the plane) at the parameter point.
    pub fn surface_density(&self, theta: f64) -> Result<f64> {
        match self.curve {
            Curve::Sphere { d, radius } if d >= 2 => Ok(self.mass / (unit_sphere_area(d) * radius.powi(d as i32 - 1))),
            Curve::Sphere { .. } => Ok(0.5 * self.mass),
            Curve::Ellipse { a1, a2 } => {
                let speed = (a1 * theta.sin()).hypot(a2 * theta.cos());
                Ok(self.density_per_angle(theta)? / speed)
            }
        }
    }

    /// Potential of this component at `r`.
    pub fn potential(&self, r: &[f64]) -> Result<f64> {
        match self.curve {
            Curve::Sphere { d: 1, radius } => {
                if r.len() != 1 {
                    return Err(Error::Domain("point dimension does not match the curve"));
                }
                Ok(-0.5 * self.mass * ((r[0] - radius).abs() + (r[0] + radius).abs()))
            }
            Curve::Sphere { d, radius } => shell_potential(d, radius, self.mass, r),
            Curve::Ellipse { a1, a2 } => {
                if r.len() != 2 {
                    return Err(Error::Domain("point dimension does not match the curve"));
                }
                let v = Quad::new(1e-13, 1e-13).with_max_segments(2000).integrate(
                    |t| {
                        let d = (r[0] - a1 * t.cos()).hypot(r[1] - a2 * t.sin());
                        -d.ln() * self.density_per_angle(t).unwrap_or(0.0)
                    },
                    0.0,
                    2.0 * PI,
                )?;
                Ok(v.value)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalayageMeasure {
    pub components: Vec<Component>,
    pub total_mass: f64,
}

impl BalayageMeasure {
    pub fn potential(&self, r: &[f64]) -> Result<f64> {
        self.components.iter().map(|c| c.potential(r)).sum()
    }

    /// `∫ w^l dμ` for planar measures.
    pub fn moment(&self, l: u32) -> Result<Complex64> {
        let rule = 4 * (l as usize + 4);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &self.components {
            let (a1, a2) = match c.curve {
                Curve::Sphere { d: 2, radius } => (radius, radius),
                Curve::Ellipse { a1, a2 } => (a1, a2),
                Curve::Sphere { .. } => return Err(Error::Domain("moments are defined for planar measures")),
            };
            // The integrand is a trigonometric polynomial: the trapezoid rule is exact.
            for k in 0..rule {
                let t = 2.0 * PI * k as f64 / rule as f64;
                let w = Complex64::new(a1 * t.cos(), a2 * t.sin());
                acc += w.powu(l) * c.density_per_angle(t)? * (2.0 * PI / rule as f64);
            }
        }
        Ok(acc)
    }
}

/// Weights `(α, β)` of the outer and inner circles for an annulus with ratio `c`:
/// `α + β = 1`, `−β ln c = 1/2 + c² ln c/(1 − c²)`.
pub fn annulus_weights(c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Parameter("annulus ratio must lie in (0, 1)"));
    }
    let beta = -(0.5 + c * c * c.ln() / (1.0 - c * c)) / c.ln();
    Ok((1.0 - beta, beta))
}

/// Balayage onto the boundary of a uniformly charged ball, annulus or ellipse carrying
/// the domain's total charge `N`.
pub fn balayage_measure(dom: &UniformDomain) -> Result<BalayageMeasure> {
    let q = dom.n();
    let components = match dom.geometry() {
        Geometry::Ball { d, radius } => alloc::vec![Component { curve: Curve::Sphere { d: *d, radius: *radius }, mass: q }],
        Geometry::Segment { radius } => alloc::vec![Component { curve: Curve::Sphere { d: 1, radius: *radius }, mass: q }],
        Geometry::Annulus { radius, c } => {
            let (alpha, beta) = annulus_weights(*c)?;
            alloc::vec![
                Component { curve: Curve::Sphere { d: 2, radius: *radius }, mass: alpha * q },
                Component { curve: Curve::Sphere { d: 2, radius: c * radius }, mass: beta * q },
            ]
        }
        Geometry::Ellipse { a1, a2 } => alloc::vec![Component { curve: Curve::Ellipse { a1: *a1, a2: *a2 }, mass: q }],
        Geometry::Hyperellipsoid { axes } if axes.len() == 2 => {
            alloc::vec![Component { curve: Curve::Ellipse { a1: axes[0], a2: axes[1] }, mass: q }]
        }
        _ => return Err(Error::UnsupportedGeometry("balayage is implemented for balls, annuli and ellipses")),
    };
    Ok(BalayageMeasure { components, total_mass: q })
}

/// Raw area moment `m_l = ∫_Ω w^l d²w` of a planar domain.
pub fn exterior_moment(geom: &Geometry, l: u32) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    match geom {
        Geometry::Ball { d: 2, .. } | Geometry::Annulus { .. } => {
            Ok(if l == 0 { Complex64::new(geom.volume(), 0.0) } else { zero })
        }
        Geometry::Ellipse { a1, a2 } => Ok(ellipse_moment(*a1, *a2, l)),
        Geometry::Hyperellipsoid { axes } if axes.len() == 2 => Ok(ellipse_moment(axes[0], axes[1], l)),
        Geometry::Rectangle { lo, hi } => {
            // Polynomial integrand: Gauss–Legendre with enough nodes is exact.
            let rule = crate::quad::gauss_legendre(l as usize / 2 + 2);
            let mut acc = zero;
            for (x, wx) in rule.0.iter().zip(&rule.1) {
                for (y, wy) in rule.0.iter().zip(&rule.1) {
                    let px = 0.5 * (lo[0] + hi[0]) + 0.5 * (hi[0] - lo[0]) * x;
                    let py = 0.5 * (lo[1] + hi[1]) + 0.5 * (hi[1] - lo[1]) * y;
                    acc += Complex64::new(px, py).powu(l) * (wx * wy);
                }
            }
            Ok(acc * (0.25 * geom.volume()))
        }
        _ => Err(Error::Domain("moments are defined for planar domains")),
    }
}

/// Tensor rule in elliptic polar coordinates `w = a₁t cos θ + i a₂t sin θ`: Gauss–Legendre
/// in `t` and the trapezoid rule in `θ`, both exact for the polynomial integrand.
fn ellipse_moment(a1: f64, a2: f64, l: u32) -> Complex64 {
    let rule = crate::quad::gauss_legendre(l as usize / 2 + 2);
    let m = 2 * l as usize + 4;
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, wx) in rule.0.iter().zip(&rule.1) {
        let t = 0.5 * (1.0 + x);
        for k in 0..m {
            let th = 2.0 * PI * k as f64 / m as f64;
            let w = Complex64::new(a1 * t * th.cos(), a2 * t * th.sin());
            acc += w.powu(l) * (0.5 * wx * t * a1 * a2 * 2.0 * PI / m as f64);
        }
    }
    acc
}

/// Hole of a gap-probability problem.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleSpec {
    pub hole: Geometry,
    pub rho_b: f64,
    pub beta: f64,
}

impl HoleSpec {
    pub fn new(hole: Geometry, rho_b: f64, beta: f64) -> Result<Self> {
        if !(rho_b > 0.0 && rho_b.is_finite()) {
            return Err(Error::Parameter("background density must be positive"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter("beta must be positive"));
        }
        Ok(Self { hole, rho_b, beta })
    }
}

/// Energy `E_{Ω₀}` of a unit-density planar background in `Ω₀` together with its
/// (oppositely charged) balayage: `½(∫_{Ω₀} U − ∫_{∂Ω₀} U dμ)` with `U = ∫_{Ω₀} −ln|r−w|`.
pub fn hole_energy(hole: &Geometry) -> Result<f64> {
    match hole {
        Geometry::Ball { d: 2, radius } => Ok(PI * PI * radius.powi(4) / 8.0),
        Geometry::Ellipse { a1, a2 } => Ok(ellipse_hole_energy(*a1, *a2)),
        Geometry::Hyperellipsoid { axes } if axes.len() == 2 => Ok(ellipse_hole_energy(axes[0], axes[1])),
        Geometry::Annulus { radius, c } => {
            let dom = UniformDomain::new(hole.clone(), hole.volume())?;
            let mu = balayage_measure(&dom)?;
            let u = |t: f64| dom.background_potential(&[t, 0.0]).map(|v| -v);
            let area = Quad::new(1e-13, 1e-13)
                .integrate(|t| u(t).unwrap_or(f64::NAN) * 2.0 * PI * t, c * radius, *radius)?
                .value;
            let edge: f64 = mu
                .components
                .iter()
                .map(|comp| match comp.curve {
                    Curve::Sphere { radius: r, .. } => u(r).map(|v| v * comp.mass),
                    Curve::Ellipse { .. } => Err(Error::UnsupportedGeometry("annulus components are circles")),
                })
                .sum::<Result<f64>>()?;
            Ok(0.5 * (area - edge))
        }
        _ => Err(Error::UnsupportedGeometry("hole energies are implemented for disks, ellipses and annuli")),
    }
}

/// Inside a unit-density ellipse `U = u₀ − π(a₂x² + a₁y²)/(a₁+a₂)`; integrating against
/// the area and against the balayage density gives `π²a₁³a₂³/(4(a₁²+a₂²))`.
fn ellipse_hole_energy(a1: f64, a2: f64) -> f64 {
    PI * PI * (a1 * a2).powi(3) / (4.0 * (a1 * a1 + a2 * a2))
}

/// [`hole_energy`] for disks and ellipses by direct quadrature. The body potential is
/// integrated over the area and against the balayage density on the boundary.
pub fn hole_energy_quadrature(hole: &Geometry) -> Result<f64> {
    let (a1, a2) = match hole {
        Geometry::Ball { d: 2, radius } => (*radius, *radius),
        Geometry::Ellipse { a1, a2 } => (*a1, *a2),
        _ => return Err(Error::UnsupportedGeometry("the quadrature route covers disks and ellipses")),
    };
    let dom = UniformDomain::new(hole.clone(), hole.volume())?;
    let mu = balayage_measure(&dom)?;
    let u = |x: f64, y: f64| -dom.background_potential(&[x, y]).unwrap_or(f64::NAN);
    let inner = Quad::new(1e-12, 1e-12);
    let area = Quad::new(1e-11, 1e-12)
        .integrate(
            |t| inner.integrate_lenient(|th| u(a1 * t * th.cos(), a2 * t * th.sin()) * a1 * a2 * t, 0.0, 2.0 * PI).value,
            0.0,
            1.0,
        )?
        .value;
    let comp = &mu.components[0];
    let edge = Quad::new(1e-12, 1e-12)
        .integrate(|th| u(a1 * th.cos(), a2 * th.sin()) * comp.density_per_angle(th).unwrap_or(f64::NAN), 0.0, 2.0 * PI)?
        .value;
    Ok(0.5 * (area - edge))
}

/// Leading-order prediction for `(1/ρ_b²)·ln P(no particles in Ω₀)`: `−β E_{Ω₀}`.
pub fn gap_exponent(spec: &HoleSpec) -> Result<f64> {
    Ok(-spec.beta * hole_energy(&spec.hole)?)
}

/// Leading-order `ln P(no particles in Ω₀) ≈ −β ρ_b² E_{Ω₀}`.
pub fn log_gap_probability(spec: &HoleSpec) -> Result<f64> {
    Ok(spec.rho_b * spec.rho_b * gap_exponent(spec)?)
}

/// Leading exponent `−(β/4)(γ−2)α²R^{2γ} ln R` of the probability of no particles in
/// the disk of radius `R` when the background density grows as `α r^{γ−2}`, `γ > 2`.
pub fn tail_exponent(beta: f64, gamma: f64, alpha: f64, radius: f64) -> Result<f64> {
    if !(gamma > 2.0) {
        return Err(Error::Parameter("the tail form needs gamma > 2"));
    }
    if !(beta > 0.0 && radius > 0.0) {
        return Err(Error::Parameter("beta and R must be positive"));
    }
    Ok(-0.25 * beta * (gamma - 2.0) * alpha * alpha * radius.powf(2.0 * gamma) * radius.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn body_potential(dom: &UniformDomain, r: &[f64]) -> f64 {
        match dom.background_potential(r) {
            Ok(v) => -v,
            Err(_) => -dom.potential_oracle(r, 1e-11).unwrap().value,
        }
    }

    fn exterior_points(geom: &Geometry, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut st = Stream::new(seed, 0, 0, 0);
        let mut out = Vec::new();
        while out.len() < count {
            let d = geom.dim();
            let p: Vec<f64> = (0..d).map(|_| 8.0 * st.uniform() - 4.0).collect();
            if !geom.contains(&p) && geom.contains(&p.iter().map(|x| 0.5 * x).collect::<Vec<_>>()) == geom.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn ball_shell() {
        let dom = UniformDomain::new(Geometry::Ball { d: 3, radius: 1.0 }, 1.0).unwrap();
        let mu = balayage_measure(&dom).unwrap();
        assert_abs_diff_eq!(mu.components[0].surface_density(0.0).unwrap(), 1.0 / (4.0 * PI), epsilon = 1e-15);
        for p in exterior_points(dom.geometry(), 20, 1) {
            assert_abs_diff_eq!(mu.potential(&p).unwrap(), body_potential(&dom, &p), epsilon = 1e-12);
        }
        let seg = UniformDomain::new(Geometry::Segment { radius: 1.5 }, 2.0).unwrap();
        let mu = balayage_measure(&seg).unwrap();
        for x in [-3.0, 1.6, 4.0] {
            assert_abs_diff_eq!(mu.potential(&[x]).unwrap(), body_potential(&seg, &[x]), epsilon = 1e-12);
        }
    }

    #[test]
    fn annulus_weights_solve_the_system() {
        let (a, b) = annulus_weights(0.5).unwrap();
        assert_abs_diff_eq!(b, 0.5 / 2f64.ln() - 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a, 0.61199, epsilon = 1e-5);
        for c in [0.3, 0.5, 0.7] {
            let (a, b) = annulus_weights(c).unwrap();
            assert!((a + b - 1.0).abs() <= 1e-12);
            assert!((-b * c.ln() - (0.5 + c * c / (1.0 - c * c) * c.ln())).abs() <= 1e-12);
            assert!(a > 0.0 && b > 0.0);
        }
    }

    #[test]
    fn exterior_potentials_match_the_body() {
        let geoms = [
            Geometry::Ball { d: 2, radius: 1.3 },
            Geometry::Annulus { radius: 2.0, c: 0.3 },
            Geometry::Annulus { radius: 2.0, c: 0.5 },
            Geometry::Annulus { radius: 2.0, c: 0.7 },
            Geometry::Ellipse { a1: 2.0, a2: 1.0 },
            Geometry::Ellipse { a1: 3.0, a2: 1.0 },
        ];
        for (i, g) in geoms.iter().enumerate() {
            let dom = UniformDomain::new(g.clone(), 2.5).unwrap();
            let mu = balayage_measure(&dom).unwrap();
            let mass: f64 = mu.components.iter().map(|c| c.mass).sum();
            assert!((mass - 2.5).abs() <= 1e-10);
            let mut pts = exterior_points(g, 20, 10 + i as u64);
            if let Geometry::Annulus { radius, c } = g {
                // Include the cavity.
                pts.truncate(16);
                for t in [0.0, 0.2, 0.5, 0.9] {
                    pts.push(alloc::vec![t * c * radius, 0.1 * t * c * radius]);
                }
            }
            for p in &pts {
                let a = mu.potential(p).unwrap();
                let b = body_potential(&dom, p);
                assert!((a - b).abs() <= 1e-6, "{g:?} {p:?} {a} {b}");
            }
        }
    }

    #[test]
    fn ellipse_density_and_moments() {
        let dom = UniformDomain::new(Geometry::Ellipse { a1: 1.2, a2: 1.2 }, 1.0).unwrap();
        let mu = balayage_measure(&dom).unwrap();
        for t in [0.0, 1.0, 2.5] {
            assert_abs_diff_eq!(mu.components[0].density_per_angle(t).unwrap(), 0.5 / PI, epsilon = 1e-15);
        }
        let g = Geometry::Ellipse { a1: 2.0, a2: 1.0 };
        assert_abs_diff_eq!(exterior_moment(&g, 2).unwrap().re, 1.5 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(exterior_moment(&g, 4).unwrap().re, 2.25 * PI, epsilon = 1e-12);
        for l in [1, 3, 5, 7] {
            assert!(exterior_moment(&g, l).unwrap().norm() < 1e-12);
        }
        assert_eq!(exterior_moment(&Geometry::Ball { d: 2, radius: 1.0 }, 2).unwrap().norm(), 0.0);
        // Balayage reproduces the moments (scaled by Q/|Ω|).
        let dom = UniformDomain::new(g.clone(), g.volume()).unwrap();
        let mu = balayage_measure(&dom).unwrap();
        for l in 0..8 {
            let a = mu.moment(l).unwrap();
            let b = exterior_moment(&g, l).unwrap();
            assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()), "{l} {a} {b}");
        }
        // Rectangle moments against quadrature.
        let r = Geometry::Rectangle { lo: [-1.0, 0.0], hi: [2.0, 0.5] };
        let m2 = exterior_moment(&r, 2).unwrap();
        assert_abs_diff_eq!(m2.re, 0.5 * 3.0 - 3.0 * 0.125 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m2.im, 2.0 * 1.5 * 0.125, epsilon = 1e-12);
    }

    #[test]
    fn hole_energies() {
        let disk = Geometry::Ball { d: 2, radius: 0.8 };
        assert_abs_diff_eq!(hole_energy(&disk).unwrap(), hole_energy_quadrature(&disk).unwrap(), epsilon = 1e-8);
        let e1 = hole_energy(&Geometry::Ball { d: 2, radius: 0.5 }).unwrap();
        let e2 = hole_energy(&Geometry::Ball { d: 2, radius: 1.0 }).unwrap();
        assert_relative_eq!(e2, 16.0 * e1, max_relative = 1e-14);
        assert!(hole_energy(&Geometry::Ball { d: 2, radius: 1e-8 }).unwrap() < 1e-30);
        for (a1, a2) in [(2.0, 1.0), (1.5, 0.4)] {
            let g = Geometry::Ellipse { a1, a2 };
            let e = hole_energy(&g).unwrap();
            assert_abs_diff_eq!(e, hole_energy_quadrature(&g).unwrap(), epsilon = 1e-8);
            assert!(e > 0.0);
        }
        let ann = hole_energy(&Geometry::Annulus { radius: 1.0, c: 0.5 }).unwrap();
        assert!(ann > 0.0 && ann < hole_energy(&Geometry::Ball { d: 2, radius: 1.0 }).unwrap());
        assert!(hole_energy(&Geometry::Ball { d: 3, radius: 1.0 }).is_err());
    }

    #[test]
    fn gap_and_tail() {
        let (n, r) = (100.0f64, 0.3f64);
        let spec = HoleSpec::new(Geometry::Ball { d: 2, radius: r * n.sqrt() }, 1.0 / PI, 2.0).unwrap();
        assert_relative_eq!(log_gap_probability(&spec).unwrap(), -2.0 * n * n * r.powi(4) / 8.0, max_relative = 1e-13);
        let t = tail_exponent(2.0, 3.0, 1.0, 10.0).unwrap();
        assert_relative_eq!(t, -0.5e6 * 10f64.ln(), max_relative = 1e-14);
        assert!(tail_exponent(2.0, 2.0, 1.0, 10.0).is_err());
        let zero = HoleSpec::new(Geometry::Ball { d: 2, radius: 1e-12 }, 1.0, 2.0).unwrap();
        assert!(gap_exponent(&zero).unwrap().abs() < 1e-40);
    }
}
