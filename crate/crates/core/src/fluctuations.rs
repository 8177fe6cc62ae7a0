//! Limiting covariances of linear statistics for log-gases on contours and in droplets,
//! determinantal kernels, and smoothed surface charge correlations.
//!
//! All covariance formulas are quoted at general `β`; the `β = 2` determinantal values
//! are multiplied by `2/β` (contour), `1/β` (surface part of a droplet with neutralising
//! background) or `1/β` (interval, which carries an intrinsic extra factor of two).

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::conformal::LaurentMap;
use crate::quad::Quad;
use crate::{Complex64, Error, Result};

/// Uniform grid used by discrete Fourier transforms.
pub const FOURIER_GRID: usize = 4096;
/// Grid on which a truncated Fourier series must reproduce its function.
pub const RECONSTRUCTION_GRID: usize = 512;
/// Default trapezoid grid for the double contour integrals.
pub const CONTOUR_GRID: usize = 512;

const DIFF_STEP: f64 = 1e-5;

/// Which closed form of the covariance to use on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Trapezoid double integral of the difference quotient.
    Quadrature,
    /// `Σ |n| f_n g_{−n}`.
    Fourier,
}

/// Prefactor convention for the double contour integral over a mapped boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Log-gas confined to the closed contour: `2/β`.
    Contour,
    /// Surface part for a droplet with uniform neutralising background: `1/β`.
    Background,
    /// Log-gas on an interval `[−h, h]`: `1/β`.
    Interval,
}

impl Convention {
    pub fn prefactor(self, beta: f64) -> f64 {
        match self {
            Convention::Contour => 2.0 / beta,
            Convention::Background | Convention::Interval => 1.0 / beta,
        }
    }
}

/// A real function of the angle on the unit circle, optionally with its Fourier
/// coefficients `f_n = (1/2π)∫ f e^{−inθ} dθ`, `|n| ≤ n_max`.
pub struct LinearStatistic<'a> {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    fourier: Option<Vec<Complex64>>,
}

impl core::fmt::Debug for LinearStatistic<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("LinearStatistic").field("n_max", &self.n_max()).finish()
    }
}

impl<'a> LinearStatistic<'a> {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'a>(f: F) -> Self {
        Self { f: Box::new(f), fourier: None }
    }

    /// Attach coefficients computed on the [`FOURIER_GRID`], checking that the truncated
    /// series reproduces `f` on [`RECONSTRUCTION_GRID`] points to `1e−8`.
    pub fn with_fourier(mut self, n_max: usize) -> Result<Self> {
        let coeffs = fourier_coefficients(&*self.f, n_max);
        for k in 0..RECONSTRUCTION_GRID {
            let th = 2.0 * PI * k as f64 / RECONSTRUCTION_GRID as f64;
            let rec = synthesize(&coeffs, th);
            if (rec - (self.f)(th)).abs() > 1e-8 {
                return Err(Error::Parameter("truncated Fourier series does not reproduce the statistic"));
            }
        }
        self.fourier = Some(coeffs);
        Ok(self)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        (self.f)(theta)
    }

    pub fn n_max(&self) -> Option<usize> {
        self.fourier.as_ref().map(|c| (c.len() - 1) / 2)
    }

    /// Coefficients indexed by `n + n_max`.
    pub fn fourier(&self) -> Option<&[Complex64]> {
        self.fourier.as_deref()
    }

    fn coefficients(&self) -> Vec<Complex64> {
        match &self.fourier {
            Some(c) => c.clone(),
            None => fourier_coefficients(&*self.f, FOURIER_GRID / 2 - 1),
        }
    }
}

/// `f_n` for `|n| ≤ n_max` by the discrete transform on [`FOURIER_GRID`] points; the
/// result is indexed by `n + n_max`.
pub fn fourier_coefficients(f: &dyn Fn(f64) -> f64, n_max: usize) -> Vec<Complex64> {
    let m = FOURIER_GRID;
    let n_max = n_max.min(m / 2 - 1);
    let samples: Vec<f64> = (0..m).map(|k| f(2.0 * PI * k as f64 / m as f64)).collect();
    let twiddle: Vec<Complex64> = (0..m).map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / m as f64)).collect();
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
    for n in 0..=n_max {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, s) in samples.iter().enumerate() {
            acc += twiddle[(n * k) % m] * *s;
        }
        let c = acc / m as f64;
        out[n_max + n] = c;
        out[n_max - n] = c.conj();
    }
    out
}

fn synthesize(coeffs: &[Complex64], theta: f64) -> f64 {
    let n_max = (coeffs.len() - 1) / 2;
    let mut acc = coeffs[n_max].re;
    for n in 1..=n_max {
        acc += 2.0 * (coeffs[n_max + n] * Complex64::from_polar(1.0, n as f64 * theta)).re;
    }
    acc
}

/// Circular unitary ensemble kernel `(1/2π) sin(NΔ/2)/sin(Δ/2)`.
pub fn cue_kernel(n: u64, theta: f64, theta_p: f64) -> f64 {
    let half = 0.5 * (theta - theta_p);
    let s = half.sin();
    let nf = n as f64;
    if s.abs() < 1e-12 {
        return nf * (nf * half).cos() / half.cos() / (2.0 * PI);
    }
    (nf * half).sin() / s / (2.0 * PI)
}

/// Truncated-unitary (sub-block) kernel `(1/π) Σ_{j=1}^N j (z z̄')^{j−1}`.
pub fn subblock_kernel(n: u64, z: Complex64, z_p: Complex64) -> Complex64 {
    let w = z * z_p.conj();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in (1..=n).rev() {
        acc = acc * w + j as f64;
    }
    acc / PI
}

/// Radial double integral `∫₀¹ r dr ∫₀¹ r' dr' |K_N(re^{iθ}, r'e^{iθ'})|²` split into
/// the edge piece carried by the large-`N` kernel and the remaining bulk piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubblockRadial {
    /// From `K_N ~ −(N/π) w^N/(1−w)`; tends to `(1/2π)²/|1−e^{iΔ}|²`.
    pub edge: f64,
    /// The full finite-`N` value.
    pub exact: f64,
    /// `exact − edge`.
    pub bulk: f64,
}

pub fn subblock_smoothed(n: u64, theta: f64, theta_p: f64) -> Result<SubblockRadial> {
    let delta = theta - theta_p;
    let e = Complex64::from_polar(1.0, delta);
    if (Complex64::new(1.0, 0.0) - e).norm() < 1e-8 {
        return Err(Error::Singularity("smoothed sub-block kernel at coincident angles"));
    }
    let nf = n as f64;
    // Exact: (1/π²) Σ_{j,k} jk cos((j−k)Δ)/(j+k)².
    let mut exact = 0.0;
    for j in 1..=n {
        for k in 1..=n {
            let (jf, kf) = (j as f64, k as f64);
            exact += jf * kf * ((jf - kf) * delta).cos() / ((jf + kf) * (jf + kf));
        }
    }
    exact /= PI * PI;
    // Edge: substitute t = r^{2N+2} so the peaked weight becomes uniform.
    let p = 1.0 / (2.0 * nf + 2.0);
    let inner = Quad::new(1e-12, 1e-10);
    let v = Quad::new(1e-11, 1e-9).integrate(
        |t| {
            let r = t.powf(p);
            inner
                .integrate_lenient(|tp| 1.0 / (Complex64::new(1.0, 0.0) - e * (r * tp.powf(p))).norm_sqr(), 0.0, 1.0)
                .value
        },
        0.0,
        1.0,
    )?;
    let edge = nf * nf * p * p / (PI * PI) * v.value;
    Ok(SubblockRadial { edge, exact, bulk: exact - edge })
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Parameter("beta must be positive"));
    }
    Ok(())
}

/// Trapezoid evaluation of `(1/(4π)²)∫∫ (F(θ)−F(θ'))(G(θ)−G(θ'))/sin²((θ−θ')/2)` with
/// diagonal cells given their limit `4F'G'`. This is the `β = 2` circle value.
fn difference_quotient_integral<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(f: F, g: G, m: usize) -> f64 {
    let h = 2.0 * PI / m as f64;
    let fs: Vec<f64> = (0..m).map(|k| f(h * k as f64)).collect();
    let gs: Vec<f64> = (0..m).map(|k| g(h * k as f64)).collect();
    let mut total = 0.0;
    for i in 0..m {
        let th = h * i as f64;
        let df = (f(th + DIFF_STEP) - f(th - DIFF_STEP)) / (2.0 * DIFF_STEP);
        let dg = (g(th + DIFF_STEP) - g(th - DIFF_STEP)) / (2.0 * DIFF_STEP);
        let mut row = 4.0 * df * dg;
        for j in 0..m {
            if j == i {
                continue;
            }
            let s = (0.5 * h * (i as f64 - j as f64)).sin();
            row += (fs[i] - fs[j]) * (gs[i] - gs[j]) / (s * s);
        }
        total += row;
    }
    total * h * h / (16.0 * PI * PI)
}

/// Limiting covariance of `Σ f(θ_l)` and `Σ g(θ_l)` for the log-gas on the unit circle.
pub fn covariance_circle(f: &LinearStatistic<'_>, g: &LinearStatistic<'_>, beta: f64, route: Route) -> Result<f64> {
    check_beta(beta)?;
    let base = match route {
        Route::Quadrature => difference_quotient_integral(|t| f.eval(t), |t| g.eval(t), CONTOUR_GRID),
        Route::Fourier => {
            let (fc, gc) = (f.coefficients(), g.coefficients());
            let (nf, ng) = ((fc.len() - 1) / 2, (gc.len() - 1) / 2);
            let n_max = nf.min(ng);
            (1..=n_max)
                .map(|n| n as f64 * 2.0 * (fc[nf + n] * gc[ng - n]).re)
                .sum()
        }
    };
    Ok(2.0 / beta * base)
}

/// Covariance for a log-gas on (or a droplet bounded by) the image of the unit circle:
/// `(1/4π²)∫|du|∫|dv| (f(ξ(u))−f(ξ(v)))(g(ξ̄(u))−g(ξ̄(v)))/|u−v|²` times the convention's
/// prefactor.
pub fn covariance_mapped<F, G>(map: &LaurentMap, f: F, g: G, beta: f64, convention: Convention) -> Result<f64>
where
    F: Fn(Complex64) -> f64,
    G: Fn(Complex64) -> f64,
{
    covariance_mapped_on_grid(map, f, g, beta, convention, CONTOUR_GRID)
}

/// As [`covariance_mapped`] on an `m`-point trapezoid grid.
pub fn covariance_mapped_on_grid<F, G>(
    map: &LaurentMap,
    f: F,
    g: G,
    beta: f64,
    convention: Convention,
    m: usize,
) -> Result<f64>
where
    F: Fn(Complex64) -> f64,
    G: Fn(Complex64) -> f64,
{
    check_beta(beta)?;
    if m < 8 {
        return Err(Error::Parameter("contour grid too coarse"));
    }
    let fu = |t: f64| f(map.xi(Complex64::from_polar(1.0, t)));
    let gu = |t: f64| g(map.xi(Complex64::from_polar(1.0, t)).conj());
    Ok(convention.prefactor(beta) * difference_quotient_integral(fu, gu, m))
}

/// Bulk part `(1/2πβ)∫_E ∇f·∇g` over the ellipse with semi-axes `a₁, a₂` (disk if equal).
pub fn bulk_covariance_ellipse<F, G>(a1: f64, a2: f64, grad_f: F, grad_g: G, beta: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> [f64; 2],
    G: Fn(f64, f64) -> [f64; 2],
{
    check_beta(beta)?;
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(Error::Parameter("semi-axes must be positive"));
    }
    let inner = Quad::new(1e-12, 1e-11);
    let v = Quad::new(1e-11, 1e-10).integrate(
        |t| {
            inner
                .integrate_lenient(
                    |th| {
                        let (x, y) = (a1 * t * th.cos(), a2 * t * th.sin());
                        let (p, q) = (grad_f(x, y), grad_g(x, y));
                        (p[0] * q[0] + p[1] * q[1]) * a1 * a2 * t
                    },
                    0.0,
                    2.0 * PI,
                )
                .value
        },
        0.0,
        1.0,
    )?;
    Ok(v.value / (2.0 * PI * beta))
}

/// Boundaries on which the smoothed surface charge correlation is known.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceGeometry {
    /// Points are angles `θ`.
    Disk { radius: f64 },
    /// Points are abscissae `x` on the edge of a half-plane plasma.
    HalfPlane,
    /// Points are the angles `η` of `u = e^{iη}` under the ellipse exterior map.
    Ellipse { a1: f64, a2: f64 },
    /// Points are `(x, y)` on the plane bounding a half-space plasma.
    HalfSpace,
    /// Points are angles `η`; the value is `−(1/β)` times the conjectured smoothed
    /// `|K_∞|²` built from the exterior map.
    Mapped(LaurentMap),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceCorrelation {
    pub value: f64,
    /// Set when the value rests on a formula that has not been proven.
    pub conjectural: bool,
}

fn angle_pair(p1: &[f64], p2: &[f64]) -> Result<(f64, f64)> {
    match (p1, p2) {
        ([a], [b]) => Ok((*a, *b)),
        _ => Err(Error::Domain("expected one boundary coordinate per point")),
    }
}

/// Limiting smoothed truncated surface charge correlation between two boundary points.
pub fn surface_correlation(geom: &SurfaceGeometry, beta: f64, p1: &[f64], p2: &[f64]) -> Result<SurfaceCorrelation> {
    check_beta(beta)?;
    let exact = |value| Ok(SurfaceCorrelation { value, conjectural: false });
    match geom {
        SurfaceGeometry::Disk { radius } => {
            let (a, b) = angle_pair(p1, p2)?;
            let chord = 2.0 * radius * (0.5 * (a - b)).sin();
            if chord.abs() < 1e-300 {
                return Err(Error::Singularity("coincident boundary points"));
            }
            exact(-1.0 / (2.0 * beta * PI * PI * chord * chord))
        }
        SurfaceGeometry::HalfPlane => {
            let (a, b) = angle_pair(p1, p2)?;
            if a == b {
                return Err(Error::Singularity("coincident boundary points"));
            }
            exact(-1.0 / (2.0 * beta * PI * PI * (a - b) * (a - b)))
        }
        SurfaceGeometry::HalfSpace => {
            if p1.len() != 2 || p2.len() != 2 {
                return Err(Error::Domain("half-space boundary points are (x, y)"));
            }
            let d2 = (p1[0] - p2[0]).powi(2) + (p1[1] - p2[1]).powi(2);
            if d2 == 0.0 {
                return Err(Error::Singularity("coincident boundary points"));
            }
            exact(-1.0 / (8.0 * beta * PI * PI * d2 * d2.sqrt()))
        }
        SurfaceGeometry::Ellipse { a1, a2 } => {
            let (a, b) = angle_pair(p1, p2)?;
            let map = LaurentMap::ellipse(*a1, *a2)?;
            let (u, v) = (Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b));
            let d2 = (u - v).norm_sqr();
            if d2 < 1e-300 {
                return Err(Error::Singularity("coincident boundary points"));
            }
            let (h1, h2) = (map.xi_prime(u).norm(), map.xi_prime(v).norm());
            exact(-1.0 / (2.0 * beta * PI * PI * d2 * h1 * h2))
        }
        SurfaceGeometry::Mapped(map) => {
            let (a, b) = angle_pair(p1, p2)?;
            let (u, v) = (Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b));
            let den = (Complex64::new(1.0, 0.0) - u * v.conj()).norm_sqr();
            if den < 1e-300 {
                return Err(Error::Singularity("coincident boundary points"));
            }
            // |ζ'(z)| = 1/|ξ'(u)| on the boundary.
            let k2 = 1.0 / (map.xi_prime(u).norm() * map.xi_prime(v).norm()) / (2.0 * PI * PI * den);
            Ok(SurfaceCorrelation { value: -k2 / beta, conjectural: true })
        }
    }
}

/// `−(1/β(2π)²)·∂²G/∂r₁∂r₂` for the Green function of the exterior of the disk of radius
/// `R`, by central differences of step `h` across the boundary at angles `θ₁, θ₂`.
pub fn disk_correlation_linear_response(radius: f64, beta: f64, th1: f64, th2: f64, h: f64) -> Result<f64> {
    check_beta(beta)?;
    let green = |r1: f64, r2: f64| {
        let z = Complex64::from_polar(r1, th1);
        let w = Complex64::from_polar(r2, th2);
        -((z - w).norm() * radius / (radius * radius - z * w.conj()).norm()).ln()
    };
    let r = radius;
    let d2 = (green(r + h, r + h) - green(r + h, r - h) - green(r - h, r + h) + green(r - h, r - h)) / (4.0 * h * h);
    Ok(-d2 / (beta * 4.0 * PI * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{green_two_point, PlanarDomain};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn stat<'a>(f: impl Fn(f64) -> f64 + Send + Sync + 'a) -> LinearStatistic<'a> {
        LinearStatistic::new(f)
    }

    #[test]
    fn cue_kernel_values_and_normalisation() {
        assert_abs_diff_eq!(cue_kernel(7, 0.3, 0.3), 7.0 / (2.0 * PI), epsilon = 1e-14);
        assert_abs_diff_eq!(cue_kernel(2, PI, 0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cue_kernel(5, 2.0 * PI, 0.0), 5.0 / (2.0 * PI), epsilon = 1e-12);
        let tot = Quad::default().integrate(|t| cue_kernel(9, t, t), 0.0, 2.0 * PI).unwrap();
        assert_abs_diff_eq!(tot.value, 9.0, epsilon = 1e-12);
        // Reproducing property: ∫ K(θ,φ)K(φ,θ') dφ = K(θ,θ').
        let rep = Quad::new(1e-13, 1e-13).integrate(|p| cue_kernel(6, 0.4, p) * cue_kernel(6, p, 1.9), 0.0, 2.0 * PI).unwrap();
        assert_abs_diff_eq!(rep.value, cue_kernel(6, 0.4, 1.9), epsilon = 1e-12);
    }

    #[test]
    fn subblock_kernel_values() {
        let z0 = Complex64::new(0.0, 0.0);
        assert_abs_diff_eq!(subblock_kernel(50, z0, z0).re, 1.0 / PI, epsilon = 1e-15);
        let one = Complex64::new(1.0, 0.0);
        assert_abs_diff_eq!(subblock_kernel(10, one, one).re, 55.0 / PI, epsilon = 1e-12);
        let z = Complex64::new(0.3, 0.4);
        let w = Complex64::new(-0.2, 0.1);
        let closed = {
            let x = z * w.conj();
            let n = 12;
            (Complex64::new(1.0, 0.0) - x.powu(n + 1) * (n + 1) as f64 + x.powu(n + 2) * n as f64)
                / ((Complex64::new(1.0, 0.0) - x).powu(2) * PI)
        };
        assert!((subblock_kernel(12, z, w) - closed).norm() <= 1e-10 * closed.norm());
    }

    #[test]
    fn subblock_smoothed_edge_limit() {
        let r = subblock_smoothed(200, PI, 0.0).unwrap();
        let limit = 0.25 / (4.0 * PI * PI);
        assert!((r.edge / limit - 1.0).abs() < 0.02, "{r:?}");
        assert_abs_diff_eq!(r.exact, r.edge + r.bulk, epsilon = 1e-15);
        assert!(subblock_smoothed(10, 1.0, 1.0).is_err());
    }

    #[test]
    fn circle_covariance_examples() {
        let c = stat(|_| 3.0);
        assert_abs_diff_eq!(covariance_circle(&c, &c, 2.0, Route::Quadrature).unwrap(), 0.0, epsilon = 1e-14);
        let f = stat(f64::cos);
        assert_abs_diff_eq!(covariance_circle(&f, &f, 2.0, Route::Quadrature).unwrap(), 0.5, epsilon = 1e-9);
        let g = stat(|t| (2.0 * t).cos()).with_fourier(4).unwrap();
        assert_abs_diff_eq!(covariance_circle(&g, &g, 2.0, Route::Fourier).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(covariance_circle(&f, &f, 1.0, Route::Fourier).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn routes_agree_on_trigonometric_polynomials() {
        let polys: [fn(f64) -> f64; 5] = [
            |t| t.cos(),
            |t| (2.0 * t).sin() + 0.5 * t.cos(),
            |t| 1.0 + (3.0 * t).cos() - 0.2 * (5.0 * t).sin(),
            |t| (t.cos()).powi(3),
            |t| 0.7 * (7.0 * t).cos() * t.sin(),
        ];
        for p in polys {
            let s = stat(p);
            let q = covariance_circle(&s, &s, 2.0, Route::Quadrature).unwrap();
            let f = covariance_circle(&s, &s, 2.0, Route::Fourier).unwrap();
            assert!((q - f).abs() <= 1e-8, "{q} {f}");
        }
    }

    #[test]
    fn bilinear_and_symmetric() {
        let f1 = stat(|t| t.cos() + 0.3 * (2.0 * t).sin());
        let f2 = stat(|t| (3.0 * t).cos());
        let g = stat(|t| t.sin() - (3.0 * t).cos());
        let a = 1.7;
        let comb = stat(|t| a * (t.cos() + 0.3 * (2.0 * t).sin()) + (3.0 * t).cos());
        for route in [Route::Quadrature, Route::Fourier] {
            let lhs = covariance_circle(&comb, &g, 2.0, route).unwrap();
            let rhs = a * covariance_circle(&f1, &g, 2.0, route).unwrap() + covariance_circle(&f2, &g, 2.0, route).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10);
            let sym = covariance_circle(&g, &f1, 2.0, route).unwrap() - covariance_circle(&f1, &g, 2.0, route).unwrap();
            assert!(sym.abs() <= 1e-10);
        }
    }

    #[test]
    fn fourier_reconstruction_is_enforced() {
        assert!(stat(|t| (5.0 * t).cos()).with_fourier(3).is_err());
        let s = stat(|t| (5.0 * t).cos()).with_fourier(6).unwrap();
        assert_eq!(s.n_max(), Some(6));
    }

    #[test]
    fn linear_response_identity() {
        let disk = PlanarDomain::Disk { radius: 1.0 };
        let beta = 2.0;
        for (z, w) in [
            (Complex64::new(1.5, 0.0), Complex64::new(0.0, 3.0)),
            (Complex64::from_polar(1.5, 1.0), Complex64::from_polar(1.5, 2.5)),
            (Complex64::from_polar(3.0, -0.4), Complex64::from_polar(1.5, 0.9)),
        ] {
            let f = stat(move |t| -(Complex64::from_polar(1.0, t) - z).norm().ln());
            let g = stat(move |t| -(Complex64::from_polar(1.0, t) - w).norm().ln());
            let cov = covariance_circle(&f, &g, beta, Route::Fourier).unwrap();
            let gr = green_two_point(&disk, z, w).unwrap();
            let expect = ((z * w).norm().ln() - gr - (z - w).norm().ln()) / beta;
            assert!((cov - expect).abs() <= 1e-8, "{cov} {expect}");
        }
    }

    #[test]
    fn mapped_covariance_reductions() {
        let id = LaurentMap::circle(1.0).unwrap();
        let f = |z: Complex64| z.re * z.re - 0.3 * z.im;
        let on_map = covariance_mapped(&id, f, f, 2.0, Convention::Contour).unwrap();
        let s = stat(move |t| f(Complex64::from_polar(1.0, t)));
        let sc = stat(move |t| f(Complex64::from_polar(1.0, -t)));
        let circle = covariance_circle(&s, &sc, 2.0, Route::Quadrature).unwrap();
        assert!((on_map - circle).abs() <= 1e-10);

        let iv = LaurentMap::interval(1.0).unwrap();
        let v = covariance_mapped(&iv, |z| z.re, |z| z.re, 2.0, Convention::Interval).unwrap();
        assert_abs_diff_eq!(v, 0.25, epsilon = 1e-9);

        let el = LaurentMap::ellipse(2.0, 1.0).unwrap();
        let coarse = covariance_mapped(&el, |z| z.re, |z| z.re, 2.0, Convention::Contour).unwrap();
        let fine = covariance_mapped_on_grid(&el, |z| z.re, |z| z.re, 2.0, Convention::Contour, 2000).unwrap();
        assert!(coarse.is_finite() && ((coarse - fine) / fine).abs() < 1e-3);
        // Re ξ(e^{iθ}) = (a₁) cos θ for this map, so the value is a₁²/2.
        assert_abs_diff_eq!(coarse, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn ginibre_real_part_prediction() {
        // f = Re z/√N on the disk of radius √N: bulk 1/(2β) plus surface 1/(2β).
        let n = 32.0f64;
        let beta = 2.0;
        let r = n.sqrt();
        let grad = |_x: f64, _y: f64| [1.0 / r, 0.0];
        let bulk = bulk_covariance_ellipse(r, r, grad, grad, beta).unwrap();
        let map = LaurentMap::circle(r).unwrap();
        let surf = covariance_mapped(&map, |z| z.re / r, |z| z.re / r, beta, Convention::Background).unwrap();
        assert_abs_diff_eq!(bulk, 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(bulk + surf, 1.0 / beta, epsilon = 1e-9);
    }

    #[test]
    fn surface_correlation_examples() {
        let v = surface_correlation(&SurfaceGeometry::Disk { radius: 1.0 }, 2.0, &[PI], &[0.0]).unwrap();
        assert_abs_diff_eq!(v.value, -1.0 / (16.0 * PI * PI), epsilon = 1e-15);
        let v = surface_correlation(&SurfaceGeometry::HalfPlane, 2.0, &[0.0], &[1.0]).unwrap();
        assert_abs_diff_eq!(v.value, -1.0 / (4.0 * PI * PI), epsilon = 1e-15);
        let v = surface_correlation(&SurfaceGeometry::HalfSpace, 1.0, &[0.0, 0.0], &[0.6, 0.8]).unwrap();
        assert_abs_diff_eq!(v.value, -1.0 / (8.0 * PI * PI), epsilon = 1e-15);
        assert!(surface_correlation(&SurfaceGeometry::HalfPlane, 2.0, &[1.0], &[1.0]).is_err());
    }

    #[test]
    fn ellipse_forms_agree() {
        let (a1, a2) = (2.0, 1.0);
        let map = LaurentMap::ellipse(a1, a2).unwrap();
        for (x, y) in [(0.1, 2.0), (1.0, 4.0), (3.0, 5.5)] {
            let e = surface_correlation(&SurfaceGeometry::Ellipse { a1, a2 }, 2.0, &[x], &[y]).unwrap();
            let m = surface_correlation(&SurfaceGeometry::Mapped(map.clone()), 2.0, &[x], &[y]).unwrap();
            assert!(m.conjectural && !e.conjectural);
            assert!((e.value - m.value).abs() <= 1e-12 * e.value.abs());
        }
        let c = surface_correlation(&SurfaceGeometry::Ellipse { a1: 1.3, a2: 1.3 }, 2.0, &[0.2], &[2.0]).unwrap();
        let d = surface_correlation(&SurfaceGeometry::Disk { radius: 1.3 }, 2.0, &[0.2], &[2.0]).unwrap();
        assert_abs_diff_eq!(c.value, d.value, epsilon = 1e-14);
    }

    #[test]
    fn disk_correlation_is_linear_response() {
        for (r, b, t1, t2) in [(1.0, 2.0, 0.0, PI), (2.0, 1.0, 0.3, 1.7), (0.7, 4.0, -1.0, 2.2)] {
            let fd = disk_correlation_linear_response(r, b, t1, t2, 1e-4).unwrap();
            let cf = surface_correlation(&SurfaceGeometry::Disk { radius: r }, b, &[t1], &[t2]).unwrap().value;
            assert!((fd - cf).abs() <= 1e-6, "{fd} {cf}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn covariance_is_nonnegative(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
            let s = stat(move |t| a * t.cos() + b * (2.0 * t).sin() + c * (4.0 * t).cos());
            let v = covariance_circle(&s, &s, 2.0, Route::Fourier).unwrap();
            prop_assert!(v >= -1e-12);
            prop_assert!((v - (0.5 * a * a + b * b + 2.0 * c * c)).abs() < 1e-10);
        }
    }
}
