//! Riesz gas of `N` equally spaced unit charges on a circle of radius `R` with a uniform
//! neutralising background of line density `−ρ_b = −N/2πR`.
//!
//! The pair potential is `Ψ_s(r) = −r^{−s}` (s < 0), `−ln r` (s = 0), `r^{−s}` (s > 0).

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::specfun::{hurwitz_zeta, log_gamma, zeta};
use crate::{Error, Result};

/// Upper limit on `N` for which the `O(N)` exact lattice energy is evaluated.
pub const EXACT_SUM_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszCircle {
    s: f64,
    n: u64,
    radius: f64,
}

/// How [`RieszCircle::point_energy`] is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointMode {
    /// Direct lattice sum for the given `N` and `R`.
    FiniteN,
    /// `N → ∞` at unit spacing density.
    Limit,
}

/// Static energy of the equally spaced configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticEnergy {
    /// `U_pp + U_pb + U_bb` by direct summation, absent above [`EXACT_SUM_LIMIT`].
    pub exact: Option<f64>,
    /// Leading large-`N` form.
    pub asymptotic: f64,
}

/// The Riesz pair potential `Ψ_s` at separation `r > 0`.
pub fn riesz_kernel(s: f64, r: f64) -> f64 {
    if s == 0.0 {
        -r.ln()
    } else if s < 0.0 {
        -r.powf(-s)
    } else {
        r.powf(-s)
    }
}

/// Pairwise summation of `f(0) + … + f(n−1)`; error grows like `log n` rather than `n`.
pub(crate) fn pairwise_sum<F: Fn(u64) -> f64 + Copy>(f: F, lo: u64, hi: u64) -> f64 {
    if hi - lo <= 64 {
        (lo..hi).map(f).sum()
    } else {
        let mid = lo + (hi - lo) / 2;
        pairwise_sum(f, lo, mid) + pairwise_sum(f, mid, hi)
    }
}

impl RieszCircle {
    pub fn new(s: f64, n: u64, radius: f64) -> Result<Self> {
        if !(s > -2.0 && s < 1.0) {
            return Err(Error::Parameter("Riesz exponent must lie in (-2, 1)"));
        }
        if n == 0 {
            return Err(Error::Parameter("N must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Parameter("radius must be positive"));
        }
        Ok(Self { s, n, radius })
    }

    /// Circle with unit background density, `R = N/2π`.
    pub fn unit_density(s: f64, n: u64) -> Result<Self> {
        Self::new(s, n, n as f64 / (2.0 * PI))
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn rho_b(&self) -> f64 {
        self.n as f64 / (2.0 * PI * self.radius)
    }

    /// `V₀ = sgn(s)·N·R^{−s}·Γ(1−s)/Γ(1−s/2)²` for `s ≠ 0` and `N ln R` for `s = 0`.
    ///
    /// For `s ≠ 0` this is the potential of the *positive* background `+ρ_b` (the
    /// circle average of `Ψ_s` times `N`); for `s = 0` it is that of the negative one.
    /// [`RieszCircle::neutralising_potential`] gives the physical value for all `s`.
    pub fn background_potential(&self) -> f64 {
        let n = self.n as f64;
        if self.s == 0.0 {
            n * self.radius.ln()
        } else {
            self.s.signum() * n * self.radius.powf(-self.s) * self.circle_average_ratio()
        }
    }

    /// Potential of the background `−ρ_b` at any point of the circle.
    pub fn neutralising_potential(&self) -> f64 {
        if self.s == 0.0 {
            self.background_potential()
        } else {
            -self.background_potential()
        }
    }

    fn circle_average_ratio(&self) -> f64 {
        let lg = log_gamma(1.0 - self.s).unwrap_or(f64::NAN) - 2.0 * log_gamma(1.0 - 0.5 * self.s).unwrap_or(f64::NAN);
        lg.exp()
    }

    fn chord(&self, angle: f64) -> f64 {
        2.0 * self.radius * (0.5 * angle).sin().abs()
    }

    /// Particle–particle energy of the lattice, `(N/2)Σ_{j=1}^{N−1} Ψ_s(chord_j)`.
    pub fn lattice_pair_energy(&self) -> f64 {
        let n = self.n;
        let step = 2.0 * PI / n as f64;
        let s = self.s;
        0.5 * n as f64 * pairwise_sum(|j| riesz_kernel(s, self.chord(step * j as f64)), 1, n)
    }

    pub fn static_energy(&self) -> StaticEnergy {
        let n = self.n as f64;
        let exact = (self.n <= EXACT_SUM_LIMIT)
            .then(|| self.lattice_pair_energy() + 0.5 * n * self.neutralising_potential());
        let asymptotic = if self.s == 0.0 {
            -0.5 * n * (2.0 * PI * self.rho_b()).ln()
        } else {
            n * self.s.signum() * self.rho_b().powf(self.s) * zeta(self.s).unwrap_or(f64::NAN)
        };
        StaticEnergy { exact, asymptotic }
    }

    /// Energy of a unit test charge at angle `2πx/N` due to the lattice and background.
    ///
    /// In [`PointMode::Limit`] the result is `−ln|e^{2πix}−1|` for `s = 0` and
    /// `sgn(s)[ζ(s;x̃) + ζ(s;1−x̃)]`, `x̃ = x mod 1`, otherwise; the sign makes the
    /// `s < 0` branch agree with the `Ψ_s = −r^{−s}` lattice sums.
    pub fn point_energy(&self, x: f64, mode: PointMode) -> Result<f64> {
        let frac = x - x.floor();
        if frac == 0.0 {
            return Err(Error::Singularity("test charge on a lattice site"));
        }
        match mode {
            PointMode::Limit => {
                if self.s == 0.0 {
                    let z = (2.0 * PI * frac).sin_cos();
                    Ok(-((z.1 - 1.0).hypot(z.0)).ln())
                } else {
                    let v = hurwitz_zeta(self.s, frac)? + hurwitz_zeta(self.s, 1.0 - frac)?;
                    Ok(self.s.signum() * v)
                }
            }
            PointMode::FiniteN => {
                let n = self.n;
                let step = 2.0 * PI / n as f64;
                let s = self.s;
                let sum = pairwise_sum(|j| riesz_kernel(s, self.chord(step * (x - j as f64))), 0, n);
                Ok(sum + self.neutralising_potential())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn background_potential_reference_values() {
        let g = RieszCircle::new(0.0, 3, 2.0).unwrap();
        assert_abs_diff_eq!(g.background_potential(), 3.0 * 2f64.ln(), epsilon = 1e-15);
        let g = RieszCircle::new(-1.0, 1, 1.0).unwrap();
        assert_abs_diff_eq!(g.background_potential(), -4.0 / PI, epsilon = 1e-13);
        let g = RieszCircle::new(0.5, 1, 1.0).unwrap();
        let expect = PI.sqrt() / gamma(0.75).unwrap().powi(2);
        assert_abs_diff_eq!(g.background_potential(), expect, epsilon = 1e-13);
        assert_abs_diff_eq!(expect, 1.18034, epsilon = 1e-5);
    }

    #[test]
    fn background_magnitude_matches_circle_average() {
        // (1/2π)∫|e^{iθ}−1|^{−1/2}dθ = (2/π)∫₀^{π/2}(2 sin u)^{−1/2}du.
        let q = crate::quad::Quad::new(1e-13, 1e-13);
        let avg = q.integrate(|u: f64| (2.0 * u.sin()).powf(-0.5), 0.0, 0.5 * PI).unwrap().value * 2.0 / PI;
        let g = RieszCircle::new(0.5, 1, 1.0).unwrap();
        assert_abs_diff_eq!(g.background_potential().abs(), avg, epsilon = 1e-9);
    }

    #[test]
    fn log_case_total_is_linear_in_n() {
        for n in 2..=64u64 {
            let g = RieszCircle::new(0.0, n, 1.3).unwrap();
            let e = g.static_energy();
            let expect = -0.5 * n as f64 * (2.0 * PI * g.rho_b()).ln();
            assert_abs_diff_eq!(e.exact.unwrap(), expect, epsilon = 1e-12);
            assert_abs_diff_eq!(e.asymptotic, expect, epsilon = 1e-12);
        }
        let e = RieszCircle::new(0.0, 4, 1.0).unwrap().static_energy();
        assert_abs_diff_eq!(e.exact.unwrap(), -2.0 * 4f64.ln(), epsilon = 1e-13);
        let e = RieszCircle::new(0.0, 1, 1.0).unwrap().static_energy();
        assert_abs_diff_eq!(e.exact.unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn root_of_unity_product_by_double_sum() {
        let n = 7;
        let mut direct = 0.0;
        for j in 0..n {
            for k in 0..j {
                let a = 2.0 * PI * j as f64 / n as f64;
                let b = 2.0 * PI * k as f64 / n as f64;
                direct -= ((a.cos() - b.cos()).hypot(a.sin() - b.sin())).ln();
            }
        }
        let g = RieszCircle::new(0.0, n, 1.0).unwrap();
        assert_abs_diff_eq!(g.lattice_pair_energy(), direct, epsilon = 1e-12);
        assert_abs_diff_eq!(direct, -0.5 * n as f64 * (n as f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn unit_density_energy_per_particle_tends_to_zeta() {
        let g = RieszCircle::unit_density(0.5, 1000).unwrap();
        let e = g.static_energy();
        assert!((e.exact.unwrap() / 1000.0 - zeta(0.5).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn limit_values() {
        let g = RieszCircle::new(0.0, 8, 1.0).unwrap();
        assert_abs_diff_eq!(g.point_energy(0.5, PointMode::Limit).unwrap(), -(2f64.ln()), epsilon = 1e-14);
        let g = RieszCircle::new(0.5, 8, 1.0).unwrap();
        let expect = 2.0 * (2f64.sqrt() - 1.0) * zeta(0.5).unwrap();
        assert_abs_diff_eq!(g.point_energy(0.5, PointMode::Limit).unwrap(), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(expect, -1.20986, epsilon = 1e-4);
        let a = g.point_energy(1.25, PointMode::Limit).unwrap();
        let b = g.point_energy(0.25, PointMode::Limit).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        assert!(matches!(g.point_energy(3.0, PointMode::Limit), Err(Error::Singularity(_))));
    }

    #[test]
    fn log_finite_mode_is_exact_for_every_n() {
        for n in [3u64, 10, 57] {
            let g = RieszCircle::new(0.0, n, 2.5).unwrap();
            let x = 0.37;
            let phi = 2.0 * PI * x / n as f64;
            let expect = -(((n as f64 * phi).cos() - 1.0).hypot((n as f64 * phi).sin())).ln();
            assert_abs_diff_eq!(g.point_energy(x, PointMode::FiniteN).unwrap(), expect, epsilon = 1e-11);
        }
    }

    #[test]
    fn finite_mode_converges_to_limit() {
        for s in [-0.5, 0.5] {
            for x in [0.25, 0.5] {
                let mut prev = f64::INFINITY;
                for n in [100u64, 1000, 10_000] {
                    let g = RieszCircle::unit_density(s, n).unwrap();
                    let d = (g.point_energy(x, PointMode::FiniteN).unwrap()
                        - g.point_energy(x, PointMode::Limit).unwrap())
                    .abs();
                    assert!(d < prev, "s={s} x={x} n={n}: {d} !< {prev}");
                    prev = d;
                }
                assert!(prev < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(RieszCircle::new(1.0, 4, 1.0).is_err());
        assert!(RieszCircle::new(-2.0, 4, 1.0).is_err());
        assert!(RieszCircle::new(0.2, 0, 1.0).is_err());
        assert!(RieszCircle::new(0.2, 3, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn limit_is_symmetric_under_reflection(s in -1.9f64..0.95, x in 0.01f64..0.99) {
            let g = RieszCircle::new(s, 4, 1.0).unwrap();
            let a = g.point_energy(x, PointMode::Limit).unwrap();
            let b = g.point_energy(1.0 - x, PointMode::Limit).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }
}
