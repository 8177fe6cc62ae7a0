//! Metropolis sampling of two-dimensional log-gases and the one-dimensional sinh gas,
//! with exact `β = 2` partition functions and electrostatic free-energy predictions.
//!
//! Every ensemble has a total energy `U = Σ v(z_j) − Σ_{j<k} w(z_j, z_k)` and Boltzmann
//! factor `e^{−βU}`:
//!
//! | ensemble   | one-body `v(z)`                          | pair `w(z, z')`              |
//! |------------|------------------------------------------|------------------------------|
//! | ginibre    | `|z|²/2`                                 | `ln|z − z'|`                 |
//! | elliptic   | `(|z|² − τ Re z²) / (2(1 − τ²))`         | `ln|z − z'|`                 |
//! | induced    | `|z|²/2 − αN ln|z|`                      | `ln|z − z'|`                 |
//! | contour    | none; particles live on `ξ(e^{iθ})`      | `ln|z − z'|`                 |
//! | sinh       | `c x²/2`                                 | `ln|2 sinh(π(x − x')/L)|`    |
//!
//! At `β = 2` the first three are the eigenvalue densities of the Ginibre, elliptic
//! Ginibre and induced Ginibre ensembles. On a contour the measure is arc length, so
//! the angle chain carries the extra weight `|ξ'(e^{iθ})|`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::conformal::LaurentMap;
use crate::domains::{Geometry, UniformDomain};
use crate::quad::Quad;
use crate::rng::Stream;
use crate::specfun::{ln_factorial, log_gamma};
use crate::{Error, EvalResult, Result};

/// Minimum number of retained configurations for density estimates.
pub const MIN_CONFIGURATIONS: usize = 1000;
/// Minimum number of independent chains for [`statistic_covariance`].
pub const MIN_CHAINS: usize = 4;
/// Outer radial quantile used by the quantile edge estimator.
pub const EDGE_QUANTILE: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    Ginibre,
    Elliptic { tau: f64 },
    Induced { alpha: f64 },
    Contour { map: LaurentMap },
    Sinh { c: f64, l: f64 },
}

impl Ensemble {
    pub fn name(&self) -> &'static str {
        match self {
            Ensemble::Ginibre => "ginibre",
            Ensemble::Elliptic { .. } => "elliptic",
            Ensemble::Induced { .. } => "induced",
            Ensemble::Contour { .. } => "contour",
            Ensemble::Sinh { .. } => "sinh",
        }
    }

    /// Whether the normalization returned by [`exact_log_partition`] contains the `N!`
    /// from integrating over ordered as well as unordered configurations.
    ///
    /// The Ginibre and elliptic constants are `Z/N!`. The induced constant and the sinh
    /// integral are the full configuration integral `Z`. The contour value is `ln(Z/N!)`.
    pub fn includes_factorial(&self) -> bool {
        matches!(self, Ensemble::Induced { .. } | Ensemble::Sinh { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasModel {
    beta: f64,
    n: usize,
    ensemble: Ensemble,
}

impl GasModel {
    pub fn new(beta: f64, n: usize, ensemble: Ensemble) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter("β must be positive"));
        }
        if n == 0 {
            return Err(Error::Parameter("N must be at least 1"));
        }
        match &ensemble {
            Ensemble::Elliptic { tau } if !(*tau >= 0.0 && *tau < 1.0) => {
                return Err(Error::Parameter("τ must lie in [0, 1)"));
            }
            Ensemble::Induced { alpha } if !(*alpha > 0.0 && alpha.is_finite()) => {
                return Err(Error::Parameter("α must be positive"));
            }
            Ensemble::Sinh { c, l } if !(*c > 0.0 && *l > 0.0 && c.is_finite() && l.is_finite()) => {
                return Err(Error::Parameter("c and L must be positive"));
            }
            _ => {}
        }
        Ok(Self { beta, n, ensemble })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    /// True for the real-line sinh gas, whose positions have zero imaginary part.
    pub fn is_real(&self) -> bool {
        matches!(self.ensemble, Ensemble::Sinh { .. })
    }

    fn one_body(&self, z: Complex64) -> f64 {
        match &self.ensemble {
            Ensemble::Ginibre => 0.5 * z.norm_sqr(),
            Ensemble::Elliptic { tau } => (z.norm_sqr() - tau * (z.re * z.re - z.im * z.im)) / (2.0 * (1.0 - tau * tau)),
            Ensemble::Induced { alpha } => 0.5 * z.norm_sqr() - alpha * self.n as f64 * z.norm().ln(),
            Ensemble::Contour { .. } => 0.0,
            Ensemble::Sinh { c, .. } => 0.5 * c * z.re * z.re,
        }
    }

    fn pair(&self, z: Complex64, w: Complex64) -> f64 {
        match &self.ensemble {
            Ensemble::Sinh { l, .. } => ln_two_sinh_abs(PI * (z.re - w.re) / l),
            _ => (z - w).norm().ln(),
        }
    }

    /// Physical position of a chain coordinate (the angle for contour ensembles).
    fn position(&self, coord: f64, z: Complex64) -> Complex64 {
        match &self.ensemble {
            Ensemble::Contour { map } => map.xi(Complex64::from_polar(1.0, coord)),
            _ => z,
        }
    }

    /// `ln|ξ'(e^{iθ})|`, the arc-length Jacobian of the angle coordinate.
    fn log_jacobian(&self, theta: f64) -> f64 {
        match &self.ensemble {
            Ensemble::Contour { map } => map.xi_prime(Complex64::from_polar(1.0, theta)).norm().ln(),
            _ => 0.0,
        }
    }

    /// Change of `U` when particle `i` moves from `positions[i]` to `to`.
    pub fn delta_energy(&self, positions: &[Complex64], i: usize, to: Complex64) -> f64 {
        let from = positions[i];
        let mut du = self.one_body(to) - self.one_body(from);
        for (j, &zj) in positions.iter().enumerate() {
            if j != i {
                du -= self.pair(to, zj) - self.pair(from, zj);
            }
        }
        du
    }

    /// Total energy `U` of a configuration, summed from scratch.
    pub fn total_energy(&self, positions: &[Complex64]) -> f64 {
        let mut u = 0.0;
        for (j, &zj) in positions.iter().enumerate() {
            u += self.one_body(zj);
            for &zk in &positions[j + 1..] {
                u -= self.pair(zj, zk);
            }
        }
        u
    }

    /// Metropolis acceptance probability for moving particle `i` to `to` with a
    /// symmetric proposal, `min(1, e^{−βΔU})`. Planar and real ensembles only; contour
    /// moves also carry the arc-length Jacobian and go through the chain itself.
    pub fn acceptance_probability(&self, positions: &[Complex64], i: usize, to: Complex64) -> f64 {
        let dl = -self.beta * self.delta_energy(positions, i, to);
        if dl.is_nan() {
            0.0
        } else {
            dl.exp().min(1.0)
        }
    }
}

/// `ln|2 sinh t|`, stable for large `|t|`.
fn ln_two_sinh_abs(t: f64) -> f64 {
    let a = t.abs();
    a + (-(-2.0 * a).exp()).ln_1p()
}

/// Sampler settings. The defaults are 20% burn-in, target acceptance 0.35, and one
/// retained configuration per sweep of `N` single-particle moves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub burn_in_fraction: f64,
    pub target_acceptance: f64,
    /// Starting proposal scale; `None` picks one from the ensemble's length scale.
    pub initial_step: Option<f64>,
    /// Keep every `thin`-th measurement sweep.
    pub thin: u64,
    /// Chain index; part of the random-stream address.
    pub chain: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { burn_in_fraction: 0.2, target_acceptance: 0.35, initial_step: None, thin: 1, chain: 0 }
    }
}

impl SamplerConfig {
    pub fn with_chain(mut self, chain: u64) -> Self {
        self.chain = chain;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.burn_in_fraction) {
            return Err(Error::Parameter("burn-in fraction must lie in [0, 1)"));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(Error::Parameter("target acceptance must lie in (0, 1)"));
        }
        if let Some(s) = self.initial_step {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Parameter("initial step must be positive"));
            }
        }
        if self.thin == 0 {
            return Err(Error::Parameter("thinning interval must be at least 1"));
        }
        Ok(())
    }
}

/// Final state of a chain. Tallies cover the measurement phase (after adaptation).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub positions: Vec<Complex64>,
    pub step_scale: f64,
    pub rng_seed: u64,
    pub chain: u64,
    pub sweep_count: u64,
    pub accepted: u64,
    pub proposed: u64,
    pub acceptance_rate: f64,
    /// Energy `U` tracked incrementally through accepted moves.
    pub energy: f64,
}

/// A chain together with every retained configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRun {
    pub state: ChainState,
    /// `(sweep, positions)` for each retained configuration.
    pub samples: Vec<(u64, Vec<Complex64>)>,
}

const ADAPT_GAIN: f64 = 2.0;
const STEP_MIN: f64 = 1e-8;

/// Run a chain with default settings and keep all retained configurations in memory.
pub fn run_chain(model: &GasModel, sweeps: u64, seed: u64) -> Result<ChainRun> {
    let mut samples = Vec::new();
    let state = run_chain_with(model, sweeps, seed, &SamplerConfig::default(), |sweep, pos| {
        samples.push((sweep, pos.to_vec()));
    })?;
    Ok(ChainRun { state, samples })
}

/// Run a Metropolis chain, calling `observe(sweep, positions)` for every retained
/// configuration.
///
/// Each sweep proposes one Gaussian move per particle, in index order. The draws for
/// particle `i` in sweep `s` come from the stream addressed by `(seed, chain, i, s+1)`,
/// so a chain is a pure function of `(model, sweeps, seed, config)`. During burn-in the
/// log step size follows a Robbins–Monro update toward the target acceptance; it is
/// frozen afterwards.
pub fn run_chain_with<F>(model: &GasModel, sweeps: u64, seed: u64, config: &SamplerConfig, mut observe: F) -> Result<ChainState>
where
    F: FnMut(u64, &[Complex64]),
{
    if sweeps == 0 {
        return Err(Error::Parameter("at least one sweep is required"));
    }
    config.validate()?;
    let n = model.n;
    let beta = model.beta;
    let contour = matches!(model.ensemble, Ensemble::Contour { .. });
    let real = model.is_real();

    let (mut coords, mut pos) = initial_configuration(model, seed, config.chain);
    let mut energy = model.total_energy(&pos);
    if !energy.is_finite() {
        return Err(Error::Overflow);
    }
    let mut step = config.initial_step.unwrap_or_else(|| default_step(model));
    let step_max = if contour { PI } else { f64::INFINITY };
    let burn = (config.burn_in_fraction * sweeps as f64).floor() as u64;
    let (mut accepted, mut proposed) = (0u64, 0u64);

    for sweep in 0..sweeps {
        let mut accepted_here = 0u64;
        for i in 0..n {
            let mut rng = Stream::new(seed, config.chain, i as u64, sweep + 1);
            let (new_coord, to) = if contour {
                let th = coords[i] + step * rng.normal();
                let th = th - 2.0 * PI * (th / (2.0 * PI)).floor();
                (th, model.position(th, pos[i]))
            } else if real {
                let x = pos[i].re + step * rng.normal();
                (x, Complex64::new(x, 0.0))
            } else {
                let dz = Complex64::new(rng.normal(), rng.normal()) * step;
                (0.0, pos[i] + dz)
            };
            let du = model.delta_energy(&pos, i, to);
            let mut dl = -beta * du;
            if contour {
                dl += model.log_jacobian(new_coord) - model.log_jacobian(coords[i]);
            }
            let u = rng.uniform();
            if !dl.is_nan() && (dl >= 0.0 || u < dl.exp()) {
                pos[i] = to;
                coords[i] = new_coord;
                energy += du;
                accepted_here += 1;
            }
        }
        if !energy.is_finite() {
            return Err(Error::Overflow);
        }
        if sweep < burn {
            let rate = accepted_here as f64 / n as f64;
            let gain = ADAPT_GAIN / (1.0 + sweep as f64).powf(0.6);
            step = (step * (gain * (rate - config.target_acceptance)).exp()).clamp(STEP_MIN, step_max);
        } else {
            accepted += accepted_here;
            proposed += n as u64;
            if (sweep - burn) % config.thin == 0 {
                observe(sweep, &pos);
            }
        }
    }

    Ok(ChainState {
        positions: pos,
        step_scale: step,
        rng_seed: seed,
        chain: config.chain,
        sweep_count: sweeps,
        accepted,
        proposed,
        acceptance_rate: if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 },
        energy,
    })
}

fn default_step(model: &GasModel) -> f64 {
    match &model.ensemble {
        Ensemble::Contour { .. } => 2.0 * PI / model.n as f64,
        Ensemble::Sinh { c, l } => {
            let spacing = if model.n > 1 { c * l / (PI * model.n as f64) * 2.0 } else { 0.0 };
            spacing.max(1.0 / c.sqrt()).min(10.0)
        }
        _ => 1.0,
    }
}

/// Spread the particles over the expected support, deterministically from the seed.
fn initial_configuration(model: &GasModel, seed: u64, chain: u64) -> (Vec<f64>, Vec<Complex64>) {
    let n = model.n as f64;
    let mut rng = Stream::new(seed, chain, u64::MAX, 0);
    let mut coords = vec![0.0; model.n];
    let mut pos = vec![Complex64::new(0.0, 0.0); model.n];
    for j in 0..model.n {
        let (u, v) = (rng.uniform(), rng.uniform());
        let th = 2.0 * PI * v;
        pos[j] = match &model.ensemble {
            Ensemble::Ginibre => Complex64::from_polar((n * u).sqrt(), th),
            Ensemble::Elliptic { tau } => {
                let r = u.sqrt() * n.sqrt();
                Complex64::new((1.0 + tau) * r * th.cos(), (1.0 - tau) * r * th.sin())
            }
            Ensemble::Induced { alpha } => {
                let (r0, r1) = (alpha * n, (1.0 + alpha) * n);
                Complex64::from_polar((r0 + u * (r1 - r0)).sqrt(), th)
            }
            Ensemble::Contour { .. } => {
                coords[j] = th;
                model.position(th, pos[j])
            }
            Ensemble::Sinh { c, l } => {
                let half = (PI * n / (c * l)).max(1.0 / c.sqrt());
                Complex64::new(half * (2.0 * u - 1.0), 0.0)
            }
        };
    }
    (coords, pos)
}

// ---------------------------------------------------------------------------------
// Density and support estimates
// ---------------------------------------------------------------------------------

/// Radial histogram accumulated over configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialHistogram {
    r_max: f64,
    counts: Vec<u64>,
    overflow: u64,
    configurations: usize,
    particles: u64,
}

/// Normalized radial density and support estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensity {
    /// Bin edges, `bins + 1` of them, from 0 to `r_max`.
    pub edges: Vec<f64>,
    /// Mean number of particles per unit area in each annular bin.
    pub density: Vec<f64>,
    pub configurations: usize,
    /// Radius beyond which a fraction [`EDGE_QUANTILE`] of particles lie.
    pub quantile_edge: f64,
    /// Outermost radius where the density crosses half its bulk value, the bulk being
    /// the mean over `[0.2, 0.6]·quantile_edge`; `None` if it never does within `r_max`.
    pub half_density_edge: Option<f64>,
    /// Fraction of particles beyond `r_max`.
    pub overflow_fraction: f64,
}

impl RadialHistogram {
    pub fn new(r_max: f64, bins: usize) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) || bins == 0 {
            return Err(Error::Parameter("histogram needs r_max > 0 and at least one bin"));
        }
        Ok(Self { r_max, counts: vec![0; bins], overflow: 0, configurations: 0, particles: 0 })
    }

    pub fn push(&mut self, configuration: &[Complex64]) {
        let bins = self.counts.len();
        for z in configuration {
            let k = (z.norm() / self.r_max * bins as f64) as usize;
            if k < bins {
                self.counts[k] += 1;
            } else {
                self.overflow += 1;
            }
        }
        self.configurations += 1;
        self.particles += configuration.len() as u64;
    }

    pub fn configurations(&self) -> usize {
        self.configurations
    }

    /// Pool another histogram with the same binning into this one.
    pub fn merge(&mut self, other: &RadialHistogram) -> Result<()> {
        if other.r_max != self.r_max || other.counts.len() != self.counts.len() {
            return Err(Error::Parameter("histograms must share their binning"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
        self.configurations += other.configurations;
        self.particles += other.particles;
        Ok(())
    }

    pub fn finish(&self) -> Result<RadialDensity> {
        if self.configurations < MIN_CONFIGURATIONS {
            return Err(Error::InsufficientSamples { needed: MIN_CONFIGURATIONS, got: self.configurations });
        }
        let bins = self.counts.len();
        let h = self.r_max / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|k| k as f64 * h).collect();
        let m = self.configurations as f64;
        let density: Vec<f64> =
            (0..bins).map(|k| self.counts[k] as f64 / (m * PI * (edges[k + 1].powi(2) - edges[k].powi(2)))).collect();

        let total = self.particles as f64;
        let target = EDGE_QUANTILE * total;
        let mut beyond = self.overflow as f64;
        let mut quantile_edge = self.r_max;
        if beyond < target {
            for k in (0..bins).rev() {
                let c = self.counts[k] as f64;
                if beyond + c >= target {
                    quantile_edge = edges[k + 1] - h * (target - beyond) / c;
                    break;
                }
                beyond += c;
            }
        }

        let centre = |k: usize| 0.5 * (edges[k] + edges[k + 1]);
        let bulk: Vec<f64> = (0..bins)
            .filter(|&k| (0.2 * quantile_edge..=0.6 * quantile_edge).contains(&centre(k)))
            .map(|k| density[k])
            .collect();
        let mut half_density_edge = None;
        if !bulk.is_empty() {
            let half = 0.5 * bulk.iter().sum::<f64>() / bulk.len() as f64;
            for k in (1..bins).rev() {
                if density[k - 1] >= half && density[k] < half {
                    let (r0, r1) = (centre(k - 1), centre(k));
                    let t = (density[k - 1] - half) / (density[k - 1] - density[k]);
                    half_density_edge = Some(r0 + t * (r1 - r0));
                    break;
                }
            }
        }
        Ok(RadialDensity {
            edges,
            density,
            configurations: self.configurations,
            quantile_edge,
            half_density_edge,
            overflow_fraction: self.overflow as f64 / total,
        })
    }
}

impl RadialDensity {
    /// Mean density over the bins whose centres lie in `[r0, r1]`.
    pub fn mean_density(&self, r0: f64, r1: f64) -> Option<f64> {
        let mut acc = (0.0, 0.0);
        for k in 0..self.density.len() {
            let c = 0.5 * (self.edges[k] + self.edges[k + 1]);
            if (r0..=r1).contains(&c) {
                let area = PI * (self.edges[k + 1].powi(2) - self.edges[k].powi(2));
                acc.0 += self.density[k] * area;
                acc.1 += area;
            }
        }
        (acc.1 > 0.0).then(|| acc.0 / acc.1)
    }

    /// Mean density inside the disk of radius `r`; partial bins count by area.
    pub fn density_within(&self, r: f64) -> f64 {
        let mut mass = 0.0;
        for k in 0..self.density.len() {
            let (a, b) = (self.edges[k], self.edges[k + 1].min(r));
            if b <= a {
                break;
            }
            mass += self.density[k] * PI * (b * b - a * a);
        }
        mass / (PI * r * r)
    }
}

/// Radial histogram of stored configurations.
pub fn empirical_density(samples: &[(u64, Vec<Complex64>)], r_max: f64, bins: usize) -> Result<RadialDensity> {
    let mut h = RadialHistogram::new(r_max, bins)?;
    for (_, cfg) in samples {
        h.push(cfg);
    }
    h.finish()
}

/// Second moments of the particle cloud, for fitting elliptical supports.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SecondMoments {
    xx: f64,
    yy: f64,
    particles: u64,
    configurations: usize,
}

impl SecondMoments {
    pub fn push(&mut self, configuration: &[Complex64]) {
        for z in configuration {
            self.xx += z.re * z.re;
            self.yy += z.im * z.im;
        }
        self.particles += configuration.len() as u64;
        self.configurations += 1;
    }

    pub fn merge(&mut self, other: &SecondMoments) {
        self.xx += other.xx;
        self.yy += other.yy;
        self.particles += other.particles;
        self.configurations += other.configurations;
    }

    /// Semi-axes `(2√E[x²], 2√E[y²])` of the uniform ellipse with the same moments.
    pub fn semi_axes(&self) -> Result<(f64, f64)> {
        if self.configurations < MIN_CONFIGURATIONS {
            return Err(Error::InsufficientSamples { needed: MIN_CONFIGURATIONS, got: self.configurations });
        }
        let p = self.particles as f64;
        Ok((2.0 * (self.xx / p).sqrt(), 2.0 * (self.yy / p).sqrt()))
    }
}

// ---------------------------------------------------------------------------------
// Exact partition functions and free-energy predictions
// ---------------------------------------------------------------------------------

fn sum_ln_factorials(range: core::ops::Range<u64>) -> f64 {
    range.map(ln_factorial).sum()
}

/// Logarithm of the exact normalization constant, as the literature states it.
///
/// * ginibre: `ln C_N = N ln π + Σ_{j=0}^{N−1} ln j!`
/// * elliptic: `ln C_N + (N/2) ln(1 − τ²)`
/// * induced (`n = (1+α)N`): `ln N! + N ln π + Σ_{j=1}^{N} ln Γ(n − N + j)`
/// * sinh: `(N/2) ln(π/c) + ln N! + gN(N²−1)/6 + Σ_{j=1}^{N−1} (N−j) ln(1 − q^j)` with
///   `g = 2π²/(cL²)`, `q = e^{−g}`
/// * contour, circle of radius `r` only, any `β`: `ln(Z/N!)` from the circular-ensemble
///   integral `(2π)^N Γ(1+βN/2)/Γ(1+β/2)^N` rescaled by `r^{N+βN(N−1)/2}`.
///
/// [`Ensemble::includes_factorial`] says which of these contain `N!`.
pub fn exact_log_partition(model: &GasModel) -> Result<f64> {
    let n = model.n as u64;
    let nf = model.n as f64;
    if let Ensemble::Contour { map } = &model.ensemble {
        if map.coeffs().iter().any(|a| a.norm() != 0.0) {
            return Err(Error::UnsupportedGeometry("exact contour partition functions exist only for circles"));
        }
        let b = model.beta;
        let r = map.scale();
        return Ok(nf * (2.0 * PI).ln() + log_gamma(1.0 + 0.5 * b * nf)? - nf * log_gamma(1.0 + 0.5 * b)?
            - ln_factorial(n)
            + (nf + 0.5 * b * nf * (nf - 1.0)) * r.ln());
    }
    if model.beta != 2.0 {
        return Err(Error::Parameter("exact partition functions are known only at β = 2"));
    }
    let ginibre = nf * PI.ln() + sum_ln_factorials(0..n);
    match &model.ensemble {
        Ensemble::Ginibre => Ok(ginibre),
        Ensemble::Elliptic { tau } => Ok(ginibre + 0.5 * nf * (1.0 - tau * tau).ln()),
        Ensemble::Induced { alpha } => {
            let extra = alpha * nf;
            let mut s = ln_factorial(n) + nf * PI.ln();
            for j in 1..=n {
                s += log_gamma(extra + j as f64)?;
            }
            Ok(s)
        }
        Ensemble::Sinh { c, l } => {
            let g = 2.0 * PI * PI / (c * l * l);
            let mut s = 0.5 * nf * (PI / c).ln() + ln_factorial(n) + g * nf * (nf * nf - 1.0) / 6.0;
            for j in 1..n {
                s += (n - j) as f64 * (-(-g * j as f64).exp()).ln_1p();
            }
            Ok(s)
        }
        Ensemble::Contour { .. } => unreachable!(),
    }
}

/// `ln(Z/N!)` for every ensemble, the quantity the free-energy predictions describe
/// (except sinh, whose prediction is for `ln Z`; for it this returns `ln Z`).
pub fn log_partition_per_factorial(model: &GasModel) -> Result<f64> {
    let v = exact_log_partition(model)?;
    Ok(match model.ensemble {
        Ensemble::Induced { .. } => v - ln_factorial(model.n as u64),
        _ => v,
    })
}

/// Coefficients of a large-`N` expansion; `None` marks a term the argument does not fix.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AsymptoticPrediction {
    pub n3: Option<f64>,
    pub n2_log_n: Option<f64>,
    pub n2: Option<f64>,
    pub n_log_n: Option<f64>,
    /// `α` of the `α²/2·N² ln(αN)` style terms that do not factor as `N² ln N`; carried
    /// as an explicit `N²` shift by [`AsymptoticPrediction::leading`].
    pub n2_shift_log: f64,
}

impl AsymptoticPrediction {
    /// Sum of the `N³`, `N² ln N` and `N²` terms.
    pub fn leading(&self, n: f64) -> f64 {
        self.n3.unwrap_or(0.0) * n * n * n
            + self.n2_log_n.unwrap_or(0.0) * n * n * n.ln()
            + self.n2.unwrap_or(0.0) * n * n
    }

    /// All predicted terms.
    pub fn eval(&self, n: f64) -> f64 {
        self.leading(n) + self.n_log_n.unwrap_or(0.0) * n * n.ln()
    }
}

/// Cases with an electrostatic free-energy prediction.
#[derive(Debug, Clone, PartialEq)]
pub enum FreeEnergyCase {
    Ginibre { beta: f64 },
    Elliptic { beta: f64, tau: f64 },
    Induced { beta: f64, alpha: f64 },
    /// Log-gas confined to the boundary image of `map`.
    Contour { beta: f64, map: LaurentMap },
    /// One-component plasma with the background of a unit-area planar domain, scaled to
    /// `N` particles at unit density.
    Background { beta: f64, domain: Geometry },
    Sinh { beta: f64, c: f64, l: f64 },
}

impl FreeEnergyCase {
    pub fn from_model(model: &GasModel) -> Self {
        let beta = model.beta;
        match &model.ensemble {
            Ensemble::Ginibre => Self::Ginibre { beta },
            Ensemble::Elliptic { tau } => Self::Elliptic { beta, tau: *tau },
            Ensemble::Induced { alpha } => Self::Induced { beta, alpha: *alpha },
            Ensemble::Contour { map } => Self::Contour { beta, map: map.clone() },
            Ensemble::Sinh { c, l } => Self::Sinh { beta, c: *c, l: *l },
        }
    }
}

/// `E_Ω = −(1/2|Ω|²)∫∫ ln|z−w| + (1/|Ω|)∫ ln|w|`, the background self energy at unit
/// charge plus its potential at the origin.
pub fn background_constant(domain: &Geometry) -> Result<f64> {
    if domain.dim() != 2 {
        return Err(Error::UnsupportedGeometry("the background constant needs a planar domain"));
    }
    let body = UniformDomain::new(domain.clone(), 1.0)?;
    Ok(body.self_energy()? + body.background_potential(&[0.0, 0.0])?)
}

/// Electrostatic prediction for the large-`N` expansion of the log partition function.
///
/// The planar Gaussian ensembles give `−β·U_min` of the corresponding uniform background
/// (disk, ellipse, annulus); the `β = 2` values are `½N² ln N − ¾N²` for Ginibre and
/// elliptic Ginibre. On a contour the prediction is `−(β/2)N²·robin + (β/2 − 1)N ln N`,
/// with no `N² ln N` term: the circular ensemble integral is exact and has none. The
/// background case gives `βE_{Ω₀}N² + (β/4 − 1)N ln N` for a unit-area `Ω₀`. The sinh
/// gas gives `π²βN³/(6cL²) + N ln N` for `ln Z`.
pub fn free_energy_prediction(case: &FreeEnergyCase) -> Result<AsymptoticPrediction> {
    let check_beta = |b: f64| if b > 0.0 && b.is_finite() { Ok(b) } else { Err(Error::Parameter("β must be positive")) };
    match case {
        FreeEnergyCase::Ginibre { beta } | FreeEnergyCase::Elliptic { beta, .. } => {
            if let FreeEnergyCase::Elliptic { tau, .. } = case {
                if !(*tau >= 0.0 && *tau < 1.0) {
                    return Err(Error::Parameter("τ must lie in [0, 1)"));
                }
            }
            // Semi-axes √N(1 ± τ), so ln((A+B)/2) = ½ ln N for every τ.
            let h = 0.5 * check_beta(*beta)?;
            Ok(AsymptoticPrediction { n2_log_n: Some(0.5 * h), n2: Some(-0.75 * h), ..Default::default() })
        }
        FreeEnergyCase::Induced { beta, alpha } => {
            if !(*alpha > 0.0) {
                return Err(Error::Parameter("α must be positive"));
            }
            let h = 0.5 * check_beta(*beta)?;
            let (a, b) = (*alpha, 1.0 + alpha);
            // ((1+α)²/2)N² ln((1+α)N) − (α²/2)N² ln(αN) − ¾(1+2α)N²
            Ok(AsymptoticPrediction {
                n2_log_n: Some(h * 0.5 * (b * b - a * a)),
                n2: Some(h * (0.5 * b * b * b.ln() - 0.5 * a * a * a.ln() - 0.75 * (1.0 + 2.0 * a))),
                ..Default::default()
            })
        }
        FreeEnergyCase::Contour { beta, map } => {
            let b = check_beta(*beta)?;
            Ok(AsymptoticPrediction {
                n2_log_n: Some(0.0),
                n2: Some(-0.5 * b * map.robin()),
                n_log_n: Some(0.5 * b - 1.0),
                ..Default::default()
            })
        }
        FreeEnergyCase::Background { beta, domain } => {
            let b = check_beta(*beta)?;
            let area = domain.volume();
            if (area - 1.0).abs() > 1e-9 {
                return Err(Error::Parameter("the reference domain must have unit area"));
            }
            Ok(AsymptoticPrediction {
                n2_log_n: Some(0.0),
                n2: Some(b * background_constant(domain)?),
                n_log_n: Some(0.25 * b - 1.0),
                ..Default::default()
            })
        }
        FreeEnergyCase::Sinh { beta, c, l } => {
            let b = check_beta(*beta)?;
            if !(*c > 0.0 && *l > 0.0) {
                return Err(Error::Parameter("c and L must be positive"));
            }
            Ok(AsymptoticPrediction { n3: Some(PI * PI * b / (6.0 * c * l * l)), n_log_n: Some(1.0), ..Default::default() })
        }
    }
}

/// `[ln(Z/N!) − leading prediction]/N²`.
pub fn free_energy_remainder(model: &GasModel) -> Result<f64> {
    let exact = log_partition_per_factorial(model)?;
    let pred = free_energy_prediction(&FreeEnergyCase::from_model(model))?;
    let n = model.n as f64;
    Ok((exact - pred.leading(n)) / (n * n))
}

/// Exponent of the Brownian-bridge prefactor, `−π²βN(N²−1)/(6cL²)` for equally spaced
/// starts, whose `N³` part cancels the leading term of `ln Q`.
pub fn bridge_prefactor_exponent(beta: f64, c: f64, l: f64, n: usize) -> f64 {
    let nf = n as f64;
    -PI * PI * beta * nf * (nf * nf - 1.0) / (6.0 * c * l * l)
}

/// `Q_{2,β}` for the sinh gas by nested adaptive quadrature, as an oracle for the
/// closed form at `β = 2`.
pub fn sinh_pair_quadrature(c: f64, l: f64, beta: f64, tol: f64) -> Result<EvalResult> {
    if !(c > 0.0 && l > 0.0 && beta > 0.0) {
        return Err(Error::Parameter("c, L and β must be positive"));
    }
    let x = 4.0 * PI / (c * l) + (120.0 / (beta * c)).sqrt();
    let inner_q = Quad::new(tol * 1e-2, tol * 1e-2).with_max_segments(2000);
    let outer_q = Quad::new(tol, tol).with_max_segments(2000);
    let mut worst = 0.0f64;
    let outer = outer_q.integrate_split_lenient(
        |x1| {
            let f = |x2: f64| {
                let e = -0.5 * beta * c * (x1 * x1 + x2 * x2) + beta * ln_two_sinh_abs(PI * (x2 - x1) / l);
                e.exp()
            };
            let r = inner_q.integrate_split_lenient(f, -x, x, &[x1]);
            worst = worst.max(r.est_error);
            r.value
        },
        -x,
        x,
        &[0.0],
    );
    Ok(EvalResult::new(outer.value, outer.est_error + 2.0 * x * worst))
}

// ---------------------------------------------------------------------------------
// Linear statistics
// ---------------------------------------------------------------------------------

/// Running covariance of paired observations (Welford co-moment). Exactly zero when
/// either series is constant.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CovarianceAccumulator {
    count: f64,
    mean_x: f64,
    mean_y: f64,
    comoment: f64,
}

impl CovarianceAccumulator {
    pub fn push(&mut self, x: f64, y: f64) {
        self.count += 1.0;
        let dx = x - self.mean_x;
        self.mean_x += dx / self.count;
        self.mean_y += (y - self.mean_y) / self.count;
        self.comoment += dx * (y - self.mean_y);
    }

    pub fn count(&self) -> usize {
        self.count as usize
    }

    pub fn mean_x(&self) -> f64 {
        self.mean_x
    }

    pub fn mean_y(&self) -> f64 {
        self.mean_y
    }

    /// Unbiased sample covariance.
    pub fn covariance(&self) -> Result<f64> {
        if self.count < 2.0 {
            return Err(Error::InsufficientSamples { needed: 2, got: self.count as usize });
        }
        Ok(self.comoment / (self.count - 1.0))
    }
}

/// Within-chain covariance of `F = Σ f(z_j)` and `G = Σ g(z_j)` over retained
/// configurations.
pub fn chain_covariance<F, G>(model: &GasModel, f: F, g: G, sweeps: u64, seed: u64, config: &SamplerConfig) -> Result<f64>
where
    F: Fn(Complex64) -> f64,
    G: Fn(Complex64) -> f64,
{
    let mut acc = CovarianceAccumulator::default();
    run_chain_with(model, sweeps, seed, config, |_, pos| {
        acc.push(pos.iter().map(|&z| f(z)).sum(), pos.iter().map(|&z| g(z)).sum());
    })?;
    acc.covariance()
}

/// Mean of independent per-chain estimates with its standard error.
pub fn combine_chains(estimates: &[f64]) -> Result<EvalResult> {
    if estimates.len() < MIN_CHAINS {
        return Err(Error::InsufficientSamples { needed: MIN_CHAINS, got: estimates.len() });
    }
    let mut mv = crate::quad::MeanVar::default();
    for &e in estimates {
        mv.push(e);
    }
    Ok(mv.result())
}

/// Covariance of two linear statistics estimated from `chains` independent chains
/// (chain indices `0..chains`), with the across-chain standard error.
pub fn statistic_covariance<F, G>(model: &GasModel, f: F, g: G, chains: usize, sweeps: u64, seed: u64) -> Result<EvalResult>
where
    F: Fn(Complex64) -> f64,
    G: Fn(Complex64) -> f64,
{
    if chains < MIN_CHAINS {
        return Err(Error::InsufficientSamples { needed: MIN_CHAINS, got: chains });
    }
    let base = SamplerConfig::default();
    let est = (0..chains)
        .map(|ch| chain_covariance(model, &f, &g, sweeps, seed, &base.with_chain(ch as u64)))
        .collect::<Result<Vec<_>>>()?;
    combine_chains(&est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::MeanVar;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ginibre_single_particle_is_complex_gaussian() {
        let m = GasModel::new(2.0, 1, Ensemble::Ginibre).unwrap();
        let run = run_chain(&m, 100_000, 11).unwrap();
        // batch means absorb the autocorrelation of the chain
        let mut batches = MeanVar::default();
        for chunk in run.samples.chunks(1000) {
            batches.push(chunk.iter().map(|(_, p)| p[0].norm_sqr()).sum::<f64>() / chunk.len() as f64);
        }
        let r = batches.result();
        assert!((r.value - 1.0).abs() < 3.0 * r.est_error, "{r:?}");
        assert!(run.state.acceptance_rate > 0.0 && run.state.acceptance_rate < 1.0);
    }

    #[test]
    fn identical_seeds_reproduce_chains() {
        let m = GasModel::new(2.0, 6, Ensemble::Elliptic { tau: 0.3 }).unwrap();
        let a = run_chain(&m, 300, 5).unwrap();
        let b = run_chain(&m, 300, 5).unwrap();
        assert_eq!(a, b);
        let c = run_chain(&m, 300, 6).unwrap();
        assert_ne!(a.state.positions, c.state.positions);
    }

    #[test]
    fn acceptance_rates_adapt_on_every_model() {
        let models = [
            GasModel::new(2.0, 8, Ensemble::Ginibre).unwrap(),
            GasModel::new(1.0, 8, Ensemble::Elliptic { tau: 0.5 }).unwrap(),
            GasModel::new(2.0, 8, Ensemble::Induced { alpha: 1.0 }).unwrap(),
            GasModel::new(2.0, 8, Ensemble::Contour { map: LaurentMap::ellipse(2.0, 1.0).unwrap() }).unwrap(),
            GasModel::new(2.0, 8, Ensemble::Sinh { c: 1.0, l: 2.0 * PI }).unwrap(),
        ];
        for m in &models {
            let s = run_chain_with(m, 2000, 3, &SamplerConfig::default(), |_, _| {}).unwrap();
            assert!(s.acceptance_rate > 0.15 && s.acceptance_rate < 0.6, "{} {}", m.ensemble.name(), s.acceptance_rate);
            assert_eq!(s.proposed, 1600 * 8);
        }
    }

    #[test]
    fn running_energy_matches_recomputation() {
        for m in [
            GasModel::new(2.0, 16, Ensemble::Induced { alpha: 0.5 }).unwrap(),
            GasModel::new(2.0, 12, Ensemble::Sinh { c: 1.0, l: 3.0 }).unwrap(),
            GasModel::new(4.0, 10, Ensemble::Contour { map: LaurentMap::circle(1.5).unwrap() }).unwrap(),
        ] {
            let s = run_chain_with(&m, 1000, 8, &SamplerConfig::default(), |_, _| {}).unwrap();
            let u = m.total_energy(&s.positions);
            assert!((s.energy - u).abs() <= 1e-8 * u.abs().max(1.0), "{} {} {}", m.ensemble.name(), s.energy, u);
        }
    }

    #[test]
    fn detailed_balance_ratio() {
        let m = GasModel::new(2.0, 8, Ensemble::Elliptic { tau: 0.4 }).unwrap();
        let mut rng = Stream::new(99, 0, 0, 0);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let x: Vec<Complex64> = (0..8).map(|_| c(3.0 * rng.normal(), 3.0 * rng.normal())).collect();
            let i = rng.below(8) as usize;
            let to = x[i] + c(rng.normal(), rng.normal());
            let mut y = x.clone();
            y[i] = to;
            let fwd = m.acceptance_probability(&x, i, to);
            let bwd = m.acceptance_probability(&y, i, x[i]);
            let want = (-2.0 * (m.total_energy(&y) - m.total_energy(&x))).exp();
            worst = worst.max((fwd / bwd / want - 1.0).abs());
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn density_needs_enough_configurations() {
        let mut h = RadialHistogram::new(1.0, 10).unwrap();
        h.push(&[c(0.1, 0.0)]);
        assert!(matches!(h.finish(), Err(Error::InsufficientSamples { needed: 1000, got: 1 })));
        assert!(SecondMoments::default().semi_axes().is_err());
    }

    #[test]
    fn histogram_of_uniform_disk() {
        let mut rng = Stream::new(4, 0, 0, 0);
        let mut h = RadialHistogram::new(2.0, 40).unwrap();
        for _ in 0..2000 {
            let cfg: Vec<Complex64> =
                (0..50).map(|_| Complex64::from_polar(rng.uniform().sqrt(), 2.0 * PI * rng.uniform())).collect();
            h.push(&cfg);
        }
        let d = h.finish().unwrap();
        assert_relative_eq!(d.mean_density(0.2, 0.8).unwrap(), 50.0 / PI, max_relative = 0.02);
        assert_relative_eq!(d.quantile_edge, 0.995f64.sqrt(), max_relative = 0.01);
        assert!((d.half_density_edge.unwrap() - 1.0).abs() < 0.05);
        assert_relative_eq!(d.density_within(1.0), 50.0 / PI, max_relative = 0.01);
    }

    #[test]
    fn partition_examples() {
        let g2 = GasModel::new(2.0, 2, Ensemble::Ginibre).unwrap();
        assert_relative_eq!(exact_log_partition(&g2).unwrap(), 2.0 * PI.ln(), epsilon = 1e-14);
        let s1 = GasModel::new(2.0, 1, Ensemble::Sinh { c: 3.0, l: 1.0 }).unwrap();
        assert_relative_eq!(exact_log_partition(&s1).unwrap(), 0.5 * (PI / 3.0).ln(), epsilon = 1e-14);
        for n in [1usize, 3, 7, 20] {
            let gin = exact_log_partition(&GasModel::new(2.0, n, Ensemble::Ginibre).unwrap()).unwrap();
            // α → 0 limit of the induced product is the Ginibre one times N!
            let ind = exact_log_partition(&GasModel::new(2.0, n, Ensemble::Induced { alpha: 1e-300 }).unwrap()).unwrap();
            assert_relative_eq!(ind, ln_factorial(n as u64) + gin, max_relative = 1e-12);
        }
        let bad = GasModel::new(1.0, 3, Ensemble::Ginibre).unwrap();
        assert!(matches!(exact_log_partition(&bad), Err(Error::Parameter(_))));
    }

    #[test]
    fn ginibre_two_particles_by_quadrature() {
        // Z = ∫∫ e^{−|z|²−|w|²}|z−w|² = 2π², and C_2 = Z/2!.
        let model = GasModel::new(2.0, 2, Ensemble::Ginibre).unwrap();
        let q = Quad::new(1e-12, 1e-12);
        // integrate over |z|, |w| and the relative angle; the angular average of
        // |z−w|² is r² + s².
        let z = q
            .integrate(|r| q.integrate(|s| (r * r + s * s) * r * s * (-(r * r + s * s)).exp(), 0.0, 12.0).unwrap().value, 0.0, 12.0)
            .unwrap()
            .value
            * 4.0
            * PI
            * PI;
        assert_relative_eq!(z, 2.0 * PI * PI, max_relative = 1e-10);
        assert_relative_eq!(exact_log_partition(&model).unwrap(), (z / 2.0).ln(), max_relative = 1e-10);
    }

    #[test]
    fn circle_contour_partition_is_circular_ensemble() {
        // β = 2, unit circle: ln(Z/N!) = N ln 2π exactly.
        for n in [1usize, 5, 40] {
            let m = GasModel::new(2.0, n, Ensemble::Contour { map: LaurentMap::circle(1.0).unwrap() }).unwrap();
            assert_relative_eq!(exact_log_partition(&m).unwrap(), n as f64 * (2.0 * PI).ln(), max_relative = 1e-12);
        }
        // N = 2, any β, radius r: ∫∫|dz||dw||z−w|^β / 2 = (2πr)² r^β 2^β Γ(β+1/2)/(√π Γ(β/2+1)... ) by quadrature
        let (b, r) = (1.5, 0.7);
        let q = Quad::new(1e-13, 1e-13);
        let direct = q.integrate(|t| (2.0 * r * (0.5 * t).sin()).powf(b), 0.0, 2.0 * PI).unwrap().value * 2.0 * PI * r * r / 2.0;
        let m = GasModel::new(b, 2, Ensemble::Contour { map: LaurentMap::circle(r).unwrap() }).unwrap();
        assert_relative_eq!(exact_log_partition(&m).unwrap(), direct.ln(), max_relative = 1e-11);
        let ell = GasModel::new(2.0, 2, Ensemble::Contour { map: LaurentMap::ellipse(2.0, 1.0).unwrap() }).unwrap();
        assert!(matches!(exact_log_partition(&ell), Err(Error::UnsupportedGeometry(_))));
    }

    #[test]
    fn sinh_two_particles_by_quadrature() {
        let closed = exact_log_partition(&GasModel::new(2.0, 2, Ensemble::Sinh { c: 1.0, l: 2.0 * PI }).unwrap()).unwrap();
        let quad = sinh_pair_quadrature(1.0, 2.0 * PI, 2.0, 1e-12).unwrap();
        assert!((closed.exp() - quad.value).abs() <= 1e-8 * quad.value, "{} {}", closed.exp(), quad.value);
        assert_relative_eq!(quad.value, 2.0 * PI * (0.5f64.exp() - 1.0), max_relative = 1e-10);
    }

    #[test]
    fn prediction_examples() {
        let g = free_energy_prediction(&FreeEnergyCase::Ginibre { beta: 2.0 }).unwrap();
        assert_eq!((g.n2_log_n, g.n2), (Some(0.5), Some(-0.75)));
        let circ = free_energy_prediction(&FreeEnergyCase::Contour { beta: 2.0, map: LaurentMap::circle(1.0).unwrap() }).unwrap();
        assert_eq!(circ.n2_log_n, Some(0.0));
        assert_eq!(circ.n2.unwrap().abs(), 0.0);
        assert_eq!(circ.n_log_n, Some(0.0));
        let (cc, l) = (2.0, 3.0);
        let s = free_energy_prediction(&FreeEnergyCase::Sinh { beta: 1.0, c: cc, l }).unwrap();
        assert_relative_eq!(s.n3.unwrap(), PI * PI / (6.0 * cc * l * l), epsilon = 1e-15);
        // the bridge prefactor cancels the N³ term, leaving O(N)
        let n = 1000;
        let lead = s.n3.unwrap() * (n as f64).powi(3) + bridge_prefactor_exponent(1.0, cc, l, n);
        assert_relative_eq!(lead, s.n3.unwrap() * n as f64, max_relative = 1e-9);
    }

    #[test]
    fn background_constant_of_unit_area_disk() {
        let r = 1.0 / PI.sqrt();
        let e = background_constant(&Geometry::Ball { d: 2, radius: r }).unwrap();
        assert_relative_eq!(e, 0.5 * r.ln() - 0.375, epsilon = 1e-12);
        let p = free_energy_prediction(&FreeEnergyCase::Background { beta: 2.0, domain: Geometry::Ball { d: 2, radius: r } }).unwrap();
        assert_relative_eq!(p.n2.unwrap(), 2.0 * e, epsilon = 1e-15);
        assert_eq!(p.n_log_n, Some(-0.5));
        let big = FreeEnergyCase::Background { beta: 2.0, domain: Geometry::Ball { d: 2, radius: 1.0 } };
        assert!(free_energy_prediction(&big).is_err());
    }

    #[test]
    fn free_energy_remainders_shrink() {
        for ens in [Ensemble::Ginibre, Ensemble::Elliptic { tau: 0.5 }, Ensemble::Induced { alpha: 1.0 }] {
            let r50 = free_energy_remainder(&GasModel::new(2.0, 50, ens.clone()).unwrap()).unwrap();
            let r200 = free_energy_remainder(&GasModel::new(2.0, 200, ens.clone()).unwrap()).unwrap();
            assert!(r200.abs() < r50.abs() && r200.abs() <= 0.05, "{} {r50} {r200}", ens.name());
        }
    }

    #[test]
    fn contour_prediction_matches_circle_exactly_at_leading_orders() {
        // For a circle of radius r the N² and N ln N terms are exact for every β.
        let (b, r) = (3.0, 2.5);
        let map = LaurentMap::circle(r).unwrap();
        let p = free_energy_prediction(&FreeEnergyCase::Contour { beta: b, map: map.clone() }).unwrap();
        let rem = |n: usize| {
            let m = GasModel::new(b, n, Ensemble::Contour { map: map.clone() }).unwrap();
            (exact_log_partition(&m).unwrap() - p.eval(n as f64)) / n as f64
        };
        // what remains is O(N)
        assert!((rem(400) - rem(800)).abs() < 0.01);
    }

    #[test]
    fn constant_statistic_has_zero_covariance() {
        let m = GasModel::new(2.0, 4, Ensemble::Ginibre).unwrap();
        let r = statistic_covariance(&m, |_| 1.0, |_| 1.0, 4, 200, 1).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.est_error, 0.0);
        assert!(matches!(
            statistic_covariance(&m, |_| 1.0, |_| 1.0, 3, 200, 1),
            Err(Error::InsufficientSamples { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn ginibre_linear_statistic_variance() {
        // Var Σ Re z_j /√N = 1/2 exactly at β = 2, which the bulk + surface terms give.
        let n = 32;
        let m = GasModel::new(2.0, n, Ensemble::Ginibre).unwrap();
        let s = (n as f64).sqrt();
        let r = statistic_covariance(&m, |z| z.re / s, |z| z.re / s, 8, 20_000, 21).unwrap();
        assert!((r.value - 0.5).abs() < 3.0 * r.est_error, "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn incremental_energy_is_a_difference(
            pts in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..8),
            dx in -1.0f64..1.0, dy in -1.0f64..1.0, tau in 0.0f64..0.9,
        ) {
            let m = GasModel::new(2.0, pts.len(), Ensemble::Elliptic { tau }).unwrap();
            let x: Vec<Complex64> = pts.iter().map(|&(a, b)| c(a, b)).collect();
            let to = x[0] + c(dx, dy);
            let mut y = x.clone();
            y[0] = to;
            let inc = m.delta_energy(&x, 0, to);
            let full = m.total_energy(&y) - m.total_energy(&x);
            prop_assert!((inc - full).abs() <= 1e-9 * (1.0 + full.abs()));
        }

        #[test]
        fn ln_two_sinh_matches_direct(t in -30.0f64..30.0) {
            prop_assume!(t.abs() > 1e-6);
            let direct = (2.0 * t.sinh()).abs().ln();
            prop_assert!((ln_two_sinh_abs(t) - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        }
    }
}
