//! Numerical integration: Gauss–Legendre rules, globally adaptive Gauss–Kronrod
//! (15-point) quadrature with singularity splitting, semi-infinite maps and plain
//! Monte Carlo means.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, EvalResult, Result};

// Kronrod 15-point abscissae (non-negative half) and weights; Gauss 7-point weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    frozen: bool,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * h;
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut error = ((resk - resg) * h).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (1.0f64).min((200.0 * error / resasc).powf(1.5));
    }
    let underflow = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > underflow {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Segment { a, b, value, error, frozen: false }
}

/// Tolerances and budget for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for Quad {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_segments: 2000 }
    }
}

impl Quad {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn with_max_segments(mut self, n: usize) -> Self {
        self.max_segments = n.max(1);
        self
    }

    /// Globally adaptive integral of `f` over `[a, b]`; fails with [`Error::Budget`]
    /// (carrying the best estimate) if the tolerance cannot be met.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> Result<EvalResult> {
        let r = self.run(&mut f, a, b);
        if r.1 {
            Ok(r.0)
        } else {
            Err(Error::Budget { estimate: r.0.value, error: r.0.est_error })
        }
    }

    /// Like [`Quad::integrate`] but always returns the best estimate. Intended for inner
    /// integrals of nested rules, where the outer error estimate governs.
    pub fn integrate_lenient<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> EvalResult {
        self.run(&mut f, a, b).0
    }

    /// Integral over `[a, b]` split at the interior `breaks` (unsorted, out-of-range values
    /// ignored). Singular or kinked points should be passed as breaks.
    pub fn integrate_split<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> Result<EvalResult> {
        let r = self.split_run(&mut f, a, b, breaks);
        if r.1 {
            Ok(r.0)
        } else {
            Err(Error::Budget { estimate: r.0.value, error: r.0.est_error })
        }
    }

    pub fn integrate_split_lenient<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> EvalResult {
        self.split_run(&mut f, a, b, breaks).0
    }

    /// `∫_a^∞ f`: the unit interval `[a, a+1]` directly, the remainder through
    /// `x = a + 1/u`, which keeps algebraic tails resolvable near `u = 0`.
    pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(&self, f: F, a: f64) -> Result<EvalResult> {
        let r = self.to_infinity_run(f, a);
        if r.1 {
            Ok(r.0)
        } else {
            Err(Error::Budget { estimate: r.0.value, error: r.0.est_error })
        }
    }

    pub fn integrate_to_infinity_lenient<F: FnMut(f64) -> f64>(&self, f: F, a: f64) -> EvalResult {
        self.to_infinity_run(f, a).0
    }

    fn to_infinity_run<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64) -> (EvalResult, bool) {
        let half = Quad { abs_tol: 0.5 * self.abs_tol, ..*self };
        let (near, ok1) = half.run(&mut f, a, a + 1.0);
        let mut tail = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let v = f(a + 1.0 / u) / (u * u);
            if v.is_finite() { v } else { 0.0 }
        };
        let (far, ok2) = half.run(&mut tail, 0.0, 1.0);
        let value = near.value + far.value;
        let error = near.est_error + far.est_error;
        let ok = (ok1 && ok2) || error <= self.abs_tol.max(self.rel_tol * value.abs());
        (EvalResult::new(value, error), ok)
    }

    fn split_run<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64, breaks: &[f64]) -> (EvalResult, bool) {
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
        pts.dedup();
        let mut edges = Vec::with_capacity(pts.len() + 2);
        edges.push(lo);
        edges.extend(pts);
        edges.push(hi);
        let n = edges.len() - 1;
        let sub = Quad { abs_tol: self.abs_tol / n as f64, ..*self };
        let (mut value, mut error, mut ok) = (0.0, 0.0, true);
        for w in edges.windows(2) {
            let (r, good) = sub.run(f, w[0], w[1]);
            value += r.value;
            error += r.est_error;
            ok &= good;
        }
        let ok = ok || error <= self.abs_tol.max(self.rel_tol * value.abs());
        (EvalResult::new(sign * value, error), ok)
    }

    fn run<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> (EvalResult, bool) {
        if a == b {
            return (EvalResult::new(0.0, 0.0), true);
        }
        let first = gk15(f, a, b);
        let mut segs = Vec::with_capacity(64);
        segs.push(first);
        let (mut total, mut err) = (first.value, first.error);
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if err <= tol {
                return (EvalResult::new(total, err), true);
            }
            if segs.len() >= self.max_segments {
                return (EvalResult::new(total, err), false);
            }
            let mut idx = usize::MAX;
            let mut worst = -1.0;
            for (i, s) in segs.iter().enumerate() {
                if !s.frozen && s.error > worst {
                    idx = i;
                    worst = s.error;
                }
            }
            if idx == usize::MAX {
                // Every remaining segment is at floating-point resolution.
                return (EvalResult::new(total, err), false);
            }
            let s = segs.swap_remove(idx);
            let m = 0.5 * (s.a + s.b);
            if !(m > s.a.min(s.b) && m < s.a.max(s.b)) {
                segs.push(Segment { frozen: true, ..s });
                continue;
            }
            let l = gk15(f, s.a, m);
            let r = gk15(f, m, s.b);
            total += l.value + r.value - s.value;
            err += l.error + r.error - s.error;
            segs.push(l);
            segs.push(r);
            // Re-sum occasionally to avoid drift from the running updates.
            if segs.len() % 64 == 0 {
                total = segs.iter().map(|s| s.value).sum();
                err = segs.iter().map(|s| s.error).sum();
            }
        }
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Fixed Gauss–Legendre integral of `f` over `[a, b]` with precomputed `rule`.
pub fn fixed_gl<F: FnMut(f64) -> f64>(rule: &(Vec<f64>, Vec<f64>), mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.0.iter().zip(&rule.1).map(|(&x, &w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Running mean/variance accumulator (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanVar {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 { 0.0 } else { self.m2 / (self.n - 1) as f64 }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 { f64::INFINITY } else { (self.variance() / self.n as f64).sqrt() }
    }

    pub fn result(&self) -> EvalResult {
        EvalResult::new(self.mean, self.stderr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..12 {
            let rule = gauss_legendre(n);
            assert_abs_diff_eq!(rule.1.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            // degree 2n−1 monomial x^{2n−2} integrates to 2/(2n−1)
            let p = 2 * n as i32 - 2;
            let v = fixed_gl(&rule, |x| x.powi(p), -1.0, 1.0);
            assert_abs_diff_eq!(v, 2.0 / (p as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_smooth_and_singular() {
        let q = Quad::new(1e-13, 1e-13);
        let r = q.integrate(|x: f64| x.sin(), 0.0, PI).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-13);
        let r = q.integrate(|x: f64| x.ln(), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.value, -1.0, epsilon = 1e-12);
        let r = q.integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-11);
        let r = q.integrate_split(|x: f64| (x - 0.3).abs().ln(), 0.0, 1.0, &[0.3]).unwrap();
        let exact = 0.3 * 0.3f64.ln() - 0.3 + 0.7 * 0.7f64.ln() - 0.7;
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-12);
    }

    #[test]
    fn semi_infinite_and_reversed_limits() {
        let q = Quad::default();
        let r = q.integrate_to_infinity(|x: f64| (-x).exp(), 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        let r = q.integrate_to_infinity(|x: f64| (1.0 + x).powf(-1.5), 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-11);
        let r = q.integrate_split(|x: f64| x, 1.0, 0.0, &[]).unwrap();
        assert_abs_diff_eq!(r.value, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn budget_error_carries_estimate() {
        let q = Quad::new(1e-15, 0.0).with_max_segments(3);
        match q.integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0) {
            Err(Error::Budget { estimate, error }) => {
                assert!(estimate.is_finite() && error > 0.0);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 7.25];
        let mut mv = MeanVar::default();
        xs.iter().for_each(|&x| mv.push(x));
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert_abs_diff_eq!(mv.mean(), mean, epsilon = 1e-14);
        assert_abs_diff_eq!(mv.variance(), var, epsilon = 1e-13);
    }
}
