//! Tabulated time transforms of the cutoffs, `g~(sigma) = ∫ g(t) e^{i t sigma} dt`,
//! for `g` in `{eta, eta^2, a, a eta^2}`.
//!
//! Even functions are transformed by one large FFT (the trapezoid rule is
//! spectrally accurate for smooth compactly supported integrands) and read
//! back with cubic Hermite interpolation. The odd ones reduce to half-line
//! sine transforms, integrated by parts:
//! `∫_0^∞ phi sin(t s) dt = (1 + ∫_0^∞ phi' cos(t s) dt) / s`, where `phi'`
//! vanishes near 0 so its even extension is again smooth.

use num_complex::Complex64;

use crate::evolution::{BumpProfile, Evolution};
use crate::lattice::transform_axis;

const TABLE_LOG2: u32 = 18;
const STEP: f64 = 1.0 / 1024.0;
const SERIES_TERMS: usize = 24;

/// Cosine transform `C(s) = ∫ phi(t) cos(t s) dt` of an even function,
/// tabulated with its derivative.
#[derive(Debug, Clone)]
struct CosineTable {
    ds: f64,
    half: usize,
    value: Vec<f64>,
    slope: Vec<f64>,
    /// `|s|` beyond which the table is below `1e-15` of its peak.
    reach: f64,
}

impl CosineTable {
    fn new(phi: impl Fn(f64) -> f64) -> CosineTable {
        let n = 1usize << TABLE_LOG2;
        let half = n / 2;
        let t = |p: usize| (p as f64 - half as f64) * STEP;
        let mut a: Vec<Complex64> = (0..n).map(|p| Complex64::new(phi(t(p)), 0.0)).collect();
        let mut b: Vec<Complex64> = (0..n).map(|p| Complex64::new(t(p) * phi(t(p)), 0.0)).collect();
        transform_axis(&mut a, STEP, true);
        transform_axis(&mut b, STEP, true);
        let ds = 2.0 * std::f64::consts::PI / (n as f64 * STEP);
        let value: Vec<f64> = a.iter().map(|z| z.re).collect();
        // d/ds ∫ phi e^{its} = i ∫ t phi e^{its}
        let slope: Vec<f64> = b.iter().map(|z| (Complex64::i() * z).re).collect();
        let peak = value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let last = (0..n).rev().find(|&i| value[i].abs() > 1e-15 * peak).unwrap_or(half);
        let reach = (last as f64 - half as f64).abs() * ds;
        CosineTable { ds, half, value, slope, reach }
    }

    fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        if s >= self.reach {
            return 0.0;
        }
        let x = s / self.ds;
        let i = x.floor() as usize;
        let u = x - i as f64;
        let (k0, k1) = (self.half + i, self.half + i + 1);
        let (y0, y1) = (self.value[k0], self.value[k1]);
        let (m0, m1) = (self.slope[k0] * self.ds, self.slope[k1] * self.ds);
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * m0 + (-2.0 * u3 + 3.0 * u2) * y1 + (u3 - u2) * m1
    }
}

/// `S(s) = ∫_0^∞ phi(t) sin(t s) dt` for an even cutoff with `phi = 1` near 0.
#[derive(Debug, Clone)]
struct SineTable {
    /// Cosine table of the even extension of `phi'`.
    dphi: CosineTable,
    /// Taylor coefficients `(-1)^k ∫_0^∞ t^{2k+1} phi / (2k+1)!` for small `s`.
    series: Vec<f64>,
}

impl SineTable {
    fn new(phi: impl Fn(f64) -> f64 + Copy, dphi: impl Fn(f64) -> f64, support: f64) -> SineTable {
        let n = 200_000;
        let h = support / n as f64;
        let mut series = vec![0.0; SERIES_TERMS];
        for i in 0..=n {
            let t = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 * h } else { h };
            let mut term = w * phi(t) * t;
            for (k, c) in series.iter_mut().enumerate() {
                *c += term;
                term *= -t * t / ((2 * k + 2) * (2 * k + 3)) as f64;
            }
        }
        SineTable { dphi: CosineTable::new(|t| dphi(t.abs())), series }
    }

    fn eval(&self, s: f64) -> f64 {
        if s.abs() < 1.0 {
            let s2 = s * s;
            return s * self.series.iter().rev().fold(0.0, |acc, c| acc * s2 + c);
        }
        (1.0 + 0.5 * self.dphi.eval(s)) / s
    }
}

/// Time transforms of the cutoffs used by the first nonlinear iterate.
#[derive(Debug, Clone)]
pub struct CutoffTransforms {
    pub bump: BumpProfile,
    eta: CosineTable,
    eta_sq: CosineTable,
    sin_eta: SineTable,
    sin_eta_sq: SineTable,
}

/// Derivative of the bump for `t >= 0`.
fn bump_slope(b: &BumpProfile, t: f64) -> f64 {
    if t <= b.plateau || t >= b.support {
        return 0.0;
    }
    let w = b.support - b.plateau;
    let u = (t - b.plateau) / w;
    let psi = |x: f64| (-1.0 / x).exp();
    let dpsi = |x: f64| psi(x) / (x * x);
    let (p, q) = (psi(1.0 - u), psi(u));
    let den = (p + q) * (p + q);
    -(dpsi(1.0 - u) * q + p * dpsi(u)) / den / w
}

impl CutoffTransforms {
    pub fn new(ev: &Evolution) -> CutoffTransforms {
        let b = ev.eta;
        let eta = move |t: f64| b.eval(t);
        let eta_sq = move |t: f64| b.eval(t).powi(2);
        CutoffTransforms {
            bump: b,
            eta: CosineTable::new(eta),
            eta_sq: CosineTable::new(eta_sq),
            sin_eta: SineTable::new(eta, |t| bump_slope(&b, t), b.support),
            sin_eta_sq: SineTable::new(eta_sq, |t| 2.0 * b.eval(t) * bump_slope(&b, t), b.support),
        }
    }

    /// `eta~(s)`, real and even.
    pub fn eta(&self, s: f64) -> f64 {
        self.eta.eval(s)
    }

    /// `(eta^2)~(s)`, real and even.
    pub fn eta_sq(&self, s: f64) -> f64 {
        self.eta_sq.eval(s)
    }

    /// `|s|` beyond which `eta~` is treated as zero.
    pub fn eta_reach(&self) -> f64 {
        self.eta.reach
    }

    /// `|s|` beyond which `(eta^2)~` is treated as zero.
    pub fn eta_sq_reach(&self) -> f64 {
        self.eta_sq.reach
    }

    /// `a~(s) = i * 5 * S_eta(5 s)`, returned as the imaginary part.
    pub fn a_im(&self, s: f64) -> f64 {
        5.0 * self.sin_eta.eval(5.0 * s)
    }

    /// `(a eta^2)~(s) = i * S_{eta^2}(s)` (as `eta(t/5) = 1` on the support of `eta`),
    /// returned as the imaginary part.
    pub fn a_eta_sq_im(&self, s: f64) -> f64 {
        self.sin_eta_sq.eval(s)
    }
}
