use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::data::{SpectralData, BAND_HALF_WIDTH};
use crate::dyadic::japanese;
use crate::error::{config, usage, Result};

/// Time quadrature for the first nonlinear iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quadrature {
    /// Trapezoid rule with this many equal subintervals of `[0, t]` (at least 64).
    Trapezoid { intervals: usize },
    /// Closed-form `t'` integral of the phase.
    ExactPhase,
}

impl Quadrature {
    fn validate(self) -> Result<()> {
        match self {
            Quadrature::Trapezoid { intervals } if intervals < 64 => {
                config(format!("trapezoid quadrature needs at least 64 subintervals, got {intervals}"))
            }
            _ => Ok(()),
        }
    }
}

/// `∫_0^t e^{-i(t-t') xi^2} e^{-i t' theta} dt'` with `omega = xi^2 - theta`.
fn time_factor(t: f64, xi: f64, omega: f64, quad: Quadrature) -> Complex64 {
    let outer = Complex64::from_polar(1.0, -t * xi * xi);
    match quad {
        Quadrature::ExactPhase => {
            let x = t * omega;
            let inner = if x.abs() < 1e-6 {
                Complex64::new(t, 0.5 * t * x)
            } else {
                (Complex64::from_polar(1.0, x) - 1.0) / Complex64::new(0.0, omega)
            };
            outer * inner
        }
        Quadrature::Trapezoid { intervals } => {
            let h = t / intervals as f64;
            let step = Complex64::from_polar(1.0, h * omega);
            let mut z = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.5, 0.0);
            for j in 1..=intervals {
                if j % 32 == 0 {
                    z = Complex64::from_polar(1.0, j as f64 * h * omega);
                } else {
                    z *= step;
                }
                acc += if j == intervals { 0.5 * z } else { z };
            }
            outer * acc * h
        }
    }
}

/// Spatial spectrum of the first nonlinear iterate at time `t`,
/// `(1/2pi) ∫_0^t ∫ e^{-i(t-t') xi^2} e^{-i t'(xi1^2 + xi2^2)} f^(xi1) f^(xi - xi1) dxi1 dt'`,
/// at each requested output frequency; the `xi1` integral is the lattice
/// sum over the data samples.
pub fn a2_spectrum<D: SpectralData>(data: &D, t: f64, quad: Quadrature, outputs: &[f64]) -> Result<Vec<Complex64>> {
    if !(0.0..=1.0).contains(&t) {
        return usage(format!("the iterate is evaluated for 0 <= t <= 1, got {t}"));
    }
    quad.validate()?;
    let w = data.spacing() / (2.0 * PI);
    Ok(outputs
        .par_iter()
        .map(|&xi| {
            if t == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &(x1, v1) in data.samples() {
                let v2 = data.eval(xi - x1);
                if v2.re == 0.0 && v2.im == 0.0 {
                    continue;
                }
                let x2 = xi - x1;
                // xi^2 - xi1^2 - xi2^2 = 2 xi1 xi2
                acc += v1 * v2 * time_factor(t, xi, 2.0 * x1 * x2, quad);
            }
            acc * w
        })
        .collect())
}

/// Output lattice for [`a2_direct`]: multiples of the data spacing inside
/// `|xi| <= window`, or covering the whole sum set when `window` is `None`.
pub fn output_lattice<D: SpectralData>(data: &D, window: Option<f64>) -> Vec<f64> {
    let h = data.spacing();
    let reach = match window {
        Some(w) => w,
        None => 2.0 * data.samples().iter().map(|(x, _)| x.abs()).fold(0.0, f64::max) + h,
    };
    let m = (reach / h + 1e-9).floor() as i64;
    (-m..=m).map(|k| k as f64 * h).collect()
}

/// `H^{s'}` norm of the first nonlinear iterate at time `t`, over the
/// output lattice of `window`.
pub fn a2_direct<D: SpectralData>(data: &D, t: f64, s_prime: f64, quad: Quadrature, window: Option<f64>) -> Result<f64> {
    let xs = output_lattice(data, window);
    let vals = a2_spectrum(data, t, quad, &xs)?;
    Ok((xs.iter().zip(&vals).map(|(x, v)| japanese(*x).powf(2.0 * s_prime) * v.norm_sqr()).sum::<f64>()
        * data.spacing())
    .sqrt())
}

/// Smallest real part of the interaction phase over `0 <= t' <= t`,
/// `|xi| <= 1` and `xi1, xi - xi1` in the bands of `f_N`. Both sign
/// conventions for the inner phase are scanned,
/// `cos(t'(xi1^2 + xi2^2) -+ (t - t') xi^2)`, and the smaller value returned.
pub fn phase_check(n: f64, t: f64) -> f64 {
    let h = 0.25;
    let per_band = (2.0 * BAND_HALF_WIDTH / h) as usize;
    let band: Vec<f64> = (0..=per_band)
        .flat_map(|i| {
            let x = n - BAND_HALF_WIDTH + i as f64 * h;
            [x, -x]
        })
        .collect();
    let in_band = |x: f64| (x.abs() - n).abs() <= BAND_HALF_WIDTH + 1e-12;
    let mut worst = f64::INFINITY;
    for it in 0..=16 {
        let tp = t * it as f64 / 16.0;
        for k in -4..=4 {
            let xi = k as f64 * 0.25;
            for &x1 in &band {
                let x2 = xi - x1;
                if !in_band(x2) {
                    continue;
                }
                let theta = x1 * x1 + x2 * x2;
                let a = (tp * theta - (t - tp) * xi * xi).cos();
                let b = (tp * theta + (t - tp) * xi * xi).cos();
                worst = worst.min(a).min(b);
            }
        }
    }
    worst
}
