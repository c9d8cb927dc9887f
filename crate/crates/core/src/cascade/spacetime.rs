//! Spacetime transform of the first nonlinear iterate `A_2 = N_2(Lf, Lf)`,
//! evaluated pointwise from the cutoff transforms:
//!
//! `A_2~(tau, xi) = eta~(tau - xi^2) G(xi) + a~(tau - xi^2) P~(tau, xi)`,
//!
//! `G(xi) = (1/2pi) ∫ f^(xi1) f^(xi - xi1) (a eta^2)~(xi^2 - theta) dxi1`,
//! `P~(tau, xi) = (1/2pi) ∫ f^(xi1) f^(xi - xi1) (eta^2)~(tau - theta) dxi1`,
//! with `theta = xi1^2 + (xi - xi1)^2`. The `xi1` integrals are lattice sums.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::cutoff::CutoffTransforms;
use super::data::{make_fn, BandData, Normalize, SpectralData, BAND_HALF_WIDTH};
use crate::dyadic::japanese;
use crate::error::{config, resolution, Result};
use crate::evolution::Evolution;
use crate::report::loglog_slope;

/// Nodes of the `xi1` sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Xi1Lattice {
    /// Multiples of the data spacing (exact for lattice data on lattice outputs).
    Data,
    /// `xi/2 + (k + 1/2) h`: midpoints symmetric about `xi/2`.
    Midpoint(f64),
}

/// Pointwise evaluator of `A_2~`.
pub struct Spacetime<'a, D: SpectralData> {
    tr: &'a CutoffTransforms,
    data: &'a D,
    lattice: Xi1Lattice,
    support: Vec<(f64, f64)>,
}

impl<'a, D: SpectralData> Spacetime<'a, D> {
    pub fn new(tr: &'a CutoffTransforms, data: &'a D, lattice: Xi1Lattice) -> Self {
        Spacetime { tr, data, lattice, support: data.support() }
    }

    fn step(&self) -> f64 {
        match self.lattice {
            Xi1Lattice::Data => self.data.spacing(),
            Xi1Lattice::Midpoint(h) => h,
        }
    }

    fn node(&self, xi: f64, k: i64) -> f64 {
        match self.lattice {
            Xi1Lattice::Data => k as f64 * self.data.spacing(),
            Xi1Lattice::Midpoint(h) => 0.5 * xi + (k as f64 + 0.5) * h,
        }
    }

    /// Node indices with `xi1` in `[a, b]`.
    fn nodes_in(&self, xi: f64, a: f64, b: f64) -> std::ops::RangeInclusive<i64> {
        let (off, h) = match self.lattice {
            Xi1Lattice::Data => (0.0, self.data.spacing()),
            Xi1Lattice::Midpoint(h) => (0.5 * xi + 0.5 * h, h),
        };
        ((a - off) / h - 1e-9).ceil() as i64..=((b - off) / h + 1e-9).floor() as i64
    }

    /// Sum of `f^(xi1) f^(xi - xi1) k(theta)` over nodes with `xi1` in the
    /// given intervals, times `h / 2pi`.
    fn pair_sum(&self, xi: f64, intervals: &[(f64, f64)], k: impl Fn(f64) -> f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, b) in intervals {
            for j in self.nodes_in(xi, a, b) {
                let x1 = self.node(xi, j);
                let v1 = self.data.eval(x1);
                if v1.re == 0.0 && v1.im == 0.0 {
                    continue;
                }
                let v2 = self.data.eval(xi - x1);
                if v2.re == 0.0 && v2.im == 0.0 {
                    continue;
                }
                let theta = x1 * x1 + (xi - x1) * (xi - x1);
                acc += v1 * v2 * k(theta);
            }
        }
        acc * (self.step() / (2.0 * PI))
    }

    /// `G(xi)`, the coefficient of `eta~(tau - xi^2)`.
    pub fn g(&self, xi: f64) -> Complex64 {
        let xs = xi * xi;
        Complex64::i() * self.pair_sum(xi, &self.support, |theta| self.tr.a_eta_sq_im(xs - theta))
    }

    /// `P~(tau, xi)`, the spacetime transform of `|Lf|^2`-type product `(Lf)^2`.
    pub fn p(&self, tau: f64, xi: f64) -> Complex64 {
        let reach = self.tr.eta_sq_reach();
        // theta = 2 (xi1 - xi/2)^2 + xi^2/2 within reach of tau
        let q0 = ((tau - reach - 0.5 * xi * xi) / 2.0).max(0.0);
        let q1 = (tau + reach - 0.5 * xi * xi) / 2.0;
        if q1 < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (u0, u1) = (q0.sqrt(), q1.sqrt());
        let c = 0.5 * xi;
        let halves: &[(f64, f64)] =
            if u0 == 0.0 { &[(c - u1, c + u1)] } else { &[(c - u1, c - u0), (c + u0, c + u1)] };
        let mut windows = Vec::with_capacity(4);
        for &(a, b) in halves {
            for &(sa, sb) in &self.support {
                let (lo, hi) = (a.max(sa), b.min(sb));
                if lo <= hi {
                    windows.push((lo, hi));
                }
            }
        }
        self.pair_sum(xi, &windows, |theta| self.tr.eta_sq(tau - theta))
    }

    /// `A_2~(tau, xi)` given a precomputed `G(xi)`.
    pub fn value_with(&self, tau: f64, xi: f64, g: Complex64) -> Complex64 {
        let sigma = tau - xi * xi;
        let near = self.tr.eta(sigma) * g;
        let p = self.p(tau, xi);
        near + Complex64::i() * self.tr.a_im(sigma) * p
    }

    pub fn value(&self, tau: f64, xi: f64) -> Complex64 {
        self.value_with(tau, xi, self.g(xi))
    }
}

/// Output frequencies `|xi| <= 1` in steps of `1/4`.
pub fn low_columns() -> Vec<f64> {
    (-4..=4).map(|k| k as f64 * 0.25).collect()
}

fn band_lattice(n: f64) -> Xi1Lattice {
    Xi1Lattice::Midpoint(PI / (8.0 * n))
}

/// Settings shared by the spacetime experiments.
#[derive(Debug, Clone)]
pub struct RectangleConfig {
    pub s: f64,
    pub r: f64,
    pub n_list: Vec<f64>,
    /// Half-length of the time window; the frequency step is `pi / tw`.
    pub tw: f64,
    /// Number of time samples; the frequency grid reaches `pi nt / (2 tw)`.
    pub nt: Option<usize>,
}

impl RectangleConfig {
    pub fn new(s: f64, n_list: Vec<f64>) -> Self {
        RectangleConfig { s, r: 1.0, n_list, tw: 4.0 * PI, nt: None }
    }

    fn validate(&self) -> Result<()> {
        if self.n_list.len() < 2 {
            return config("the rectangle fit needs at least two values of N");
        }
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return config("N list must be ascending");
        }
        if !(self.tw > 0.0) {
            return config(format!("time window must be positive, got {}", self.tw));
        }
        Ok(())
    }
}

/// Result of the rectangle scan.
#[derive(Debug, Clone)]
pub struct RectangleReport {
    /// `(N, max <tau - xi^2> |A_2~|)` over the rectangle.
    pub rows: Vec<(f64, f64)>,
    pub beta: f64,
}

/// Largest value of `<tau - xi^2> |A_2~(tau, xi)|` over `|xi| <= 1`,
/// `|tau - 2N^2| <= N`, on the lattice `tau = k pi / tw`, for unit `H^s` data.
pub fn rectangle_max(tr: &CutoffTransforms, n: f64, s: f64, r: f64, tw: f64, nt: Option<usize>) -> Result<f64> {
    let dtau = PI / tw;
    let center = 2.0 * n * n;
    if let Some(nt) = nt {
        let tau_max = (nt / 2) as f64 * dtau;
        if center + n > tau_max {
            return resolution(format!("rectangle reaches tau = {}, beyond the grid edge {tau_max}", center + n));
        }
    }
    let data = make_fn(r, n, Normalize::UnitHs, s, 0.25)?;
    let st = Spacetime::new(tr, &data, band_lattice(n));
    let k0 = ((center - n) / dtau).ceil() as i64;
    let k1 = ((center + n) / dtau).floor() as i64;
    let best = low_columns()
        .into_par_iter()
        .map(|xi| {
            let g = st.g(xi);
            (k0..=k1)
                .map(|k| {
                    let tau = k as f64 * dtau;
                    japanese(tau - xi * xi) * st.value_with(tau, xi, g).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Fitted exponent `beta` of the rectangle maximum against `N`.
pub fn rectangle_exponent(cfg: &RectangleConfig) -> Result<RectangleReport> {
    cfg.validate()?;
    let tr = CutoffTransforms::new(&Evolution::default());
    let rows = cfg
        .n_list
        .iter()
        .map(|&n| Ok((n, rectangle_max(&tr, n, cfg.s, cfg.r, cfg.tw, cfg.nt)?)))
        .collect::<Result<Vec<_>>>()?;
    let (ns, vs): (Vec<f64>, Vec<f64>) = rows.iter().copied().unzip();
    Ok(RectangleReport { rows, beta: loglog_slope(&ns, &vs) })
}

/// Samples of `|A_2~|^2` on the strip `|xi| <= 1` for band data of unit level,
/// near the parabola and along the band-interaction window.
#[derive(Debug, Clone)]
pub struct XsbSlab {
    pub n: f64,
    pub dtau: f64,
    /// `(tau, xi, xi weight, |A_2~|^2)`.
    samples: Vec<(f64, f64, f64, f64)>,
}

impl XsbSlab {
    pub fn compute(tr: &CutoffTransforms, n: f64, dtau: f64) -> Result<XsbSlab> {
        let data = BandData::new(n, 1.0, 0.25)?;
        let st = Spacetime::new(tr, &data, band_lattice(n));
        let cols = low_columns();
        let last = cols.len() - 1;
        let reach_eta = tr.eta_reach();
        let reach_e = tr.eta_sq_reach();
        let samples = cols
            .par_iter()
            .enumerate()
            .flat_map_iter(|(c, &xi)| {
                let wx = if c == 0 || c == last { 0.125 } else { 0.25 };
                let g = st.g(xi);
                let xs = xi * xi;
                let umin = n - BAND_HALF_WIDTH - 0.5 * xi.abs();
                let umax = n + BAND_HALF_WIDTH + 0.5 * xi.abs();
                let windows = [
                    (xs - reach_eta, xs + reach_eta),
                    (2.0 * umin * umin + 0.5 * xs - reach_e, 2.0 * umax * umax + 0.5 * xs + reach_e),
                ];
                let mut out = Vec::new();
                for (a, b) in windows {
                    let k0 = (a / dtau).ceil() as i64;
                    let k1 = (b / dtau).floor() as i64;
                    for k in k0..=k1 {
                        let tau = k as f64 * dtau;
                        out.push((tau, xi, wx, st.value_with(tau, xi, g).norm_sqr()));
                    }
                }
                out
            })
            .collect();
        Ok(XsbSlab { n, dtau, samples })
    }

    /// Strip `X^{s,b}` norm of `A_2~` for unit-`H^s` band data.
    pub fn norm(&self, s: f64, b: f64) -> f64 {
        let unit = BandData::new(self.n, 1.0, 0.25).map(|d| d.hs_norm(s)).unwrap_or(f64::NAN);
        let level = 1.0 / unit;
        let sum: f64 = self
            .samples
            .iter()
            .map(|&(tau, xi, wx, m)| japanese(xi).powf(2.0 * s) * japanese(tau - xi * xi).powf(2.0 * b) * m * wx)
            .sum();
        level * level * (sum * self.dtau).sqrt()
    }
}

/// Strip `X^{s,b}` norms of `A_2~` across `N` with their fitted growth exponent.
#[derive(Debug, Clone)]
pub struct XsbGrowth {
    pub s: f64,
    pub b: f64,
    /// `(N, norm)`.
    pub rows: Vec<(f64, f64)>,
    pub slope: f64,
}

/// One growth fit per `(s, b)` pair; the slabs are shared between pairs.
pub fn xsb_growth(n_list: &[f64], pairs: &[(f64, f64)], dtau: f64) -> Result<Vec<XsbGrowth>> {
    if n_list.len() < 2 {
        return config("the growth fit needs at least two values of N");
    }
    let tr = CutoffTransforms::new(&Evolution::default());
    let slabs = n_list.iter().map(|&n| XsbSlab::compute(&tr, n, dtau)).collect::<Result<Vec<_>>>()?;
    Ok(pairs
        .iter()
        .map(|&(s, b)| {
            let vals: Vec<f64> = slabs.iter().map(|sl| sl.norm(s, b)).collect();
            XsbGrowth { s, b, rows: n_list.iter().copied().zip(vals.iter().copied()).collect(), slope: loglog_slope(n_list, &vals) }
        })
        .collect())
}
