use std::fmt;
use std::str::FromStr;

use super::convolve;
use super::testfn::Sign;
use crate::dyadic::{japanese, restrict_where, DyadicCell};
use crate::error::{usage, DlabError, Result};
use crate::lattice::Field;
use crate::norms::{besov_norm, w_norm, weight, y_norm, z_norm_with, ZConfig};

/// The estimates under test. `BilHaltWrong` is the negative control: the
/// bilinear estimate with an extra, unjustified `<D>^{-1/2}` of decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimate {
    BilHalt,
    MeasureBound,
    BilDual,
    KPoint,
    HighLow,
    HighHigh,
    WBilinear,
    YyBilinear,
    BilHaltWrong,
}

impl Estimate {
    pub const ALL: [Estimate; 9] = [
        Estimate::BilHalt,
        Estimate::MeasureBound,
        Estimate::BilDual,
        Estimate::KPoint,
        Estimate::HighLow,
        Estimate::HighHigh,
        Estimate::WBilinear,
        Estimate::YyBilinear,
        Estimate::BilHaltWrong,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Estimate::BilHalt => "bil-halt",
            Estimate::MeasureBound => "measure-bound",
            Estimate::BilDual => "bil-dual",
            Estimate::KPoint => "k-point",
            Estimate::HighLow => "high-low",
            Estimate::HighHigh => "high-high",
            Estimate::WBilinear => "W-bilinear",
            Estimate::YyBilinear => "yy-bilinear",
            Estimate::BilHaltWrong => "bil-halt-wrong",
        }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Estimate {
    type Err = DlabError;
    fn from_str(s: &str) -> Result<Self> {
        Estimate::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| DlabError::Usage(format!("unknown estimate '{s}'")))
    }
}

/// Two inputs and the dyadic parameters of one evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EstimateInputs<'a> {
    pub f: &'a Field,
    pub g: &'a Field,
    pub j1: u32,
    pub j2: u32,
    /// Output annulus (high-low, bil-dual).
    pub j: u32,
    /// Output shell (bil-dual).
    pub d: u32,
    /// Separation `D`.
    pub big_d: f64,
    /// Output half-space (bil-dual).
    pub omega_sign: Sign,
    /// Small stand-in for the large index offsets of the estimates.
    pub offset: u32,
}

fn require(f: &Field, what: &str, keep: impl Fn(DyadicCell, f64, f64) -> bool) -> Result<()> {
    if restrict_where(f, |c, tau, xi| !keep(c, tau, xi)).is_zero() {
        Ok(())
    } else {
        usage(format!("support hypothesis violated: {what}"))
    }
}

/// Frequencies of the nonzero columns.
fn xi_support(f: &Field) -> Vec<f64> {
    let nx = f.nx();
    let mut live = vec![false; nx];
    for row in f.values().chunks(nx) {
        for (l, v) in live.iter_mut().zip(row) {
            *l |= v.re != 0.0 || v.im != 0.0;
        }
    }
    f.grid().xi().iter().zip(live).filter(|(_, l)| *l).map(|(x, _)| *x).collect()
}

/// `min |a - b|` over the `xi`-supports of `f` and `g`.
pub fn separation(f: &Field, g: &Field) -> f64 {
    let (a, b) = (xi_support(f), xi_support(g));
    a.iter().flat_map(|x| b.iter().map(move |y| (x - y).abs())).fold(f64::INFINITY, f64::min)
}

fn over_parabola(f: &Field) -> Field {
    f.map_spectral(|tau, xi, v| v / japanese(tau - xi * xi))
}

fn divide_weight(f: &Field) -> Field {
    f.map_spectral(|tau, _, v| v / weight(tau).0)
}

fn times_weight(f: &Field) -> Field {
    f.map_spectral(|tau, _, v| v * weight(tau).0)
}

/// `(w / <tau - xi^2>) ((f/w) * (g/w))`.
fn weighted_product(f: &Field, g: &Field) -> Result<Field> {
    Ok(over_parabola(&times_weight(&convolve(&divide_weight(f), &divide_weight(g))?)))
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// LHS / RHS of one estimate on one pair of inputs. Support hypotheses are
/// checked first and reported as usage errors. `MeasureBound` and `KPoint`
/// take no functions and are evaluated by the sweep directly.
pub fn estimate_ratio(est: Estimate, inp: &EstimateInputs, zcfg: &ZConfig) -> Result<f64> {
    let (f, g) = (inp.f, inp.g);
    match est {
        Estimate::BilHalt | Estimate::BilHaltWrong => {
            require(f, &format!("f in A_{}", inp.j1), |c, _, _| c.j == inp.j1)?;
            require(g, &format!("g in A_{}", inp.j2), |c, _, _| c.j == inp.j2)?;
            if inp.big_d > 0.0 && separation(f, g) < inp.big_d - 1e-12 {
                return usage(format!("support hypothesis violated: |xi1 - xi2| >= D = {}", inp.big_d));
            }
            let lhs = convolve(f, g)?.l2_norm();
            let decay = if est == Estimate::BilHalt { -0.5 } else { -1.0 };
            let rhs = 2f64.powi((inp.j1 + inp.j2) as i32) * japanese(inp.big_d).powf(decay) * besov_norm(f) * besov_norm(g);
            Ok(ratio(lhs, rhs))
        }
        Estimate::BilDual => {
            require(f, &format!("f in A_{}", inp.j1), |c, _, _| c.j == inp.j1)?;
            let cols = xi_support(f);
            let omega = |c: DyadicCell, xi: f64| c.j == inp.j && c.d == inp.d && inp.omega_sign.admits(xi);
            let out = restrict_where(&convolve(f, g)?, |c, _, xi| omega(c, xi));
            let sep = inp
                .f
                .grid()
                .xi()
                .iter()
                .filter(|&&xi| crate::dyadic::dyadic_level(xi) == inp.j && inp.omega_sign.admits(xi))
                .flat_map(|xi| cols.iter().map(move |x1| (x1 + xi).abs()))
                .fold(f64::INFINITY, f64::min);
            if inp.big_d > 0.0 && sep < inp.big_d - 1e-12 {
                return usage(format!("support hypothesis violated: |xi1 + xi| >= D = {}", inp.big_d));
            }
            let lhs = 2f64.powf(-0.5 * inp.d as f64) * out.l2_norm();
            let rhs = 2f64.powi(inp.j1 as i32) * (2f64.powf(0.5 * inp.d as f64) + inp.big_d).powf(-0.5) * besov_norm(f) * g.l2_norm();
            Ok(ratio(lhs, rhs))
        }
        Estimate::HighLow => {
            require(f, &format!("f in A_{}", inp.j1), |c, _, _| c.j == inp.j1)?;
            require(g, &format!("g in A_{}", inp.j2), |c, _, _| c.j == inp.j2)?;
            if inp.j1.abs_diff(inp.j) > 10 || inp.j2 > inp.j + 11 {
                return usage("support hypothesis violated: |j1 - j| <= 10 and j2 <= j + 11");
            }
            let out = restrict_where(&over_parabola(&convolve(f, g)?), |c, _, _| c.j == inp.j);
            let (j, j2) = (inp.j as f64, inp.j2 as f64);
            let factor = 2f64.powf(-j2 / 10.0) + 2f64.powf(-(j - j2) / 10.0);
            let rhs = factor * z_norm_with(f, zcfg).value * z_norm_with(g, zcfg).value;
            Ok(ratio(besov_norm(&out), rhs))
        }
        Estimate::HighHigh => {
            if inp.j1.abs_diff(inp.j2) > 1 || inp.j1 < inp.offset {
                return usage(format!("support hypothesis violated: |j1 - j2| <= 1 and j1 >= {}", inp.offset));
            }
            require(f, &format!("f in A_{} and xi > 0", inp.j1), |c, _, xi| c.j == inp.j1 && xi > 0.0)?;
            require(g, &format!("g in A_{} and xi < 0", inp.j2), |c, _, xi| c.j == inp.j2 && xi < 0.0)?;
            let cap = inp.j1 - inp.offset;
            let out = restrict_where(&weighted_product(f, g)?, |c, _, _| c.j <= cap);
            Ok(ratio(y_norm(&out), z_norm_with(f, zcfg).value * z_norm_with(g, zcfg).value))
        }
        Estimate::WBilinear => {
            let out = over_parabola(&convolve(f, g)?);
            Ok(ratio(w_norm(&out, zcfg).value, w_norm(f, zcfg).value * w_norm(g, zcfg).value))
        }
        Estimate::YyBilinear => {
            let out = weighted_product(f, g)?;
            Ok(ratio(z_norm_with(&out, zcfg).value, y_norm(f) * y_norm(g)))
        }
        Estimate::MeasureBound | Estimate::KPoint => {
            usage(format!("{est} takes no input functions; use the sweep"))
        }
    }
}

