use rayon::prelude::*;

use super::data::{make_fn, Normalize, SpectralData};
use super::direct::{a2_direct, phase_check, Quadrature};
use crate::error::{config, Result};
use crate::report::loglog_slope;

/// Parameters of the cascade experiment.
#[derive(Debug, Clone)]
pub struct CascadeConfig {
    pub r: f64,
    pub s: f64,
    pub s_prime: f64,
    pub n_list: Vec<f64>,
    pub normalize: Normalize,
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return config("empty N list");
        }
        if let Some(n) = self.n_list.iter().find(|n| !(**n > 100.0)) {
            return config(format!("N must exceed 100, got {n}"));
        }
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return config("N list must be ascending");
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return config(format!("radius must be positive, got {}", self.r));
        }
        if !self.s.is_finite() || !self.s_prime.is_finite() {
            return config("regularity indices must be finite");
        }
        Ok(())
    }

    pub fn canonical(&self) -> String {
        let ns: Vec<String> = self.n_list.iter().map(|n| format!("{n}")).collect();
        format!("r={};s={};sprime={};N={};normalize={}", self.r, self.s, self.s_prime, ns.join(","), self.normalize)
    }
}

/// One row of the cascade table.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeRow {
    pub n: f64,
    pub hs_data_norm: f64,
    /// Largest `H^{s'}` norm over `|xi| <= 1` among the sampled times.
    pub sup_t_a2_norm: f64,
    /// Same norm at the witness time `1/(100 N^2)`.
    pub a2_at_witness_t: f64,
    pub phase_min: f64,
    /// Log-log slope of the data norms over the rows so far (NaN on the first row).
    pub beta_running: f64,
}

#[derive(Debug, Clone)]
pub struct CascadeReport {
    pub rows: Vec<CascadeRow>,
    /// Fitted exponent of the data norm against `N`.
    pub data_slope: f64,
    /// `(max - min) / max` of the witness column.
    pub witness_variation: f64,
    pub pass: bool,
}

/// Witness time `1/(100 N^2)`.
pub fn witness_time(n: f64) -> f64 {
    1.0 / (100.0 * n * n)
}

/// Sample times: 64 equispaced points of `(0, 1]` plus the witness time.
pub fn sample_times(n: f64) -> Vec<f64> {
    let mut ts: Vec<f64> = (1..=64).map(|k| k as f64 / 64.0).collect();
    ts.push(witness_time(n));
    ts
}

const WINDOW: f64 = 1.0;
const BAND_SPACING: f64 = 0.25;

fn run_one(cfg: &CascadeConfig, n: f64) -> Result<CascadeRow> {
    let data = make_fn(cfg.r, n, cfg.normalize, cfg.s, BAND_SPACING)?;
    let tw = witness_time(n);
    let witness = a2_direct(&data, tw, cfg.s_prime, Quadrature::ExactPhase, Some(WINDOW))?;
    let mut sup = witness;
    for t in sample_times(n) {
        sup = sup.max(a2_direct(&data, t, cfg.s_prime, Quadrature::ExactPhase, Some(WINDOW))?);
    }
    Ok(CascadeRow {
        n,
        hs_data_norm: data.hs_norm(cfg.s),
        sup_t_a2_norm: sup,
        a2_at_witness_t: witness,
        phase_min: phase_check(n, tw),
        beta_running: f64::NAN,
    })
}

/// Runs the cascade for every `N`. PASS means: data norms follow `N^{1+s}`
/// to 0.05 in the fitted exponent, the phase stays above 1/2, and the
/// witness column varies by less than 20%.
pub fn cascade_experiment(cfg: &CascadeConfig) -> Result<CascadeReport> {
    cfg.validate()?;
    let mut rows = cfg.n_list.par_iter().map(|&n| run_one(cfg, n)).collect::<Result<Vec<_>>>()?;
    for i in 1..rows.len() {
        let ns: Vec<f64> = rows[..=i].iter().map(|r| r.n).collect();
        let hs: Vec<f64> = rows[..=i].iter().map(|r| r.hs_data_norm).collect();
        rows[i].beta_running = loglog_slope(&ns, &hs);
    }
    let data_slope = rows.last().map(|r| r.beta_running).unwrap_or(f64::NAN);
    let w: Vec<f64> = rows.iter().map(|r| r.a2_at_witness_t).collect();
    let wmax = w.iter().cloned().fold(f64::MIN, f64::max);
    let wmin = w.iter().cloned().fold(f64::MAX, f64::min);
    let witness_variation = if wmax > 0.0 { (wmax - wmin) / wmax } else { f64::NAN };
    let slope_ok = if rows.len() < 2 { true } else { (data_slope - (1.0 + cfg.s)).abs() <= 0.05 };
    let pass = slope_ok && witness_variation < 0.2 && wmin > 0.0 && rows.iter().all(|r| r.phase_min > 0.5);
    Ok(CascadeReport { rows, data_slope, witness_variation, pass })
}
