use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::estimates::{estimate_ratio, Estimate, EstimateInputs};
use super::fuzz_grid;
use super::testfn::{gen_test_function, Kind, Sign, TestFunctionSpec};
use crate::dyadic::{CellSelector, IndexRange};
use crate::error::{config, Result};
use crate::norms::{weight, ZConfig, DEFAULT_OFFSET};
use crate::report::RatioReport;

/// Growth factor of the max ratio, coarsest to finest, that flags a trend.
pub const RAISE_FACTOR: f64 = 1.5;
/// Largest input annulus and shell drawn by the fuzzer.
const JMAX: u32 = 2;
const DMAX: u32 = 3;

/// Optional pins for the randomly drawn parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FuzzParams {
    pub j1: Option<u32>,
    pub j2: Option<u32>,
    pub d: Option<u32>,
    pub big_d: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub trials: usize,
    pub seed: u64,
    /// Lattice spacings, coarsest first.
    pub grids: Vec<f64>,
    pub params: FuzzParams,
    pub zcfg: ZConfig,
    /// Small stand-in for the large index offsets of the estimates.
    pub offset: u32,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            trials: 200,
            seed: 1,
            grids: vec![0.5, 0.25, 0.125],
            params: FuzzParams::default(),
            zcfg: ZConfig::default(),
            offset: DEFAULT_OFFSET as u32,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grids.is_empty() {
            return config("at least one grid is required");
        }
        if !self.grids.windows(2).all(|w| w[1] < w[0]) {
            return config("grids must be strictly refining (decreasing spacings)");
        }
        if let Some(j) = self.params.j1.into_iter().chain(self.params.j2).find(|&j| j > JMAX) {
            return config(format!("input annulus {j} exceeds the fuzz lattice (at most {JMAX})"));
        }
        if self.params.d.is_some_and(|d| d > DMAX + 1) {
            return config(format!("shell index exceeds {}", DMAX + 1));
        }
        Ok(())
    }

    pub fn canonical(&self) -> String {
        let g: Vec<String> = self.grids.iter().map(|h| format!("{h}")).collect();
        format!(
            "trials={};seed={};grids={};offset={};z={};j1={:?};j2={:?};d={:?};D={:?}",
            self.trials,
            self.seed,
            g.join(","),
            self.offset,
            self.zcfg.method,
            self.params.j1,
            self.params.j2,
            self.params.d,
            self.params.big_d
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub ratio: f64,
    pub grid: String,
}

fn trial_seed(base: u64, est: Estimate, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(((est as u64) << 32) | trial as u64);
    rng.next_u64()
}

fn grid_label(h: f64) -> String {
    format!("h={h}")
}

/// `min |xi|` over the annulus `A_j`.
fn annulus_floor(j: u32) -> f64 {
    (4f64.powi(j as i32) - 1.0).sqrt()
}

fn random_kind(rng: &mut ChaCha8Rng) -> Kind {
    Kind::ALL[rng.gen_range(0..Kind::ALL.len())]
}

fn fit_kind(k: Kind, shells: IndexRange) -> Kind {
    match (k, shells) {
        (Kind::ParabolaHugging, IndexRange::Exact(d)) if d > 1 => Kind::Uniform,
        _ => k,
    }
}

fn random_shells(rng: &mut ChaCha8Rng, pinned: Option<u32>, cap: u32) -> IndexRange {
    match pinned {
        Some(d) => IndexRange::Exact(d),
        None if rng.gen_bool(0.5) => IndexRange::Exact(rng.gen_range(0..=cap)),
        None => IndexRange::AtMost(cap),
    }
}

/// A trial: two test-function specs and the parameters, all drawn before
/// any grid is chosen so every grid sees the same continuum inputs.
struct Draw {
    f: TestFunctionSpec,
    g: TestFunctionSpec,
    j1: u32,
    j2: u32,
    j: u32,
    d: u32,
    big_d: f64,
    omega_sign: Sign,
}

fn draw(est: Estimate, cfg: &FuzzConfig, seed: u64) -> Draw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = cfg.params;
    let mut j1 = p.j1.unwrap_or_else(|| rng.gen_range(0..=JMAX));
    let mut j2 = p.j2.unwrap_or_else(|| rng.gen_range(0..=JMAX));
    let mut j = 0;
    let mut d = p.d.unwrap_or_else(|| rng.gen_range(0..=DMAX + 1));
    let mut big_d = 0.0;
    let mut omega_sign = Sign::Any;
    let (mut fs, mut gs) = (Sign::Any, Sign::Any);
    let mut fd = random_shells(&mut rng, p.d, DMAX);
    let gd = random_shells(&mut rng, None, DMAX);
    let (mut fk, gk) = (random_kind(&mut rng), random_kind(&mut rng));
    let (fseed, gseed) = (rng.next_u64(), rng.next_u64());
    match est {
        Estimate::BilHalt | Estimate::BilHaltWrong => {
            if rng.gen_bool(0.5) {
                fs = Sign::Positive;
                gs = Sign::Negative;
                big_d = annulus_floor(j1) + annulus_floor(j2);
            }
            if let Some(v) = p.big_d {
                big_d = v;
            }
        }
        Estimate::BilDual => {
            fs = if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative };
            j = rng.gen_range(0..=JMAX + 1);
            omega_sign = if rng.gen_bool(0.5) { fs } else { Sign::Any };
            if omega_sign == fs {
                big_d = annulus_floor(j1) + annulus_floor(j);
            }
            if let Some(v) = p.big_d {
                big_d = v;
            }
        }
        Estimate::HighLow => {
            j = (j1 as i64 + rng.gen_range(-1..=1)).clamp(0, JMAX as i64 + 1) as u32;
        }
        Estimate::HighHigh => {
            j1 = p.j1.unwrap_or(JMAX).max(cfg.offset);
            j2 = p.j2.unwrap_or_else(|| j1 - rng.gen_range(0..=1u32.min(j1)));
            fs = Sign::Positive;
            gs = Sign::Negative;
            // one input near the parabola
            fd = IndexRange::AtMost((2 * j1).saturating_sub(cfg.offset).min(DMAX));
        }
        _ => {}
    }
    d = d.min(DMAX + 1);
    // the hugging strip only meets the two lowest shells
    fk = fit_kind(fk, fd);
    let gk = fit_kind(gk, gd);
    let (fj, gj) = match est {
        Estimate::WBilinear | Estimate::YyBilinear => (IndexRange::AtMost(JMAX), IndexRange::AtMost(JMAX)),
        Estimate::BilDual => (IndexRange::Exact(j1), IndexRange::AtMost(JMAX)),
        _ => (IndexRange::Exact(j1), IndexRange::Exact(j2)),
    };
    Draw {
        f: TestFunctionSpec::new(CellSelector::new(fj, fd), fk, fseed).with_sign(fs),
        g: TestFunctionSpec::new(CellSelector::new(gj, gd), gk, gseed).with_sign(gs),
        j1,
        j2,
        j,
        d,
        big_d,
        omega_sign,
    }
}

/// Interval with endpoint types: `(lo, lo closed, hi, hi closed)`.
type Piece = (f64, bool, f64, bool);

fn intersect(a: Piece, b: Piece) -> Piece {
    let (lo, lc) = if a.0 > b.0 {
        (a.0, a.1)
    } else if b.0 > a.0 {
        (b.0, b.1)
    } else {
        (a.0, a.1 && b.1)
    };
    let (hi, hc) = if a.2 < b.2 {
        (a.2, a.3)
    } else if b.2 < a.2 {
        (b.2, b.3)
    } else {
        (a.2, a.3 && b.3)
    };
    (lo, lc, hi, hc)
}

/// Points of `dt Z` in the piece.
fn lattice_points((lo, lc, hi, hc): Piece, dt: f64) -> i64 {
    let (x, y) = (lo / dt, hi / dt);
    let first = if lc { x.ceil() } else { x.floor() + 1.0 };
    let last = if hc { y.floor() } else { y.ceil() - 1.0 };
    ((last - first) as i64 + 1).max(0)
}

/// `t` with `t - c` in `B_d`, i.e. `sqrt(4^d - 1) <= |t - c| < sqrt(4^{d+1} - 1)`.
fn shell_pieces(c: f64, d: u32) -> Vec<Piece> {
    let (a, b) = (annulus_floor(d), annulus_floor(d + 1));
    if a == 0.0 {
        // |sigma| < b as a single open interval
        return vec![(c - b, false, c + b, false)];
    }
    vec![(c + a, true, c + b, false), (c - b, false, c - a, true)]
}

/// Lattice count of `{(tau1, xi1) in B_{d1} : (tau - tau1, xi - xi1) in B_{d2}, |xi1 - xi2| >= D}`
/// with `xi1` on `hZ` and `tau1` on `2hZ`, times the cell area `2h^2`.
pub fn measure_area(d1: u32, d2: u32, big_d: f64, tau: f64, xi: f64, h: f64) -> f64 {
    let dt = 2.0 * h;
    let b = annulus_floor(d1 + 1) + annulus_floor(d2 + 1);
    let reach = (tau.abs() + b + xi * xi).sqrt() + xi.abs() + 1.0;
    let k_max = (reach / h).ceil() as i64;
    let mut count = 0i64;
    for k in -k_max..=k_max {
        let xi1 = k as f64 * h;
        let xi2 = xi - xi1;
        if (xi1 - xi2).abs() < big_d {
            continue;
        }
        // tau1 - xi1^2 in B_d1, and tau - tau1 - xi2^2 in B_d2: the latter is
        // tau1 in (tau - xi2^2) - B_d2, whose pieces mirror those of B_d2
        let first = shell_pieces(xi1 * xi1, d1);
        let c2 = tau - xi2 * xi2;
        let second: Vec<Piece> =
            shell_pieces(0.0, d2).into_iter().map(|(lo, lc, hi, hc)| (c2 - hi, hc, c2 - lo, lc)).collect();
        for &p in &first {
            for &q in &second {
                count += lattice_points(intersect(p, q), dt);
            }
        }
    }
    count as f64 * h * dt
}

/// `max_tau area / (2^{d1+d2} / (2^{max(d1,d2)/2} + D))` over a `tau` scan.
fn measure_ratio(d1: u32, d2: u32, big_d: f64, xi: f64, h: f64) -> f64 {
    let dt = 2.0 * h;
    let span = 2f64.powi(d1 as i32 + 1) + 2f64.powi(d2 as i32 + 1);
    let top = 0.5 * (big_d + 4.0).powi(2) + xi * xi + 4.0 * span;
    let (m0, m1) = (((-span) / dt).floor() as i64, (top / dt).ceil() as i64);
    let best = (m0..=m1).map(|m| measure_area(d1, d2, big_d, m as f64 * dt, xi, h)).fold(0.0, f64::max);
    let dm = d1.max(d2) as f64;
    best / (2f64.powi((d1 + d2) as i32) / (2f64.powf(dm / 2.0) + big_d))
}

/// `max w(tau1 + tau2) / (2^10 w(tau1) w(tau2))` over all lattice pairs.
pub fn k_point_scan(h: f64) -> Result<f64> {
    let grid = fuzz_grid(h)?;
    let tau = grid.tau();
    let lw: Vec<f64> = tau.iter().map(|&t| weight(t).0.ln()).collect();
    let dtau = grid.dtau();
    let m0 = (grid.nt() / 2) as i64;
    let best = (0..tau.len())
        .into_par_iter()
        .map(|a| {
            let mut m = f64::NEG_INFINITY;
            for b in 0..tau.len() {
                let t = tau[a] + tau[b];
                let k = (t / dtau).round() as i64 + m0;
                let lwt = if (0..tau.len() as i64).contains(&k) { lw[k as usize] } else { weight(t).0.ln() };
                m = m.max(lwt - lw[a] - lw[b]);
            }
            m
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok((best - 10.0 * 2f64.ln()).exp())
}

fn run_trial(est: Estimate, cfg: &FuzzConfig, trial: usize, h: f64) -> Result<TrialResult> {
    let seed = trial_seed(cfg.seed, est, trial);
    let label = grid_label(h);
    let ratio = match est {
        Estimate::KPoint => k_point_scan(h)?,
        Estimate::MeasureBound => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d1 = cfg.params.d.unwrap_or_else(|| rng.gen_range(0..=6));
            let d2 = rng.gen_range(0..=d1.min(4));
            let big_d = cfg.params.big_d.unwrap_or_else(|| if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0..=16) as f64 });
            let xi = rng.gen_range(-4..=4) as f64 * 0.5;
            measure_ratio(d1, d2, big_d, xi, h)
        }
        _ => {
            let grid = fuzz_grid(h)?;
            let dr = draw(est, cfg, seed);
            let f = gen_test_function(&grid, &dr.f)?;
            let g = gen_test_function(&grid, &dr.g)?;
            let inputs = EstimateInputs {
                f: &f,
                g: &g,
                j1: dr.j1,
                j2: dr.j2,
                j: dr.j,
                d: dr.d,
                big_d: dr.big_d,
                omega_sign: dr.omega_sign,
                offset: cfg.offset,
            };
            estimate_ratio(est, &inputs, &cfg.zcfg)?
        }
    };
    Ok(TrialResult { trial, seed, ratio, grid: label })
}

/// All trials of one estimate on the lattice of spacing `h`, in trial order.
pub fn fuzz_trials(est: Estimate, cfg: &FuzzConfig, h: f64) -> Result<Vec<TrialResult>> {
    cfg.validate()?;
    let trials = if est == Estimate::KPoint { 1 } else { cfg.trials };
    (0..trials).into_par_iter().map(|t| run_trial(est, cfg, t, h)).collect()
}

fn summarize(est: Estimate, cfg: &FuzzConfig, per_level: Vec<(String, Vec<TrialResult>)>) -> RatioReport {
    let mut rep = RatioReport::single(est.as_str(), 0.0);
    rep.trials = per_level.first().map(|(_, t)| t.len()).unwrap_or(0);
    for (label, trials) in per_level {
        let best = trials.iter().fold(None::<&TrialResult>, |b, t| match b {
            Some(b) if b.ratio >= t.ratio => Some(b),
            _ => Some(t),
        });
        let m = best.map(|b| b.ratio).unwrap_or(0.0);
        if m > rep.max_ratio || rep.argmax.is_none() {
            rep.max_ratio = rep.max_ratio.max(m);
            rep.argmax = best.map(|b| b.seed);
        }
        rep.refinement_trend.push((label, m));
    }
    rep.with_param("offset", cfg.offset)
        .with_param("jmax", JMAX)
        .with_param("dmax", DMAX)
        .with_param("z", cfg.zcfg.method)
        .with_param("seed", cfg.seed)
}

/// Max ratio per grid, coarsest first.
pub fn refinement_sweep(est: Estimate, cfg: &FuzzConfig) -> Result<RatioReport> {
    cfg.validate()?;
    let levels = cfg
        .grids
        .iter()
        .map(|&h| Ok((grid_label(h), fuzz_trials(est, cfg, h)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(est, cfg, levels))
}

/// Max ratio of the bilinear estimate (or its negative control) as the
/// separation grows: level `l` pairs `f` in `A_l ∩ {xi > 0}` with `g` in
/// `A_l ∩ {xi < 0}`, so `D = 2 (4^l - 1)^{1/2}`. Uses the finest grid.
pub fn separation_sweep(est: Estimate, cfg: &FuzzConfig) -> Result<RatioReport> {
    cfg.validate()?;
    if !matches!(est, Estimate::BilHalt | Estimate::BilHaltWrong) {
        return config(format!("the separation sweep applies to the bilinear estimate, not {est}"));
    }
    let h = *cfg.grids.last().unwrap_or(&0.25);
    let levels = (0..=JMAX)
        .map(|l| {
            let mut c = cfg.clone();
            c.params = FuzzParams { j1: Some(l), j2: Some(l), d: cfg.params.d, big_d: Some(2.0 * annulus_floor(l)) };
            let grid = fuzz_grid(h)?;
            let trials = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = trial_seed(cfg.seed, est, t);
                    let mut dr = draw(est, &c, seed);
                    dr.f.sign = Sign::Positive;
                    dr.g.sign = Sign::Negative;
                    let f = gen_test_function(&grid, &dr.f)?;
                    let g = gen_test_function(&grid, &dr.g)?;
                    let inputs = EstimateInputs {
                        f: &f,
                        g: &g,
                        j1: l,
                        j2: l,
                        j: 0,
                        d: 0,
                        big_d: 2.0 * annulus_floor(l),
                        omega_sign: Sign::Any,
                        offset: cfg.offset,
                    };
                    Ok(TrialResult { trial: t, seed, ratio: estimate_ratio(est, &inputs, &cfg.zcfg)?, grid: format!("D={:.3}", inputs.big_d) })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((format!("D={:.3}", 2.0 * annulus_floor(l)), trials))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(est, cfg, levels))
}

/// Whether the max ratio grew by more than [`RAISE_FACTOR`] from the first
/// level to the last.
pub fn raised(rep: &RatioReport) -> bool {
    match (rep.refinement_trend.first(), rep.refinement_trend.last()) {
        (Some(a), Some(b)) if a.1 > 0.0 => b.1 > RAISE_FACTOR * a.1,
        (Some(_), Some(b)) => b.1 > 0.0 && rep.refinement_trend.len() > 1,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::dyadic_level;

    fn brute_area(d1: u32, d2: u32, big_d: f64, tau: f64, xi: f64, h: f64) -> f64 {
        let dt = 2.0 * h;
        let mut n = 0;
        for k in -200..=200 {
            let xi1 = k as f64 * h;
            let xi2 = xi - xi1;
            if (xi1 - xi2).abs() < big_d {
                continue;
            }
            for m in -2000..=2000 {
                let t1 = m as f64 * dt;
                if dyadic_level(t1 - xi1 * xi1) == d1 && dyadic_level(tau - t1 - xi2 * xi2) == d2 {
                    n += 1;
                }
            }
        }
        n as f64 * h * dt
    }

    #[test]
    fn area_matches_brute_force() {
        for &(d1, d2, big_d, tau, xi) in &[(0, 0, 0.0, 1.0, 0.0), (2, 1, 0.0, 6.5, 0.5), (3, 0, 4.0, 12.0, -1.0), (1, 1, 2.0, -3.0, 1.5)] {
            let a = measure_area(d1, d2, big_d, tau, xi, 0.25);
            let b = brute_area(d1, d2, big_d, tau, xi, 0.25);
            assert!((a - b).abs() < 1e-12, "{d1} {d2} {big_d} {tau} {xi}: {a} vs {b}");
        }
    }

    #[test]
    fn k_point_holds() {
        assert!(k_point_scan(0.5).unwrap() <= 1.0);
    }

    #[test]
    fn raised_flag() {
        let mut r = RatioReport::single("x", 1.0);
        r.refinement_trend = vec![("a".into(), 1.0), ("b".into(), 1.6)];
        assert!(raised(&r));
        r.refinement_trend = vec![("a".into(), 0.0), ("b".into(), 0.0)];
        assert!(!raised(&r));
    }

    #[test]
    fn grids_must_refine() {
        let cfg = FuzzConfig { grids: vec![0.25, 0.5], ..Default::default() };
        assert_eq!(refinement_sweep(Estimate::BilHalt, &cfg).unwrap_err().exit_code(), 2);
    }
}
