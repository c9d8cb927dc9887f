use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dlab_core::cascade::{cascade_experiment, make_fn, CascadeConfig, Normalize, SpectralData};
use dlab_core::error::{DlabError, Result};
use dlab_core::fuzzer::{fuzz_trials, resonance_defect, Estimate, FuzzConfig, FuzzParams};
use dlab_core::lattice::{
    dlf, make_grid, parseval_defect, to_mode, to_physical, to_spectral, Field, GridSpec, Profile, ProfileDomain,
    Representation,
};
use dlab_core::norms::{besov_norm, cth_norm, hs_norm, w_norm, xsb_norm, y_norm, z_norm_with, ZConfig};
use dlab_core::num_complex::Complex64;
use dlab_core::picard::{compositions, contraction_solve, iterate_a, ContractionConfig, NlsProblem};
use dlab_core::report::NormMethod;

#[derive(Parser)]
#[command(name = "dlab", version, about = "Numerical lab for the quadratic Schrodinger equation iu_t + u_xx = u^2")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one norm of a DLF1 field.
    Norms(NormsArgs),
    /// Contraction solve and partial sums of the iterate expansion.
    Picard(PicardArgs),
    /// Low-frequency cascade table for the band data.
    Cascade(CascadeArgs),
    /// Randomized ratio search for one estimate.
    Fuzz(FuzzArgs),
    /// Fast end-to-end invariant checks.
    Selftest(OutArgs),
}

#[derive(Args)]
struct OutArgs {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct NormsArgs {
    /// DLF1 field file.
    file: PathBuf,
    #[arg(long, value_parser = ["hs", "xsb", "besov", "y", "z", "w"])]
    norm: String,
    #[arg(long, default_value_t = -1.0)]
    s: f64,
    #[arg(long, default_value_t = 0.5)]
    b: f64,
    /// Sum-space method for z and w: heuristic or oracle.
    #[arg(long, default_value = "heuristic")]
    method: NormMethod,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct PicardArgs {
    #[arg(long, value_parser = ["gaussian", "fN"], default_value = "gaussian")]
    data: String,
    /// H^{-1} norm of the Gaussian, or the ball radius r of f_N.
    #[arg(long, default_value_t = 1e-3)]
    amplitude: f64,
    /// Band centre of f_N.
    #[arg(long = "N", default_value_t = 128.0)]
    n: f64,
    /// Number of partial sums.
    #[arg(long = "K", default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1e-2)]
    eps0: f64,
    #[arg(long = "max-iter", default_value_t = 60)]
    max_iter: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct CascadeArgs {
    #[arg(long, default_value_t = -1.25)]
    s: f64,
    #[arg(long, default_value_t = -3.0)]
    sprime: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long = "N-list", value_delimiter = ',', default_value = "128,256,512,1024,2048,4096")]
    n_list: Vec<f64>,
    #[arg(long, default_value = "ball")]
    normalize: Normalize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long)]
    estimate: Estimate,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    j1: Option<u32>,
    #[arg(long)]
    j2: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long = "D")]
    big_d: Option<f64>,
    /// Lattice spacings, coarsest first.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.125")]
    grids: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

/// CSV body plus the trailing config line.
struct Table {
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Table {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Table { w }
    }

    fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        self.w.write_record(fields.into_iter().collect::<Vec<_>>()).expect("in-memory write");
    }

    fn finish(self, config: &str, out: &OutArgs) -> Result<()> {
        let mut buf = self.w.into_inner().map_err(|e| DlabError::Io(e.into_error()))?;
        writeln!(buf, "# config: {config}")?;
        match &out.out {
            Some(p) => fs::write(p, buf)?,
            None => std::io::stdout().write_all(&buf)?,
        }
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn norms(a: &NormsArgs) -> Result<()> {
    let field = dlf::load(&a.file)?;
    let spectral = || to_spectral(&field);
    let zcfg = ZConfig::with_method(a.method);
    let (value, method) = match a.norm.as_str() {
        "hs" => {
            let mode = to_mode(&field)?;
            let t = mode.grid().t();
            (cth_norm(&mode, a.s, (t[0], t[t.len() - 1]))?, NormMethod::Direct)
        }
        "xsb" => (xsb_norm(&spectral()?, a.s, a.b), NormMethod::Direct),
        "besov" => (besov_norm(&spectral()?), NormMethod::Direct),
        "y" => (y_norm(&spectral()?), NormMethod::Direct),
        "z" => {
            let r = z_norm_with(&spectral()?, &zcfg);
            (r.value, r.method)
        }
        _ => {
            let r = w_norm(&spectral()?, &zcfg);
            (r.value, r.method)
        }
    };
    let mut t = Table::new(&["norm", "value", "method"]);
    t.row([a.norm.clone(), num(value), method.to_string()]);
    let config = format!(
        "norms;file={};norm={};s={};b={};method={};grid={}",
        a.file.display(),
        a.norm,
        a.s,
        a.b,
        a.method,
        field.grid().spec().canonical()
    );
    t.finish(&config, &a.out)
}

fn picard(a: &PicardArgs) -> Result<()> {
    let (spec, f) = match a.data.as_str() {
        "gaussian" => {
            let spec = GridSpec::new(8.0, 256, 16.0, 4096);
            let grid = make_grid(spec)?;
            let shape = Profile::from_fn(&grid, ProfileDomain::Frequency, |xi| Complex64::new((-xi * xi).exp(), 0.0));
            let f = shape.scaled(Complex64::new(a.amplitude / hs_norm(&shape, -1.0), 0.0));
            (spec, f)
        }
        _ => {
            let spec = GridSpec::new(2.0 * PI, 2048, 2.5, 2048);
            let grid = make_grid(spec)?;
            let band = make_fn(a.amplitude, a.n, Normalize::Ball, -1.0, 0.25)?;
            (spec, Profile::from_fn(&grid, ProfileDomain::Frequency, |xi| band.eval(xi)))
        }
    };
    let problem = NlsProblem::new(f.grid().clone());
    let cfg = ContractionConfig { eps0: a.eps0, max_iter: a.max_iter, tol: a.tol, ..Default::default() };
    let outcome = contraction_solve(&problem, &f, &cfg, a.k)?;
    let mut t = Table::new(&["n", "iterate_norm", "diff_norm", "gap"]);
    for (i, (iterate, gap)) in outcome.partial_sums.iter().enumerate() {
        let diff = outcome.diffs.get(i).map(|&d| num(d)).unwrap_or_default();
        t.row([(i + 1).to_string(), num(*iterate), diff, num(*gap)]);
    }
    let config = format!(
        "picard;data={};amplitude={};N={};K={};tol={:e};eps0={:e};max_iter={};residual={};grid={}",
        a.data,
        a.amplitude,
        a.n,
        a.k,
        a.tol,
        a.eps0,
        a.max_iter,
        num(outcome.residual),
        spec.canonical()
    );
    t.finish(&config, &a.out)
}

fn cascade(a: &CascadeArgs) -> Result<()> {
    let cfg = CascadeConfig { r: a.r, s: a.s, s_prime: a.sprime, n_list: a.n_list.clone(), normalize: a.normalize };
    let rep = cascade_experiment(&cfg)?;
    let mut t = Table::new(&["N", "hs_data_norm", "sup_t_a2_norm", "a2_at_witness_t", "phase_min", "beta_running"]);
    for r in &rep.rows {
        t.row([
            format!("{}", r.n),
            num(r.hs_data_norm),
            num(r.sup_t_a2_norm),
            num(r.a2_at_witness_t),
            num(r.phase_min),
            num(r.beta_running),
        ]);
    }
    eprintln!(
        "data slope {:.4}, witness variation {:.4}: {}",
        rep.data_slope,
        rep.witness_variation,
        if rep.pass { "PASS" } else { "FAIL" }
    );
    t.finish(&format!("cascade;{}", cfg.canonical()), &a.out)
}

fn fuzz(a: &FuzzArgs) -> Result<()> {
    let cfg = FuzzConfig {
        trials: a.trials,
        seed: a.seed,
        grids: a.grids.clone(),
        params: FuzzParams { j1: a.j1, j2: a.j2, d: a.d, big_d: a.big_d },
        ..Default::default()
    };
    cfg.validate()?;
    let mut t = Table::new(&["estimate", "trial", "ratio", "seed", "grid"]);
    for &h in &cfg.grids {
        for r in fuzz_trials(a.estimate, &cfg, h)? {
            t.row([a.estimate.to_string(), r.trial.to_string(), num(r.ratio), r.seed.to_string(), r.grid]);
        }
    }
    t.finish(&format!("fuzz;estimate={};{}", a.estimate, cfg.canonical()), &a.out)
}

fn selftest(out: &OutArgs) -> Result<bool> {
    let spec = GridSpec::new(8.0, 64, 8.0, 64);
    let grid = make_grid(spec)?;
    let field = Field::from_fn(&grid, Representation::Physical, |t, x| {
        Complex64::new((-(x * x) - t * t / 4.0).exp(), (x - 0.3 * t).sin() * (-(x * x) / 2.0).exp())
    });
    let mut checks: Vec<(&str, f64, f64)> = Vec::new();
    checks.push(("parseval", parseval_defect(&field)?, 1e-12));
    let back = to_physical(&to_spectral(&field)?)?;
    let roundtrip = field.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    checks.push(("roundtrip", roundtrip / field.max_abs(), 1e-12));
    let zero = Field::zeros(&grid, Representation::Spectral);
    checks.push(("zero-norms", xsb_norm(&zero, -1.0, 0.5) + besov_norm(&zero) + y_norm(&zero), 0.0));
    let problem = NlsProblem::new(grid.clone());
    let f0 = Profile::zeros(&grid, ProfileDomain::Frequency);
    let a = iterate_a(&problem, &f0, 3)?;
    checks.push(("zero-data-iterates", a.iter().map(|u| u.max_abs()).sum(), 0.0));
    checks.push(("compositions-4", (compositions(4, 2).len() as f64 - 3.0).abs(), 0.0));
    checks.push(("resonance", resonance_defect(3.0, -1.0, 2.5, 0.5), 1e-12));
    let mut t = Table::new(&["check", "value", "tolerance", "pass"]);
    let mut ok = true;
    for (name, v, tol) in checks {
        let pass = v <= tol;
        ok &= pass;
        t.row([name.to_string(), num(v), num(tol), pass.to_string()]);
    }
    t.finish(&format!("selftest;grid={}", spec.canonical()), out)?;
    Ok(ok)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("DLAB_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| DlabError::Config(format!("DLAB_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| DlabError::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<bool> {
        init_threads()?;
        match &cli.command {
            Command::Norms(a) => norms(a)?,
            Command::Picard(a) => picard(a)?,
            Command::Cascade(a) => cascade(a)?,
            Command::Fuzz(a) => fuzz(a)?,
            Command::Selftest(o) => return selftest(o),
        }
        Ok(true)
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("dlab: selftest failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("dlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
