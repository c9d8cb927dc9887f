//! Function-space norms on the spectral lattice: `H^s`, `C^0_t H^s`,
//! `X^{s,b}`, the Besov refinement `X^{-1,1/2,1}`, `Y`, the sum space `Z`
//! and its weighted version `W`.
//!
//! Discrete measures: `L^1_tau` and `L^2_tau` sums carry `dtau`, `L^2_xi`
//! sums carry `dxi`, so values converge under refinement.

mod checks;
mod sum_space;

use num_complex::Complex64;

use crate::dyadic::{japanese, DyadicCell};
use crate::error::{usage, Result};
use crate::lattice::{transform_profile, Field, Profile, ProfileDomain};

pub use checks::{embedding_check, pasting_check, x_trivial_ratio, Embedding, PasteSide};
pub use sum_space::{
    paste_split, w_norm, weight, weighted, z_norm, z_norm_with, SplitObjective, ZConfig, DEFAULT_OFFSET,
};

/// `(sum_k <xi_k>^{2s} |f^(xi_k)|^2 dxi)^{1/2}` over explicit samples.
pub fn hs_norm_samples(xi: &[f64], values: &[Complex64], dxi: f64, s: f64) -> f64 {
    xi.iter()
        .zip(values)
        .map(|(&x, v)| japanese(x).powf(2.0 * s) * v.norm_sqr())
        .sum::<f64>()
        .mul_add(dxi, 0.0)
        .sqrt()
}

/// `H^s` norm of a spatial profile (transformed first if given in `x`).
pub fn hs_norm(f: &Profile, s: f64) -> f64 {
    let hat;
    let f = match f.domain() {
        ProfileDomain::Frequency => f,
        ProfileDomain::Space => {
            hat = transform_profile(f);
            &hat
        }
    };
    hs_norm_samples(f.grid().xi(), f.values(), f.grid().dxi(), s)
}

/// `max_{t in [t0, t1]} ||u^(t)||_{H^s}` over the time samples in range.
pub fn cth_norm(u: &Field, s: f64, t_range: (f64, f64)) -> Result<f64> {
    let g = u.grid();
    let rows: Vec<usize> = (0..g.nt()).filter(|&n| g.t()[n] >= t_range.0 && g.t()[n] <= t_range.1).collect();
    if rows.is_empty() {
        return usage(format!("no time samples in [{}, {}]", t_range.0, t_range.1));
    }
    Ok(rows
        .into_iter()
        .map(|n| hs_norm_samples(g.xi(), u.row(n), g.dxi(), s))
        .fold(0.0, f64::max))
}

/// `||<xi>^s <tau - xi^2>^b F||_{L^2}` with measure `dtau dxi`.
pub fn xsb_norm(f: &Field, s: f64, b: f64) -> f64 {
    let g = f.grid();
    let nx = g.nx();
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
        .map(|(i, v)| {
            let (tau, xi) = (g.tau()[i / nx], g.xi()[i % nx]);
            japanese(xi).powf(2.0 * s) * japanese(tau - xi * xi).powf(2.0 * b) * v.norm_sqr()
        })
        .sum();
    (sum * g.dtau() * g.dxi()).sqrt()
}

/// Per-cell `L^2` masses `M_{jd} = ||F||_{L^2(A_j ∩ B_d)}`.
#[derive(Debug, Clone, Default)]
pub struct CellMasses {
    /// Indexed `[j][d]`.
    pub mass: Vec<Vec<f64>>,
}

impl CellMasses {
    pub fn of(f: &Field) -> CellMasses {
        let g = f.grid();
        let table = g.cells().clone();
        let mut sq = vec![vec![0.0; table.dmax() as usize + 1]; table.jmax() as usize + 1];
        for (i, v) in f.values().iter().enumerate() {
            let a = v.norm_sqr();
            if a > 0.0 {
                let c = table.at_flat(i);
                sq[c.j as usize][c.d as usize] += a;
            }
        }
        let w = g.dtau() * g.dxi();
        CellMasses { mass: sq.into_iter().map(|r| r.into_iter().map(|a| (a * w).sqrt()).collect()).collect() }
    }

    pub fn get(&self, c: DyadicCell) -> f64 {
        self.mass.get(c.j as usize).and_then(|r| r.get(c.d as usize)).copied().unwrap_or(0.0)
    }

    /// Cells with nonzero mass.
    pub fn support(&self) -> Vec<DyadicCell> {
        let mut out = Vec::new();
        for (j, row) in self.mass.iter().enumerate() {
            for (d, &m) in row.iter().enumerate() {
                if m > 0.0 {
                    out.push(DyadicCell { j: j as u32, d: d as u32 });
                }
            }
        }
        out
    }
}

/// `(sum_j 2^{-2j} (sum_d 2^{d/2} M_{jd})^2)^{1/2}` from precomputed masses.
pub fn besov_from_masses(m: &CellMasses) -> f64 {
    m.mass
        .iter()
        .enumerate()
        .map(|(j, row)| {
            let inner: f64 = row.iter().enumerate().map(|(d, &x)| 2f64.powf(d as f64 / 2.0) * x).sum();
            4f64.powi(-(j as i32)) * inner * inner
        })
        .sum::<f64>()
        .sqrt()
}

/// The Besov-refined norm `||F||_{X^{-1,1/2,1}}`.
pub fn besov_norm(f: &Field) -> f64 {
    besov_from_masses(&CellMasses::of(f))
}

/// `(sum_k <xi_k>^{-2} (sum_m |F| dtau)^2 dxi)^{1/2}`.
pub fn l2xi_l1tau_weighted(f: &Field) -> f64 {
    let g = f.grid();
    let nx = g.nx();
    let mut col = vec![0.0; nx];
    for row in f.values().chunks(nx) {
        col.iter_mut().zip(row).for_each(|(c, v)| *c += v.norm());
    }
    let dtau = g.dtau();
    (g.xi()
        .iter()
        .zip(&col)
        .map(|(&xi, &c)| (c * dtau).powi(2) / (1.0 + xi * xi))
        .sum::<f64>()
        * g.dxi())
    .sqrt()
}

/// `||F||_{L^1_xi L^1_tau}`.
pub fn l1_norm(f: &Field) -> f64 {
    let g = f.grid();
    f.values().iter().map(|v| v.norm()).sum::<f64>() * g.dtau() * g.dxi()
}

/// `||F||_{L^1_xi L^2_tau}`.
pub fn l1xi_l2tau(f: &Field) -> f64 {
    let g = f.grid();
    let nx = g.nx();
    let mut col = vec![0.0; nx];
    for row in f.values().chunks(nx) {
        col.iter_mut().zip(row).for_each(|(c, v)| *c += v.norm_sqr());
    }
    col.iter().map(|c| (c * g.dtau()).sqrt()).sum::<f64>() * g.dxi()
}

/// `||F||_Y = ||<xi>^{-1} F||_{L^2_xi L^1_tau} + ||F||_{L^2}`.
pub fn y_norm(f: &Field) -> f64 {
    l2xi_l1tau_weighted(f) + f.l2_norm()
}
