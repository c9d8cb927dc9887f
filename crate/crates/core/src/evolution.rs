//! Cutoffs, the free propagator, and the truncated Duhamel operators
//! `L f = eta(t) e^{it d_xx} f` and
//! `N_2(u, v) = eta(t) e^{it d_xx} ∫ a(s) e^{-is d_xx}(uv)(s) ds + ∫ a(t-s) e^{i(t-s) d_xx}(uv)(s) ds`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;

use crate::error::{resolution, usage, Result};
use crate::lattice::{plan, Field, Profile, ProfileDomain, Representation};

/// Relative level below which spectral samples count as outside the band.
const BAND_TOL: f64 = 1e-13;

/// Smooth even cutoff: 1 on `|t| <= plateau`, 0 on `|t| >= support`.
///
/// The ramp is `psi(1-u) / (psi(1-u) + psi(u))` with `psi(x) = e^{-1/x}`,
/// which is C-infinity at both ends of the ramp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    pub plateau: f64,
    pub support: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        BumpProfile { plateau: 1.0, support: 2.0 }
    }
}

fn psi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

impl BumpProfile {
    pub fn new(plateau: f64, support: f64) -> Result<Self> {
        if !(0.0 < plateau && plateau < support && support.is_finite()) {
            return crate::error::config(format!("bump needs 0 < plateau < support, got {plateau}, {support}"));
        }
        Ok(BumpProfile { plateau, support })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = t.abs();
        if x <= self.plateau {
            1.0
        } else if x >= self.support {
            0.0
        } else {
            let u = (x - self.plateau) / (self.support - self.plateau);
            let (p, q) = (psi(1.0 - u), psi(u));
            p / (p + q)
        }
    }

    pub fn describe(&self) -> String {
        format!("eta:plateau={},support={},ramp=exp(-1/x)", self.plateau, self.support)
    }
}

/// The operators `L` and `N_2` for a given cutoff.
#[derive(Debug, Clone, Copy, Default)]
pub struct Evolution {
    pub eta: BumpProfile,
}

impl Evolution {
    pub fn new(eta: BumpProfile) -> Self {
        Evolution { eta }
    }

    pub fn eta(&self, t: f64) -> f64 {
        self.eta.eval(t)
    }

    /// `a(t) = sgn(t) eta(t/5) / 2`, with `a(0) = 0`.
    pub fn a(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            0.5 * t.signum() * self.eta.eval(t / 5.0)
        }
    }

    /// `L f`: the mode field `eta(t) e^{-it xi^2} f^(xi)`.
    pub fn apply_l(&self, fhat: &Profile) -> Result<Field> {
        fhat.expect(ProfileDomain::Frequency)?;
        let grid = fhat.grid();
        let xi = grid.xi();
        let mut out = Field::zeros(grid, Representation::Mode);
        let nx = grid.nx();
        out.values_mut().par_chunks_mut(nx).zip(grid.t().par_iter()).for_each(|(row, &t)| {
            let e = self.eta(t);
            if e == 0.0 {
                return;
            }
            for ((o, &x), f) in row.iter_mut().zip(xi).zip(fhat.values()) {
                *o = Complex64::from_polar(e, -t * x * x) * f;
            }
        });
        Ok(out)
    }

    /// `N_2(u, v)` on mode fields. Time integrals are lattice sums with
    /// weight `dt` (the trapezoid rule, since the integrands vanish at the
    /// window edges); the second term is a linear time convolution per
    /// frequency, done with zero-padded FFTs.
    pub fn apply_n2(&self, u: &Field, v: &Field) -> Result<Field> {
        u.expect(Representation::Mode)?;
        u.check_compatible(v)?;
        let grid = u.grid().clone();
        let (nx, nt, dt) = (grid.nx(), grid.nt(), grid.dt());
        let product = product_field(u, v)?;
        let t = grid.t();
        let xi = grid.xi();

        // term 1: eta(t) e^{-it xi^2} sum_s a(s) e^{is xi^2} P(s) dt
        let mut moment = vec![Complex64::new(0.0, 0.0); nx];
        for (n, row) in product.values().chunks(nx).enumerate() {
            let a = self.a(t[n]);
            if a == 0.0 {
                continue;
            }
            for ((m, p), &x) in moment.iter_mut().zip(row).zip(xi) {
                *m += Complex64::from_polar(a * dt, t[n] * x * x) * p;
            }
        }

        // term 2: sum_s a(t - s) e^{-i(t-s) xi^2} P(s) dt, one column at a time,
        // restricted to the rows where P and the kernel can be nonzero
        let zero = Complex64::new(0.0, 0.0);
        let live: Vec<usize> = (0..nt)
            .filter(|&n| product.row(n).iter().any(|c| c.re != 0.0 || c.im != 0.0))
            .collect();
        let mut columns = vec![vec![zero; nt]; nx];
        if let (Some(&n0), Some(&n1)) = (live.first(), live.last()) {
            let reach = 5.0 * self.eta.support;
            let qmax = ((reach / dt).ceil() as usize).min(nt - 1);
            let sig_len = n1 - n0 + 1;
            let ker_len = 2 * qmax + 1;
            let size = (sig_len + ker_len).next_power_of_two();
            let fwd = plan(size, FftDirection::Forward);
            let inv = plan(size, FftDirection::Inverse);
            let kernel_a: Vec<f64> = (0..ker_len).map(|q| self.a((q as f64 - qmax as f64) * dt)).collect();
            columns.par_iter_mut().enumerate().for_each(|(k, out)| {
                let col: Vec<Complex64> = (n0..=n1).map(|n| product.values()[n * nx + k]).collect();
                if col.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                    return;
                }
                let x2 = xi[k] * xi[k];
                let mut kb = vec![zero; size];
                for (q, &a) in kernel_a.iter().enumerate() {
                    if a != 0.0 {
                        kb[q] = Complex64::from_polar(a, -(q as f64 - qmax as f64) * dt * x2);
                    }
                }
                let mut sb = vec![zero; size];
                sb[..sig_len].copy_from_slice(&col);
                fwd.process(&mut kb);
                fwd.process(&mut sb);
                kb.iter_mut().zip(&sb).for_each(|(a, b)| *a *= b);
                inv.process(&mut kb);
                // full-convolution index i is output row n0 + i - qmax
                let scale = dt / size as f64;
                for (i, v) in kb.iter().take(sig_len + ker_len - 1).enumerate() {
                    let m = n0 as i64 + i as i64 - qmax as i64;
                    if (0..nt as i64).contains(&m) {
                        out[m as usize] = v * scale;
                    }
                }
            });
        }

        let mut out = Field::zeros(&grid, Representation::Mode);
        for (n, row) in out.values_mut().chunks_mut(nx).enumerate() {
            let e = self.eta(t[n]);
            for (k, o) in row.iter_mut().enumerate() {
                let mut val = columns[k][n];
                if e != 0.0 {
                    val += Complex64::from_polar(e, -t[n] * xi[k] * xi[k]) * moment[k];
                }
                *o = val;
            }
        }
        Ok(out)
    }
}

/// `e^{-it xi^2} f^(xi)`.
pub fn propagate(fhat: &Profile, t: f64) -> Result<Profile> {
    fhat.expect(ProfileDomain::Frequency)?;
    let xi = fhat.grid().xi();
    Ok(fhat.with_values(
        ProfileDomain::Frequency,
        fhat.values().iter().zip(xi).map(|(f, &x)| Complex64::from_polar(1.0, -t * x * x) * f).collect(),
    ))
}

/// Per-column peak magnitude over all rows, as `(|k|, value / peak)`,
/// skipping columns below the band level.
fn column_profile(f: &Field, peak: f64) -> Vec<(usize, f64)> {
    let nx = f.nx();
    let mut m = vec![0.0f64; nx];
    for row in f.values().chunks(nx) {
        m.iter_mut().zip(row).for_each(|(a, v)| *a = a.max(v.norm()));
    }
    let half = nx / 2;
    m.into_iter()
        .enumerate()
        .map(|(i, a)| ((i as i64 - half as i64).unsigned_abs() as usize, a / peak))
        .filter(|&(_, a)| a > BAND_TOL)
        .collect()
}

/// Largest `|k1| + |k2|` over column pairs whose magnitudes multiply to
/// more than the band level (relative to the product of peaks).
fn product_band(u: &[(usize, f64)], v: &[(usize, f64)]) -> usize {
    // widest |k| of v at or above each magnitude, v sorted by magnitude
    let mut vs = v.to_vec();
    vs.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut reach = Vec::with_capacity(vs.len());
    let mut widest = 0;
    for &(k, a) in &vs {
        widest = widest.max(k);
        reach.push((a, widest));
    }
    u.iter()
        .filter_map(|&(k1, a1)| {
            let need = BAND_TOL / a1;
            // entries of `reach` with magnitude > need form a prefix
            let n = reach.partition_point(|&(a, _)| a > need);
            (n > 0).then(|| k1 + reach[n - 1].1)
        })
        .max()
        .unwrap_or(0)
}

/// Spectrum of the pointwise product, `(uv)^(xi) = (dxi / 2pi) sum u^(xi1) v^(xi - xi1)`,
/// for every time row of two mode fields. The convolution is linear (zero
/// padded), and fails when the product band would not fit on the lattice.
pub fn product_field(u: &Field, v: &Field) -> Result<Field> {
    u.expect(Representation::Mode)?;
    u.check_compatible(v)?;
    let grid = u.grid().clone();
    let nx = grid.nx();
    let (pu, pv) = (u.max_abs(), v.max_abs());
    if pu == 0.0 || pv == 0.0 {
        return Ok(Field::zeros(&grid, Representation::Mode));
    }
    let band = product_band(&column_profile(u, pu), &column_profile(v, pv));
    if band > nx / 2 - 1 {
        return resolution(format!(
            "product band |k| <= {} exceeds the lattice half-width {} (increase Nx or dxi)",
            band,
            nx / 2 - 1
        ));
    }
    let weight = grid.dxi() / (2.0 * std::f64::consts::PI);
    let size = 2 * nx;
    let fwd = plan(size, FftDirection::Forward);
    let inv = plan(size, FftDirection::Inverse);
    let mut out = vec![Complex64::new(0.0, 0.0); nx * grid.nt()];
    out.par_chunks_mut(nx)
        .zip(u.values().par_chunks(nx).zip(v.values().par_chunks(nx)))
        .for_each(|(o, (ru, rv))| {
            if ru.iter().all(|z| z.re == 0.0 && z.im == 0.0) || rv.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                return;
            }
            o.copy_from_slice(&linear_convolve(ru, rv, &*fwd, &*inv));
            o.iter_mut().for_each(|z| *z *= weight);
        });
    Field::from_values(&grid, Representation::Mode, out)
}

/// Linear convolution of two centered spectra, recentred: output index `i`
/// holds `sum_{i1 + i2 = i + n/2} a[i1] b[i2]`.
fn linear_convolve(a: &[Complex64], b: &[Complex64], fwd: &dyn rustfft::Fft<f64>, inv: &dyn rustfft::Fft<f64>) -> Vec<Complex64> {
    let n = a.len();
    let size = 2 * n;
    let mut pa = vec![Complex64::new(0.0, 0.0); size];
    let mut pb = vec![Complex64::new(0.0, 0.0); size];
    pa[..n].copy_from_slice(a);
    pb[..n].copy_from_slice(b);
    fwd.process(&mut pa);
    fwd.process(&mut pb);
    pa.iter_mut().zip(&pb).for_each(|(x, y)| *x *= y);
    inv.process(&mut pa);
    let s = 1.0 / size as f64;
    (0..n).map(|i| pa[i + n / 2] * s).collect()
}

/// `| ∫_0^t g - eta(t) ∫ a(s) g(s) ds - ∫ a(t - s) g(s) ds |`, all
/// integrals by the trapezoid rule with step `h` on `[-12, 12]` (which
/// contains the support of both cutoff terms for `0 <= t <= 1`).
pub fn duhamel_identity_defect(ev: &Evolution, g: impl Fn(f64) -> f64, t: f64, h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return usage(format!("identity holds for 0 <= t <= 1, got {t}"));
    }
    let reach = 10.0 * ev.eta.support / 2.0 + 2.0;
    let n = (2.0 * reach / h).ceil() as usize;
    let h = 2.0 * reach / n as f64;
    let trap = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| {
        let m = ((hi - lo) / h).ceil().max(1.0) as usize;
        let step = (hi - lo) / m as f64;
        (0..=m)
            .map(|i| {
                let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                w * f(lo + i as f64 * step)
            })
            .sum::<f64>()
            * step
    };
    let lhs = if t == 0.0 { 0.0 } else { trap(&|s| g(s), 0.0, t) };
    let first = ev.eta(t) * trap(&|s| ev.a(s) * g(s), -reach, reach);
    let second = trap(&|s| ev.a(t - s) * g(s), -reach, reach);
    Ok((lhs - first - second).abs())
}
