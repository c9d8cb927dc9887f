//! Randomized checks of the dyadic bilinear estimates.

mod estimates;
mod resonance;
mod sweep;
mod testfn;

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{resolution, usage, Result};
use crate::lattice::{make_grid, plan, Field, Grid, GridSpec, Representation};

pub use estimates::{estimate_ratio, Estimate, EstimateInputs};
pub use resonance::{resonance_defect, resonance_estimate_margin, resonance_scan, ResonanceScan};
pub use sweep::{
    fuzz_trials, k_point_scan, measure_area, raised, refinement_sweep, separation_sweep, FuzzConfig, FuzzParams, TrialResult,
    RAISE_FACTOR,
};
pub use testfn::{gen_test_function, Kind, Sign, TestFunctionSpec, HUG};

/// Largest `|xi|` the fuzz lattices must hold (inputs in `A_{<=2}` and their sums).
pub const FUZZ_XI_EXTENT: f64 = 16.0;
/// Largest `|tau|` they must hold.
pub const FUZZ_TAU_EXTENT: f64 = 160.0;

/// Spectral lattice with `dxi = h`, `dtau = 2h`, holding `|xi| < 16` and
/// `|tau| <= 160`.
pub fn fuzz_grid(h: f64) -> Result<Arc<Grid>> {
    if !(h > 0.0 && h <= 1.0) {
        return usage(format!("fuzz spacing must lie in (0, 1], got {h}"));
    }
    let nx = ((2.0 * FUZZ_XI_EXTENT / h).round() as usize).next_power_of_two().max(4);
    let nt = ((2.0 * FUZZ_TAU_EXTENT / (2.0 * h)).ceil() as usize).next_power_of_two().max(4);
    make_grid(GridSpec::new(std::f64::consts::PI / h, nx, std::f64::consts::PI / (2.0 * h), nt))
}

/// Rows and columns holding nonzero values: `(r0, r1, c0, c1)`, inclusive.
fn bbox(f: &Field) -> Option<(usize, usize, usize, usize)> {
    let nx = f.nx();
    let mut b: Option<(usize, usize, usize, usize)> = None;
    for (k, v) in f.values().iter().enumerate() {
        if v.re == 0.0 && v.im == 0.0 {
            continue;
        }
        let (r, c) = (k / nx, k % nx);
        b = Some(match b {
            None => (r, r, c, c),
            Some((r0, r1, c0, c1)) => (r0.min(r), r1.max(r), c0.min(c), c1.max(c)),
        });
    }
    b
}

fn fft2(buf: &mut [Complex64], rows: usize, cols: usize, dir: FftDirection) {
    let pr = plan(cols, dir);
    for row in buf.chunks_mut(cols) {
        pr.process(row);
    }
    let pc = plan(rows, dir);
    let mut col = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            col[r] = buf[r * cols + c];
        }
        pc.process(&mut col);
        for r in 0..rows {
            buf[r * cols + c] = col[r];
        }
    }
}

/// Spacetime convolution `(f * g)(tau, xi) = ∫∫ f(tau1, xi1) g(tau - tau1, xi - xi1)`,
/// as a lattice sum with weight `dtau dxi`, by zero-padded FFTs over the
/// support boxes. Output mass that would leave the lattice is a resolution error.
pub fn convolve(f: &Field, g: &Field) -> Result<Field> {
    f.check_compatible(g)?;
    f.expect(Representation::Spectral)?;
    let grid = f.grid().clone();
    let (nt, nx) = (f.nt(), f.nx());
    let (Some(bf), Some(bg)) = (bbox(f), bbox(g)) else {
        return Ok(Field::zeros(&grid, Representation::Spectral));
    };
    let (rf, cf) = (bf.1 - bf.0 + 1, bf.3 - bf.2 + 1);
    let (rg, cg) = (bg.1 - bg.0 + 1, bg.3 - bg.2 + 1);
    let (rows, cols) = ((rf + rg - 1).next_power_of_two(), (cf + cg - 1).next_power_of_two());
    let load = |src: &Field, b: (usize, usize, usize, usize)| {
        let mut buf = vec![Complex64::new(0.0, 0.0); rows * cols];
        for r in b.0..=b.1 {
            let row = src.row(r);
            buf[(r - b.0) * cols..(r - b.0) * cols + (b.3 - b.2 + 1)].copy_from_slice(&row[b.2..=b.3]);
        }
        buf
    };
    let mut a = load(f, bf);
    let mut b = load(g, bg);
    fft2(&mut a, rows, cols, FftDirection::Forward);
    fft2(&mut b, rows, cols, FftDirection::Forward);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    fft2(&mut a, rows, cols, FftDirection::Inverse);
    let grid_ref = &grid;
    let scale = grid_ref.dtau() * grid_ref.dxi() / (rows * cols) as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); nt * nx];
    let peak = a.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    for i in 0..rf + rg - 1 {
        for k in 0..cf + cg - 1 {
            let v = a[i * cols + k];
            let r = (bf.0 + bg.0 + i) as i64 - (nt / 2) as i64;
            let c = (bf.2 + bg.2 + k) as i64 - (nx / 2) as i64;
            if (0..nt as i64).contains(&r) && (0..nx as i64).contains(&c) {
                out[r as usize * nx + c as usize] = v * scale;
            } else if v.norm() > 1e-12 * peak {
                return resolution("convolution output leaves the lattice; enlarge the grid");
            }
        }
    }
    Field::from_values(&grid, Representation::Spectral, out)
}
