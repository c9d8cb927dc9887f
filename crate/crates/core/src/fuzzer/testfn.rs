//! Seeded nonnegative test functions on dyadic regions.
//!
//! Every function is defined on the continuum through a fixed table of
//! macro-cell values (width 1/2 in `xi`, 1 in `tau` or in `tau - xi^2`), so
//! the same spec sampled on finer lattices gives the same function.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{cell_index, dyadic_level, CellSelector};
use crate::error::{usage, DlabError, Result};
use crate::lattice::{Field, Grid, Representation};

const XI_CELL: f64 = 0.5;
const TAU_CELL: f64 = 1.0;
const XI_CELLS: i64 = 128;
const TAU_CELLS: i64 = 512;
/// Half-width of the strip `|tau - xi^2| < HUG` used by parabola-hugging functions.
pub const HUG: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Uniform,
    ParabolaHugging,
    Column,
    Band,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::Uniform, Kind::ParabolaHugging, Kind::Column, Kind::Band];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Uniform => "uniform",
            Kind::ParabolaHugging => "parabola",
            Kind::Column => "column",
            Kind::Band => "band",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = DlabError;
    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| DlabError::Usage(format!("unknown test-function kind '{s}'")))
    }
}

/// Half-space constraint on `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Any,
    Positive,
    Negative,
}

impl Sign {
    pub fn admits(self, xi: f64) -> bool {
        match self {
            Sign::Any => true,
            Sign::Positive => xi > 0.0,
            Sign::Negative => xi < 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunctionSpec {
    pub cell: CellSelector,
    pub kind: Kind,
    pub seed: u64,
    pub sign: Sign,
}

impl TestFunctionSpec {
    pub fn new(cell: CellSelector, kind: Kind, seed: u64) -> Self {
        TestFunctionSpec { cell, kind, seed, sign: Sign::Any }
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }
}

/// Macro columns `[k/2, (k+1)/2)` lying entirely in the annuli and half-space
/// of the spec.
fn admissible_columns(spec: &TestFunctionSpec) -> Vec<i64> {
    (-XI_CELLS / 2..XI_CELLS / 2)
        .filter(|&k| {
            let a = k as f64 * XI_CELL;
            let b = a + XI_CELL;
            let (lo, hi) = if a >= 0.0 { (a, b) } else if b <= 0.0 { (-b, -a) } else { (0.0, a.abs().max(b)) };
            // the level is monotone in |xi|; b is excluded, so test just inside it
            let hi_in = hi - 1e-9;
            // the left edge is a sample on every fuzz lattice
            spec.sign.admits(a)
                && spec.sign.admits(a + 0.5 * XI_CELL)
                && (spec.sign == Sign::Any || a * b >= 0.0)
                && (dyadic_level(lo)..=dyadic_level(hi_in)).all(|j| spec.cell.j.contains(j))
        })
        .collect()
}

/// Samples the test function on the spectral lattice of `grid`.
pub fn gen_test_function(grid: &Arc<Grid>, spec: &TestFunctionSpec) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let table: Vec<f64> = (0..XI_CELLS * TAU_CELLS).map(|_| rng.gen_range(0.1..=1.0)).collect();
    let amplitude: f64 = rng.gen_range(0.5..=1.0);
    let column = if spec.kind == Kind::Column {
        let cols = admissible_columns(spec);
        if cols.is_empty() {
            return usage(format!("no macro column fits the region of {:?}", spec.cell));
        }
        Some(cols[rng.gen_range(0..cols.len())])
    } else {
        None
    };
    let lookup = |a: f64, b: f64| {
        let i = (a / XI_CELL).floor() as i64;
        let k = (b / TAU_CELL).floor() as i64;
        table[(i.rem_euclid(XI_CELLS) * TAU_CELLS + k.rem_euclid(TAU_CELLS)) as usize]
    };
    let f = Field::from_fn(grid, Representation::Spectral, |tau, xi| {
        if !spec.sign.admits(xi) || !spec.cell.matches(cell_index(tau, xi)) {
            return Complex64::new(0.0, 0.0);
        }
        let v = match spec.kind {
            Kind::Uniform => lookup(xi, tau),
            Kind::ParabolaHugging => {
                let sigma = tau - xi * xi;
                if sigma.abs() < HUG {
                    lookup(xi, sigma)
                } else {
                    0.0
                }
            }
            Kind::Column => {
                if (xi / XI_CELL).floor() as i64 == column.unwrap_or(i64::MIN) {
                    lookup(xi, tau)
                } else {
                    0.0
                }
            }
            Kind::Band => amplitude,
        };
        Complex64::new(v, 0.0)
    });
    if f.is_zero() {
        return usage(format!("test function {} on {:?} has no lattice points", spec.kind, spec.cell));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{restrict_where, IndexRange};
    use crate::fuzzer::fuzz_grid;

    #[test]
    fn reproducible_and_supported() {
        let g = fuzz_grid(0.25).unwrap();
        for kind in Kind::ALL {
            let spec = TestFunctionSpec::new(CellSelector::cell(2, 1), kind, 7).with_sign(Sign::Positive);
            let a = gen_test_function(&g, &spec).unwrap();
            let b = gen_test_function(&g, &spec).unwrap();
            assert_eq!(a.values(), b.values());
            let outside = restrict_where(&a, |c, _, xi| !(c.j == 2 && c.d == 1 && xi > 0.0));
            assert!(outside.is_zero(), "{kind}");
            assert!(a.values().iter().all(|v| v.re >= 0.0 && v.im == 0.0));
        }
    }

    #[test]
    fn hugging_stays_near_parabola() {
        let g = fuzz_grid(0.25).unwrap();
        let spec = TestFunctionSpec::new(CellSelector::annulus(2), Kind::ParabolaHugging, 3);
        let f = gen_test_function(&g, &spec).unwrap();
        assert!(restrict_where(&f, |c, _, _| c.d > 1).is_zero());
    }

    #[test]
    fn same_function_on_finer_lattice() {
        let (c, f) = (fuzz_grid(0.5).unwrap(), fuzz_grid(0.25).unwrap());
        let spec = TestFunctionSpec::new(CellSelector::new(IndexRange::AtMost(2), IndexRange::AtMost(3)), Kind::Uniform, 11);
        let a = gen_test_function(&c, &spec).unwrap();
        let b = gen_test_function(&f, &spec).unwrap();
        for (m, &tau) in c.tau().iter().enumerate().step_by(7) {
            for (i, &xi) in c.xi().iter().enumerate().step_by(3) {
                let (mf, jf) = (f.tau_index(tau).unwrap(), f.xi_index(xi).unwrap());
                assert_eq!(a.at(m, i), b.at(mf, jf));
            }
        }
    }

    #[test]
    fn positive_column_in_lowest_annulus() {
        let g = fuzz_grid(0.5).unwrap();
        for seed in 0..20 {
            let spec = TestFunctionSpec::new(CellSelector::annulus(0), Kind::Column, seed).with_sign(Sign::Positive);
            assert!(!gen_test_function(&g, &spec).unwrap().is_zero());
        }
    }

    #[test]
    fn empty_region_is_usage_error() {
        let g = fuzz_grid(0.5).unwrap();
        let spec = TestFunctionSpec::new(CellSelector::cell(9, 0), Kind::Uniform, 1);
        assert_eq!(gen_test_function(&g, &spec).unwrap_err().exit_code(), 2);
    }
}
