//! Dyadic annuli `A_j = {2^j <= <xi> < 2^{j+1}}`, parabolic shells
//! `B_d = {2^d <= <tau - xi^2> < 2^{d+1}}`, and selection masks built from them.

use std::fmt;

use num_complex::Complex64;

use crate::lattice::{Field, Grid};

/// `floor(log2 <y>)` with `<y> = (1 + y^2)^{1/2}`, exact at the dyadic edges.
pub fn dyadic_level(y: f64) -> u32 {
    let q = 1.0 + y * y;
    if !q.is_finite() {
        return 1023;
    }
    // 4^j <= q < 4^{j+1}; the float log only seeds the search
    let mut j = (0.5 * q.log2()).floor().max(0.0) as i32;
    while j > 0 && pow4(j) > q {
        j -= 1;
    }
    while pow4(j + 1) <= q {
        j += 1;
    }
    j as u32
}

fn pow4(j: i32) -> f64 {
    2f64.powi(2 * j)
}

/// `<y>`.
pub fn japanese(y: f64) -> f64 {
    (1.0 + y * y).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCell {
    pub j: u32,
    pub d: u32,
}

impl fmt::Display for DyadicCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}B{}", self.j, self.d)
    }
}

pub fn cell_index(tau: f64, xi: f64) -> DyadicCell {
    DyadicCell { j: dyadic_level(xi), d: dyadic_level(tau - xi * xi) }
}

/// Index range applied to one dyadic axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexRange {
    Any,
    Exact(u32),
    AtMost(u32),
    AtLeast(u32),
    Greater(u32),
    Less(u32),
    /// Inclusive on both ends.
    Between(u32, u32),
}

impl IndexRange {
    pub fn contains(self, i: u32) -> bool {
        match self {
            IndexRange::Any => true,
            IndexRange::Exact(a) => i == a,
            IndexRange::AtMost(a) => i <= a,
            IndexRange::AtLeast(a) => i >= a,
            IndexRange::Greater(a) => i > a,
            IndexRange::Less(a) => i < a,
            IndexRange::Between(a, b) => a <= i && i <= b,
        }
    }
}

/// Selects `A_{j-range} ∩ B_{d-range}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellSelector {
    pub j: IndexRange,
    pub d: IndexRange,
}

impl CellSelector {
    pub fn new(j: IndexRange, d: IndexRange) -> Self {
        CellSelector { j, d }
    }
    pub fn all() -> Self {
        Self::new(IndexRange::Any, IndexRange::Any)
    }
    pub fn cell(j: u32, d: u32) -> Self {
        Self::new(IndexRange::Exact(j), IndexRange::Exact(d))
    }
    pub fn annulus(j: u32) -> Self {
        Self::new(IndexRange::Exact(j), IndexRange::Any)
    }
    pub fn shell(d: u32) -> Self {
        Self::new(IndexRange::Any, IndexRange::Exact(d))
    }
    pub fn matches(&self, c: DyadicCell) -> bool {
        self.j.contains(c.j) && self.d.contains(c.d)
    }
}

/// Dyadic indices of every lattice point of a grid: `j` per frequency column
/// and `d` per `(tau, xi)` point.
#[derive(Debug)]
pub struct CellTable {
    nx: usize,
    j: Vec<u32>,
    d: Vec<u32>,
    jmax: u32,
    dmax: u32,
}

impl CellTable {
    pub fn build(grid: &Grid) -> CellTable {
        let j: Vec<u32> = grid.xi().iter().map(|&xi| dyadic_level(xi)).collect();
        let mut d = Vec::with_capacity(grid.nx() * grid.nt());
        for &tau in grid.tau() {
            d.extend(grid.xi().iter().map(|&xi| dyadic_level(tau - xi * xi)));
        }
        let jmax = j.iter().copied().max().unwrap_or(0);
        let dmax = d.iter().copied().max().unwrap_or(0);
        CellTable { nx: grid.nx(), j, d, jmax, dmax }
    }

    pub fn j_of_col(&self, col: usize) -> u32 {
        self.j[col]
    }

    pub fn at(&self, row: usize, col: usize) -> DyadicCell {
        DyadicCell { j: self.j[col], d: self.d[row * self.nx + col] }
    }

    pub fn at_flat(&self, idx: usize) -> DyadicCell {
        DyadicCell { j: self.j[idx % self.nx], d: self.d[idx] }
    }

    pub fn jmax(&self) -> u32 {
        self.jmax
    }

    pub fn dmax(&self) -> u32 {
        self.dmax
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Boolean mask of the lattice points matched by `sel`.
    pub fn mask(&self, sel: &CellSelector) -> Vec<bool> {
        (0..self.d.len()).map(|i| sel.matches(self.at_flat(i))).collect()
    }
}

/// Zeroes `f` outside the cells matched by `sel`. Positions are read as
/// spectral `(tau, xi)` lattice points.
pub fn restrict(f: &Field, sel: &CellSelector) -> Field {
    let table = f.grid().cells().clone();
    let zero = Complex64::new(0.0, 0.0);
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| if sel.matches(table.at_flat(i)) { v } else { zero })
        .collect();
    f.with_values(values)
}

/// Zeroes `f` wherever `keep(cell, tau, xi)` is false.
pub fn restrict_where(f: &Field, keep: impl Fn(DyadicCell, f64, f64) -> bool) -> Field {
    let grid = f.grid();
    let table = grid.cells().clone();
    let nx = grid.nx();
    let zero = Complex64::new(0.0, 0.0);
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if keep(table.at_flat(i), grid.tau()[i / nx], grid.xi()[i % nx]) {
                v
            } else {
                zero
            }
        })
        .collect();
    f.with_values(values)
}

/// `||f - sum_{j<=jmax, d<=dmax} restrict(f, A_j ∩ B_d)|| / ||f||`, zero for
/// the zero field.
pub fn partition_defect(f: &Field, jmax: u32, dmax: u32) -> f64 {
    let table = f.grid().cells().clone();
    let mut rebuilt = vec![Complex64::new(0.0, 0.0); f.values().len()];
    for j in 0..=jmax.min(table.jmax()) {
        for d in 0..=dmax.min(table.dmax()) {
            let piece = restrict(f, &CellSelector::cell(j, d));
            rebuilt.iter_mut().zip(piece.values()).for_each(|(a, b)| *a += b);
        }
    }
    let total: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let miss: f64 = f.values().iter().zip(&rebuilt).map(|(a, b)| (a - b).norm_sqr()).sum();
    (miss / total).sqrt()
}

/// Smallest value of `(xi1 - xi2) / 2^{j1}` over lattice frequencies
/// `xi1 > 0` in `A_{j1}` and `xi2 < 0` in `A_{j2}` with `|j1 - j2| <= 1` and
/// `j1 >= jmin`, by exhaustive scan. `None` when no such pair exists.
pub fn separation_scan(grid: &Grid, jmin: u32) -> Option<f64> {
    let xi = grid.xi();
    let mut best: Option<f64> = None;
    for &a in xi.iter().filter(|&&a| a > 0.0) {
        let ja = dyadic_level(a);
        if ja < jmin {
            continue;
        }
        for &b in xi.iter().filter(|&&b| b < 0.0) {
            let jb = dyadic_level(b);
            if ja.abs_diff(jb) <= 1 {
                let r = (a - b) / 2f64.powi(ja as i32);
                best = Some(best.map_or(r, |m: f64| m.min(r)));
            }
        }
    }
    best
}
