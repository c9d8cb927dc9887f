use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use crate::dyadic::CellTable;
use crate::error::{config, Result};

/// Extents and resolutions of the periodic spacetime box
/// `[-L, L) x [-Tw, Tw)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Spatial half-width `L`.
    pub half_width: f64,
    /// Spatial point count (power of two, at least 4).
    pub nx: usize,
    /// Temporal half-width `Tw`.
    pub half_time: f64,
    /// Temporal point count (power of two, at least 4).
    pub nt: usize,
}

impl GridSpec {
    pub fn new(half_width: f64, nx: usize, half_time: f64, nt: usize) -> Self {
        GridSpec { half_width, nx, half_time, nt }
    }

    /// Smallest grid with the given frequency spacings whose lattice covers
    /// `|xi| <= xi_extent` and `|tau| <= tau_extent`.
    pub fn from_spacing(dxi: f64, xi_extent: f64, dtau: f64, tau_extent: f64) -> Self {
        let nx = ((2.0 * xi_extent / dxi).ceil() as usize + 2).next_power_of_two().max(4);
        let nt = ((2.0 * tau_extent / dtau).ceil() as usize + 2).next_power_of_two().max(4);
        GridSpec { half_width: PI / dxi, nx, half_time: PI / dtau, nt }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return config(format!("spatial half-width must be positive, got {}", self.half_width));
        }
        if !(self.half_time > 0.0 && self.half_time.is_finite()) {
            return config(format!("temporal half-width must be positive, got {}", self.half_time));
        }
        for (name, n) in [("Nx", self.nx), ("Nt", self.nt)] {
            if n < 4 || !n.is_power_of_two() {
                return config(format!("{name} must be a power of two >= 4, got {n}"));
            }
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.nx as f64
    }

    pub fn dt(&self) -> f64 {
        2.0 * self.half_time / self.nt as f64
    }

    pub fn dxi(&self) -> f64 {
        PI / self.half_width
    }

    pub fn dtau(&self) -> f64 {
        PI / self.half_time
    }

    /// Largest representable `|xi|` (the lattice is `[-xi_max, xi_max)`).
    pub fn xi_max(&self) -> f64 {
        (self.nx / 2) as f64 * self.dxi()
    }

    pub fn tau_max(&self) -> f64 {
        (self.nt / 2) as f64 * self.dtau()
    }

    /// Canonical one-line form, used in CSV metadata.
    pub fn canonical(&self) -> String {
        format!("L={};Nx={};Tw={};Nt={}", self.half_width, self.nx, self.half_time, self.nt)
    }
}

/// A validated grid with precomputed axes. Shared behind an `Arc` by every
/// field living on it.
#[derive(Debug)]
pub struct Grid {
    spec: GridSpec,
    x: Vec<f64>,
    t: Vec<f64>,
    xi: Vec<f64>,
    tau: Vec<f64>,
    cells: OnceLock<Arc<CellTable>>,
}

pub fn make_grid(spec: GridSpec) -> Result<Arc<Grid>> {
    spec.validate()?;
    let (dx, dt, dxi, dtau) = (spec.dx(), spec.dt(), spec.dxi(), spec.dtau());
    let x = (0..spec.nx).map(|p| -spec.half_width + p as f64 * dx).collect();
    let t = (0..spec.nt).map(|n| -spec.half_time + n as f64 * dt).collect();
    let xi = (0..spec.nx).map(|i| (i as f64 - (spec.nx / 2) as f64) * dxi).collect();
    let tau = (0..spec.nt).map(|m| (m as f64 - (spec.nt / 2) as f64) * dtau).collect();
    Ok(Arc::new(Grid { spec, x, t, xi, tau, cells: OnceLock::new() }))
}

impl Grid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }
    pub fn nx(&self) -> usize {
        self.spec.nx
    }
    pub fn nt(&self) -> usize {
        self.spec.nt
    }
    pub fn dx(&self) -> f64 {
        self.spec.dx()
    }
    pub fn dt(&self) -> f64 {
        self.spec.dt()
    }
    pub fn dxi(&self) -> f64 {
        self.spec.dxi()
    }
    pub fn dtau(&self) -> f64 {
        self.spec.dtau()
    }
    /// Physical sample points `x_p = -L + p dx`.
    pub fn x(&self) -> &[f64] {
        &self.x
    }
    /// Time samples `t_n = -Tw + n dt`.
    pub fn t(&self) -> &[f64] {
        &self.t
    }
    /// Frequencies `xi_k = k dxi`, `k` in `[-Nx/2, Nx/2)`, ascending.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }
    /// Temporal frequencies `tau_m = m dtau`, `m` in `[-Nt/2, Nt/2)`, ascending.
    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    /// Column index of the lattice frequency nearest to `xi`, if inside the lattice.
    pub fn xi_index(&self, xi: f64) -> Option<usize> {
        let i = (xi / self.dxi()).round() as i64 + (self.nx() / 2) as i64;
        (0..self.nx() as i64).contains(&i).then_some(i as usize)
    }

    pub fn tau_index(&self, tau: f64) -> Option<usize> {
        let m = (tau / self.dtau()).round() as i64 + (self.nt() / 2) as i64;
        (0..self.nt() as i64).contains(&m).then_some(m as usize)
    }

    /// Dyadic cell of every spectral lattice point, built on first use.
    pub fn cells(&self) -> &Arc<CellTable> {
        self.cells.get_or_init(|| Arc::new(CellTable::build(self)))
    }
}
