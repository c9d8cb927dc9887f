//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;
use std::sync::Arc;

use dlab_core::lattice::{make_grid, Grid, GridSpec};
use dlab_core::num_complex::Complex64;
use dlab_core::{Field, Profile, ProfileDomain, Representation};

/// Square lattice with `n` samples on each axis.
pub fn square_grid(n: usize) -> Arc<Grid> {
    make_grid(GridSpec::new(PI * n as f64 / 16.0, n, PI * n as f64 / 16.0, n)).expect("valid grid")
}

/// Smooth spectral field: a Gaussian bump on the parabola.
pub fn parabola_bump(grid: &Arc<Grid>) -> Field {
    Field::from_fn(grid, Representation::Spectral, |tau, xi| {
        let sigma = tau - xi * xi;
        Complex64::new((-0.5 * xi * xi - 0.1 * sigma * sigma).exp(), 0.0)
    })
}

/// Gaussian initial data `e^{-xi^2}` scaled by `amplitude`.
pub fn gaussian_data(grid: &Arc<Grid>, amplitude: f64) -> Profile {
    Profile::from_fn(grid, ProfileDomain::Frequency, |xi| Complex64::new(amplitude * (-xi * xi).exp(), 0.0))
}
