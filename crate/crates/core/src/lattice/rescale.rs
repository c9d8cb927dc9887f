use num_complex::Complex64;

use super::field::{Profile, ProfileDomain};
use super::transform::transform_profile;
use crate::error::{config, resolution, Result};

const SUPPORT_TOL: f64 = 1e-10;

/// The scaling map `f -> lambda^{-2} f(x / lambda)`.
///
/// The dilated profile is evaluated through its spectrum,
/// `lambda^{-1} f^(lambda xi)`, where `f^` at off-lattice frequencies comes
/// from the exact trigonometric sum over the samples of `f`. Frequencies with
/// `|lambda xi|` beyond the lattice are dropped (the input is band limited).
pub fn rescale(f: &Profile, lambda: f64) -> Result<Profile> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return config(format!("rescale needs lambda >= 1, got {lambda}"));
    }
    let space = match f.domain() {
        ProfileDomain::Space => f.clone(),
        ProfileDomain::Frequency => transform_profile(f),
    };
    if lambda == 1.0 {
        return Ok(space);
    }
    let grid = space.grid().clone();
    let peak = space.max_abs();
    let limit = grid.spec().half_width / lambda;
    if let Some(x) = grid
        .x()
        .iter()
        .zip(space.values())
        .find(|(x, v)| x.abs() >= limit && v.norm() > SUPPORT_TOL * peak)
        .map(|(x, _)| *x)
    {
        return resolution(format!(
            "profile is not negligible at x = {x}; it would leave the box after scaling by {lambda}"
        ));
    }

    let dx = grid.dx();
    let xi_max = grid.spec().xi_max();
    let mut hat = vec![Complex64::new(0.0, 0.0); grid.nx()];
    for (out, &xi) in hat.iter_mut().zip(grid.xi()) {
        let eta = lambda * xi;
        if eta.abs() >= xi_max {
            continue;
        }
        // sum_p dx e^{i x_p eta} f_p with x_p = x_0 + p dx, by phase recurrence
        let step = Complex64::from_polar(1.0, dx * eta);
        let mut phase = Complex64::from_polar(1.0, grid.x()[0] * eta);
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, v) in space.values().iter().enumerate() {
            if p % 64 == 0 {
                phase = Complex64::from_polar(1.0, grid.x()[p] * eta);
            }
            acc += phase * v;
            phase *= step;
        }
        *out = acc * dx / lambda;
    }
    Ok(transform_profile(&Profile::from_values(&grid, ProfileDomain::Frequency, hat)?))
}
