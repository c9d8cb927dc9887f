use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::field::{Field, Profile, ProfileDomain, Representation};
use crate::error::Result;

/// Transform directions between the three representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Physical -> Mode, kernel `e^{+i x xi} dx`.
    SpaceForward,
    /// Mode -> Physical.
    SpaceInverse,
    /// Mode -> Spectral, kernel `e^{+i t tau} dt`.
    TimeForward,
    /// Spectral -> Mode.
    TimeInverse,
}

impl Direction {
    fn endpoints(self) -> (Representation, Representation) {
        use Representation::*;
        match self {
            Direction::SpaceForward => (Physical, Mode),
            Direction::SpaceInverse => (Mode, Physical),
            Direction::TimeForward => (Mode, Spectral),
            Direction::TimeInverse => (Spectral, Mode),
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Centered transforms of one axis in place.
///
/// Samples sit at `-half + p*h` and frequencies at `(i - n/2) * pi/half`, so
/// the phase `x_p xi_k` reduces to `(-1)^k (-1)^p e^{2 pi i p i / n}`.
/// The forward map applies weight `h` and kernel `e^{+i x xi}`; the inverse
/// applies `dxi / 2pi` and the conjugate kernel, so the pair is an exact roundtrip.
fn centered_inverse(buf: &mut [Complex64], h_spatial: f64) {
    let n = buf.len();
    let half = n / 2;
    for (i, v) in buf.iter_mut().enumerate() {
        *v *= sign(i + half);
    }
    let fft = plan(n, FftDirection::Forward);
    fft.process(buf);
    let weight = 1.0 / (h_spatial * n as f64);
    for (p, v) in buf.iter_mut().enumerate() {
        *v *= sign(p) * weight;
    }
}

fn centered_forward(buf: &mut [Complex64], h: f64) {
    let n = buf.len();
    let half = n / 2;
    for (p, v) in buf.iter_mut().enumerate() {
        *v *= sign(p);
    }
    let fft = plan(n, FftDirection::Inverse);
    fft.process(buf);
    for (i, v) in buf.iter_mut().enumerate() {
        *v *= sign(i + half) * h;
    }
}

/// One-dimensional centered transform: `forward` maps samples with spacing
/// `h` to the frequency lattice, otherwise the exact inverse.
pub fn transform_axis(buf: &mut [Complex64], h: f64, forward: bool) {
    if forward {
        centered_forward(buf, h)
    } else {
        centered_inverse(buf, h)
    }
}

/// Moves a field between representations. Fails with a usage error when the
/// field is not in the representation the direction starts from.
pub fn transform(field: &Field, direction: Direction) -> Result<Field> {
    let (from, to) = direction.endpoints();
    field.expect(from)?;
    let grid = field.grid().clone();
    let (nx, nt) = (grid.nx(), grid.nt());
    let mut values = field.values().to_vec();
    match direction {
        Direction::SpaceForward | Direction::SpaceInverse => {
            let forward = direction == Direction::SpaceForward;
            let h = grid.dx();
            values.par_chunks_mut(nx).for_each(|row| transform_axis(row, h, forward));
        }
        Direction::TimeForward | Direction::TimeInverse => {
            let forward = direction == Direction::TimeForward;
            let h = grid.dt();
            let cols: Vec<Vec<Complex64>> = (0..nx)
                .into_par_iter()
                .map(|k| {
                    let mut col: Vec<Complex64> = (0..nt).map(|n| values[n * nx + k]).collect();
                    transform_axis(&mut col, h, forward);
                    col
                })
                .collect();
            for (k, col) in cols.into_iter().enumerate() {
                for (n, v) in col.into_iter().enumerate() {
                    values[n * nx + k] = v;
                }
            }
        }
    }
    Ok(field.with_values(values).relabel(to))
}

/// Physical -> Spectral in one call.
pub fn to_spectral(field: &Field) -> Result<Field> {
    match field.repr() {
        Representation::Physical => transform(&transform(field, Direction::SpaceForward)?, Direction::TimeForward),
        Representation::Mode => transform(field, Direction::TimeForward),
        Representation::Spectral => Ok(field.clone()),
    }
}

/// Any representation -> Mode.
pub fn to_mode(field: &Field) -> Result<Field> {
    match field.repr() {
        Representation::Physical => transform(field, Direction::SpaceForward),
        Representation::Mode => Ok(field.clone()),
        Representation::Spectral => transform(field, Direction::TimeInverse),
    }
}

/// Any representation -> Physical.
pub fn to_physical(field: &Field) -> Result<Field> {
    match field.repr() {
        Representation::Physical => Ok(field.clone()),
        Representation::Mode => transform(field, Direction::SpaceInverse),
        Representation::Spectral => transform(&transform(field, Direction::TimeInverse)?, Direction::SpaceInverse),
    }
}

/// Spatial transform of a profile, `f(x) -> f^(xi)` or back.
pub fn transform_profile(profile: &Profile) -> Profile {
    let grid = profile.grid();
    let mut values = profile.values().to_vec();
    match profile.domain() {
        ProfileDomain::Space => {
            transform_axis(&mut values, grid.dx(), true);
            profile.with_values(ProfileDomain::Frequency, values)
        }
        ProfileDomain::Frequency => {
            transform_axis(&mut values, grid.dx(), false);
            profile.with_values(ProfileDomain::Space, values)
        }
    }
}

/// Relative discrete Plancherel defect
/// `| sum|f^|^2 dxi - 2 pi sum|f|^2 dx | / max(1, ||f||^2)` of the transform
/// leaving `field` (spatial for physical fields, temporal for mode fields).
pub fn parseval_defect(field: &Field) -> Result<f64> {
    let g = field.grid();
    let sq = |f: &Field| f.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
    let (lhs, rhs, norm2) = match field.repr() {
        Representation::Physical => {
            let hat = transform(field, Direction::SpaceForward)?;
            let n2 = sq(field) * g.dx() * g.dt();
            (sq(&hat) * g.dxi() * g.dt(), 2.0 * PI * n2, n2)
        }
        Representation::Mode => {
            let hat = transform(field, Direction::TimeForward)?;
            let n2 = sq(field) * g.dxi() * g.dt();
            (sq(&hat) * g.dxi() * g.dtau(), 2.0 * PI * n2, n2)
        }
        Representation::Spectral => {
            let back = transform(field, Direction::TimeInverse)?;
            let n2 = sq(&back) * g.dxi() * g.dt();
            (sq(field) * g.dxi() * g.dtau(), 2.0 * PI * n2, n2)
        }
    };
    Ok((lhs - rhs).abs() / norm2.max(1.0))
}

/// Plancherel defect of a spatial profile.
pub fn profile_parseval_defect(profile: &Profile) -> f64 {
    let g = profile.grid();
    let sq = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let (space, freq) = match profile.domain() {
        ProfileDomain::Space => (profile.values().to_vec(), transform_profile(profile).values().to_vec()),
        ProfileDomain::Frequency => (transform_profile(profile).values().to_vec(), profile.values().to_vec()),
    };
    let n2 = sq(&space) * g.dx();
    (sq(&freq) * g.dxi() - 2.0 * PI * n2).abs() / n2.max(1.0)
}
