use std::sync::Arc;

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{usage, Result};

/// Which variables a 2D field is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// `u(t_n, x_p)`
    Physical,
    /// `u^(t_n, xi_k)`
    Mode,
    /// `u~(tau_m, xi_k)`
    Spectral,
}

impl Representation {
    pub fn tag(self) -> u8 {
        match self {
            Representation::Physical => 0,
            Representation::Mode => 1,
            Representation::Spectral => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Representation::Physical),
            1 => Some(Representation::Mode),
            2 => Some(Representation::Spectral),
            _ => None,
        }
    }
}

/// Complex samples on the spacetime lattice, stored row-major with one row
/// per time sample (or per `tau`) and one column per `x` (or per `xi`).
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    repr: Representation,
    values: Vec<Complex64>,
}

pub type SpectralField = Field;
pub type ModeField = Field;
pub type PhysicalField = Field;

impl Field {
    pub fn zeros(grid: &Arc<Grid>, repr: Representation) -> Self {
        let n = grid.nx() * grid.nt();
        Field { grid: grid.clone(), repr, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn from_values(grid: &Arc<Grid>, repr: Representation, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.nx() * grid.nt() {
            return usage(format!(
                "field needs {} values, got {}",
                grid.nx() * grid.nt(),
                values.len()
            ));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return usage("field values must be finite");
        }
        Ok(Field { grid: grid.clone(), repr, values })
    }

    /// Builds a field by evaluating `f(row_coord, col_coord)` at every lattice
    /// point, where the coordinates are those of `repr`.
    pub fn from_fn(grid: &Arc<Grid>, repr: Representation, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let (rows, cols) = match repr {
            Representation::Physical => (grid.t(), grid.x()),
            Representation::Mode => (grid.t(), grid.xi()),
            Representation::Spectral => (grid.tau(), grid.xi()),
        };
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                values.push(f(r, c));
            }
        }
        Field { grid: grid.clone(), repr, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn repr(&self) -> Representation {
        self.repr
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
    pub fn nx(&self) -> usize {
        self.grid.nx()
    }
    pub fn nt(&self) -> usize {
        self.grid.nt()
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.nx() + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        let nx = self.nx();
        &self.values[row * nx..(row + 1) * nx]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [Complex64] {
        let nx = self.nx();
        &mut self.values[row * nx..(row + 1) * nx]
    }

    pub fn expect(&self, repr: Representation) -> Result<()> {
        if self.repr != repr {
            return usage(format!("expected a {:?} field, got {:?}", repr, self.repr));
        }
        Ok(())
    }

    pub(crate) fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.repr != other.repr || self.grid.spec() != other.grid.spec() {
            return usage("fields live on different grids or representations");
        }
        Ok(())
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Field {
        debug_assert_eq!(values.len(), self.values.len());
        Field { grid: self.grid.clone(), repr: self.repr, values }
    }

    pub(crate) fn relabel(mut self, repr: Representation) -> Field {
        self.repr = repr;
        self
    }

    pub fn scaled(&self, alpha: Complex64) -> Field {
        self.with_values(self.values.iter().map(|v| v * alpha).collect())
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: Complex64, other: &Field, beta: Complex64) -> Result<Field> {
        self.check_compatible(other)?;
        Ok(self.with_values(
            self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect(),
        ))
    }

    pub fn add_assign(&mut self, other: &Field) -> Result<()> {
        self.check_compatible(other)?;
        self.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a += b);
        Ok(())
    }

    pub fn abs(&self) -> Field {
        self.with_values(self.values.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise map with access to the spectral coordinates `(tau, xi)`.
    pub fn map_spectral(&self, mut f: impl FnMut(f64, f64, Complex64) -> Complex64) -> Field {
        let (tau, xi) = (self.grid.tau(), self.grid.xi());
        let nx = self.nx();
        self.with_values(
            self.values
                .iter()
                .enumerate()
                .map(|(idx, &v)| f(tau[idx / nx], xi[idx % nx], v))
                .collect(),
        )
    }

    /// Discrete L^2 norm with the measure of the representation.
    pub fn l2_norm(&self) -> f64 {
        let g = &self.grid;
        let measure = match self.repr {
            Representation::Physical => g.dx() * g.dt(),
            Representation::Mode => g.dxi() * g.dt(),
            Representation::Spectral => g.dxi() * g.dtau(),
        };
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * measure).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }
}

/// Which variable a one-dimensional spatial profile is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileDomain {
    /// `f(x_p)`
    Space,
    /// `f^(xi_k)`
    Frequency,
}

/// A function of the spatial variable alone, sampled on the spatial axis of a
/// grid (initial data, a solution slice).
#[derive(Debug, Clone)]
pub struct Profile {
    grid: Arc<Grid>,
    domain: ProfileDomain,
    values: Vec<Complex64>,
}

impl Profile {
    pub fn zeros(grid: &Arc<Grid>, domain: ProfileDomain) -> Self {
        Profile { grid: grid.clone(), domain, values: vec![Complex64::new(0.0, 0.0); grid.nx()] }
    }

    pub fn from_values(grid: &Arc<Grid>, domain: ProfileDomain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.nx() {
            return usage(format!("profile needs {} values, got {}", grid.nx(), values.len()));
        }
        Ok(Profile { grid: grid.clone(), domain, values })
    }

    /// Samples `f` at the axis points of `domain`.
    pub fn from_fn(grid: &Arc<Grid>, domain: ProfileDomain, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let axis = match domain {
            ProfileDomain::Space => grid.x(),
            ProfileDomain::Frequency => grid.xi(),
        };
        Profile { grid: grid.clone(), domain, values: axis.iter().map(|&a| f(a)).collect() }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn domain(&self) -> ProfileDomain {
        self.domain
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn expect(&self, domain: ProfileDomain) -> Result<()> {
        if self.domain != domain {
            return usage(format!("expected a {:?}-domain profile, got {:?}", domain, self.domain));
        }
        Ok(())
    }

    pub(crate) fn with_values(&self, domain: ProfileDomain, values: Vec<Complex64>) -> Profile {
        Profile { grid: self.grid.clone(), domain, values }
    }

    pub fn scaled(&self, alpha: Complex64) -> Profile {
        self.with_values(self.domain, self.values.iter().map(|v| v * alpha).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete L^2 norm (`dx` or `dxi` weighted).
    pub fn l2_norm(&self) -> f64 {
        let w = match self.domain {
            ProfileDomain::Space => self.grid.dx(),
            ProfileDomain::Frequency => self.grid.dxi(),
        };
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt()
    }
}
