//! Low-frequency cascade of the first nonlinear iterate.

mod cutoff;
mod data;
mod direct;
mod experiment;
mod spacetime;

pub use cutoff::CutoffTransforms;
pub use data::{make_fn, BandData, LatticeData, Normalize, SpectralData, BAND_HALF_WIDTH};
pub use direct::{a2_direct, a2_spectrum, output_lattice, phase_check, Quadrature};
pub use spacetime::{
    low_columns, rectangle_exponent, rectangle_max, xsb_growth, RectangleConfig, RectangleReport, Spacetime, Xi1Lattice,
    XsbGrowth, XsbSlab,
};
pub use experiment::{cascade_experiment, sample_times, witness_time, CascadeConfig, CascadeReport, CascadeRow};
