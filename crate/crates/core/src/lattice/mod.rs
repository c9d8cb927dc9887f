//! Spacetime lattice, field containers, Fourier transforms and scaling.

pub mod dlf;
mod field;
mod grid;
mod rescale;
mod transform;

pub use field::{Field, ModeField, PhysicalField, Profile, ProfileDomain, Representation, SpectralField};
pub use grid::{make_grid, Grid, GridSpec};
pub use rescale::rescale;
pub(crate) use transform::plan;
pub use transform::{
    parseval_defect, profile_parseval_defect, to_mode, to_physical, to_spectral, transform, transform_axis,
    transform_profile, Direction,
};
