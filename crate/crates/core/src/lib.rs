//! Numerical laboratory for the quadratic Schrödinger equation
//! `i u_t + u_xx = u^2` in one space dimension: lattice transforms, dyadic
//! decompositions, Bourgain-type norms, Picard iterates, the high-to-low
//! cascade experiment, and a fuzzer for bilinear estimates.

pub mod cascade;
pub mod dyadic;
pub mod error;
pub mod evolution;
pub mod fuzzer;
pub mod lattice;
pub mod norms;
pub mod picard;
pub mod report;

pub use error::{DlabError, Result};
pub use num_complex;
pub use lattice::{Field, Grid, GridSpec, Profile, ProfileDomain, Representation};
pub use report::{NormMethod, NormReport, RatioReport};
