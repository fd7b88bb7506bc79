//! Scattering of lattice waves by a finite Dirichlet screen inside a discrete waveguide.

pub mod cli_runner;
pub mod error;
pub mod lattice_core;
pub mod lattice_green_bae;
pub mod linalg;
pub mod quadrature;
pub mod scattering_analysis;
pub mod spectral_roots;
pub mod wh_pole_removal;

pub use error::{LatticeError, Result};
