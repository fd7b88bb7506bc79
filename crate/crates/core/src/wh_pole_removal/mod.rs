//! Exact pole-removal solution for the symmetric duct with an odd incident mode.

pub mod reconstruct;
pub mod split;
pub mod system;

pub use reconstruct::{ModalAmplitude, SpectralRow};
pub use split::{ForcingSplit, SplitFunctions};
pub use system::{assemble_and_solve_system, SpectralSolution, SplitCoefficients};
