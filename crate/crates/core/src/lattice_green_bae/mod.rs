//! Tailored Green's function of the duct and the boundary algebraic equations solver.

pub mod bae;
pub mod green;

pub use bae::{solve_bae, BaeSolution, BaeSystem};
pub use green::{green_hat, green_residue_sum, TailoredGreen};
