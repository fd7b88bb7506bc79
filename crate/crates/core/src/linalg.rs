//! Dense complex LU solves with a 1-norm condition number.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{LatticeError, Result};

/// LU factorisation with partial pivoting and its 1-norm condition number.
pub struct Factored {
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    pub cond: f64,
}

fn norm1(a: &DMatrix<Complex64>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

impl Factored {
    /// Factor `a`; fails when the condition number exceeds `max_cond`.
    pub fn new(a: DMatrix<Complex64>, max_cond: f64, what: &str) -> Result<Self> {
        let n1 = norm1(&a);
        let lu = a.lu();
        let inv = lu.try_inverse().ok_or_else(|| LatticeError::Degenerate(format!("{what}: singular matrix")))?;
        let cond = n1 * norm1(&inv);
        if !cond.is_finite() || cond > max_cond {
            return Err(LatticeError::Degenerate(format!("{what}: condition number {cond:.3e}")));
        }
        Ok(Factored { lu, cond })
    }

    pub fn solve(&self, b: &DVector<Complex64>) -> DVector<Complex64> {
        self.lu.solve(b).expect("factor checked non-singular")
    }
}
