//! Contour integrals (1/2 pi i) \oint F(x) dx around the origin.
//!
//! The contour is x(phi) = exp(i phi + a sin phi): it bulges outside the unit
//! circle in the upper half plane and inside it in the lower half plane, so
//! the inside member e^{iK} (0 < K < pi) of every unimodular reciprocal pair
//! is enclosed and its partner e^{-iK} is not. Real poles are crossed only at
//! x = +-1, which are band edges and are excluded upstream.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LatticeError, Result};

/// Adaptive trapezoidal rule on the deformed contour.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Quadrature {
    pub initial_nodes: usize,
    pub tol: f64,
    pub max_doublings: u32,
    /// Contour deformation amplitude; 0 selects it from the largest power of x.
    pub deformation: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { initial_nodes: 1 << 10, tol: 1e-12, max_doublings: 10, deformation: 0.0 }
    }
}

/// Integral values together with the node count that achieved them.
#[derive(Debug, Clone)]
pub struct QuadratureResult {
    pub values: Vec<Complex64>,
    pub nodes: usize,
    pub achieved: f64,
}

impl Quadrature {
    /// Deformation amplitude for integrands carrying powers up to x^reach.
    pub fn amplitude(&self, reach: i64) -> f64 {
        if self.deformation > 0.0 {
            self.deformation
        } else {
            0.3f64.min(1.0 / (reach.max(0) as f64 + 1.0))
        }
    }

    /// Integrate a vector-valued integrand.
    ///
    /// `integrand(x, out)` must write F(x) for every component; the result is
    /// (1/2 pi i) \oint F dx. `reach` bounds the powers |m| of x appearing in F.
    pub fn integrate<F>(&self, dim: usize, reach: i64, integrand: F) -> Result<QuadratureResult>
    where
        F: Fn(Complex64, &mut [Complex64]) + Sync,
    {
        let a = self.amplitude(reach);
        let mut m = self.initial_nodes.max(8);
        let mut sum = self.partial_sum(dim, a, m, 0, 1, &integrand);
        let mut est: Vec<Complex64> = sum.iter().map(|s| s / m as f64).collect();
        let mut achieved = f64::INFINITY;
        for _ in 0..self.max_doublings {
            let odd = self.partial_sum(dim, a, 2 * m, 1, 2, &integrand);
            m *= 2;
            for (s, o) in sum.iter_mut().zip(&odd) {
                *s += o;
            }
            let next: Vec<Complex64> = sum.iter().map(|s| s / m as f64).collect();
            let scale = next.iter().map(|v| v.norm()).fold(1.0, f64::max);
            achieved = est.iter().zip(&next).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max) / scale;
            est = next;
            if achieved < self.tol {
                return Ok(QuadratureResult { values: est, nodes: m, achieved });
            }
        }
        Err(LatticeError::NonConvergence { achieved, nodes: m })
    }

    /// Sum over nodes k = start, start+step, ... < total of F(x_k) x_k (1 - i a cos phi_k).
    fn partial_sum<F>(&self, dim: usize, a: f64, total: usize, start: usize, step: usize, integrand: &F) -> Vec<Complex64>
    where
        F: Fn(Complex64, &mut [Complex64]) + Sync,
    {
        let count = (total - start).div_ceil(step);
        let chunk = 256usize;
        let zero = Complex64::new(0.0, 0.0);
        (0..count.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut acc = vec![zero; dim];
                let mut buf = vec![zero; dim];
                for i in c * chunk..((c + 1) * chunk).min(count) {
                    let k = start + i * step;
                    let phi = 2.0 * PI * k as f64 / total as f64;
                    let x = Complex64::new(a * phi.sin(), phi).exp();
                    let jac = x * Complex64::new(1.0, -a * phi.cos());
                    for b in buf.iter_mut() {
                        *b = zero;
                    }
                    integrand(x, &mut buf);
                    for (s, v) in acc.iter_mut().zip(&buf) {
                        *s += v * jac;
                    }
                }
                acc
            })
            .reduce(
                || vec![zero; dim],
                |mut l, r| {
                    for (a, b) in l.iter_mut().zip(&r) {
                        *a += b;
                    }
                    l
                },
            )
    }
}

/// Mean of `f` over a circle of radius `r` around `center`; equals f(center)
/// when f is analytic on the closed disc, including removable singularities.
pub fn circle_mean(f: impl Fn(Complex64) -> Complex64, center: Complex64, r: f64, nodes: usize) -> Complex64 {
    (0..nodes)
        .map(|k| f(center + Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / nodes as f64)))
        .sum::<Complex64>()
        / nodes as f64
}

/// Residue of `f` at `center` from the trapezoidal rule on a small circle.
pub fn circle_residue(f: impl Fn(Complex64) -> Complex64, center: Complex64, r: f64, nodes: usize) -> Complex64 {
    (0..nodes)
        .map(|k| {
            let d = Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / nodes as f64);
            f(center + d) * d
        })
        .sum::<Complex64>()
        / nodes as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomials() {
        let q = Quadrature::default();
        let r = q
            .integrate(4, 3, |x, out| {
                out[0] = x.inv();
                out[1] = x.powi(-2);
                out[2] = x.powi(2);
                out[3] = Complex64::new(3.0, 0.0) * x.inv() + x;
            })
            .unwrap();
        assert!((r.values[0] - 1.0).norm() < 1e-14);
        assert!(r.values[1].norm() < 1e-14);
        assert!(r.values[2].norm() < 1e-14);
        assert!((r.values[3] - 3.0).norm() < 1e-14);
    }

    #[test]
    fn unimodular_pole_split() {
        let k: f64 = 0.7;
        let inside = Complex64::from_polar(1.0, k);
        let outside = inside.inv();
        let q = Quadrature::default();
        let r = q.integrate(2, 0, |x, out| {
            out[0] = (x - inside).inv();
            out[1] = (x - outside).inv();
        });
        let r = r.unwrap();
        assert!((r.values[0] - 1.0).norm() < 1e-12);
        assert!(r.values[1].norm() < 1e-12);
    }

    #[test]
    fn residue_and_mean_helpers() {
        let c = Complex64::new(0.3, 0.2);
        let res = circle_residue(|x| Complex64::new(2.0, -1.0) / (x - c) + x, c, 1e-3, 32);
        assert!((res - Complex64::new(2.0, -1.0)).norm() < 1e-13);
        let mean = circle_mean(|x| (x * x - c * c) / (x - c), c, 1e-3, 32);
        assert!((mean - 2.0 * c).norm() < 1e-13);
    }

    #[test]
    fn non_convergence_is_reported() {
        let q = Quadrature { initial_nodes: 16, tol: 1e-15, max_doublings: 1, deformation: 0.01 };
        let p = Complex64::from_polar(1.0, 1e-3);
        let r = q.integrate(1, 0, |x, out| out[0] = (x - p).inv());
        assert!(matches!(r, Err(LatticeError::NonConvergence { .. })));
    }
}
