//! Tailored lattice Green's function of the Dirichlet duct.

use std::collections::HashMap;

use num_complex::Complex64;
use parking_lot::RwLock;

use crate::error::Result;
use crate::lattice_core::{chebyshev_v_table, mode, LatticeFrequency, WaveguideGeometry, WaveguideMode};
use crate::quadrature::Quadrature;
use crate::spectral_roots::z_of_x;

/// Spectral Green's function -V_{N2-max-1}(z) V_{min+N1-1}(z) x^{-m0} / V_{N-1}(z).
pub fn green_hat(x: Complex64, n: i64, n0: i64, m0: i64, g: &WaveguideGeometry, f: &LatticeFrequency) -> Complex64 {
    let z = z_of_x(x, f);
    let v = chebyshev_v_table(g.n() - 1, z);
    hat_from_table(&v, n, n0, g) * x.powi(-m0 as i32)
}

/// Green transform without the x^{-m0} factor, given the table V_{-1..=N-1}(z).
fn hat_from_table(v: &[Complex64], n: i64, n0: i64, g: &WaveguideGeometry) -> Complex64 {
    let (lo, hi) = if n <= n0 { (n, n0) } else { (n0, n) };
    let a = v[(g.big_n2 - hi) as usize];
    let b = v[(lo + g.big_n1) as usize];
    let d = v[g.n() as usize];
    -a * b / d
}

type Key = (i64, i64, i64);

/// Green's function G(m - m0; n, n0) with a shared memo cache.
///
/// Values depend on |m - m0| and the unordered pair {n, n0} only.
pub struct TailoredGreen {
    pub geometry: WaveguideGeometry,
    pub frequency: LatticeFrequency,
    pub quadrature: Quadrature,
    cache: RwLock<HashMap<Key, Complex64>>,
    nodes_used: RwLock<usize>,
}

fn key(dm: i64, n: i64, n0: i64) -> Key {
    (dm.abs(), n.min(n0), n.max(n0))
}

impl TailoredGreen {
    pub fn new(geometry: WaveguideGeometry, frequency: LatticeFrequency, quadrature: Quadrature) -> Self {
        TailoredGreen { geometry, frequency, quadrature, cache: RwLock::new(HashMap::new()), nodes_used: RwLock::new(0) }
    }

    /// Largest node count used by any batch so far.
    pub fn nodes_used(&self) -> usize {
        *self.nodes_used.read()
    }

    /// G at a single offset; walls give exactly zero.
    pub fn value(&self, dm: i64, n: i64, n0: i64) -> Result<Complex64> {
        Ok(self.batch(&[(dm, n, n0)])?[0])
    }

    /// G for many (m - m0, n, n0) triples, computing missing entries in one contour pass.
    pub fn batch(&self, requests: &[(i64, i64, i64)]) -> Result<Vec<Complex64>> {
        let g = self.geometry;
        let mut missing: Vec<Key> = {
            let cache = self.cache.read();
            requests
                .iter()
                .map(|&(dm, n, n0)| key(dm, n, n0))
                .filter(|k| !cache.contains_key(k) && !self.is_wall(k))
                .collect()
        };
        missing.sort_unstable();
        missing.dedup();
        if !missing.is_empty() {
            let reach = missing.iter().map(|k| k.0).max().unwrap_or(0);
            let mut dms: Vec<i64> = missing.iter().map(|k| k.0).collect();
            dms.sort_unstable();
            dms.dedup();
            let f = self.frequency;
            let res = self.quadrature.integrate(missing.len(), reach, |x, out| {
                let z = z_of_x(x, &f);
                let v = chebyshev_v_table(g.n() - 1, z);
                let xinv = x.inv();
                let mut pw = vec![Complex64::new(0.0, 0.0); (reach + 1) as usize];
                let mut acc = xinv;
                for (i, p) in pw.iter_mut().enumerate() {
                    if i > 0 {
                        acc *= x;
                    }
                    *p = acc;
                }
                for (o, k) in out.iter_mut().zip(&missing) {
                    *o = hat_from_table(&v, k.1, k.2, &g) * pw[k.0 as usize];
                }
            })?;
            {
                let mut nu = self.nodes_used.write();
                *nu = (*nu).max(res.nodes);
            }
            let mut cache = self.cache.write();
            for (k, v) in missing.iter().zip(res.values) {
                cache.insert(*k, v);
            }
        }
        let cache = self.cache.read();
        Ok(requests
            .iter()
            .map(|&(dm, n, n0)| {
                let k = key(dm, n, n0);
                if self.is_wall(&k) {
                    Complex64::new(0.0, 0.0)
                } else {
                    cache[&k]
                }
            })
            .collect())
    }

    fn is_wall(&self, k: &Key) -> bool {
        k.1 <= -self.geometry.big_n1 || k.2 >= self.geometry.big_n2
    }

    /// Exact modal (residue) sum over the N-1 duct modes.
    pub fn residue_sum(&self, dm: i64, n: i64, n0: i64) -> Complex64 {
        green_residue_sum(dm, n, n0, &self.geometry, &self.frequency)
    }
}

/// G(dm; n, n0) = sum_j (2/N) sin(theta_j (n+N1)) sin(theta_j (n0+N1)) x_j^{|dm|} / (x_j - 1/x_j).
pub fn green_residue_sum(dm: i64, n: i64, n0: i64, g: &WaveguideGeometry, f: &LatticeFrequency) -> Complex64 {
    let nn = g.n();
    let ms: Vec<WaveguideMode> = (1..nn).map(|j| mode(j, g, f).expect("index in range")).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for md in &ms {
        let a = (md.theta * (n + g.big_n1) as f64).sin();
        let b = (md.theta * (n0 + g.big_n1) as f64).sin();
        let x = md.x_factor;
        acc += 2.0 / nn as f64 * a * b * x.powi(dm.abs() as i32) / (x - x.inv());
    }
    if (n + g.big_n1) % nn == 0 || (n0 + g.big_n1) % nn == 0 {
        return Complex64::new(0.0, 0.0);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (WaveguideGeometry, LatticeFrequency) {
        (WaveguideGeometry::new(1, 2, 4, 6).unwrap(), LatticeFrequency::new(1.3, 0.0).unwrap())
    }

    #[test]
    fn hat_walls_and_coincidence() {
        let (g, f) = setup();
        let x = Complex64::new(0.4, 0.9);
        for n0 in -3..6 {
            assert_eq!(green_hat(x, -4, n0, 0, &g, &f), Complex64::new(0.0, 0.0));
            assert_eq!(green_hat(x, 6, n0, 0, &g, &f), Complex64::new(0.0, 0.0));
        }
        // Closed form with s-functions at n = n0.
        let (y, _) = crate::lattice_core::y_of_x(x, &f).unwrap();
        let s = |k: i64| y.powi(k as i32) - y.powi(-k as i32);
        for n0 in -3..6 {
            let want = s(n0 - g.big_n2) * s(n0 + g.big_n1) / (s(g.n()) * s(1));
            assert!((green_hat(x, n0, n0, 0, &g, &f) - want).norm() < 1e-12 * want.norm().max(1.0));
        }
    }

    #[test]
    fn hat_difference_equation() {
        let (g, f) = setup();
        for (k, x) in [Complex64::new(0.4, 0.9), Complex64::new(-1.3, 0.2), Complex64::new(0.7, -0.8)].iter().enumerate() {
            let m0 = k as i64 - 1;
            let lam = crate::lattice_core::lambda_of_x(*x, &f).unwrap();
            for n0 in -3..6 {
                for n in -3..6 {
                    let r = lam * green_hat(*x, n, n0, m0, &g, &f)
                        + green_hat(*x, n - 1, n0, m0, &g, &f)
                        + green_hat(*x, n + 1, n0, m0, &g, &f);
                    let want = if n == n0 { x.powi(-m0 as i32) } else { Complex64::new(0.0, 0.0) };
                    assert!((r - want).norm() < 1e-11, "n={n} n0={n0}");
                }
            }
        }
    }

    #[test]
    fn quadrature_matches_residue_sum() {
        let (g, f) = setup();
        let tg = TailoredGreen::new(g, f, Quadrature::default());
        for dm in [0, 1, 3, -2, 7] {
            for (n, n0) in [(-3, -3), (-1, 2), (5, 0), (0, 0)] {
                let a = tg.value(dm, n, n0).unwrap();
                let b = tg.residue_sum(dm, n, n0);
                assert!((a - b).norm() < 1e-11, "dm={dm} n={n} n0={n0}: {a} vs {b}");
            }
        }
    }
}
