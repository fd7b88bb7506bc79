//! Spectral fields on each row, physical fields and modal amplitudes.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::system::SpectralSolution;
use crate::error::{LatticeError, Result};
use crate::lattice_core::{chebyshev_v_table, incident_field, s_mode, ComplexField, Window};
use crate::quadrature::{circle_residue, Quadrature};
use crate::spectral_roots::{z_of_x, Cancellation};

/// Which transform represents a row of the normal-form duct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralRow {
    /// -l <= n < 0: even transform Phi.
    Gap,
    /// 0 <= n <= l0 - 1: odd transform Psi.
    Screen,
    /// l0 <= n: mirror image of row l0 - 1 - n.
    Mirror,
}

/// Residue amplitude of one odd duct mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalAmplitude {
    pub q: i64,
    pub amplitude: Complex64,
    pub x_q: Complex64,
    pub propagating: bool,
}

impl SpectralSolution {
    pub fn ell(&self) -> i64 {
        self.geometry.ell1()
    }

    pub fn ell0(&self) -> i64 {
        self.geometry.ell0()
    }

    /// Classify a normal-form row.
    pub fn row_kind(&self, n: i64) -> Result<SpectralRow> {
        let (l, l0) = (self.ell(), self.ell0());
        if n < -l || n > l + l0 - 1 {
            return Err(LatticeError::Domain(format!("row {n} outside the duct")));
        }
        Ok(if n < 0 {
            SpectralRow::Gap
        } else if n < l0 {
            SpectralRow::Screen
        } else {
            SpectralRow::Mirror
        })
    }

    fn sp(&self, k: i64) -> Complex64 {
        s_mode(self.p, self.geometry.n(), k)
    }

    /// Upsilon(x) = 1 + Pi(x).
    pub fn upsilon(&self, x: Complex64) -> Complex64 {
        1.0 + self.split.pi(x)
    }

    fn row_value(&self, n: i64, v: &[Complex64], phi1: Complex64, psi0: Complex64, ups: Complex64) -> Complex64 {
        let (l, l0) = (self.ell(), self.ell0());
        // v[k] = V_{k-1}(z)
        if n < 0 {
            phi1 * v[(l + n) as usize] / v[(l - 1) as usize]
        } else {
            let sl = self.split.s_l;
            (psi0 - ups * sl) * (v[n as usize] + v[(l0 - 1 - n) as usize]) / v[(l0 - 1) as usize]
                + ups * self.sp(l + n)
        }
    }

    /// Phi(x, n) on gap rows or Psi(x, n) on screen rows (normal-form n).
    pub fn spectral_field(&self, n: i64, x: Complex64) -> Result<Complex64> {
        if self.row_kind(n)? == SpectralRow::Mirror {
            return Err(LatticeError::Domain(format!("row {n} is represented by its mirror row")));
        }
        let z = z_of_x(x, &self.frequency);
        let v = chebyshev_v_table(self.ell().max(self.ell0()) + 1, z);
        let phi1 = if n < 0 { self.phi1(x) } else { Complex64::new(0.0, 0.0) };
        let (psi0, ups) = if n >= 0 { (self.psi0(x), self.upsilon(x)) } else { (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)) };
        Ok(self.row_value(n, &v, phi1, psi0, ups))
    }

    /// Scattered field for m >= 0 on the rows -l..=l0-1 (normal form), indexed [m][row].
    fn half_field(&self, m_lo: i64, m_hi: i64, quadrature: &Quadrature) -> Result<(Vec<Vec<Complex64>>, usize)> {
        let (l, l0) = (self.ell(), self.ell0());
        let rows: Vec<i64> = (-l + 1..l0).collect();
        let nr = rows.len();
        let nm = (m_hi - m_lo + 1) as usize;
        let vmax = l.max(l0) + 1;
        let f = self.frequency;
        let res = quadrature.integrate(nr * nm, m_hi, |x, out| {
            let z = z_of_x(x, &f);
            let v = chebyshev_v_table(vmax, z);
            let phi1 = self.phi1(x);
            let psi0 = self.psi0(x);
            let ups = self.upsilon(x);
            let vals: Vec<Complex64> = rows
                .iter()
                .map(|&n| {
                    let r = self.row_value(n, &v, phi1, psi0, ups);
                    if n < 0 { r } else { -r }
                })
                .collect();
            let mut xp = x.powi((m_lo - 1) as i32);
            for k in 0..nm {
                for (i, r) in vals.iter().enumerate() {
                    out[k * nr + i] = r * xp;
                }
                xp *= x;
            }
        })?;
        let mut out = vec![vec![Complex64::new(0.0, 0.0); (l + l0 + l + 1) as usize]; nm];
        for k in 0..nm {
            for (i, &n) in rows.iter().enumerate() {
                out[k][(n + l) as usize] = res.values[k * nr + i];
            }
            for n in l0..l + l0 {
                let src = l0 - 1 - n;
                out[k][(n + l) as usize] = out[k][(src + l) as usize];
            }
        }
        Ok((out, res.nodes))
    }

    /// Scattered field on the window, labelled by the caller's geometry.
    pub fn scattered(&self, window: Window, quadrature: &Quadrature) -> Result<ComplexField> {
        Ok(self.scattered_counted(window, quadrature)?.0)
    }

    /// Scattered field together with the quadrature node count that produced it.
    pub fn scattered_counted(&self, window: Window, quadrature: &Quadrature) -> Result<(ComplexField, usize)> {
        let lo = if window.m_min <= 0 && window.m_max >= 0 { 0 } else { window.m_min.abs().min(window.m_max.abs()) };
        let hi = window.reach();
        let (half, nodes) = self.half_field(lo, hi, quadrature)?;
        let g = self.input_geometry;
        let shift = g.n1;
        let mut out = ComplexField::zeros(window, &g);
        for m in window.m_min..=window.m_max {
            let col = &half[(m.abs() - lo) as usize];
            for n in -g.big_n1..=g.big_n2 {
                let nf = n + shift;
                out.set(m, n, col[(nf + self.ell()) as usize]);
            }
        }
        Ok((out, nodes))
    }

    /// (scattered, total) fields on the window.
    pub fn fields(&self, window: Window, quadrature: &Quadrature) -> Result<(ComplexField, ComplexField)> {
        let sc = self.scattered(window, quadrature)?;
        let inc = incident_field(self.p, &self.input_geometry, &self.frequency, window)?;
        let tot = sc.add(&inc);
        Ok((sc, tot))
    }

    /// Residue amplitudes M_q of every odd mode; evanescent ones are flagged.
    pub fn modal_amplitudes(&self) -> Result<Vec<ModalAmplitude>> {
        let nn = self.geometry.n();
        let l = self.ell();
        let mut out = Vec::new();
        for (k, (r, c)) in self.denominator.roots.iter().zip(&self.denominator.cancellation).enumerate() {
            let q = (r.z.acos() * nn as f64 / PI).round() as i64;
            let x_q = r.x_in;
            let md = crate::lattice_core::mode(q, &self.geometry, &self.frequency)?;
            let amplitude = match c {
                Cancellation::K1Pole(_) => self.amplitude_from_screen(q, x_q)?,
                _ => {
                    let s = s_mode(q, nn, l - 1);
                    let wp = self.denominator.w_prime_at(k, x_q);
                    if wp.norm() < 1e-13 {
                        return Err(LatticeError::ConfluentPole(q as usize));
                    }
                    self.numerator(x_q) / (wp * x_q * s)
                }
            };
            out.push(ModalAmplitude { q, amplitude, x_q, propagating: md.propagating });
        }
        out.sort_by_key(|a| a.q);
        Ok(out)
    }

    fn amplitude_from_screen(&self, q: i64, x_q: Complex64) -> Result<Complex64> {
        let nn = self.geometry.n();
        let l = self.ell();
        let n_star = (0..self.ell0())
            .max_by(|a, b| s_mode(q, nn, a + l).norm().partial_cmp(&s_mode(q, nn, b + l).norm()).unwrap())
            .unwrap_or(0);
        let rad = self.guard_radius(x_q, 1e-2);
        let res = circle_residue(|t| self.spectral_field(n_star, t).unwrap_or_default(), x_q, rad, 128);
        Ok(-res / (x_q * s_mode(q, nn, n_star + l)))
    }
}
