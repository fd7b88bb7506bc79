//! Boundary algebraic equations for a screen on the column m = 0.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::green::TailoredGreen;
use crate::error::{LatticeError, Result};
use crate::lattice_core::{
    incident_field, mode, validate_frequency, ComplexField, LatticeFrequency, WaveguideGeometry, Window,
};
use crate::linalg::Factored;
use crate::quadrature::Quadrature;

const MAX_COND: f64 = 1e14;

/// Assembled BAE matrices for one geometry and frequency.
#[derive(Debug, Clone)]
pub struct BaeSystem {
    /// 2 G(1; n, n0) over screen rows.
    pub g_n: DMatrix<Complex64>,
    pub p_vec: DVector<Complex64>,
    pub q_vec: DVector<Complex64>,
    /// Rows G(0; -n1-1, n) and G(0; n2+1, n).
    pub g_row: DVector<Complex64>,
    pub h_row: DVector<Complex64>,
    pub g2: DMatrix<Complex64>,
    pub h2: DMatrix<Complex64>,
    pub cond: f64,
}

/// Solved screen unknowns.
pub struct BaeSolution {
    pub green: TailoredGreen,
    pub p: i64,
    pub system: BaeSystem,
    /// u_sc(1, n) for n = -n1..=n2.
    pub screen: DVector<Complex64>,
    /// (u_sc(0, -n1-1), u_sc(0, n2+1)).
    pub corners: [Complex64; 2],
    /// Incident average (u_in(-1, n) + u_in(1, n)) / 2 on the screen rows.
    pub u_in: DVector<Complex64>,
    /// Incident values at the two corner nodes.
    pub u_in_corners: [Complex64; 2],
}

fn screen_rows(g: &WaveguideGeometry) -> Vec<i64> {
    (-g.n1..=g.n2).collect()
}

/// Solve the BAE system for incident mode `p`.
pub fn solve_bae(g: &WaveguideGeometry, f: &LatticeFrequency, p: i64, quadrature: Quadrature) -> Result<BaeSolution> {
    g.validate()?;
    f.validate()?;
    validate_frequency(g, f)?;
    let md = mode(p, g, f)?;
    if !md.propagating {
        return Err(LatticeError::BelowCutoff(p as usize));
    }
    if g.ell1() < 2 || g.ell2() < 2 {
        return Err(LatticeError::Geometry("gaps between screen and walls must be at least 2".into()));
    }
    let green = TailoredGreen::new(*g, *f, quadrature);
    let rows = screen_rows(g);
    let nn = rows.len();
    let (lo, hi) = (-g.n1 - 1, g.n2 + 1);

    let mut req = Vec::with_capacity(nn * nn + 4 * nn);
    for &a in &rows {
        for &b in &rows {
            req.push((1, a, b));
        }
    }
    for &b in &rows {
        req.push((0, lo, b));
        req.push((0, hi, b));
    }
    let vals = green.batch(&req)?;
    let g_n = DMatrix::from_fn(nn, nn, |i, k| 2.0 * vals[i * nn + k]);
    let p_vec = DVector::from_fn(nn, |i, _| vals[i * nn + nn - 1]);
    let q_vec = DVector::from_fn(nn, |i, _| vals[i * nn]);
    let off = nn * nn;
    let g_row = DVector::from_fn(nn, |k, _| vals[off + 2 * k]);
    let h_row = DVector::from_fn(nn, |k, _| vals[off + 2 * k + 1]);
    let g2 = DMatrix::from_row_slice(2, 2, &[g_row[0], g_row[nn - 1], h_row[0], h_row[nn - 1]]);

    let a = DMatrix::identity(nn, nn) - &g_n;
    let fac = Factored::new(a, MAX_COND, "I - G_N").map_err(resonant)?;
    let ainv_q = fac.solve(&q_vec);
    let ainv_p = fac.solve(&p_vec);
    let h2 = DMatrix::from_row_slice(
        2,
        2,
        &[g_row.dot(&ainv_q), g_row.dot(&ainv_p), h_row.dot(&ainv_q), h_row.dot(&ainv_p)],
    );

    let xp = md.x_factor;
    let avg = 0.5 * (xp + xp.inv());
    let u_in = DVector::from_fn(nn, |i, _| avg * md.s(rows[i] + g.big_n1));
    let u_in_corners = [md.s(lo + g.big_n1), md.s(hi + g.big_n1)];
    let uin_star = DVector::from_vec(u_in_corners.to_vec());

    let c2f = Complex64::new(2.0, 0.0);
    let gu = &g_n * &u_in;
    let w = &u_in + fac.solve(&gu);
    let rhs = (&g2 + &h2 * c2f) * &uin_star
        + DVector::from_vec(vec![2.0 * g_row.dot(&w), 2.0 * h_row.dot(&w)]);
    let corner_mat = DMatrix::identity(2, 2) - &g2 - &h2 * c2f;
    let cfac = Factored::new(corner_mat, MAX_COND, "corner system").map_err(resonant)?;
    let ustar = cfac.solve(&rhs);
    let c1 = ustar[0] + u_in_corners[0];
    let c2 = ustar[1] + u_in_corners[1];
    let screen = fac.solve(&(gu + &p_vec * c2 + &q_vec * c1));
    log::debug!("BAE solved: N = {nn}, cond = {:.3e}, corner cond = {:.3e}", fac.cond, cfac.cond);

    Ok(BaeSolution {
        green,
        p,
        system: BaeSystem { g_n, p_vec, q_vec, g_row, h_row, g2, h2, cond: fac.cond.max(cfac.cond) },
        screen,
        corners: [ustar[0], ustar[1]],
        u_in,
        u_in_corners,
    })
}

fn resonant(e: LatticeError) -> LatticeError {
    match e {
        LatticeError::Degenerate(s) => LatticeError::Resonant(s),
        other => other,
    }
}

impl BaeSolution {
    pub fn geometry(&self) -> &WaveguideGeometry {
        &self.green.geometry
    }

    pub fn frequency(&self) -> &LatticeFrequency {
        &self.green.frequency
    }

    /// Source density on the screen rows: 2u + 2u_in plus the corner terms.
    fn density(&self) -> Vec<Complex64> {
        let nn = self.screen.len();
        let mut d: Vec<Complex64> = (0..nn).map(|i| 2.0 * (self.screen[i] + self.u_in[i])).collect();
        d[nn - 1] += self.corners[1] + self.u_in_corners[1];
        d[0] += self.corners[0] + self.u_in_corners[0];
        d
    }

    /// u_sc at a single node.
    pub fn value(&self, m: i64, n: i64) -> Result<Complex64> {
        let g = self.geometry();
        let rows = screen_rows(g);
        let req: Vec<_> = rows.iter().map(|&k| (m, k, n)).collect();
        let vals = self.green.batch(&req)?;
        Ok(vals.iter().zip(self.density()).map(|(a, b)| a * b).sum())
    }

    /// Scattered field on the window.
    pub fn scattered(&self, window: Window) -> Result<ComplexField> {
        let g = *self.geometry();
        let rows = screen_rows(&g);
        let reach = window.reach();
        let dms: Vec<i64> = if window.m_min <= 0 && window.m_max >= 0 {
            (0..=reach).collect()
        } else {
            let a = window.m_min.abs().min(window.m_max.abs());
            (a..=reach).collect()
        };
        let mut req = Vec::new();
        for &dm in &dms {
            for n in -g.big_n1..=g.big_n2 {
                for &k in &rows {
                    req.push((dm, k, n));
                }
            }
        }
        self.green.batch(&req)?;
        let dens = self.density();
        let mut out = ComplexField::zeros(window, &g);
        let cols: Vec<(i64, Vec<Complex64>)> = (window.m_min..=window.m_max)
            .into_par_iter()
            .map(|m| {
                let mut col = Vec::with_capacity(g.rows());
                for n in -g.big_n1..=g.big_n2 {
                    let req: Vec<_> = rows.iter().map(|&k| (m, k, n)).collect();
                    let vals = self.green.batch(&req)?;
                    col.push(vals.iter().zip(&dens).map(|(a, b)| a * b).sum());
                }
                Ok((m, col))
            })
            .collect::<Result<_>>()?;
        for (m, col) in cols {
            for (i, v) in col.into_iter().enumerate() {
                out.set(m, i as i64 - g.big_n1, v);
            }
        }
        Ok(out)
    }

    /// (scattered, total) fields on the window.
    pub fn fields(&self, window: Window) -> Result<(ComplexField, ComplexField)> {
        let sc = self.scattered(window)?;
        let inc = incident_field(self.p, self.geometry(), self.frequency(), window)?;
        let tot = sc.add(&inc);
        Ok((sc, tot))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_core::helmholtz_residual;

    #[test]
    fn asymmetric_screen_condition_and_residual() {
        let g = WaveguideGeometry::new(1, 3, 4, 6).unwrap();
        let f = LatticeFrequency::new(1.2, 0.0).unwrap();
        let sol = solve_bae(&g, &f, 2, Quadrature::default()).unwrap();
        let (sc, tot) = sol.fields(Window::symmetric(6)).unwrap();
        for n in -g.n1..=g.n2 {
            assert!(tot.get(0, n).norm() < 1e-9, "n={n} {}", tot.get(0, n));
        }
        assert!((sc.get(1, 0) - sol.screen[1]).norm() < 1e-12);
        assert!((sc.get(0, g.n2 + 1) - sol.corners[1]).norm() < 1e-12);
        assert!(helmholtz_residual(&tot, Some(&g), &f) < 1e-9);
        for m in 1..=6 {
            for n in -g.big_n1..=g.big_n2 {
                assert!((sc.get(m, n) - sc.get(-m, n)).norm() < 1e-12);
            }
        }
    }
}
