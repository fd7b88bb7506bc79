//! Reflection and transmission coefficients, group velocities and energy balance.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LatticeError, Result};
use crate::lattice_core::{
    incident_field, mode, mode_inner_product, mode_norm, ComplexField, LatticeFrequency, WaveguideGeometry,
};
use crate::wh_pole_removal::SpectralSolution;

/// Coefficients of one outgoing mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCoefficient {
    pub q: i64,
    pub r: Complex64,
    pub t: Complex64,
    /// |v_q| for propagating modes; |sin K_q|/omega with complex K_q otherwise.
    pub group_velocity: f64,
    pub r_weighted: f64,
    pub t_weighted: f64,
    pub propagating: bool,
}

/// Coefficients for all reported modes and the energy-balance residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringCoefficients {
    pub p: i64,
    /// Propagating modes, plus evanescent ones when they carry a measured amplitude.
    pub modes: Vec<ModeCoefficient>,
    /// |sum over propagating q of |T~|^2 + |R~|^2 - 1|.
    pub energy_residual: f64,
    /// The same sum taken over every listed mode, evanescent ones included.
    pub apparent_energy_residual: f64,
    /// Largest projection onto modes that symmetry forbids (even q for odd p in a symmetric duct).
    pub forbidden_projection: f64,
}

impl ScatteringCoefficients {
    pub fn get(&self, q: i64) -> Option<&ModeCoefficient> {
        self.modes.iter().find(|m| m.q == q)
    }

    fn finish(p: i64, mut modes: Vec<ModeCoefficient>, forbidden_projection: f64) -> Result<Self> {
        let vp = modes
            .iter()
            .find(|m| m.q == p && m.propagating)
            .map(|m| m.group_velocity)
            .ok_or(LatticeError::BelowCutoff(p as usize))?;
        for m in &mut modes {
            let w = (m.group_velocity / vp).sqrt();
            m.r_weighted = w * m.r.norm();
            m.t_weighted = w * m.t.norm();
        }
        let sum = |all: bool| -> f64 {
            modes
                .iter()
                .filter(|m| all || m.propagating)
                .map(|m| m.r_weighted.powi(2) + m.t_weighted.powi(2))
                .sum()
        };
        let energy_residual = (sum(false) - 1.0).abs();
        let apparent_energy_residual = (sum(true) - 1.0).abs();
        Ok(ScatteringCoefficients { p, modes, energy_residual, apparent_energy_residual, forbidden_projection })
    }
}

/// Group velocity |v_q| = |dOmega/dK_q| = |sin K_q|/omega of a propagating mode.
pub fn group_velocity(q: i64, g: &WaveguideGeometry, f: &LatticeFrequency) -> Result<f64> {
    let md = mode(q, g, f)?;
    if !md.propagating {
        return Err(LatticeError::BelowCutoff(q as usize));
    }
    Ok(md.wavenumber().re.sin().abs() / f.omega)
}

fn weight_any(q: i64, g: &WaveguideGeometry, f: &LatticeFrequency) -> Result<f64> {
    let md = mode(q, g, f)?;
    Ok(md.wavenumber().sin().norm() / f.omega)
}

/// Coefficients from the residue amplitudes of the pole-removal solution.
pub fn coefficients_analytic(sol: &SpectralSolution) -> Result<ScatteringCoefficients> {
    let g = &sol.geometry;
    let f = &sol.frequency;
    let mut modes = Vec::new();
    for a in sol.modal_amplitudes()? {
        if !a.propagating {
            continue;
        }
        let t = if a.q == sol.p { a.amplitude + 1.0 } else { a.amplitude };
        modes.push(ModeCoefficient {
            q: a.q,
            r: a.amplitude,
            t,
            group_velocity: group_velocity(a.q, g, f)?,
            r_weighted: 0.0,
            t_weighted: 0.0,
            propagating: true,
        });
    }
    ScatteringCoefficients::finish(sol.p, modes, 0.0)
}

/// Coefficients from modal projections of a total field at columns m_r and -m_r.
///
/// Propagating amplitudes are de-propagated by x_q^{-m_r}. Evanescent modes
/// keep their raw local projection, which is what leaks into the apparent
/// energy residual close to a cut-off.
pub fn coefficients_numeric(
    total: &ComplexField,
    g: &WaveguideGeometry,
    f: &LatticeFrequency,
    p: i64,
    m_r: i64,
) -> Result<ScatteringCoefficients> {
    if m_r < 1 {
        return Err(LatticeError::Window(format!("projection column m_r = {m_r} must be positive")));
    }
    let right = total.column(m_r)?;
    let left = total.column(-m_r)?;
    let inc = incident_field(p, g, f, crate::lattice_core::Window { m_min: -m_r, m_max: -m_r })?;
    let left_sc: Vec<Complex64> = left.iter().zip(inc.column(-m_r)?).map(|(a, b)| a - b).collect();
    let symmetric_odd = g.is_symmetric() && p % 2 == 1;
    let mut modes = Vec::new();
    let mut forbidden: f64 = 0.0;
    for q in 1..g.n() {
        let md = mode(q, g, f)?;
        let norm = mode_norm(q, g);
        let pt = mode_inner_product(right, q, g) / norm;
        let pr = mode_inner_product(&left_sc, q, g) / norm;
        if symmetric_odd && q % 2 == 0 {
            forbidden = forbidden.max(pt.norm()).max(pr.norm());
            continue;
        }
        let (t, r) = if md.propagating {
            let d = md.x_factor.powi(-(m_r as i32));
            (pt * d, pr * d)
        } else {
            (pt, pr)
        };
        modes.push(ModeCoefficient {
            q,
            r,
            t,
            group_velocity: weight_any(q, g, f)?,
            r_weighted: 0.0,
            t_weighted: 0.0,
            propagating: md.propagating,
        });
    }
    ScatteringCoefficients::finish(p, modes, forbidden)
}

/// Energy flux from column m to m + 1: (omega/2) Im sum_n u_{m+1,n} conj(u_{m,n}).
pub fn energy_flux(field: &ComplexField, m: i64, f: &LatticeFrequency) -> Result<f64> {
    let a = field.column(m)?;
    let b = field.column(m + 1)?;
    let s: Complex64 = b.iter().zip(a).map(|(x, y)| x * y.conj()).sum();
    Ok(0.5 * f.omega * s.im)
}

/// Flux of the unit-amplitude incident mode.
pub fn incident_flux(g: &WaveguideGeometry, f: &LatticeFrequency, p: i64) -> Result<f64> {
    let md = mode(p, g, f)?;
    Ok(0.5 * f.omega * md.x_factor.im * mode_norm(p, g))
}

/// |(E_tot(m_r) - E_sc(-m_r)) / E_in - 1| from flux sums on the field.
pub fn flux_residual(
    scattered: &ComplexField,
    total: &ComplexField,
    g: &WaveguideGeometry,
    f: &LatticeFrequency,
    p: i64,
    m_r: i64,
) -> Result<f64> {
    let e_in = incident_flux(g, f, p)?;
    let e_tr = energy_flux(total, m_r, f)?;
    let e_ref = energy_flux(scattered, -m_r, f)?;
    Ok(((e_tr - e_ref) / e_in - 1.0).abs())
}
