//! Liouville-constant linear system and the plus-function evaluators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::split::SplitFunctions;
use crate::error::{LatticeError, Result};
use crate::lattice_core::{validate_frequency, LatticeFrequency, WaveguideGeometry};
use crate::linalg::Factored;
use crate::quadrature::circle_mean;
use crate::spectral_roots::{denominator_roots, Cancellation, DenominatorRoots};

const MAX_COND: f64 = 1e14;
/// Evaluators switch to a circle mean within this distance of a removable singularity.
const NEAR: f64 = 1e-6;

/// Solved spectral unknowns.
#[derive(Debug, Clone)]
pub struct SplitCoefficients {
    /// U0_+ at the outside K0 poles.
    pub w0_plus: Vec<Complex64>,
    /// U1_+ at the outside K1 poles.
    pub w1_plus: Vec<Complex64>,
    /// Scattered field at (0, n2 + 1).
    pub u_star: Complex64,
    pub f_p: Complex64,
    pub f_star: Complex64,
}

/// Pole-removal solution for one symmetric geometry, frequency and odd incident mode.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    pub coefficients: SplitCoefficients,
    pub split: SplitFunctions,
    pub denominator: DenominatorRoots,
    /// Normal-form geometry used internally.
    pub geometry: WaveguideGeometry,
    /// Geometry as supplied by the caller.
    pub input_geometry: WaveguideGeometry,
    pub frequency: LatticeFrequency,
    pub p: i64,
    pub cond: f64,
    /// Number of completion rows used in place of missing denominator roots.
    pub completion_rows: usize,
    special: Vec<Complex64>,
    far: f64,
}

/// Build and solve the linear system for the unknown plus-function values.
pub fn assemble_and_solve_system(g: &WaveguideGeometry, f: &LatticeFrequency, p: i64) -> Result<SpectralSolution> {
    g.validate()?;
    f.validate()?;
    if !g.is_symmetric() {
        return Err(LatticeError::Unsupported("pole removal needs equal gaps on both sides of the screen".into()));
    }
    if p % 2 == 0 {
        return Err(LatticeError::Unsupported(format!("pole removal handles odd incident modes only, got p = {p}")));
    }
    validate_frequency(g, f)?;
    let gn = g.normal_form();
    let sf = SplitFunctions::new(&gn, f, p)?;
    let den = denominator_roots(&gn, f)?;
    let (j0, j1) = (sf.j0(), sf.j1());
    let size = j0 + j1;
    if den.roots.len() != size {
        return Err(LatticeError::Degenerate(format!(
            "{} denominator roots for {size} unknowns",
            den.roots.len()
        )));
    }
    let mut a = DMatrix::<Complex64>::zeros(size, size);
    let mut b = DVector::<Complex64>::zeros(size);
    let mut completion_rows = 0;
    for (i, (r, c)) in den.roots.iter().zip(&den.cancellation).enumerate() {
        match *c {
            Cancellation::None => {
                let x = r.x_out;
                let k0 = sf.k0.eval(x);
                for j in 0..j1 {
                    a[(i, j)] = k0 * sf.f1(j, x);
                }
                for j in 0..j0 {
                    a[(i, j1 + j)] = sf.f0(j, x);
                }
                b[i] = -(sf.g0(x) + k0 * sf.g1(x));
            }
            Cancellation::K0Pole(q) => {
                completion_rows += 1;
                log::info!("completion row: K0 pole {q} at z = {:.12} cancelled by a K1 zero", r.z);
                let x = sf.k0.poles[q].x_out;
                for j in 0..j1 {
                    a[(i, j)] = -sf.f1(j, x);
                }
                a[(i, j1 + q)] = Complex64::new(1.0, 0.0);
                b[i] = sf.g1(x);
            }
            Cancellation::K1Pole(q) => {
                completion_rows += 1;
                log::info!("completion row: K1 pole {q} at z = {:.12} cancelled by a K0 zero", r.z);
                let x = sf.k1.poles[q].x_out;
                for j in 0..j0 {
                    a[(i, j1 + j)] = -sf.f0(j, x);
                }
                a[(i, q)] = Complex64::new(1.0, 0.0);
                b[i] = sf.g0(x);
            }
        }
        let scale = a.row(i).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale > 0.0 {
            let s = Complex64::new(1.0 / scale, 0.0);
            a.row_mut(i).scale_mut(1.0 / scale);
            b[i] *= s;
        }
    }
    let fac = Factored::new(a, MAX_COND, "pole-removal system")?;
    let w = fac.solve(&b);
    let w1_plus: Vec<Complex64> = w.iter().take(j1).copied().collect();
    let w0_plus: Vec<Complex64> = w.iter().skip(j1).copied().collect();
    let mut u_star = Complex64::new(0.0, 0.0);
    for j in 0..j0 {
        u_star += w0_plus[j] * (sf.k0.b_minus[j] - sf.k0.b_plus[j]) + sf.s_l * sf.k0.b_minus[j];
    }
    log::debug!("pole-removal system: size {size}, cond {:.3e}, completion rows {completion_rows}", fac.cond);

    let mut special = vec![Complex64::new(0.0, 0.0), sf.x_p, sf.x_p.inv()];
    for r in den.roots.iter().chain(&sf.k0.poles).chain(&sf.k1.poles) {
        special.push(r.x_in);
        special.push(r.x_out);
    }
    let far = 4.0 * special.iter().map(|s| s.norm()).fold(1.0, f64::max);
    let coefficients = SplitCoefficients { w0_plus, w1_plus, u_star, f_p: sf.f_p, f_star: sf.f_star };
    Ok(SpectralSolution {
        coefficients,
        split: sf,
        denominator: den,
        geometry: gn,
        input_geometry: *g,
        frequency: *f,
        p,
        cond: fac.cond,
        completion_rows,
        special,
        far,
    })
}

impl SpectralSolution {
    pub fn u_star(&self) -> Complex64 {
        self.coefficients.u_star
    }

    /// Radius for a circle mean around `center` that stays clear of the other special points.
    pub(crate) fn guard_radius(&self, center: Complex64, cap: f64) -> f64 {
        let d = self
            .special
            .iter()
            .map(|s| (s - center).norm())
            .filter(|&d| d > 1e-9)
            .fold(f64::INFINITY, f64::min);
        cap.min(0.3 * d)
    }

    /// N(x) Q0(x) Q1(x) as a polynomial, where U1_+ = N / (1 + K0 K1).
    pub fn numerator(&self, x: Complex64) -> Complex64 {
        let sf = &self.split;
        let c = &self.coefficients;
        let mut k1_part = sf.g1_q1(x);
        for (j, w) in c.w1_plus.iter().enumerate() {
            k1_part += w * sf.f1_q1(j, x);
        }
        let mut k0_part = sf.g0_q0(x);
        for (j, w) in c.w0_plus.iter().enumerate() {
            k0_part += w * sf.f0_q0(j, x);
        }
        -x * sf.k0.p(x) * k1_part + sf.k1.q(x) * k0_part
    }

    fn u1_plus_raw(&self, x: Complex64) -> Complex64 {
        if x.norm() > self.far {
            return self.u1_plus_direct(x);
        }
        self.numerator(x) / self.denominator.w(x)
    }

    /// U1_+ from the undeflated quotient; used far from every pole where the
    /// polynomial products would overflow.
    fn u1_plus_direct(&self, x: Complex64) -> Complex64 {
        let sf = &self.split;
        let c = &self.coefficients;
        let k0 = sf.k0.eval(x);
        let k1 = sf.k1.eval(x);
        let mut s1 = sf.g1(x);
        for (j, w) in c.w1_plus.iter().enumerate() {
            s1 += w * sf.f1(j, x);
        }
        let mut s0 = sf.g0(x);
        for (j, w) in c.w0_plus.iter().enumerate() {
            s0 += w * sf.f0(j, x);
        }
        (k0 * s1 + s0) / (1.0 + k0 * k1)
    }

    /// U1_+(x), analytic outside the contour.
    pub fn u1_plus(&self, x: Complex64) -> Complex64 {
        for r in &self.denominator.roots {
            if (x - r.x_out).norm() < NEAR {
                let rad = self.guard_radius(r.x_out, 1e-3);
                return circle_mean(|t| self.u1_plus_raw(t), r.x_out, rad, 64);
            }
        }
        self.u1_plus_raw(x)
    }

    fn u0_plus_raw(&self, x: Complex64) -> Complex64 {
        let sf = &self.split;
        let mut v = -self.u1_plus(x) * sf.k1.eval(x) + sf.g1(x);
        for (j, w) in self.coefficients.w1_plus.iter().enumerate() {
            v += w * sf.f1(j, x);
        }
        v
    }

    /// U0_+(x), analytic outside the contour.
    pub fn u0_plus(&self, x: Complex64) -> Complex64 {
        for r in &self.split.k1.poles {
            if (x - r.x_out).norm() < NEAR {
                let rad = self.guard_radius(r.x_out, 1e-3);
                return circle_mean(|t| self.u0_plus_raw(t), r.x_out, rad, 64);
            }
        }
        self.u0_plus_raw(x)
    }

    /// Liouville constant C1 recomputed from the solved coefficients; zero for a consistent solution.
    pub fn c1_residual(&self) -> Complex64 {
        let sf = &self.split;
        let c = &self.coefficients;
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..sf.j1() {
            let wm = c.w1_plus[j] - c.u_star;
            s += wm * sf.k1.b_minus[j] + c.w1_plus[j] * sf.k1.b_plus[j];
        }
        s - sf.s_lm1 * c.f_p + c.u_star * c.f_star
    }

    /// Psi_0(x) = U0_+(1/x) - U0_+(x) + s_p(l).
    pub fn psi0(&self, x: Complex64) -> Complex64 {
        self.u0_plus(x.inv()) - self.u0_plus(x) + self.split.s_l
    }

    /// Phi_1(x) = U1_+(1/x) + U1_+(x) - u*.
    pub fn phi1(&self, x: Complex64) -> Complex64 {
        self.u1_plus(x.inv()) + self.u1_plus(x) - self.coefficients.u_star
    }
}
