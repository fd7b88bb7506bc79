//! Additive split functions of the symmetric pole-removal solution.

use num_complex::Complex64;

use crate::error::{LatticeError, Result};
use crate::lattice_core::{mode, LatticeFrequency, WaveguideGeometry};
use crate::quadrature::circle_mean;
use crate::spectral_roots::{kernel_data, KernelKind, RationalKernelData};

/// Distance below which an evaluator switches to its limit form.
pub const POLE_GUARD: f64 = 1e-8;

/// Known functions of the split for incident mode p in normal-form geometry.
#[derive(Debug, Clone)]
pub struct SplitFunctions {
    pub k0: RationalKernelData,
    pub k1: RationalKernelData,
    pub p: i64,
    pub x_p: Complex64,
    /// s_p(l) and s_p(l - 1).
    pub s_l: Complex64,
    pub s_lm1: Complex64,
    /// K1(x_p) = -s_p(l) / s_p(l - 1).
    pub k1_xp: Complex64,
    pub f_p: Complex64,
    pub f_star: Complex64,
}

impl SplitFunctions {
    /// Build the split functions; `g` must be a symmetric duct in normal form.
    pub fn new(g: &WaveguideGeometry, f: &LatticeFrequency, p: i64) -> Result<Self> {
        if !g.is_symmetric() || g.n1 != 0 {
            return Err(LatticeError::Unsupported("split functions need a symmetric duct in normal form".into()));
        }
        let md = mode(p, g, f)?;
        if !md.propagating {
            return Err(LatticeError::BelowCutoff(p as usize));
        }
        let ell = g.ell1();
        let s_l = md.s(ell);
        let s_lm1 = md.s(ell - 1);
        if s_lm1.norm() < 1e-12 {
            return Err(LatticeError::Unsupported(format!(
                "incident mode {p} has a node next to the screen edge row; use the BAE solver"
            )));
        }
        let k0 = kernel_data(KernelKind::K0, g, f)?;
        let k1 = kernel_data(KernelKind::K1, g, f)?;
        let x_p = md.x_factor;
        for r in &k1.poles {
            if (r.x_in - x_p).norm() < 1e-10 || (r.x_in - x_p.inv()).norm() < 1e-10 {
                return Err(LatticeError::DegenerateRoot(format!("x_p coincides with a K1 pole at z = {}", r.z)));
            }
        }
        let k1_xp = -s_l / s_lm1;
        let mut sf = SplitFunctions { k0, k1, p, x_p, s_l, s_lm1, k1_xp, f_p: k1_xp, f_star: Complex64::new(0.0, 0.0) };
        for j in 0..sf.k1.j() {
            let lm = sf.k1.poles[j].x_in;
            sf.f_p += sf.pi(lm) * sf.k1.b_minus[j];
            sf.f_star += sf.k1.b_minus[j];
        }
        Ok(sf)
    }

    pub fn j0(&self) -> usize {
        self.k0.j()
    }

    pub fn j1(&self) -> usize {
        self.k1.j()
    }

    /// Pi(x) = (x^2 - 1) / ((x - x_p)(x - 1/x_p)).
    pub fn pi(&self, x: Complex64) -> Complex64 {
        (x * x - 1.0) / ((x - self.x_p) * (x - self.x_p.inv()))
    }

    /// Pi_-(x) = x / (x - 1/x_p).
    pub fn pi_minus(&self, x: Complex64) -> Complex64 {
        x / (x - self.x_p.inv())
    }

    /// Pi_+(x) = x_p / (x - x_p).
    pub fn pi_plus(&self, x: Complex64) -> Complex64 {
        self.x_p / (x - self.x_p)
    }

    /// C^(s)(x) = sum_j b_{j,-} lambda_{j,-} / (x - lambda_{j,-}).
    pub fn c(&self, kind: KernelKind, x: Complex64) -> Complex64 {
        let k = self.kernel(kind);
        k.poles.iter().zip(&k.b_minus).map(|(r, b)| b * r.x_in / (x - r.x_in)).sum()
    }

    pub fn kernel(&self, kind: KernelKind) -> &RationalKernelData {
        match kind {
            KernelKind::K0 => &self.k0,
            KernelKind::K1 => &self.k1,
        }
    }

    /// F^(1)_j(x).
    pub fn f1(&self, j: usize, x: Complex64) -> Complex64 {
        let r = &self.k1.poles[j];
        self.k1.b_minus[j] * r.x_in / (x - r.x_in) + self.k1.b_plus[j] * r.x_out / (x - r.x_out)
    }

    /// F^(0)_j(x).
    pub fn f0(&self, j: usize, x: Complex64) -> Complex64 {
        let r = &self.k0.poles[j];
        self.k0.b_minus[j] * x / (x - r.x_in) - self.k0.b_plus[j] * x / (x - r.x_out)
    }

    /// G_0(x) = s_p(l) sum_j b0_{j,-} x / (x - lambda0_{j,-}).
    pub fn g0(&self, x: Complex64) -> Complex64 {
        self.s_l * self.k0.poles.iter().zip(&self.k0.b_minus).map(|(r, b)| b * x / (x - r.x_in)).sum::<Complex64>()
    }

    /// G_1(x) = -P - s_p(l-1) sum_j Pi(lambda1_{j,-}) b1_{j,-} lambda1_{j,-} / (x - lambda1_{j,-}),
    /// with P taken as its constant value s_p(l).
    pub fn g1(&self, x: Complex64) -> Complex64 {
        let sum: Complex64 = self
            .k1
            .poles
            .iter()
            .zip(&self.k1.b_minus)
            .map(|(r, b)| self.pi(r.x_in) * b * r.x_in / (x - r.x_in))
            .sum();
        -self.s_l - self.s_lm1 * sum
    }

    /// (x s_p(l) + x_p s_p(l-1) K1(x_p)) / (x - x_p) from its defining quotient.
    ///
    /// Here K1(x_p) is taken from the kernel itself so the removable
    /// singularity is a genuine check; near x_p the circle mean is returned.
    pub fn script_p(&self, x: Complex64) -> Complex64 {
        let k1 = self.k1.eval(self.x_p);
        let raw = |t: Complex64| (t * self.s_l + self.x_p * self.s_lm1 * k1) / (t - self.x_p);
        if (x - self.x_p).norm() < POLE_GUARD {
            circle_mean(raw, self.x_p, 1e-4, 64)
        } else {
            raw(x)
        }
    }

    /// [Pi K1]_+(x).
    pub fn pi_k1_plus(&self, x: Complex64) -> Complex64 {
        let sum: Complex64 = self
            .k1
            .poles
            .iter()
            .zip(&self.k1.b_minus)
            .map(|(r, b)| self.pi(r.x_in) * b * r.x_in / (x - r.x_in))
            .sum();
        self.k1_xp * self.x_p / (x - self.x_p) + sum
    }

    /// F(x) = s_p(l)(Pi + 1) + (Pi s_p(l-1) - u*) K1.
    pub fn forcing(&self, x: Complex64, u_star: Complex64) -> Complex64 {
        let pi = self.pi(x);
        self.s_l * (pi + 1.0) + (pi * self.s_lm1 - u_star) * self.k1.eval(x)
    }

    /// Split of the forcing for a given u*.
    pub fn forcing_split(&self, u_star: Complex64) -> ForcingSplit<'_> {
        ForcingSplit { sf: self, u_star }
    }

    /// F1_j Q1 as a polynomial.
    pub fn f1_q1(&self, j: usize, x: Complex64) -> Complex64 {
        let r = &self.k1.poles[j];
        let (bm, bp) = (self.k1.b_minus[j], self.k1.b_plus[j]);
        (bm * r.x_in * (x - r.x_out) + bp * r.x_out * (x - r.x_in)) * self.k1.q_without(x, j)
    }

    /// F0_j Q0 as a polynomial.
    pub fn f0_q0(&self, j: usize, x: Complex64) -> Complex64 {
        let r = &self.k0.poles[j];
        let (bm, bp) = (self.k0.b_minus[j], self.k0.b_plus[j]);
        x * (bm * (x - r.x_out) - bp * (x - r.x_in)) * self.k0.q_without(x, j)
    }

    /// G0 Q0 as a polynomial.
    pub fn g0_q0(&self, x: Complex64) -> Complex64 {
        let s: Complex64 = (0..self.j0())
            .map(|j| self.k0.b_minus[j] * x * (x - self.k0.poles[j].x_out) * self.k0.q_without(x, j))
            .sum();
        self.s_l * s
    }

    /// G1 Q1 as a polynomial.
    pub fn g1_q1(&self, x: Complex64) -> Complex64 {
        let s: Complex64 = (0..self.j1())
            .map(|j| {
                let r = &self.k1.poles[j];
                self.pi(r.x_in) * self.k1.b_minus[j] * r.x_in * (x - r.x_out) * self.k1.q_without(x, j)
            })
            .sum();
        -self.s_l * self.k1.q(x) - self.s_lm1 * s
    }
}

/// F = F_- + F_+ for a fixed u*.
pub struct ForcingSplit<'a> {
    sf: &'a SplitFunctions,
    pub u_star: Complex64,
}

impl ForcingSplit<'_> {
    pub fn f_plus(&self, x: Complex64) -> Complex64 {
        let sf = self.sf;
        sf.s_l * x / (x - sf.x_p) + sf.s_lm1 * sf.pi_k1_plus(x) - self.u_star * sf.c(KernelKind::K1, x)
    }

    pub fn f_minus(&self, x: Complex64) -> Complex64 {
        let sf = self.sf;
        let k1 = sf.k1.eval(x);
        sf.s_l * sf.pi_minus(x) + sf.s_lm1 * (sf.pi(x) * k1 - sf.pi_k1_plus(x))
            - self.u_star * (k1 - sf.c(KernelKind::K1, x))
    }
}
