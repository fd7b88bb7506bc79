//! Lattice geometry, dispersion relation and waveguide modes for the discrete
//! Helmholtz operator on a Dirichlet duct.

pub mod chebyshev;
pub mod field;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{LatticeError, Result};

pub use chebyshev::{chebyshev_t, chebyshev_v, chebyshev_v_prime, chebyshev_v_table};
pub use field::{
    helmholtz_residual, incident_field, inner_product, mode_inner_product, mode_norm,
    ComplexField, Window,
};

/// Imaginary frequency increment used to decide which root of a reciprocal
/// pair lies inside the unit circle when both have unit modulus.
pub const EPS_PROBE: f64 = 1e-8;

/// Tolerance used to reject a frequency sitting on a degeneracy.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[cfg(test)]
pub(crate) fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Wall offsets and screen extent of the duct.
///
/// Rows run from `-big_n1` (lower wall) to `big_n2` (upper wall); the screen
/// occupies column `m = 0` for rows `-n1..=n2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct WaveguideGeometry {
    pub n1: i64,
    pub n2: i64,
    pub big_n1: i64,
    pub big_n2: i64,
}

impl WaveguideGeometry {
    pub fn new(n1: i64, n2: i64, big_n1: i64, big_n2: i64) -> Result<Self> {
        let g = WaveguideGeometry { n1, n2, big_n1, big_n2 };
        g.validate()?;
        Ok(g)
    }

    /// Symmetric duct in normal form: n1 = 0, gap `ell` on both sides, screen length `ell0`.
    pub fn symmetric(ell: i64, ell0: i64) -> Result<Self> {
        if ell0 < 1 {
            return Err(LatticeError::Geometry(format!("screen length {ell0} < 1")));
        }
        Self::new(0, ell0 - 1, ell, ell + ell0 - 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 0 || self.n2 < 0 {
            return Err(LatticeError::Geometry(format!(
                "screen extents must be non-negative (n1={}, n2={})",
                self.n1, self.n2
            )));
        }
        if !(-self.big_n1 < -self.n1 && self.n2 < self.big_n2) {
            return Err(LatticeError::Geometry("screen must lie strictly inside the duct".into()));
        }
        if self.ell1() < 2 || self.ell2() < 2 {
            return Err(LatticeError::Geometry(format!(
                "gap lengths must be at least 2 (l1={}, l2={})",
                self.ell1(),
                self.ell2()
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> i64 {
        self.big_n1 + self.big_n2
    }
    pub fn ell1(&self) -> i64 {
        self.big_n1 - self.n1
    }
    pub fn ell2(&self) -> i64 {
        self.big_n2 - self.n2
    }
    pub fn ell0(&self) -> i64 {
        self.n1 + self.n2 + 1
    }
    pub fn is_symmetric(&self) -> bool {
        self.ell1() == self.ell2()
    }
    /// Number of rows including both walls.
    pub fn rows(&self) -> usize {
        (self.n() + 1) as usize
    }
    pub fn on_screen(&self, m: i64, n: i64) -> bool {
        m == 0 && n >= -self.n1 && n <= self.n2
    }
    /// The same duct shifted so that the screen starts at row 0.
    pub fn normal_form(&self) -> WaveguideGeometry {
        WaveguideGeometry {
            n1: 0,
            n2: self.n2 + self.n1,
            big_n1: self.big_n1 - self.n1,
            big_n2: self.big_n2 + self.n1,
        }
    }
}

/// Real frequency with a limiting-absorption imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LatticeFrequency {
    pub omega: f64,
    pub eps: f64,
}

impl LatticeFrequency {
    pub fn new(omega: f64, eps: f64) -> Result<Self> {
        let f = LatticeFrequency { omega, eps };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let top = 2.0 * 2f64.sqrt();
        if !self.omega.is_finite() || self.omega <= DEGENERACY_TOL || self.omega >= top - DEGENERACY_TOL {
            return Err(LatticeError::Frequency(format!("omega={} outside (0, 2*sqrt(2))", self.omega)));
        }
        if (self.omega - 2.0).abs() < DEGENERACY_TOL {
            return Err(LatticeError::Frequency("omega = 2 is a resonant degeneracy".into()));
        }
        if !(self.eps >= 0.0) {
            return Err(LatticeError::Frequency(format!("eps={} must be non-negative", self.eps)));
        }
        Ok(())
    }

    /// Complex frequency omega + i eps.
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.omega, self.eps)
    }

    /// (omega + i eps)^2.
    pub fn omega_sq(&self) -> Complex64 {
        let w = self.complex();
        w * w
    }

    /// Increment of omega^2 when eps grows by [`EPS_PROBE`].
    pub fn probe_shift(&self) -> Complex64 {
        let w = Complex64::new(self.omega, self.eps + EPS_PROBE);
        w * w - self.omega_sq()
    }

    pub fn with_eps(&self, eps: f64) -> LatticeFrequency {
        LatticeFrequency { omega: self.omega, eps }
    }
}

/// Reject frequencies that coincide with a band edge of some duct mode.
pub fn validate_frequency(g: &WaveguideGeometry, f: &LatticeFrequency) -> Result<()> {
    f.validate()?;
    let n = g.n();
    for j in 1..n {
        let (lo, hi) = band_edges(j, n);
        if (f.omega - lo).abs() < DEGENERACY_TOL || (f.omega - hi).abs() < DEGENERACY_TOL {
            return Err(LatticeError::Frequency(format!(
                "omega={} coincides with a band edge of mode {j}",
                f.omega
            )));
        }
    }
    Ok(())
}

/// Lower and upper band edges of mode j in a duct with N = `n`.
pub fn band_edges(j: i64, n: i64) -> (f64, f64) {
    let c = (j as f64 * PI / n as f64).cos();
    ((2.0 - 2.0 * c).sqrt(), (6.0 - 2.0 * c).sqrt())
}

/// Lambda(x) = (omega + i eps)^2 - 4 + x + 1/x.
pub fn lambda_of_x(x: Complex64, f: &LatticeFrequency) -> Result<Complex64> {
    if x.norm() == 0.0 {
        return Err(LatticeError::Domain("lambda_of_x at x = 0".into()));
    }
    Ok(f.omega_sq() - 4.0 + x + x.inv())
}

/// Roots of t^2 + gamma t + 1 split into (inside, outside, degenerate).
///
/// When both roots have unit modulus the split follows the roots of the
/// polynomial with `gamma + probe`.
pub fn reciprocal_roots(gamma: Complex64, probe: Complex64) -> (Complex64, Complex64, bool) {
    let (a, b) = raw_roots(gamma);
    let disc = gamma * gamma - 4.0;
    let degenerate = disc.norm() < 1e-13;
    let (ma, mb) = (a.norm(), b.norm());
    if (ma - mb).abs() > 1e-12 * ma.max(mb) {
        return if ma < mb { (a, b, degenerate) } else { (b, a, degenerate) };
    }
    let (pa, pb) = raw_roots(gamma + probe);
    let inner = if pa.norm() < pb.norm() { pa } else { pb };
    if (a - inner).norm() <= (b - inner).norm() {
        (a, b, degenerate)
    } else {
        (b, a, degenerate)
    }
}

fn raw_roots(gamma: Complex64) -> (Complex64, Complex64) {
    let s = (gamma * gamma - 4.0).sqrt();
    let big = if (gamma.conj() * s).re >= 0.0 { -(gamma + s) * 0.5 } else { -(gamma - s) * 0.5 };
    if big.norm() == 0.0 {
        return (Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0));
    }
    (big, big.inv())
}

/// Branch-selected y(x), the root of y^2 + Lambda y + 1 with |y| <= 1.
/// The flag is set at the branch points Lambda = +-2.
pub fn y_of_x(x: Complex64, f: &LatticeFrequency) -> Result<(Complex64, bool)> {
    let lam = lambda_of_x(x, f)?;
    let (y, _, degenerate) = reciprocal_roots(lam, f.probe_shift());
    Ok((y, degenerate))
}

/// s(n) = y^n - y^-n and c(n) = y^n + y^-n.
pub fn sine_c_funcs(y: Complex64, n: i64) -> Result<(Complex64, Complex64)> {
    if y.norm() == 0.0 {
        return Err(LatticeError::Domain("sine_c_funcs at y = 0".into()));
    }
    let a = y.powi(n as i32);
    let b = a.inv();
    Ok((a - b, a + b))
}

/// One transverse mode of the duct at a given frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideMode {
    pub j: usize,
    pub n: i64,
    pub theta: f64,
    pub x_factor: Complex64,
    pub cutoff: f64,
    pub upper_edge: f64,
    pub propagating: bool,
}

impl WaveguideMode {
    /// s_j(k) = y_j^k - y_j^-k = 2i sin(k theta_j), exactly zero on the walls.
    pub fn s(&self, k: i64) -> Complex64 {
        s_mode(self.j as i64, self.n, k)
    }

    /// K_j with x_j = exp(i K_j); real part in [0, pi] for propagating modes.
    pub fn wavenumber(&self) -> Complex64 {
        -Complex64::i() * self.x_factor.ln()
    }

    /// z_j = cos(theta_j).
    pub fn z(&self) -> f64 {
        self.theta.cos()
    }
}

/// 2i sin(pi j k / N) with the angle reduced in exact integer arithmetic.
pub fn s_mode(j: i64, n: i64, k: i64) -> Complex64 {
    let r = (j * k).rem_euclid(2 * n);
    if r == 0 || r == n {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, 2.0 * (PI * r as f64 / n as f64).sin())
}

/// Transverse mode j of the duct.
pub fn mode(j: i64, g: &WaveguideGeometry, f: &LatticeFrequency) -> Result<WaveguideMode> {
    let n = g.n();
    if j < 1 || j > n - 1 {
        return Err(LatticeError::ModeIndex { j, max: n - 1 });
    }
    let theta = j as f64 * PI / n as f64;
    let cos_t = theta.cos();
    let gamma = f.omega_sq() - 4.0 + 2.0 * cos_t;
    let (x_in, _, _) = reciprocal_roots(gamma, f.probe_shift());
    let (cutoff, upper_edge) = band_edges(j, n);
    let gamma0 = f.omega * f.omega - 4.0 + 2.0 * cos_t;
    Ok(WaveguideMode {
        j: j as usize,
        n,
        theta,
        x_factor: x_in,
        cutoff,
        upper_edge,
        propagating: gamma0.abs() < 2.0,
    })
}

/// All N-1 modes of the duct.
pub fn modes(g: &WaveguideGeometry, f: &LatticeFrequency) -> Vec<WaveguideMode> {
    (1..g.n()).map(|j| mode(j, g, f).expect("index in range")).collect()
}
