//! Complex fields on a finite window of the duct, inner products and residuals.

use num_complex::Complex64;

use super::{mode, s_mode, LatticeFrequency, WaveguideGeometry};
use crate::error::{LatticeError, Result};

/// Column range of a field window; rows always span the whole duct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Window {
    pub m_min: i64,
    pub m_max: i64,
}

impl Window {
    pub fn new(m_min: i64, m_max: i64) -> Result<Self> {
        if m_max < m_min {
            return Err(LatticeError::Window(format!("empty window {m_min}..{m_max}")));
        }
        Ok(Window { m_min, m_max })
    }
    pub fn symmetric(half: i64) -> Self {
        Window { m_min: -half, m_max: half }
    }
    pub fn columns(&self) -> usize {
        (self.m_max - self.m_min + 1) as usize
    }
    pub fn contains(&self, m: i64) -> bool {
        m >= self.m_min && m <= self.m_max
    }
    /// Largest |m| in the window.
    pub fn reach(&self) -> i64 {
        self.m_min.abs().max(self.m_max.abs())
    }
}

/// Dense complex grid indexed by (m, n), row-major by m then n.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub m_min: i64,
    pub m_max: i64,
    pub n_min: i64,
    pub n_max: i64,
    pub values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(window: Window, g: &WaveguideGeometry) -> Self {
        let rows = g.rows();
        ComplexField {
            m_min: window.m_min,
            m_max: window.m_max,
            n_min: -g.big_n1,
            n_max: g.big_n2,
            values: vec![Complex64::new(0.0, 0.0); window.columns() * rows],
        }
    }

    pub fn window(&self) -> Window {
        Window { m_min: self.m_min, m_max: self.m_max }
    }

    pub fn rows(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    fn index(&self, m: i64, n: i64) -> usize {
        debug_assert!(m >= self.m_min && m <= self.m_max && n >= self.n_min && n <= self.n_max);
        (m - self.m_min) as usize * self.rows() + (n - self.n_min) as usize
    }

    pub fn get(&self, m: i64, n: i64) -> Complex64 {
        self.values[self.index(m, n)]
    }

    pub fn set(&mut self, m: i64, n: i64, v: Complex64) {
        let i = self.index(m, n);
        self.values[i] = v;
    }

    /// Column m as a vector over n = n_min..=n_max.
    pub fn column(&self, m: i64) -> Result<&[Complex64]> {
        if m < self.m_min || m > self.m_max {
            return Err(LatticeError::Window(format!("column {m} outside {}..{}", self.m_min, self.m_max)));
        }
        let r = self.rows();
        let start = (m - self.m_min) as usize * r;
        Ok(&self.values[start..start + r])
    }

    /// Pointwise sum of two fields on the same window.
    pub fn add(&self, other: &ComplexField) -> ComplexField {
        assert_eq!(self.values.len(), other.values.len());
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        out
    }

    /// Largest pointwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Incident duct mode u_in(m, n) = x_p^m s_p(n + N1).
pub fn incident_field(
    p: i64,
    g: &WaveguideGeometry,
    f: &LatticeFrequency,
    window: Window,
) -> Result<ComplexField> {
    let md = mode(p, g, f)?;
    if !md.propagating || f.omega <= md.cutoff {
        return Err(LatticeError::BelowCutoff(p as usize));
    }
    let mut out = ComplexField::zeros(window, g);
    for m in window.m_min..=window.m_max {
        let xm = md.x_factor.powi(m as i32);
        for n in -g.big_n1..=g.big_n2 {
            out.set(m, n, xm * md.s(n + g.big_n1));
        }
    }
    Ok(out)
}

/// max |Delta u + omega^2 u| over interior nodes that are not on the screen.
///
/// Passing `None` for the geometry checks every interior node.
pub fn helmholtz_residual(u: &ComplexField, g: Option<&WaveguideGeometry>, f: &LatticeFrequency) -> f64 {
    let w2 = f.omega_sq();
    let mut worst: f64 = 0.0;
    for m in u.m_min + 1..u.m_max {
        for n in u.n_min + 1..u.n_max {
            if let Some(g) = g {
                if g.on_screen(m, n) {
                    continue;
                }
            }
            let lap = u.get(m + 1, n) + u.get(m - 1, n) + u.get(m, n + 1) + u.get(m, n - 1) - 4.0 * u.get(m, n);
            worst = worst.max((lap + w2 * u.get(m, n)).norm());
        }
    }
    worst
}

/// Discrete inner product sum f(n) conj(g(n)).
pub fn inner_product(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// <column, s_q> over n = -N1..=N2.
pub fn mode_inner_product(column: &[Complex64], q: i64, g: &WaveguideGeometry) -> Complex64 {
    let n = g.n();
    column.iter().enumerate().map(|(k, v)| v * s_mode(q, n, k as i64).conj()).sum()
}

/// <s_q, s_q> computed by summation.
pub fn mode_norm(q: i64, g: &WaveguideGeometry) -> f64 {
    let n = g.n();
    (0..=n).map(|k| s_mode(q, n, k).norm_sqr()).sum()
}
