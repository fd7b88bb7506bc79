//! Zero and pole catalogues of the scalar kernels and of the Wiener-Hopf
//! denominator, built from closed-form Chebyshev roots.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{LatticeError, Result};
use crate::lattice_core::{chebyshev_v, reciprocal_roots, LatticeFrequency, WaveguideGeometry};

/// Two z-roots closer than this are treated as the same root.
pub const ROOT_MATCH_TOL: f64 = 1e-10;

/// Reciprocal roots x_in, x_out of x^2 + gamma x + 1 attached to a z-plane root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReciprocalPair {
    pub z: f64,
    pub gamma: Complex64,
    pub x_in: Complex64,
    pub x_out: Complex64,
    pub degenerate: bool,
}

impl ReciprocalPair {
    /// x^2 + gamma x + 1.
    pub fn quad(&self, x: Complex64) -> Complex64 {
        x * (x + self.gamma) + 1.0
    }
}

/// Roots of V_J: cos(pi j / (J + 1)), j = 1..J, strictly decreasing.
pub fn roots_of_v(j: usize) -> Vec<f64> {
    (1..=j).map(|k| (PI * k as f64 / (j + 1) as f64).cos()).collect()
}

/// Roots of 1 - V_J split into the two closed-form families.
pub fn roots_of_one_minus_v(j: usize) -> (Vec<f64>, Vec<f64>) {
    let jf = j as f64;
    let fam1 = (1..).take_while(|&k| (k as f64) < jf / 2.0).map(|k| (2.0 * PI * k as f64 / jf).cos()).collect();
    let fam2 = (0..)
        .take_while(|&k| (k as f64) < (jf + 1.0) / 2.0)
        .map(|k| (PI * (2 * k + 1) as f64 / (jf + 2.0)).cos())
        .collect();
    (fam1, fam2)
}

/// Pair of x-roots for the z-root `z`, with gamma = 2z + omega^2 - 4.
pub fn x_pair_from_z(z: f64, f: &LatticeFrequency) -> ReciprocalPair {
    let gamma = f.omega_sq() - 4.0 + 2.0 * z;
    let (x_in, x_out, degenerate) = reciprocal_roots(gamma, f.probe_shift());
    ReciprocalPair { z, gamma, x_in, x_out, degenerate }
}

/// Multiset difference a \ b under [`ROOT_MATCH_TOL`]; returns (kept, removed).
pub fn multiset_minus(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut used = vec![false; b.len()];
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for &x in a {
        let hit = b.iter().enumerate().position(|(i, &y)| !used[i] && (x - y).abs() <= ROOT_MATCH_TOL);
        match hit {
            Some(i) => {
                used[i] = true;
                removed.push(x);
            }
            None => kept.push(x),
        }
    }
    (kept, removed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    K0,
    K1,
}

/// Zero/pole catalogue and residue weights of one scalar kernel.
///
/// K0 = V_{l-2}/V_{l-1} = -x P/Q and K1 = V_{l0-2}/(1 - V_{l0-1}) = x P/Q.
#[derive(Debug, Clone)]
pub struct RationalKernelData {
    pub kind: KernelKind,
    pub zeros: Vec<ReciprocalPair>,
    pub poles: Vec<ReciprocalPair>,
    /// z-roots shared by numerator and denominator and removed from both.
    pub cancelled: Vec<f64>,
    /// b_{j,-} (inside pole) for each pole pair.
    pub b_minus: Vec<Complex64>,
    /// b_{j,+} (outside pole) for each pole pair.
    pub b_plus: Vec<Complex64>,
    order: i64,
}

impl RationalKernelData {
    /// Number of pole pairs.
    pub fn j(&self) -> usize {
        self.poles.len()
    }

    fn sign(&self) -> f64 {
        match self.kind {
            KernelKind::K0 => -1.0,
            KernelKind::K1 => 1.0,
        }
    }

    pub fn p(&self, x: Complex64) -> Complex64 {
        self.zeros.iter().map(|r| r.quad(x)).product()
    }

    pub fn q(&self, x: Complex64) -> Complex64 {
        self.poles.iter().map(|r| r.quad(x)).product()
    }

    /// Q with the factor of pole pair `skip` removed.
    pub fn q_without(&self, x: Complex64, skip: usize) -> Complex64 {
        self.poles.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, r)| r.quad(x)).product()
    }

    /// Kernel from its factored rational form.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.sign() * x * self.p(x) / self.q(x)
    }

    /// Kernel multiplied by the quadratic of pole pair `j` (finite at that pole).
    pub fn eval_times_quad(&self, x: Complex64, j: usize) -> Complex64 {
        self.sign() * x * self.p(x) / self.q_without(x, j)
    }

    /// Kernel from direct Chebyshev evaluation at z(x).
    pub fn eval_direct(&self, x: Complex64, f: &LatticeFrequency) -> Complex64 {
        let z = z_of_x(x, f);
        match self.kind {
            KernelKind::K0 => chebyshev_v(self.order - 2, z) / chebyshev_v(self.order - 1, z),
            KernelKind::K1 => chebyshev_v(self.order - 2, z) / (1.0 - chebyshev_v(self.order - 1, z)),
        }
    }

    /// Residue of the kernel at the inside (`plus = false`) or outside pole of pair j.
    pub fn residue(&self, j: usize, plus: bool) -> Complex64 {
        let (lam, b) = if plus { (self.poles[j].x_out, self.b_plus[j]) } else { (self.poles[j].x_in, self.b_minus[j]) };
        lam * b
    }
}

/// z(x) = -(omega^2 - 4 + x + 1/x)/2.
pub fn z_of_x(x: Complex64, f: &LatticeFrequency) -> Complex64 {
    -(f.omega_sq() - 4.0 + x + x.inv()) * 0.5
}

fn pairs(zs: &[f64], f: &LatticeFrequency, what: &str) -> Result<Vec<ReciprocalPair>> {
    zs.iter()
        .map(|&z| {
            let p = x_pair_from_z(z, f);
            if p.degenerate {
                Err(LatticeError::DegenerateRoot(format!("{what} at z={z} has a confluent pair")))
            } else {
                Ok(p)
            }
        })
        .collect()
}

fn check_distinct(zs: &[f64], what: &str) -> Result<()> {
    for (i, a) in zs.iter().enumerate() {
        for b in &zs[i + 1..] {
            if (a - b).abs() <= ROOT_MATCH_TOL {
                return Err(LatticeError::DegenerateRoot(format!("{what} has a repeated root z={a}")));
            }
        }
    }
    Ok(())
}

/// z-plane zeros, poles and cancelled roots of a kernel.
pub fn kernel_z_roots(kind: KernelKind, g: &WaveguideGeometry) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    match kind {
        KernelKind::K0 => {
            let ell = g.ell1() as usize;
            (roots_of_v(ell - 2), roots_of_v(ell - 1), Vec::new())
        }
        KernelKind::K1 => {
            let ell0 = g.ell0() as usize;
            let num = roots_of_v(ell0 - 2);
            let (f1, f2) = roots_of_one_minus_v(ell0 - 1);
            let den: Vec<f64> = f1.into_iter().chain(f2).collect();
            let (zeros, cancelled) = multiset_minus(&num, &den);
            let (poles, _) = multiset_minus(&den, &cancelled);
            (zeros, poles, cancelled)
        }
    }
}

/// Catalogue of kernel `kind` for a symmetric duct.
pub fn kernel_data(kind: KernelKind, g: &WaveguideGeometry, f: &LatticeFrequency) -> Result<RationalKernelData> {
    if !g.is_symmetric() {
        return Err(LatticeError::Unsupported("kernel catalogue needs a symmetric duct".into()));
    }
    if g.ell0() < 2 {
        return Err(LatticeError::Unsupported("kernel catalogue needs a screen of length >= 2".into()));
    }
    let (zz, pz, cancelled) = kernel_z_roots(kind, g);
    check_distinct(&pz, "kernel denominator")?;
    let zeros = pairs(&zz, f, "kernel zero")?;
    let poles = pairs(&pz, f, "kernel pole")?;
    let order = match kind {
        KernelKind::K0 => g.ell1(),
        KernelKind::K1 => g.ell0(),
    };
    let mut k = RationalKernelData { kind, zeros, poles, cancelled, b_minus: Vec::new(), b_plus: Vec::new(), order };
    let s = k.sign();
    for j in 0..k.poles.len() {
        let r = k.poles[j];
        let bm = s * k.p(r.x_in) / ((r.x_in - r.x_out) * k.q_without(r.x_in, j));
        let bp = s * k.p(r.x_out) / ((r.x_out - r.x_in) * k.q_without(r.x_out, j));
        k.b_minus.push(bm);
        k.b_plus.push(bp);
    }
    Ok(k)
}

/// Why a root of the reduced denominator does not produce a pole of 1/(1 + K0 K1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cancellation {
    None,
    /// Pole pair `j` of K0 removed by a zero of K1.
    K0Pole(usize),
    /// Pole pair `j` of K1 removed by a zero of K0.
    K1Pole(usize),
}

/// Roots of the reduced denominator V_{l-1} q1 + V_{l-2} p1.
#[derive(Debug, Clone)]
pub struct DenominatorRoots {
    pub roots: Vec<ReciprocalPair>,
    pub cancellation: Vec<Cancellation>,
}

impl DenominatorRoots {
    /// Pairs that are genuine poles of 1/(1 + K0 K1).
    pub fn nu(&self) -> Vec<ReciprocalPair> {
        self.roots.iter().zip(&self.cancellation).filter(|(_, c)| **c == Cancellation::None).map(|(r, _)| *r).collect()
    }
    /// Number of genuine pole pairs.
    pub fn j(&self) -> usize {
        self.cancellation.iter().filter(|c| **c == Cancellation::None).count()
    }
    /// Product of x^2 + gamma x + 1 over every root.
    pub fn w(&self, x: Complex64) -> Complex64 {
        self.roots.iter().map(|r| r.quad(x)).product()
    }
    /// Derivative of `w` at a root x of pair `k`.
    pub fn w_prime_at(&self, k: usize, x: Complex64) -> Complex64 {
        let own = 2.0 * x + self.roots[k].gamma;
        own * self.roots.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, r)| r.quad(x)).product::<Complex64>()
    }
}

/// Roots of V_{l-1} - V_{l+l0-2} with the K1 common factor removed, tagged by cancellation.
pub fn denominator_roots(g: &WaveguideGeometry, f: &LatticeFrequency) -> Result<DenominatorRoots> {
    if !g.is_symmetric() {
        return Err(LatticeError::Unsupported("denominator catalogue needs a symmetric duct".into()));
    }
    let ell = g.ell1();
    let ell0 = g.ell0();
    let n = 2 * ell + ell0 - 1;
    let z3: Vec<f64> = (1..).take_while(|&k| 2 * k < ell0 - 1).map(|k| (2.0 * PI * k as f64 / (ell0 - 1) as f64).cos()).collect();
    let z4: Vec<f64> = (0..).take_while(|&k| 2 * k + 1 < n).map(|k| (PI * (2 * k + 1) as f64 / n as f64).cos()).collect();
    let all: Vec<f64> = z3.into_iter().chain(z4).collect();
    let (_, k1_poles, common) = kernel_z_roots(KernelKind::K1, g);
    let (_, k0_poles, _) = kernel_z_roots(KernelKind::K0, g);
    let (reduced, _) = multiset_minus(&all, &common);
    check_distinct(&reduced, "denominator")?;
    let mut roots = Vec::new();
    let mut cancellation = Vec::new();
    for z in reduced {
        let c = if let Some(j) = k0_poles.iter().position(|&p| (p - z).abs() <= ROOT_MATCH_TOL) {
            Cancellation::K0Pole(j)
        } else if let Some(j) = k1_poles.iter().position(|&p| (p - z).abs() <= ROOT_MATCH_TOL) {
            Cancellation::K1Pole(j)
        } else {
            Cancellation::None
        };
        let p = x_pair_from_z(z, f);
        if p.degenerate {
            return Err(LatticeError::DegenerateRoot(format!("denominator root z={z} has a confluent pair")));
        }
        roots.push(p);
        cancellation.push(c);
    }
    Ok(DenominatorRoots { roots, cancellation })
}

/// Direct Chebyshev value of V_{l-1} - V_{l+l0-2} at z.
pub fn denominator_direct(g: &WaveguideGeometry, z: Complex64) -> Complex64 {
    chebyshev_v(g.ell1() - 1, z) - chebyshev_v(g.ell1() + g.ell0() - 2, z)
}
