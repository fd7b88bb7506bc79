//! C interface to the lattice waveguide solvers.
//!
//! Every function returns an [`LwStatus`]; on failure the message is available
//! through [`lw_last_error`] on the same thread. Handles are created by the
//! library and released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lattice_wh::lattice_core::{band_edges, mode, LatticeFrequency, WaveguideGeometry, Window};
use lattice_wh::lattice_green_bae::{solve_bae, BaeSolution};
use lattice_wh::quadrature::Quadrature;
use lattice_wh::scattering_analysis::{coefficients_analytic, coefficients_numeric, ScatteringCoefficients};
use lattice_wh::wh_pole_removal::{assemble_and_solve_system, SpectralSolution};
use lattice_wh::LatticeError;

/// Distance of the projection columns used for boundary-equation coefficients.
const PROJECTION_COLUMN: i64 = 40;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BelowCutoff = 3,
    Unsupported = 4,
    Degenerate = 5,
    NonConvergence = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwMethod {
    /// Pole removal; symmetric geometry and odd incident mode only.
    PoleRemoval = 0,
    BoundaryEquations = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwFieldKind {
    Scattered = 0,
    Total = 1,
}

/// Reflection and transmission coefficients of one propagating mode.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LwModeCoefficient {
    pub q: i64,
    pub re_r: f64,
    pub im_r: f64,
    pub re_t: f64,
    pub im_t: f64,
    pub group_velocity: f64,
}

pub struct LwGeometry {
    inner: WaveguideGeometry,
}

enum Solved {
    PoleRemoval(Box<SpectralSolution>),
    BoundaryEquations(Box<BaeSolution>),
}

pub struct LwSolution {
    solved: Solved,
    coefficients: ScatteringCoefficients,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &LatticeError) -> LwStatus {
    match e {
        LatticeError::BelowCutoff(_) => LwStatus::BelowCutoff,
        LatticeError::Unsupported(_) => LwStatus::Unsupported,
        LatticeError::NonConvergence { .. } => LwStatus::NonConvergence,
        LatticeError::DegenerateRoot(_)
        | LatticeError::Degenerate(_)
        | LatticeError::Resonant(_)
        | LatticeError::ConfluentPole(_) => LwStatus::Degenerate,
        _ => LwStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (LwStatus, String)>) -> LwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LwStatus::Panic
        }
    }
}

fn lattice<T>(r: lattice_wh::Result<T>) -> Result<T, (LwStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (LwStatus, String) {
    (LwStatus::NullPointer, format!("{what} is null"))
}

/// Copies the last error message of this thread into `buf` and returns its length
/// without the terminator. Returns 0 when no error has been recorded.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn lw_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Creates a geometry with screen rows `n1..=n2` inside walls at `-big_n1` and `big_n2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lw_geometry_new(
    n1: i64,
    n2: i64,
    big_n1: i64,
    big_n2: i64,
    out: *mut *mut LwGeometry,
) -> LwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = lattice(WaveguideGeometry::new(n1, n2, big_n1, big_n2))?;
        *out = Box::into_raw(Box::new(LwGeometry { inner }));
        Ok(())
    })
}

/// Creates the symmetric geometry with gaps of `ell` rows and a screen of `ell0` rows.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lw_geometry_symmetric(ell: i64, ell0: i64, out: *mut *mut LwGeometry) -> LwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = lattice(WaveguideGeometry::symmetric(ell, ell0))?;
        *out = Box::into_raw(Box::new(LwGeometry { inner }));
        Ok(())
    })
}

/// # Safety
/// `geometry` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lw_geometry_free(geometry: *mut LwGeometry) {
    if !geometry.is_null() {
        drop(Box::from_raw(geometry));
    }
}

/// Number of rows between the walls, including both walls.
///
/// # Safety
/// `geometry` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lw_geometry_rows(geometry: *const LwGeometry, out: *mut usize) -> LwStatus {
    guard(|| {
        let g = geometry.as_ref().ok_or_else(|| null("geometry"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = g.inner.rows();
        Ok(())
    })
}

/// Lower and upper edge of the propagation band of mode `q`.
///
/// # Safety
/// `geometry` must be a live handle; `lower` and `upper` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lw_band_edges(
    geometry: *const LwGeometry,
    q: i64,
    lower: *mut f64,
    upper: *mut f64,
) -> LwStatus {
    guard(|| {
        let g = geometry.as_ref().ok_or_else(|| null("geometry"))?;
        if lower.is_null() || upper.is_null() {
            return Err(null("output"));
        }
        let n = g.inner.n();
        if q < 1 || q >= n {
            return Err((LwStatus::InvalidArgument, format!("mode {q} out of range 1..={}", n - 1)));
        }
        (*lower, *upper) = band_edges(q, n);
        Ok(())
    })
}

/// Solves the scattering problem for incident mode `p` at frequency `omega`
/// with damping `eps`.
///
/// # Safety
/// `geometry` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lw_solve(
    geometry: *const LwGeometry,
    omega: f64,
    eps: f64,
    p: i64,
    method: LwMethod,
    out: *mut *mut LwSolution,
) -> LwStatus {
    guard(|| {
        let g = geometry.as_ref().ok_or_else(|| null("geometry"))?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let f = lattice(LatticeFrequency::new(omega, eps))?;
        if !lattice(mode(p, &g, &f))?.propagating {
            return Err((LwStatus::BelowCutoff, format!("incident mode {p} does not propagate")));
        }
        let solution = match method {
            LwMethod::PoleRemoval => {
                let s = lattice(assemble_and_solve_system(&g, &f, p))?;
                let coefficients = lattice(coefficients_analytic(&s))?;
                LwSolution { solved: Solved::PoleRemoval(Box::new(s)), coefficients }
            }
            LwMethod::BoundaryEquations => {
                let s = lattice(solve_bae(&g, &f, p, Quadrature::default()))?;
                let (_, total) = lattice(s.fields(Window::symmetric(PROJECTION_COLUMN)))?;
                let coefficients = lattice(coefficients_numeric(&total, &g, &f, p, PROJECTION_COLUMN))?;
                LwSolution { solved: Solved::BoundaryEquations(Box::new(s)), coefficients }
            }
        };
        *out = Box::into_raw(Box::new(solution));
        Ok(())
    })
}

/// # Safety
/// `solution` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lw_solution_free(solution: *mut LwSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Deviation of the weighted coefficients from energy conservation.
///
/// # Safety
/// `solution` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lw_solution_energy_residual(solution: *const LwSolution, out: *mut f64) -> LwStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = s.coefficients.energy_residual;
        Ok(())
    })
}

/// Writes the coefficients of the propagating modes into `buf`.
/// `written` receives the number of modes; if it exceeds `cap`, nothing is
/// copied and `LW_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `solution` must be a live handle, `buf` valid for `cap` elements (or null
/// when `cap` is 0) and `written` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lw_solution_coefficients(
    solution: *const LwSolution,
    buf: *mut LwModeCoefficient,
    cap: usize,
    written: *mut usize,
) -> LwStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        if written.is_null() {
            return Err(null("written"));
        }
        let modes: Vec<_> = s.coefficients.modes.iter().filter(|m| m.propagating).collect();
        *written = modes.len();
        if modes.len() > cap {
            return Err((LwStatus::BufferTooSmall, format!("{} modes, capacity {cap}", modes.len())));
        }
        if buf.is_null() && !modes.is_empty() {
            return Err(null("buf"));
        }
        for (i, m) in modes.iter().enumerate() {
            *buf.add(i) = LwModeCoefficient {
                q: m.q,
                re_r: m.r.re,
                im_r: m.r.im,
                re_t: m.t.re,
                im_t: m.t.im,
                group_velocity: m.group_velocity,
            };
        }
        Ok(())
    })
}

/// Evaluates the field on columns `m_min..=m_max`. Values are stored column by
/// column, each column holding every row from the lower to the upper wall, so
/// `re` and `im` need `(m_max - m_min + 1) * rows` elements.
///
/// # Safety
/// `solution` must be a live handle; `re` and `im` valid for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn lw_solution_field(
    solution: *const LwSolution,
    m_min: i64,
    m_max: i64,
    kind: LwFieldKind,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> LwStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let window = lattice(Window::new(m_min, m_max))?;
        let (g, (sc, tot)) = match &s.solved {
            Solved::PoleRemoval(w) => (w.input_geometry, lattice(w.fields(window, &Quadrature::default()))?),
            Solved::BoundaryEquations(b) => (*b.geometry(), lattice(b.fields(window))?),
        };
        let field = if kind == LwFieldKind::Total { tot } else { sc };
        let need = window.columns() * field.rows();
        if len < need {
            return Err((LwStatus::BufferTooSmall, format!("need {need} values, got {len}")));
        }
        let mut k = 0;
        for m in m_min..=m_max {
            for n in -g.big_n1..=g.big_n2 {
                let v = field.get(m, n);
                *re.add(k) = v.re;
                *im.add(k) = v.im;
                k += 1;
            }
        }
        Ok(())
    })
}
