use std::ffi::CStr;
use std::ptr;

use lattice_wh_ffi::*;

fn symmetric(ell: i64, ell0: i64) -> *mut LwGeometry {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { lw_geometry_symmetric(ell, ell0, &mut g) }, LwStatus::Ok);
    g
}

fn solve(g: *const LwGeometry, omega: f64, method: LwMethod) -> *mut LwSolution {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { lw_solve(g, omega, 0.0, 1, method, &mut s) }, LwStatus::Ok);
    s
}

fn coefficients(s: *const LwSolution) -> Vec<LwModeCoefficient> {
    let mut n = 0;
    assert_eq!(
        unsafe { lw_solution_coefficients(s, ptr::null_mut(), 0, &mut n) },
        LwStatus::BufferTooSmall
    );
    let mut buf = vec![LwModeCoefficient::default(); n];
    assert_eq!(unsafe { lw_solution_coefficients(s, buf.as_mut_ptr(), n, &mut n) }, LwStatus::Ok);
    buf
}

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe { lw_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn both_methods_agree_through_the_c_interface() {
    let g = symmetric(4, 5);
    let a = solve(g, 1.5, LwMethod::PoleRemoval);
    let b = solve(g, 1.5, LwMethod::BoundaryEquations);
    let (ca, cb) = (coefficients(a), coefficients(b));
    assert_eq!(ca.len(), cb.len());
    for (x, y) in ca.iter().zip(&cb) {
        assert_eq!(x.q, y.q);
        assert!((x.re_r - y.re_r).abs() < 1e-9 && (x.im_t - y.im_t).abs() < 1e-9);
    }
    let mut res = 1.0;
    assert_eq!(unsafe { lw_solution_energy_residual(a, &mut res) }, LwStatus::Ok);
    assert!(res < 1e-12, "{res}");

    let mut rows = 0;
    assert_eq!(unsafe { lw_geometry_rows(g, &mut rows) }, LwStatus::Ok);
    let len = 5 * rows;
    let (mut re_a, mut im_a, mut re_b, mut im_b) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    unsafe {
        assert_eq!(
            lw_solution_field(a, -2, 2, LwFieldKind::Total, re_a.as_mut_ptr(), im_a.as_mut_ptr(), len),
            LwStatus::Ok
        );
        assert_eq!(
            lw_solution_field(b, -2, 2, LwFieldKind::Total, re_b.as_mut_ptr(), im_b.as_mut_ptr(), len),
            LwStatus::Ok
        );
    }
    let diff = (0..len).map(|k| (re_a[k] - re_b[k]).hypot(im_a[k] - im_b[k])).fold(0.0, f64::max);
    assert!(diff < 1e-9, "{diff}");
    // Column m = 0 crosses the screen, rows 4..=8 of the 18 stored rows.
    for k in 2 * rows + 4..=2 * rows + 8 {
        assert!(re_a[k].hypot(im_a[k]) < 1e-9);
    }
    unsafe {
        lw_solution_free(a);
        lw_solution_free(b);
        lw_geometry_free(g);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { lw_geometry_new(0, 9, 15, 13, &mut g) }, LwStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { lw_solve(g, 0.5, 0.0, 1, LwMethod::PoleRemoval, &mut s) },
        LwStatus::Unsupported
    );
    assert!(s.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { lw_solve(g, 0.01, 0.0, 1, LwMethod::BoundaryEquations, &mut s) },
        LwStatus::BelowCutoff
    );
    assert_eq!(unsafe { lw_solve(g, -1.0, 0.0, 1, LwMethod::BoundaryEquations, &mut s) }, LwStatus::InvalidArgument);
    assert_eq!(
        unsafe { lw_solve(ptr::null(), 1.0, 0.0, 1, LwMethod::BoundaryEquations, &mut s) },
        LwStatus::NullPointer
    );
    assert!(last_error().contains("geometry"));
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { lw_band_edges(g, 1, &mut lo, &mut hi) }, LwStatus::Ok);
    assert!(0.0 < lo && lo < hi);
    assert_eq!(unsafe { lw_band_edges(g, 0, &mut lo, &mut hi) }, LwStatus::InvalidArgument);
    unsafe {
        lw_geometry_free(g);
        lw_geometry_free(ptr::null_mut());
    }
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { lw_geometry_new(5, 2, 3, 3, &mut bad) }, LwStatus::InvalidArgument);
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/lattice_wh.h")).unwrap();
    for name in [
        "lw_geometry_new",
        "lw_geometry_symmetric",
        "lw_solve",
        "lw_solution_coefficients",
        "lw_solution_field",
        "lw_last_error",
        "typedef struct LwSolution LwSolution",
        "LW_STATUS_BUFFER_TOO_SMALL",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
