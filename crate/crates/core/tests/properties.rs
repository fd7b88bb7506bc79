use lattice_wh::cli_runner::output::fmt17;
use lattice_wh::cli_runner::RunConfig;
use lattice_wh::lattice_core::{
    band_edges, chebyshev_v, mode, mode_norm, reciprocal_roots, s_mode, LatticeFrequency, WaveguideGeometry,
};
use lattice_wh::lattice_green_bae::solve_bae;
use lattice_wh::quadrature::Quadrature;
use lattice_wh::scattering_analysis::coefficients_analytic;
use lattice_wh::spectral_roots::{kernel_data, KernelKind};
use lattice_wh::wh_pole_removal::assemble_and_solve_system;
use lattice_wh::LatticeError;
use num_complex::Complex64 as C;
use proptest::prelude::*;

/// Frequency for mode p at fraction t of its pass band, or None when it sits near an edge or 2.
fn frequency_in_band(g: &WaveguideGeometry, p: i64, t: f64) -> Option<LatticeFrequency> {
    let n = g.n();
    let (lo, hi) = band_edges(p, n);
    let om = lo + t * (hi - lo);
    let near_edge = (1..n).any(|j| {
        let (a, b) = band_edges(j, n);
        (om - a).abs() < 1e-3 || (om - b).abs() < 1e-3
    });
    if near_edge || (om - 2.0).abs() < 1e-3 {
        return None;
    }
    LatticeFrequency::new(om, 0.0).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reciprocal_roots_product_and_split(re in -6.0f64..6.0, im in -2.0f64..2.0) {
        let gamma = C::new(re, im);
        let (a, b, _) = reciprocal_roots(gamma, C::new(0.0, 1e-8));
        prop_assert!((a * b - 1.0).norm() < 1e-12);
        prop_assert!(a.norm() <= 1.0 + 1e-12);
        prop_assert!((a * a + gamma * a + 1.0).norm() < 1e-10 * (1.0 + gamma.norm()));
    }

    #[test]
    fn duct_modes_are_orthogonal(n in 2i64..40, j in 1i64..40, k in 1i64..40) {
        prop_assume!(j < n && k < n);
        let g = WaveguideGeometry { n1: 0, n2: 0, big_n1: 1, big_n2: n - 1 };
        let dot: f64 = (0..=n).map(|r| (s_mode(j, n, r) * s_mode(k, n, r).conj()).re).sum();
        let want = if j == k { 2.0 * n as f64 } else { 0.0 };
        prop_assert!((dot - want).abs() < 1e-9);
        if j == k {
            prop_assert!((mode_norm(j, &g) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn dispersion_relation_holds(ell in 2i64..8, ell0 in 1i64..8, j in 1i64..20, om in 0.05f64..2.8) {
        let g = WaveguideGeometry::symmetric(ell, ell0).unwrap();
        prop_assume!(j < g.n() && (om - 2.0).abs() > 1e-6);
        let f = LatticeFrequency::new(om, 0.0).unwrap();
        let m = mode(j, &g, &f).unwrap();
        let x = m.x_factor;
        let lhs = om * om - 4.0 + x + x.inv() + 2.0 * m.theta.cos();
        prop_assert!(lhs.norm() < 1e-10);
        prop_assert!(x.norm() <= 1.0 + 1e-12);
        prop_assert_eq!(m.propagating, om > m.cutoff && om < m.upper_edge);
    }

    #[test]
    fn rational_kernels_match_chebyshev(ell in 2i64..7, ell0 in 1i64..7, om in 0.1f64..2.7, r in 0.5f64..1.8, phi in 0.0f64..6.28) {
        let g = WaveguideGeometry::symmetric(ell, ell0).unwrap();
        prop_assume!((om - 2.0).abs() > 1e-3);
        let f = LatticeFrequency::new(om, 0.0).unwrap();
        let x = C::from_polar(r, phi);
        for kind in [KernelKind::K0, KernelKind::K1] {
            let Ok(k) = kernel_data(kind, &g, &f) else { continue };
            let a = k.eval(x);
            let b = k.eval_direct(x, &f);
            prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0), "{:?}: {} vs {}", kind, a, b);
        }
    }

    #[test]
    fn chebyshev_recurrence(n in 1i64..30, re in -2.0f64..2.0, im in -1.0f64..1.0) {
        let z = C::new(re, im);
        let lhs = chebyshev_v(n + 1, z);
        let rhs = 2.0 * z * chebyshev_v(n, z) - chebyshev_v(n - 1, z);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn fmt17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let s = fmt17(x);
        let back: f64 = s.parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
        prop_assert_eq!(fmt17(back), s);
    }

    #[test]
    fn config_keys_round_trip(ell in 2i64..30, ell0 in 1i64..30, p in 1i64..5, window in 0i64..50, mr in 1i64..80) {
        let text = format!("ell = {ell}\nell0 = {ell0}\np = {p}\nwindow = {window}\nmr = {mr}\n");
        let mut c = RunConfig::default();
        c.apply_text(&text).unwrap();
        prop_assert_eq!(c.geometry, WaveguideGeometry::symmetric(ell, ell0).unwrap());
        prop_assert_eq!((c.p, c.window, c.m_r), (p, window, mr));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_is_conserved(ell in 2i64..9, ell0 in 1i64..9, pi in 0i64..4, t in 0.02f64..0.98) {
        let g = WaveguideGeometry::symmetric(ell, ell0).unwrap();
        let p = 2 * pi + 1;
        prop_assume!(p < g.n());
        let Some(f) = frequency_in_band(&g, p, t) else { return Ok(()) };
        match assemble_and_solve_system(&g, &f, p) {
            Ok(sol) => {
                let c = coefficients_analytic(&sol).unwrap();
                prop_assert!(c.energy_residual <= 1e-12, "residual {:e}", c.energy_residual);
                prop_assert!(sol.c1_residual().norm() <= 1e-10);
            }
            Err(LatticeError::Unsupported(_) | LatticeError::DegenerateRoot(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn methods_agree_on_u_star(ell in 2i64..6, ell0 in 1i64..6, t in 0.05f64..0.95) {
        let g = WaveguideGeometry::symmetric(ell, ell0).unwrap();
        let Some(f) = frequency_in_band(&g, 1, t) else { return Ok(()) };
        let Ok(wh) = assemble_and_solve_system(&g, &f, 1) else { return Ok(()) };
        let bae = solve_bae(&g, &f, 1, Quadrature::default()).unwrap();
        prop_assert!((wh.u_star() - bae.corners[1]).norm() <= 1e-9);
        prop_assert!((bae.corners[0] - bae.corners[1]).norm() <= 1e-10);
    }
}
