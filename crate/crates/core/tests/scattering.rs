use lattice_wh::lattice_core::{band_edges, LatticeFrequency, WaveguideGeometry, Window};
use lattice_wh::lattice_green_bae::solve_bae;
use lattice_wh::quadrature::Quadrature;
use lattice_wh::scattering_analysis::{coefficients_analytic, coefficients_numeric, flux_residual};
use lattice_wh::wh_pole_removal::assemble_and_solve_system;

fn bae_numeric(g: &WaveguideGeometry, f: &LatticeFrequency, p: i64, mr: i64) -> lattice_wh::scattering_analysis::ScatteringCoefficients {
    let sol = solve_bae(g, f, p, Quadrature::default()).unwrap();
    let (_, tot) = sol.fields(Window::symmetric(mr + 1)).unwrap();
    coefficients_numeric(&tot, g, f, p, mr).unwrap()
}

#[test]
fn analytic_energy_balance_on_several_geometries() {
    for (ell, ell0, om, p) in [(10, 10, 1.5, 1), (10, 10, 0.7, 3), (3, 4, 1.9, 1), (6, 3, 2.2, 5), (2, 5, 1.1, 1)] {
        let g = WaveguideGeometry::symmetric(ell, ell0).unwrap();
        let f = LatticeFrequency::new(om, 0.0).unwrap();
        let sol = assemble_and_solve_system(&g, &f, p).unwrap();
        let c = coefficients_analytic(&sol).unwrap();
        assert!(c.energy_residual <= 1e-12, "({ell},{ell0},{om},{p}): {:e}", c.energy_residual);
        assert!(c.modes.iter().all(|m| m.q % 2 == 1 && m.propagating));
    }
}

#[test]
fn projection_agrees_with_residues_and_flux() {
    let g = WaveguideGeometry::symmetric(10, 10).unwrap();
    let f = LatticeFrequency::new(1.5, 0.0).unwrap();
    let wh = coefficients_analytic(&assemble_and_solve_system(&g, &f, 1).unwrap()).unwrap();
    let sol = solve_bae(&g, &f, 1, Quadrature::default()).unwrap();
    let (sc, tot) = sol.fields(Window::symmetric(41)).unwrap();
    let num = coefficients_numeric(&tot, &g, &f, 1, 40).unwrap();
    for m in &wh.modes {
        let n = num.get(m.q).unwrap();
        assert!((m.r - n.r).norm() <= 1e-6 && (m.t - n.t).norm() <= 1e-6, "q={}", m.q);
    }
    assert!(num.forbidden_projection <= 1e-9);
    let fr = flux_residual(&sc, &tot, &g, &f, 1, 40).unwrap();
    assert!((fr - num.energy_residual).abs() <= 1e-8);
}

#[test]
fn asymmetric_even_mode_conserves_energy() {
    let g = WaveguideGeometry::new(0, 9, 15, 13).unwrap();
    for (om, p) in [(0.5, 1), (1.2, 2), (1.7, 4)] {
        let f = LatticeFrequency::new(om, 0.0).unwrap();
        let c = bae_numeric(&g, &f, p, 12);
        assert!(c.energy_residual <= 1e-9, "omega={om} p={p}: {:e}", c.energy_residual);
        assert!(c.modes.iter().any(|m| m.q % 2 == 0 && m.propagating) || om < 0.6);
    }
}

#[test]
fn weighted_coefficients_vanish_at_opening_modes() {
    let g = WaveguideGeometry::symmetric(10, 10).unwrap();
    let n = g.n();
    for q in [3, 5, 7] {
        let cut = band_edges(q, n).0;
        let mut prev = f64::INFINITY;
        for d in [1e-2, 1e-4, 1e-6, 1e-8] {
            let f = LatticeFrequency::new(cut + d, 0.0).unwrap();
            let c = coefficients_analytic(&assemble_and_solve_system(&g, &f, 1).unwrap()).unwrap();
            let m = c.get(q).unwrap();
            let w = m.r_weighted.max(m.t_weighted);
            assert!(w < prev, "q={q} d={d}: {w} not below {prev}");
            prev = w;
        }
        assert!(prev < 0.05, "q={q}: {prev}");
    }
}
