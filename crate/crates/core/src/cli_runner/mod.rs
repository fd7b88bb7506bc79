//! Command-line driver: configuration, method selection, sweeps and artifact output.

pub mod args;
pub mod config;
pub mod output;

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{FrequencySpec, Method, RunConfig, SweepSpec};

use crate::error::{LatticeError, Result};
use crate::lattice_core::{
    band_edges, helmholtz_residual, incident_field, modes, ComplexField, LatticeFrequency, WaveguideGeometry, Window,
};
use crate::lattice_green_bae::solve_bae;
use crate::scattering_analysis::{coefficients_analytic, coefficients_numeric, flux_residual, ScatteringCoefficients};
use crate::wh_pole_removal::assemble_and_solve_system;

/// Which solver produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Wh,
    Bae,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Wh => "wh",
            Solver::Bae => "bae",
        }
    }
    fn tag(self) -> u8 {
        match self {
            Solver::Wh => 0,
            Solver::Bae => 1,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub solve_s: f64,
    pub field_s: f64,
    pub coefficients_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub method: Solver,
    pub energy_residual: f64,
    pub apparent_energy_residual: f64,
    pub flux_residual: Option<f64>,
    pub forbidden_projection: f64,
    /// Scattered field just above the screen (and below it for the boundary-equation solver).
    pub u_star: Vec<[f64; 2]>,
    pub system_size: usize,
    pub cond: f64,
    pub nodes: usize,
    pub completion_rows: Option<usize>,
    pub timings: Timings,
}

/// One solver's output at one frequency.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub solver: Solver,
    pub coefficients: ScatteringCoefficients,
    pub report: MethodReport,
    /// (scattered, total) on the requested window.
    pub fields: Option<(ComplexField, ComplexField)>,
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Scattered and total fields carrying only the columns -m_r, -m_r+1, m_r, m_r+1.
fn projection_fields(
    scatter: impl Fn(Window) -> Result<ComplexField>,
    g: &WaveguideGeometry,
    f: &LatticeFrequency,
    p: i64,
    m_r: i64,
) -> Result<(ComplexField, ComplexField)> {
    let full = Window::new(-m_r, m_r + 1)?;
    let mut sc = ComplexField::zeros(full, g);
    for w in [Window::new(-m_r, -m_r + 1)?, Window::new(m_r, m_r + 1)?] {
        let part = scatter(w)?;
        for m in w.m_min..=w.m_max {
            for n in part.n_min..=part.n_max {
                sc.set(m, n, part.get(m, n));
            }
        }
    }
    let tot = sc.add(&incident_field(p, g, f, full)?);
    Ok((sc, tot))
}

/// Pole-removal solve; coefficients come from residues.
pub fn run_wh(cfg: &RunConfig, f: &LatticeFrequency, with_fields: bool) -> Result<MethodRun> {
    let g = &cfg.geometry;
    let t = Instant::now();
    let sol = assemble_and_solve_system(g, f, cfg.p)?;
    let solve_s = secs(t);
    let t = Instant::now();
    let coefficients = coefficients_analytic(&sol)?;
    let mut coefficients_s = secs(t);
    let mut nodes = 0;
    let mut flux = None;
    let mut fields = None;
    let mut field_s = 0.0;
    if with_fields {
        let t = Instant::now();
        let (sc, n) = sol.scattered_counted(Window::symmetric(cfg.window), &cfg.quadrature)?;
        nodes = n;
        let tot = sc.add(&incident_field(cfg.p, g, f, Window::symmetric(cfg.window))?);
        fields = Some((sc, tot));
        field_s = secs(t);
        let t = Instant::now();
        let (psc, ptot) = projection_fields(|w| sol.scattered(w, &cfg.quadrature), g, f, cfg.p, cfg.m_r)?;
        flux = Some(flux_residual(&psc, &ptot, g, f, cfg.p, cfg.m_r)?);
        coefficients_s += secs(t);
    }
    let report = MethodReport {
        method: Solver::Wh,
        energy_residual: coefficients.energy_residual,
        apparent_energy_residual: coefficients.apparent_energy_residual,
        flux_residual: flux,
        forbidden_projection: coefficients.forbidden_projection,
        u_star: vec![pair(sol.u_star())],
        system_size: sol.coefficients.w0_plus.len() + sol.coefficients.w1_plus.len(),
        cond: sol.cond,
        nodes,
        completion_rows: Some(sol.completion_rows),
        timings: Timings { solve_s, field_s, coefficients_s },
    };
    Ok(MethodRun { solver: Solver::Wh, coefficients, report, fields })
}

/// Boundary-equation solve; coefficients come from modal projections at +-m_r.
pub fn run_bae(cfg: &RunConfig, f: &LatticeFrequency, with_fields: bool) -> Result<MethodRun> {
    let g = &cfg.geometry;
    let t = Instant::now();
    let sol = solve_bae(g, f, cfg.p, cfg.quadrature)?;
    let solve_s = secs(t);
    let mut fields = None;
    let mut field_s = 0.0;
    if with_fields {
        let t = Instant::now();
        fields = Some(sol.fields(Window::symmetric(cfg.window))?);
        field_s = secs(t);
    }
    let t = Instant::now();
    let (psc, ptot) = projection_fields(|w| sol.scattered(w), g, f, cfg.p, cfg.m_r)?;
    let coefficients = coefficients_numeric(&ptot, g, f, cfg.p, cfg.m_r)?;
    let flux = flux_residual(&psc, &ptot, g, f, cfg.p, cfg.m_r)?;
    let coefficients_s = secs(t);
    let report = MethodReport {
        method: Solver::Bae,
        energy_residual: coefficients.energy_residual,
        apparent_energy_residual: coefficients.apparent_energy_residual,
        flux_residual: Some(flux),
        forbidden_projection: coefficients.forbidden_projection,
        u_star: sol.corners.iter().map(|&z| pair(z)).collect(),
        system_size: sol.screen.len() + 2,
        cond: sol.system.cond,
        nodes: sol.green.nodes_used(),
        completion_rows: None,
        timings: Timings { solve_s, field_s, coefficients_s },
    };
    Ok(MethodRun { solver: Solver::Bae, coefficients, report, fields })
}

/// Run the configured method(s), falling back to BAE where pole removal does not apply.
pub fn run_methods(cfg: &RunConfig, f: &LatticeFrequency, with_fields: bool) -> Result<Vec<MethodRun>> {
    let mut out = Vec::new();
    let mut need_bae = cfg.method != Method::Wh;
    if cfg.method != Method::Bae {
        let reason = if !cfg.geometry.is_symmetric() {
            Some("geometry is not symmetric".to_string())
        } else if cfg.p % 2 == 0 {
            Some(format!("incident mode p={} is even", cfg.p))
        } else {
            None
        };
        let wh = match reason {
            Some(r) => Err(LatticeError::Unsupported(r)),
            None => run_wh(cfg, f, with_fields),
        };
        match wh {
            Ok(run) => out.push(run),
            Err(e @ (LatticeError::Unsupported(_) | LatticeError::DegenerateRoot(_))) => {
                log::warn!("pole removal unavailable at omega={} ({e}); using boundary equations", f.omega);
                need_bae = true;
            }
            Err(e) => return Err(e),
        }
    }
    if need_bae {
        out.push(run_bae(cfg, f, with_fields)?);
    }
    Ok(out)
}

/// Largest |Delta R|, |Delta T| over propagating modes present in both sets.
pub fn coefficient_difference(a: &ScatteringCoefficients, b: &ScatteringCoefficients) -> f64 {
    let mut d: f64 = 0.0;
    for m in a.modes.iter().filter(|m| m.propagating) {
        match b.get(m.q) {
            Some(o) => d = d.max((m.r - o.r).norm()).max((m.t - o.t).norm()),
            None => d = f64::INFINITY,
        }
    }
    d
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeRow {
    pub j: i64,
    pub theta: f64,
    pub cutoff: f64,
    pub upper_edge: f64,
    pub propagating: bool,
    pub k: [f64; 2],
    pub group_velocity: Option<f64>,
}

/// Table of all N-1 duct modes at the configured frequency.
pub fn cmd_modes(cfg: &RunConfig) -> Result<Vec<ModeRow>> {
    cfg.validate()?;
    let om = match cfg.frequency {
        Some(FrequencySpec::Single(om)) => om,
        _ => return Err(LatticeError::Config("modes needs a single --omega".into())),
    };
    let f = cfg.frequency_at(om)?;
    let rows: Vec<ModeRow> = modes(&cfg.geometry, &f)
        .into_iter()
        .map(|md| {
            let k = md.wavenumber();
            ModeRow {
                j: md.j as i64,
                theta: md.theta,
                cutoff: md.cutoff,
                upper_edge: md.upper_edge,
                propagating: md.propagating,
                k: pair(k),
                group_velocity: md.propagating.then(|| k.re.sin().abs() / f.omega),
            }
        })
        .collect();
    if !rows.iter().any(|r| r.propagating) {
        log::warn!("zero-frequency band gap: no mode propagates at omega={om}");
    }
    Ok(rows)
}

pub fn modes_table(rows: &[ModeRow]) -> String {
    let mut s = String::from("j,theta,cutoff,upper_edge,propagating,re_k,im_k,v\n");
    for r in rows {
        let v = r.group_velocity.map(output::fmt17).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.j,
            output::fmt17(r.theta),
            output::fmt17(r.cutoff),
            output::fmt17(r.upper_edge),
            r.propagating,
            output::fmt17(r.k[0]),
            output::fmt17(r.k[1]),
            v
        ));
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub geometry: WaveguideGeometry,
    pub omega: f64,
    pub eps: f64,
    pub p: i64,
    pub m_r: i64,
    pub window: i64,
    pub methods: Vec<MethodReport>,
    pub max_field_difference: Option<f64>,
    pub max_coefficient_difference: Option<f64>,
}

/// Solve at one frequency and write fields, coefficients and a JSON report under `cfg.out`.
pub fn cmd_solve(cfg: &RunConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let f = cfg.single_frequency()?;
    let runs = run_methods(cfg, &f, true)?;
    let out = &cfg.out;
    for r in &runs {
        let (sc, tot) = r.fields.as_ref().expect("fields requested");
        output::write_text(&out.join(format!("field_{}.csv", r.solver.name())), &output::field_csv(sc, tot))?;
        output::write_text(
            &out.join(format!("coefficients_{}.csv", r.solver.name())),
            &output::coefficients_csv(&r.coefficients),
        )?;
    }
    let (mut dfield, mut dcoef) = (None, None);
    if let [a, b] = runs.as_slice() {
        let (fa, fb) = (a.fields.as_ref().unwrap(), b.fields.as_ref().unwrap());
        dfield = Some(fa.0.max_abs_diff(&fb.0));
        dcoef = Some(coefficient_difference(&a.coefficients, &b.coefficients));
    }
    let report = SolveReport {
        geometry: cfg.geometry,
        omega: f.omega,
        eps: f.eps,
        p: cfg.p,
        m_r: cfg.m_r,
        window: cfg.window,
        methods: runs.iter().map(|r| r.report.clone()).collect(),
        max_field_difference: dfield,
        max_coefficient_difference: dcoef,
    };
    output::write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedPoint {
    pub omega: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub geometry: WaveguideGeometry,
    pub p: i64,
    pub m_r: i64,
    pub solved: usize,
    pub skipped: Vec<SkippedPoint>,
    pub max_energy_residual_wh: Option<f64>,
    pub max_energy_residual_bae: Option<f64>,
    pub max_coefficient_difference: Option<f64>,
}

/// Reason to drop a sweep point before solving, if any.
pub fn sweep_exclusion(g: &WaveguideGeometry, p: i64, omega: f64) -> Option<String> {
    const GAP: f64 = 1e-6;
    let top = 2.0 * 2f64.sqrt();
    for s in [0.0, 2.0, top] {
        if (omega - s).abs() < GAP || omega <= 0.0 || omega >= top {
            return Some(format!("within {GAP:e} of the degenerate frequency {s}"));
        }
    }
    let n = g.n();
    for j in 1..n {
        let (lo, hi) = band_edges(j, n);
        if (omega - lo).abs() < GAP || (omega - hi).abs() < GAP {
            return Some(format!("within {GAP:e} of a band edge of mode {j}"));
        }
    }
    let (lo, hi) = band_edges(p, n);
    if omega <= lo || omega >= hi {
        return Some(format!("incident mode {p} does not propagate"));
    }
    None
}

struct SweepPoint {
    omega: f64,
    runs: std::result::Result<Vec<MethodRun>, LatticeError>,
}

/// Frequency sweep; writes `sweep.csv`, `sweep.gp` and `sweep_report.json` under `cfg.out`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let spec = match cfg.frequency {
        Some(FrequencySpec::Sweep(s)) => s,
        Some(FrequencySpec::Single(om)) => SweepSpec { start: om, stop: om, count: 1 },
        None => return Err(LatticeError::Config("sweep needs --sweep A:B:K".into())),
    };
    let mut skipped = Vec::new();
    let mut admissible = Vec::new();
    for om in spec.points() {
        match sweep_exclusion(&cfg.geometry, cfg.p, om) {
            Some(reason) => {
                log::info!("skipping omega={om}: {reason}");
                skipped.push(SkippedPoint { omega: om, reason });
            }
            None => admissible.push(om),
        }
    }
    if admissible.is_empty() {
        return Err(LatticeError::Config("no admissible frequency in the sweep".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| LatticeError::Config(format!("thread pool: {e}")))?;
    let points: Vec<SweepPoint> = pool.install(|| {
        admissible
            .par_iter()
            .map(|&om| SweepPoint { omega: om, runs: cfg.frequency_at(om).and_then(|f| run_methods(cfg, &f, false)) })
            .collect()
    });
    let mut csv = String::from(output::SWEEP_HEADER);
    csv.push('\n');
    let mut solved = 0;
    let (mut res_wh, mut res_bae, mut dcoef): (Option<f64>, Option<f64>, Option<f64>) = (None, None, None);
    let mut plot_modes: Vec<i64> = Vec::new();
    let mut tag = 0;
    for pt in points {
        let runs = match pt.runs {
            Ok(r) => r,
            Err(e) => {
                log::warn!("skipping omega={}: {e}", pt.omega);
                skipped.push(SkippedPoint { omega: pt.omega, reason: e.to_string() });
                continue;
            }
        };
        solved += 1;
        for r in &runs {
            output::sweep_rows(pt.omega, r.solver.tag(), &r.coefficients, &mut csv);
            let slot = if r.solver == Solver::Wh { &mut res_wh } else { &mut res_bae };
            *slot = Some(slot.unwrap_or(0.0).max(r.coefficients.energy_residual));
            for m in r.coefficients.modes.iter().filter(|m| m.propagating) {
                if !plot_modes.contains(&m.q) {
                    plot_modes.push(m.q);
                }
            }
            tag = runs[0].solver.tag();
        }
        if let [a, b] = runs.as_slice() {
            let d = coefficient_difference(&a.coefficients, &b.coefficients);
            dcoef = Some(dcoef.unwrap_or(0.0).max(d));
        }
    }
    if solved == 0 {
        return Err(LatticeError::Config("every admissible sweep point failed to solve".into()));
    }
    plot_modes.sort_unstable();
    plot_modes.truncate(4);
    let out = &cfg.out;
    output::write_text(&out.join("sweep.csv"), &csv)?;
    output::write_text(&out.join("sweep.gp"), &output::sweep_gnuplot("sweep.csv", cfg.p, &plot_modes, tag))?;
    skipped.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let report = SweepReport {
        geometry: cfg.geometry,
        p: cfg.p,
        m_r: cfg.m_r,
        solved,
        skipped,
        max_energy_residual_wh: res_wh,
        max_energy_residual_bae: res_bae,
        max_coefficient_difference: dcoef,
    };
    output::write_json(&out.join("sweep_report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, pass: value <= tolerance }
    }
}

/// Field checks shared by both solvers: screen, walls, m-symmetry and the difference equation.
pub fn field_checks(label: &str, g: &WaveguideGeometry, f: &LatticeFrequency, sc: &ComplexField, tot: &ComplexField) -> Vec<Check> {
    let mut screen: f64 = 0.0;
    let mut walls: f64 = 0.0;
    let mut sym: f64 = 0.0;
    for m in tot.m_min..=tot.m_max {
        for n in [tot.n_min, tot.n_max] {
            walls = walls.max(tot.get(m, n).norm()).max(sc.get(m, n).norm());
        }
        if tot.m_min <= -m && -m <= tot.m_max {
            for n in sc.n_min..=sc.n_max {
                sym = sym.max((sc.get(m, n) - sc.get(-m, n)).norm());
            }
        }
    }
    if tot.m_min <= 0 && tot.m_max >= 0 {
        for n in -g.n1..=g.n2 {
            screen = screen.max(tot.get(0, n).norm());
        }
    }
    vec![
        Check::new(format!("{label}: total field on screen"), screen, 1e-9),
        Check::new(format!("{label}: wall values"), walls, 0.0),
        Check::new(format!("{label}: scattered m-symmetry"), sym, 1e-9),
        Check::new(format!("{label}: Helmholtz residual off screen"), helmholtz_residual(tot, Some(g), f), 1e-9),
    ]
}

/// Cross-method invariant suite at the configured frequency.
pub fn cmd_validate(cfg: &RunConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let f = cfg.single_frequency()?;
    let mut both = cfg.clone();
    both.method = Method::Both;
    let runs = run_methods(&both, &f, true)?;
    let mut checks = Vec::new();
    for r in &runs {
        let name = r.solver.name();
        let (sc, tot) = r.fields.as_ref().expect("fields requested");
        checks.extend(field_checks(name, &cfg.geometry, &f, sc, tot));
        let tol = if r.solver == Solver::Wh { 1e-12 } else { 1e-9 };
        checks.push(Check::new(format!("{name}: energy residual"), r.coefficients.energy_residual, tol));
        if let Some(fr) = r.report.flux_residual {
            checks.push(Check::new(
                format!("{name}: flux vs coefficient residual"),
                (fr - r.coefficients.energy_residual).abs(),
                1e-8,
            ));
        }
        checks.push(Check::new(format!("{name}: symmetry-forbidden projections"), r.coefficients.forbidden_projection, 1e-9));
    }
    if let [a, b] = runs.as_slice() {
        let (fa, fb) = (a.fields.as_ref().unwrap(), b.fields.as_ref().unwrap());
        checks.push(Check::new("wh vs bae: scattered field", fa.0.max_abs_diff(&fb.0), 1e-9));
        checks.push(Check::new("wh vs bae: coefficients", coefficient_difference(&a.coefficients, &b.coefficients), 1e-9));
    }
    output::write_json(&cfg.out.join("validate.json"), &checks)?;
    Ok(checks)
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &args::Cli) -> Result<i32> {
    let cfg = cli.to_config()?;
    match cli.command {
        args::Command::Modes => {
            print!("{}", modes_table(&cmd_modes(&cfg)?));
            Ok(0)
        }
        args::Command::Solve => {
            let r = cmd_solve(&cfg)?;
            for m in &r.methods {
                println!(
                    "{}: energy residual {:.3e}, u* {:?}, J {}, cond {:.3e}, {:.3} s",
                    m.method.name(),
                    m.energy_residual,
                    m.u_star,
                    m.system_size,
                    m.cond,
                    m.timings.solve_s + m.timings.field_s + m.timings.coefficients_s
                );
            }
            if let Some(d) = r.max_field_difference {
                println!("max |field_wh - field_bae| = {d:.3e}");
            }
            println!("wrote {}", cfg.out.display());
            Ok(0)
        }
        args::Command::Sweep => {
            let r = cmd_sweep(&cfg)?;
            println!("solved {} points, skipped {}", r.solved, r.skipped.len());
            if let Some(x) = r.max_energy_residual_wh {
                println!("wh max energy residual {x:.3e}");
            }
            if let Some(x) = r.max_energy_residual_bae {
                println!("bae max energy residual {x:.3e}");
            }
            if let Some(x) = r.max_coefficient_difference {
                println!("max |coef_wh - coef_bae| = {x:.3e}");
            }
            println!("wrote {}", cfg.out.display());
            Ok(0)
        }
        args::Command::Validate => {
            let checks = cmd_validate(&cfg)?;
            let mut ok = true;
            for c in &checks {
                println!("{} {} = {:.3e} (tol {:.1e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
                ok &= c.pass;
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}
