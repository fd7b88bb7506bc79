use std::path::Path;
use std::process::{Command, Output};

use lattice_wh::cli_runner::output::{fmt17, parse_field_csv, FIELD_HEADER};
use lattice_wh::lattice_core::band_edges;

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lattice-wh"));
    c.args(args).env_remove("LATTICE_WH_EPS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn modes_lists_propagating_set() {
    let o = run(&["modes", "--omega", "1.5"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 28);
    for r in rows {
        let cols: Vec<&str> = r.split(',').collect();
        let j: i64 = cols[0].parse().unwrap();
        let want = band_edges(j, 29).0 < 1.5;
        assert_eq!(cols[4], want.to_string(), "mode {j}");
    }
}

#[test]
fn modes_warns_in_band_gap() {
    let o = run(&["modes", "--omega", "0.05"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("zero-frequency band gap"));
    assert!(!stdout(&o).contains("true"));
}

#[test]
fn solve_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["solve", "--omega", "1.5", "--method", "both", "--window", "3", "--out", out], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("field_wh.csv")).unwrap();
    assert!(text.starts_with(FIELD_HEADER));
    let rows = parse_field_csv(&text).unwrap();
    assert_eq!(rows.len(), 7 * 30);
    assert_eq!((rows[0].m, rows[0].n, rows[30].m), (-3, -10, -2));
    let mut again = String::from(FIELD_HEADER);
    again.push('\n');
    for r in &rows {
        let v: Vec<String> = r.values.iter().map(|&x| fmt17(x)).collect();
        again.push_str(&format!("{},{},{}\n", r.m, r.n, v.join(",")));
    }
    assert_eq!(again, text);
    let coef = std::fs::read_to_string(dir.path().join("coefficients_bae.csv")).unwrap();
    assert!(coef.starts_with("q,re_r,im_r,re_t,im_t,abs_r_weighted,abs_t_weighted,v\n"));
    assert_eq!(coef.lines().count(), 1 + 8);
    let rep = json(&dir.path().join("report.json"));
    assert!(rep["max_field_difference"].as_f64().unwrap() <= 1e-9);
    assert!(rep["max_coefficient_difference"].as_f64().unwrap() <= 1e-9);
    let wh = &rep["methods"][0];
    assert_eq!(wh["method"], "wh");
    assert!(wh["energy_residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(wh["system_size"], 14);
    assert!(wh["nodes"].as_u64().unwrap() >= 1024);
    assert!(wh["timings"]["solve_s"].as_f64().is_some());
}

#[test]
fn config_file_and_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# asymmetric duct\nn1 = 0\nn2 = 9\nN1 = 15\nN2 = 13\nomega = 0.5\nwindow = 2\n").unwrap();
    let out = dir.path().join("o");
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("using boundary equations"));
    assert!(out.join("field_bae.csv").exists());
    assert!(!out.join("field_wh.csv").exists());
}

#[test]
fn sweep_writes_curves_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cut = band_edges(1, 29).0;
    let sweep = format!("{}:1.9:40", cut + 1e-3);
    let o = run(&["sweep", "--sweep", &sweep, "--jobs", "3", "--out", out], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut first_re_r = None;
    let mut omegas = Vec::new();
    for line in csv.lines().skip(1) {
        let c: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!(c[10] <= 1e-12, "residual {}", c[10]);
        if c[2] == 1.0 {
            first_re_r.get_or_insert(c[3]);
            omegas.push(c[0]);
        }
    }
    assert!(omegas.windows(2).all(|w| w[0] < w[1]));
    assert!((first_re_r.unwrap() + 1.0).abs() < 0.05);
    let gp = std::fs::read_to_string(dir.path().join("sweep.gp")).unwrap();
    assert!(gp.contains("plot 'sweep.csv'"));
    let rep = json(&dir.path().join("sweep_report.json"));
    assert_eq!(rep["solved"].as_u64().unwrap() + rep["skipped"].as_array().unwrap().len() as u64, 40);
}

#[test]
fn validate_passes_on_reference_case() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["validate", "--omega", "1.5", "--window", "4", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    assert!(text.contains("wh vs bae: scattered field"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["solve", "--omega", "2.0", "--out", out], &[]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--omega", "0.05", "--out", out], &[]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--omega", "1.5", "--p", "40", "--out", out], &[]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--out", out], &[]).status.code(), Some(2));
    assert_eq!(run(&["bogus"], &[]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--sweep", "2.5:2.8:3", "--out", out], &[]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--omega", "1.5", "--out", out], &[("LATTICE_WH_EPS", "abc")]).status.code(), Some(2));
    let cfg = dir.path().join("q.cfg");
    std::fs::write(&cfg, "omega = 1.5\nquad_tol = 1e-300\nquad_doublings = 0\nmethod = bae\n").unwrap();
    assert_eq!(run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out], &[]).status.code(), Some(4));
}

#[test]
fn eps_environment_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["solve", "--omega", "1.5", "--window", "1", "--out", out], &[("LATTICE_WH_EPS", "1e-8")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("report.json"))["eps"].as_f64(), Some(1e-8));
}
