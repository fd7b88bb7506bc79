//! CSV, JSON and gnuplot emission.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{LatticeError, Result};
use crate::lattice_core::ComplexField;
use crate::scattering_analysis::ScatteringCoefficients;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, e: std::io::Error) -> LatticeError {
    LatticeError::Config(format!("cannot write {}: {e}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub const FIELD_HEADER: &str = "m,n,re_sc,im_sc,re_tot,im_tot";

pub fn field_csv(sc: &ComplexField, tot: &ComplexField) -> String {
    let mut s = String::with_capacity(sc.values.len() * 100);
    s.push_str(FIELD_HEADER);
    s.push('\n');
    for m in sc.m_min..=sc.m_max {
        for n in sc.n_min..=sc.n_max {
            let (a, b) = (sc.get(m, n), tot.get(m, n));
            let _ = writeln!(s, "{m},{n},{},{},{},{}", fmt17(a.re), fmt17(a.im), fmt17(b.re), fmt17(b.im));
        }
    }
    s
}

/// One parsed field CSV row: m, n and the four real columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRow {
    pub m: i64,
    pub n: i64,
    pub values: [f64; 4],
}

pub fn parse_field_csv(text: &str) -> Result<Vec<FieldRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(FIELD_HEADER) {
        return Err(LatticeError::Config("field CSV header mismatch".into()));
    }
    let bad = |no: usize| LatticeError::Config(format!("field CSV line {} malformed", no + 2));
    lines
        .enumerate()
        .map(|(no, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(bad(no));
            }
            let m = cols[0].parse().map_err(|_| bad(no))?;
            let n = cols[1].parse().map_err(|_| bad(no))?;
            let mut values = [0.0; 4];
            for (v, c) in values.iter_mut().zip(&cols[2..]) {
                *v = c.parse().map_err(|_| bad(no))?;
            }
            Ok(FieldRow { m, n, values })
        })
        .collect()
}

pub const COEFFICIENT_HEADER: &str = "q,re_r,im_r,re_t,im_t,abs_r_weighted,abs_t_weighted,v";

/// Propagating modes only; evanescent projections feed the report instead.
pub fn coefficients_csv(c: &ScatteringCoefficients) -> String {
    let mut s = String::from(COEFFICIENT_HEADER);
    s.push('\n');
    for m in c.modes.iter().filter(|m| m.propagating) {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            m.q,
            fmt17(m.r.re),
            fmt17(m.r.im),
            fmt17(m.t.re),
            fmt17(m.t.im),
            fmt17(m.r_weighted),
            fmt17(m.t_weighted),
            fmt17(m.group_velocity)
        );
    }
    s
}

pub const SWEEP_HEADER: &str =
    "omega,method,q,re_r,im_r,re_t,im_t,abs_r_weighted,abs_t_weighted,v,energy_residual,apparent_residual";

/// Method tags in sweep CSVs: 0 for wh, 1 for bae (numeric so gnuplot can filter).
pub fn sweep_rows(omega: f64, method_tag: u8, c: &ScatteringCoefficients, out: &mut String) {
    for m in c.modes.iter().filter(|m| m.propagating) {
        let _ = writeln!(
            out,
            "{},{method_tag},{},{},{},{},{},{},{},{},{},{}",
            fmt17(omega),
            m.q,
            fmt17(m.r.re),
            fmt17(m.r.im),
            fmt17(m.t.re),
            fmt17(m.t.im),
            fmt17(m.r_weighted),
            fmt17(m.t_weighted),
            fmt17(m.group_velocity),
            fmt17(c.energy_residual),
            fmt17(c.apparent_energy_residual)
        );
    }
}

/// Gnuplot script plotting weighted |R| and |T| of the given modes against omega.
pub fn sweep_gnuplot(csv_name: &str, p: i64, modes: &[i64], method_tag: u8) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "set xlabel 'Omega'");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set terminal pngcairo size 1200,900");
    let _ = writeln!(s, "set output 'sweep.png'");
    let _ = writeln!(s, "set multiplot layout 3,1");
    let sel = |col: usize, q: i64| format!("($2=={method_tag} && $3=={q} ? ${col} : 1/0)");
    let _ = writeln!(s, "set ylabel 'Re R_{p}, Re T_{p}'");
    let _ = writeln!(
        s,
        "plot '{csv_name}' every ::1 using 1:{} with lines title 'Re R_{p}', '' every ::1 using 1:{} with lines title 'Re T_{p}'",
        sel(4, p),
        sel(6, p)
    );
    for (col, name) in [(8, "|R~_q|"), (9, "|T~_q|")] {
        let _ = writeln!(s, "set ylabel '{name}'");
        let parts: Vec<String> = modes
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                let src = if i == 0 { format!("'{csv_name}'") } else { "''".to_string() };
                format!("{src} every ::1 using 1:{} with lines title 'q={q}'", sel(col, q))
            })
            .collect();
        let _ = writeln!(s, "plot {}", parts.join(", "));
    }
    let _ = writeln!(s, "unset multiplot");
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| LatticeError::Config(format!("json: {e}")))?;
    write_text(path, &(text + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_core::{incident_field, LatticeFrequency, WaveguideGeometry, Window};

    #[test]
    fn fmt17_has_seventeen_digits() {
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        let d = fmt17(-std::f64::consts::PI);
        assert_eq!(d.trim_start_matches('-').split('e').next().unwrap().replace('.', "").len(), 17);
    }

    #[test]
    fn field_csv_round_trip() {
        let g = WaveguideGeometry::new(1, 2, 4, 5).unwrap();
        let f = LatticeFrequency::new(1.3, 0.0).unwrap();
        let inc = incident_field(1, &g, &f, Window::symmetric(3)).unwrap();
        let sc = inc.add(&inc);
        let text = field_csv(&sc, &inc);
        let rows = parse_field_csv(&text).unwrap();
        assert_eq!(rows.len(), 7 * 10);
        assert_eq!((rows[0].m, rows[0].n), (-3, -4));
        assert_eq!((rows[1].m, rows[1].n), (-3, -3));
        for r in &rows {
            assert_eq!(r.values[0].to_bits(), sc.get(r.m, r.n).re.to_bits());
            assert_eq!(r.values[3].to_bits(), inc.get(r.m, r.n).im.to_bits());
        }
        let mut again = String::from(FIELD_HEADER);
        again.push('\n');
        for r in &rows {
            let v: Vec<String> = r.values.iter().map(|&x| fmt17(x)).collect();
            again.push_str(&format!("{},{},{}\n", r.m, r.n, v.join(",")));
        }
        assert_eq!(again, text);
    }

    #[test]
    fn malformed_field_csv_rejected() {
        assert!(parse_field_csv("m,n\n").is_err());
        assert!(parse_field_csv(&format!("{FIELD_HEADER}\n1,2,3\n")).is_err());
    }
}
