//! Flat `key = value` run configuration.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{LatticeError, Result};
use crate::lattice_core::{mode, validate_frequency, LatticeFrequency, WaveguideGeometry};
use crate::quadrature::Quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Wh,
    Bae,
    Both,
}

impl std::str::FromStr for Method {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wh" => Ok(Method::Wh),
            "bae" => Ok(Method::Bae),
            "both" => Ok(Method::Both),
            other => Err(LatticeError::Config(format!("unknown method `{other}` (expected wh, bae or both)"))),
        }
    }
}

/// `count` equally spaced points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.start + h * k as f64).collect()
    }
}

impl std::str::FromStr for SweepSpec {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(LatticeError::Config(format!("sweep `{s}` must have the form A:B:K")));
        }
        let start = parse_f64("sweep start", parts[0])?;
        let stop = parse_f64("sweep stop", parts[1])?;
        let count: usize =
            parts[2].parse().map_err(|_| LatticeError::Config(format!("sweep count `{}` is not an integer", parts[2])))?;
        if count == 0 {
            return Err(LatticeError::Config("sweep count must be positive".into()));
        }
        if !(start < stop) && count > 1 {
            return Err(LatticeError::Config(format!("sweep start {start} must be below stop {stop}")));
        }
        Ok(SweepSpec { start, stop, count })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FrequencySpec {
    Single(f64),
    Sweep(SweepSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub geometry: WaveguideGeometry,
    pub frequency: Option<FrequencySpec>,
    pub eps: f64,
    pub p: i64,
    /// Field window covers columns -window..=window.
    pub window: i64,
    pub m_r: i64,
    pub method: Method,
    pub jobs: usize,
    pub quadrature: Quadrature,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            geometry: WaveguideGeometry { n1: 0, n2: 9, big_n1: 10, big_n2: 19 },
            frequency: None,
            eps: 0.0,
            p: 1,
            window: 10,
            m_r: 40,
            method: Method::Wh,
            jobs: 1,
            quadrature: Quadrature::default(),
            out: PathBuf::from("out"),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| LatticeError::Config(format!("{key}: `{v}` is not a number")))
}

fn parse_i64(key: &str, v: &str) -> Result<i64> {
    v.parse().map_err(|_| LatticeError::Config(format!("{key}: `{v}` is not an integer")))
}

/// Split config text into key/value pairs, rejecting malformed and repeated keys.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| LatticeError::Config(format!("line {}: expected key = value", no + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k.is_empty() {
            return Err(LatticeError::Config(format!("line {}: empty key", no + 1)));
        }
        if let Some(prev) = seen.insert(k.clone(), no + 1) {
            return Err(LatticeError::Config(format!("line {}: key `{k}` already set on line {prev}", no + 1)));
        }
        out.push((k, v));
    }
    Ok(out)
}

impl RunConfig {
    /// Apply config text on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let pairs = parse_pairs(text)?;
        let mut geo = [None; 4];
        let mut sym = [None; 2];
        for (k, v) in &pairs {
            let v = v.as_str();
            match k.as_str() {
                "n1" => geo[0] = Some(parse_i64(k, v)?),
                "n2" => geo[1] = Some(parse_i64(k, v)?),
                "N1" => geo[2] = Some(parse_i64(k, v)?),
                "N2" => geo[3] = Some(parse_i64(k, v)?),
                "ell" => sym[0] = Some(parse_i64(k, v)?),
                "ell0" => sym[1] = Some(parse_i64(k, v)?),
                "omega" => self.frequency = Some(FrequencySpec::Single(parse_f64(k, v)?)),
                "sweep" => self.frequency = Some(FrequencySpec::Sweep(v.parse()?)),
                "eps" => self.eps = parse_f64(k, v)?,
                "p" => self.p = parse_i64(k, v)?,
                "window" => self.window = parse_i64(k, v)?,
                "mr" | "m_r" => self.m_r = parse_i64(k, v)?,
                "method" => self.method = v.parse()?,
                "jobs" => self.jobs = parse_i64(k, v)?.max(0) as usize,
                "quad_nodes" => self.quadrature.initial_nodes = parse_i64(k, v)?.max(0) as usize,
                "quad_tol" => self.quadrature.tol = parse_f64(k, v)?,
                "quad_doublings" => self.quadrature.max_doublings = parse_i64(k, v)?.max(0) as u32,
                "quad_deformation" => self.quadrature.deformation = parse_f64(k, v)?,
                "out" => self.out = PathBuf::from(v),
                other => return Err(LatticeError::Config(format!("unknown key `{other}`"))),
            }
        }
        let any_geo = geo.iter().any(Option::is_some);
        let any_sym = sym.iter().any(Option::is_some);
        if any_geo && any_sym {
            return Err(LatticeError::Config("give either n1, n2, N1, N2 or ell, ell0, not both".into()));
        }
        if any_geo {
            match geo {
                [Some(n1), Some(n2), Some(b1), Some(b2)] => {
                    self.geometry = WaveguideGeometry { n1, n2, big_n1: b1, big_n2: b2 };
                }
                _ => return Err(LatticeError::Config("geometry needs all of n1, n2, N1, N2".into())),
            }
        }
        if any_sym {
            match sym {
                [Some(ell), Some(ell0)] => self.geometry = WaveguideGeometry::symmetric(ell, ell0)?,
                _ => return Err(LatticeError::Config("symmetric geometry needs both ell and ell0".into())),
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LatticeError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut c = RunConfig::default();
        c.apply_text(&text)?;
        Ok(c)
    }

    /// Apply `LATTICE_WH_EPS` when it is set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var("LATTICE_WH_EPS") {
            self.eps = parse_f64("LATTICE_WH_EPS", v.trim())?;
        }
        Ok(())
    }

    pub fn frequency_at(&self, omega: f64) -> Result<LatticeFrequency> {
        LatticeFrequency::new(omega, self.eps)
    }

    /// Check every admissibility rule that does not depend on a particular sweep point.
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        let n = self.geometry.n();
        if self.p < 1 || self.p >= n {
            return Err(LatticeError::ModeIndex { j: self.p, max: n - 1 });
        }
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(LatticeError::Config(format!("eps={} must be finite and non-negative", self.eps)));
        }
        if self.window < 0 {
            return Err(LatticeError::Config(format!("window={} must be non-negative", self.window)));
        }
        if self.m_r < 1 {
            return Err(LatticeError::Config(format!("mr={} must be positive", self.m_r)));
        }
        if self.jobs == 0 {
            return Err(LatticeError::Config("jobs must be positive".into()));
        }
        let q = &self.quadrature;
        if q.initial_nodes < 8 || !(q.tol > 0.0) || !(q.deformation >= 0.0) {
            return Err(LatticeError::Config("quadrature needs quad_nodes >= 8, quad_tol > 0, quad_deformation >= 0".into()));
        }
        if let Some(FrequencySpec::Single(om)) = self.frequency {
            let f = self.frequency_at(om)?;
            validate_frequency(&self.geometry, &f)?;
        }
        Ok(())
    }

    /// Single frequency required by `solve` and `validate`, checked against mode p.
    pub fn single_frequency(&self) -> Result<LatticeFrequency> {
        match self.frequency {
            Some(FrequencySpec::Single(om)) => {
                let f = self.frequency_at(om)?;
                validate_frequency(&self.geometry, &f)?;
                if !mode(self.p, &self.geometry, &f)?.propagating {
                    return Err(LatticeError::BelowCutoff(self.p as usize));
                }
                Ok(f)
            }
            Some(FrequencySpec::Sweep(_)) => Err(LatticeError::Config("this command takes --omega, not --sweep".into())),
            None => Err(LatticeError::Config("no frequency given (use --omega or omega = ...)".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_config() {
        let mut c = RunConfig::default();
        c.apply_text("# demo\nn1 = 0\nn2 = 9  # screen\nN1 = 10\nN2 = 19\nomega = 1.5\np=3\nmethod = both\n").unwrap();
        assert_eq!(c.geometry, WaveguideGeometry::symmetric(10, 10).unwrap());
        assert_eq!(c.frequency, Some(FrequencySpec::Single(1.5)));
        assert_eq!(c.p, 3);
        assert_eq!(c.method, Method::Both);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_config() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("p = 1\np = 3\n").is_err());
        assert!(c.apply_text("colour = red\n").is_err());
        assert!(c.apply_text("n1 = 0\n").is_err());
        assert!(c.apply_text("ell = 3\nn1 = 0\nn2 = 1\nN1 = 3\nN2 = 4\n").is_err());
        assert!(c.apply_text("just words\n").is_err());
        let mut c = RunConfig::default();
        assert_eq!(c.apply_text("ell = 1\nell0 = 3\n").unwrap_err().exit_code(), 2);
        let mut c = RunConfig::default();
        c.apply_text("n1 = 0\nn2 = 3\nN1 = 1\nN2 = 6\n").unwrap();
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        let mut c = RunConfig::default();
        c.apply_text("omega = 2\n").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn sweep_points_are_inclusive() {
        let s: SweepSpec = "0.5:1.5:5".parse().unwrap();
        assert_eq!(s.points(), vec![0.5, 0.75, 1.0, 1.25, 1.5]);
        assert!("1:0.5:3".parse::<SweepSpec>().is_err());
        assert!("1:2".parse::<SweepSpec>().is_err());
    }

    #[test]
    fn below_cutoff_incident_mode_rejected() {
        let mut c = RunConfig::default();
        c.apply_text("omega = 0.05\n").unwrap();
        assert!(matches!(c.single_frequency(), Err(LatticeError::BelowCutoff(1))));
    }
}
