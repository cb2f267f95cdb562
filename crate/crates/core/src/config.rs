//! Run configuration for scans, as a flat `key = value` file mirroring the
//! command-line flags. `#` starts a comment; list values are comma
//! separated.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::bounds::{BoundTarget, DegreePolicy, DEFAULT_GRID, MIN_GRID, SOUNDNESS_TOL};
use crate::error::{Error, Result};
use crate::fq::FieldSpec;
use crate::par::Exec;
use crate::scan::{Sample, ScanConfig, DEFAULT_BUDGET};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub q: u32,
    pub d: usize,
    pub targets: Vec<BoundTarget>,
    pub policies: Vec<DegreePolicy>,
    pub sample: Sample,
    pub seed: u64,
    pub grid: usize,
    pub budget: u64,
    pub out: Option<PathBuf>,
    pub soundness_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = ScanConfig::new(3, 5);
        RunConfig {
            command: "scan".into(),
            q: s.q,
            d: s.d,
            targets: s.targets,
            policies: s.policies,
            sample: s.sample,
            seed: s.seed,
            grid: DEFAULT_GRID,
            budget: DEFAULT_BUDGET,
            out: None,
            soundness_tol: SOUNDNESS_TOL,
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_list<T, F: Fn(&str) -> Result<T>>(v: &str, f: F) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| f(s.trim())).collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Parse(format!("bad value '{v}' for '{key}'")))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "command" => self.command = v.to_string(),
            "q" => self.q = parse_num("q", v)?,
            "d" => self.d = parse_num("d", v)?,
            "target" | "targets" => self.targets = parse_list(v, |s| s.parse())?,
            "degree_policy" | "degree-policy" => self.policies = parse_list(v, |s| s.parse())?,
            "sample" => self.sample = v.parse()?,
            "seed" => self.seed = parse_num("seed", v)?,
            "grid" => self.grid = parse_num("grid", v)?,
            "budget" => self.budget = parse_num("budget", v)?,
            "out" => self.out = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "soundness_tol" => self.soundness_tol = parse_num("soundness_tol", v)?,
            other => return Err(Error::Parse(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Parses the file form on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "q = {}", self.q);
        let _ = writeln!(s, "d = {}", self.d);
        let _ = writeln!(s, "targets = {}", join(&self.targets));
        let _ = writeln!(s, "degree_policy = {}", join(&self.policies));
        let _ = writeln!(s, "sample = {}", self.sample);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "grid = {}", self.grid);
        let _ = writeln!(s, "budget = {}", self.budget);
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out = {}", out.display());
        }
        let _ = writeln!(s, "soundness_tol = {}", self.soundness_tol);
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.command != "scan" {
            return Err(Error::Config(format!("unknown command '{}'", self.command)));
        }
        FieldSpec::new(self.q)?;
        if self.d < 3 || self.d.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "d = {} is not an odd degree >= 3; the bounds need genus >= 1",
                self.d
            )));
        }
        if self.targets.is_empty() {
            return Err(Error::Config("no targets".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("no degree policies".into()));
        }
        if self.grid < MIN_GRID {
            return Err(Error::Config(format!("grid {} < {MIN_GRID}", self.grid)));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        if !(self.soundness_tol >= 0.0 && self.soundness_tol <= SOUNDNESS_TOL) {
            return Err(Error::Config(format!(
                "soundness_tol must lie in [0, {SOUNDNESS_TOL:e}]"
            )));
        }
        Ok(())
    }

    pub fn scan_config(&self, exec: Exec) -> Result<ScanConfig> {
        self.validate()?;
        Ok(ScanConfig {
            q: self.q,
            d: self.d,
            targets: self.targets.clone(),
            policies: self.policies.clone(),
            sample: self.sample,
            seed: self.seed,
            grid: self.grid,
            budget: self.budget,
            soundness_tol: self.soundness_tol,
            exec,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c = RunConfig {
            targets: vec![BoundTarget::Sn(1)],
            policies: vec![DegreePolicy::Fixed(3)],
            sample: Sample::Random(40),
            seed: 99,
            out: Some(PathBuf::from("out/scan.csv")),
            soundness_tol: 1e-10,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::from_text("q = 3\nwat = 1\n").is_err());
        assert!(RunConfig::from_text("q 3\n").is_err());
        let even = RunConfig::from_text("d = 6").unwrap();
        assert!(even.validate().is_err());
        let composite = RunConfig::from_text("q = 9").unwrap();
        assert!(composite.validate().is_err());
        let q2 = RunConfig::from_text("q = 2").unwrap();
        assert!(q2.validate().is_err());
        let loose = RunConfig::from_text("soundness_tol = 1e-3").unwrap();
        assert!(loose.validate().is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = RunConfig::from_text("# scan\n\nq = 5 # field\nd = 3\ntargets = logmod, s:0\n").unwrap();
        assert_eq!(c.q, 5);
        assert_eq!(c.d, 3);
        assert_eq!(c.targets, vec![BoundTarget::LogModulus, BoundTarget::Sn(0)]);
    }
}
