//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; blank lines and text after `#` are ignored.
//! Command-line overrides are applied on top of the file. Every key must be
//! one of [`KNOWN_KEYS`]; anything else is an error so that typos never pass
//! silently.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Every recognised configuration key.
pub const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "T",
    "potential",
    "potential_file",
    "problem",
    "x0",
    "N",
    "M",
    "N_fine",
    "M_fine",
    "delta_percent",
    "seeds",
    "p",
    "omega",
    "c_rho_bar",
    "initial_guess",
    "max_iters",
    "rel_tol",
    "inverse_crime",
    "C_tau",
    "C_h",
    "kind",
    "levels",
    "input",
    "output",
];

/// Raw key/value pairs in insertion-independent order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawConfig(BTreeMap<String, String>);

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Invalid(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            raw.set(key.trim(), value.trim())?;
        }
        Ok(raw)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(HarnessError::UnknownKey(key.to_string()));
        }
        self.0.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| HarnessError::Invalid(format!("override `{pair}` is not `key=value`")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.0
    }

    pub fn require(&self, keys: &[&str]) -> Result<()> {
        match keys.iter().find(|k| !self.0.contains_key(**k)) {
            Some(k) => Err(HarnessError::MissingKey(k.to_string())),
            None => Ok(()),
        }
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| HarnessError::Parse {
                    key: key.into(),
                    value: v.into(),
                    reason: e.to_string(),
                })
            })
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<T>().map_err(|e| HarnessError::Parse {
                            key: key.into(),
                            value: v.into(),
                            reason: e.to_string(),
                        })
                    })
                    .collect()
            })
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Linear,
    Nonlinear,
}

impl FromStr for ProblemKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear" => Ok(Self::Linear),
            "nonlinear" => Ok(Self::Nonlinear),
            _ => Err("expected `linear` or `nonlinear`".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Spatial,
    Temporal,
    Noise,
    TauUcurve,
    IterationDecay,
}

impl FromStr for SweepKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "spatial" => Ok(Self::Spatial),
            "temporal" => Ok(Self::Temporal),
            "noise" => Ok(Self::Noise),
            "tau_ucurve" => Ok(Self::TauUcurve),
            "iteration_decay" => Ok(Self::IterationDecay),
            _ => Err("expected spatial, temporal, noise, tau_ucurve or iteration_decay".into()),
        }
    }
}

/// Typed experiment settings with documented defaults.
///
/// | key | default |
/// |---|---|
/// | `T` | 0.5 |
/// | `problem` | `linear` |
/// | `x0` | 0 |
/// | `N`, `M` | 256, 100 |
/// | `N_fine`, `M_fine` | 8·N, 4·M |
/// | `delta_percent` | 0 |
/// | `seeds` | 1,2,3,4,5 |
/// | `p`, `omega` | 2, 0 |
/// | `c_rho_bar` | 5 |
/// | `initial_guess` | 2 |
/// | `max_iters` | 200 |
/// | `rel_tol` | 1e-10 linear, 1e-8 nonlinear |
/// | `inverse_crime` | false |
/// | `C_tau`, `C_h` | 1, 1 |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alpha: Option<f64>,
    pub t_final: f64,
    pub potential: Option<String>,
    pub potential_file: Option<PathBuf>,
    pub problem: ProblemKind,
    pub x0: f64,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub n_fine: Option<usize>,
    pub m_fine: Option<usize>,
    pub delta_percent: Option<f64>,
    pub seeds: Vec<u64>,
    pub p: f64,
    pub omega: f64,
    pub c_rho_bar: f64,
    pub initial_guess: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub inverse_crime: bool,
    pub c_tau: f64,
    pub c_h: f64,
    pub kind: Option<SweepKind>,
    pub levels: Option<Vec<f64>>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            t_final: 0.5,
            potential: None,
            potential_file: None,
            problem: ProblemKind::Linear,
            x0: 0.0,
            n: None,
            m: None,
            n_fine: None,
            m_fine: None,
            delta_percent: None,
            seeds: vec![1, 2, 3, 4, 5],
            p: 2.0,
            omega: 0.0,
            c_rho_bar: 5.0,
            initial_guess: 2.0,
            max_iters: 200,
            rel_tol: 1e-10,
            inverse_crime: false,
            c_tau: 1.0,
            c_h: 1.0,
            kind: None,
            levels: None,
            input: None,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let d = Self::default();
        let problem = raw.parsed("problem")?.unwrap_or(d.problem);
        let default_tol = match problem {
            ProblemKind::Linear => 1e-10,
            ProblemKind::Nonlinear => 1e-8,
        };
        let cfg = Self {
            alpha: raw.parsed("alpha")?,
            t_final: raw.parsed("T")?.unwrap_or(d.t_final),
            potential: raw.get("potential").map(str::to_string),
            potential_file: raw.get("potential_file").map(PathBuf::from),
            problem,
            x0: raw.parsed("x0")?.unwrap_or(d.x0),
            n: raw.parsed("N")?,
            m: raw.parsed("M")?,
            n_fine: raw.parsed("N_fine")?,
            m_fine: raw.parsed("M_fine")?,
            delta_percent: raw.parsed("delta_percent")?,
            seeds: raw.list("seeds")?.unwrap_or(d.seeds),
            p: raw.parsed("p")?.unwrap_or(d.p),
            omega: raw.parsed("omega")?.unwrap_or(d.omega),
            c_rho_bar: raw.parsed("c_rho_bar")?.unwrap_or(d.c_rho_bar),
            initial_guess: raw.parsed("initial_guess")?.unwrap_or(d.initial_guess),
            max_iters: raw.parsed("max_iters")?.unwrap_or(d.max_iters),
            rel_tol: raw.parsed("rel_tol")?.unwrap_or(default_tol),
            inverse_crime: raw.parsed("inverse_crime")?.unwrap_or(d.inverse_crime),
            c_tau: raw.parsed("C_tau")?.unwrap_or(d.c_tau),
            c_h: raw.parsed("C_h")?.unwrap_or(d.c_h),
            kind: raw.parsed("kind")?,
            levels: raw.list("levels")?,
            input: raw.get("input").map(PathBuf::from),
            output: raw.get("output").map(PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Invalid(msg));
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return bad(format!("alpha must lie in (0, 1), got {a}"));
            }
        }
        if !(self.t_final > 0.0) {
            return bad("T must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.x0) {
            return bad("x0 must lie in [0, 1]".into());
        }
        if self.n == Some(0) || self.m.is_some_and(|m| m < 2) {
            return bad("N must be >= 1 and M >= 2".into());
        }
        if self.delta_percent.is_some_and(|d| !(d >= 0.0)) {
            return bad("delta_percent must be non-negative".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        Ok(())
    }

    pub fn alpha(&self) -> Result<f64> {
        self.alpha.ok_or_else(|| HarnessError::MissingKey("alpha".into()))
    }

    pub fn potential_name(&self) -> Result<&str> {
        self.potential
            .as_deref()
            .ok_or_else(|| HarnessError::MissingKey("potential".into()))
    }

    pub fn sweep_kind(&self) -> Result<SweepKind> {
        self.kind.ok_or_else(|| HarnessError::MissingKey("kind".into()))
    }

    /// Number of time steps on the run grid.
    pub fn steps(&self) -> usize {
        self.n.unwrap_or(256)
    }

    /// Number of mesh intervals on the run grid.
    pub fn intervals(&self) -> usize {
        self.m.unwrap_or(100)
    }

    pub fn noise_percent(&self) -> f64 {
        self.delta_percent.unwrap_or(0.0)
    }

    /// Data grid; defaults to 8·N by 4·M.
    pub fn fine_grid(&self) -> (usize, usize) {
        (
            self.n_fine.unwrap_or(8 * self.steps()),
            self.m_fine.unwrap_or(4 * self.intervals()),
        )
    }
}
