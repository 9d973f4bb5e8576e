//! Reference potentials ρ†(t) used in the experiments.

use std::path::Path;

use crate::error::{HarnessError, Result};

/// A potential selectable by name: the three built-in test functions, or a
/// piecewise-linear table loaded from a `t,rho` CSV file.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Rho1,
    Rho2,
    Rho3,
    Custom(Table),
}

/// Piecewise-linear interpolant through `(t, rho)` knots; constant outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    t: Vec<f64>,
    rho: Vec<f64>,
}

impl Table {
    pub fn new(t: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != rho.len() {
            return Err(HarnessError::Invalid(
                "potential table needs matching, non-empty t and rho columns".into(),
            ));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HarnessError::Invalid(
                "potential table times must be strictly increasing".into(),
            ));
        }
        Ok(Self { t, rho })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        let (mut t, mut rho) = (Vec::new(), Vec::new());
        for record in reader.records() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| HarnessError::Invalid(format!("bad potential table row {:?}", record)))
            };
            t.push(parse(0)?);
            rho.push(parse(1)?);
        }
        Self::new(t, rho)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.t.partition_point(|&s| s <= t);
        if i == 0 {
            return self.rho[0];
        }
        if i == self.t.len() {
            return self.rho[i - 1];
        }
        let (t0, t1) = (self.t[i - 1], self.t[i]);
        let w = (t - t0) / (t1 - t0);
        self.rho[i - 1] * (1.0 - w) + self.rho[i] * w
    }
}

impl Potential {
    /// Resolves `rho1`, `rho2`, `rho3`, or `custom` (which needs `file`).
    pub fn from_name(name: &str, file: Option<&Path>) -> Result<Self> {
        match name {
            "rho1" => Ok(Potential::Rho1),
            "rho2" => Ok(Potential::Rho2),
            "rho3" => Ok(Potential::Rho3),
            "custom" => {
                let path = file.ok_or_else(|| HarnessError::MissingKey("potential_file".into()))?;
                Ok(Potential::Custom(Table::read(path)?))
            }
            other => Err(HarnessError::Invalid(format!("unknown potential `{other}`"))),
        }
    }

    /// ρ†(t) on [0, T].
    pub fn eval(&self, t: f64, t_final: f64) -> f64 {
        match self {
            Potential::Rho1 => (5.0 * t).cos().exp(),
            Potential::Rho2 => {
                let s = 8.0 / t_final;
                if t <= 0.25 * t_final {
                    s * t + 0.7
                } else if t <= 0.5 * t_final {
                    -s * t + 4.7
                } else if t <= 0.75 * t_final {
                    s * t - 3.3
                } else {
                    -s * t + 8.7
                }
            }
            Potential::Rho3 => {
                if t < 0.25 * t_final {
                    1.0
                } else if t < 0.5 * t_final {
                    2.5
                } else if t < 0.75 * t_final {
                    1.5
                } else {
                    2.0
                }
            }
            Potential::Custom(table) => table.eval(t),
        }
    }
}

/// Evaluates a built-in potential by name.
pub fn builtin_potential(id: &str, t: f64, t_final: f64) -> Result<f64> {
    match id {
        "rho1" | "rho2" | "rho3" => Ok(Potential::from_name(id, None)?.eval(t, t_final)),
        other => Err(HarnessError::Invalid(format!("unknown built-in potential `{other}`"))),
    }
}
