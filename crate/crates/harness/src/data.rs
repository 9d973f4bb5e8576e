//! Synthetic measurements: fine-grid forward solves, nested extraction onto
//! the run grid, and the measurement file format.
//!
//! A measurement file is a two-column CSV: eight header rows `alpha`, `T`,
//! `N`, `x0`, `delta_percent`, `epsilon`, `seed` (`none` for exact data) and
//! `g0`, followed by N rows `t_n,g(t_n)`. Floats carry 17 significant digits.

use std::path::Path;

use subdiff_core::fem1d::{assemble, build_mesh};
use subdiff_core::forward::ForwardSolver;
use subdiff_core::{Measurement, PotentialPath, ProblemData, TimeGrid};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::potentials::Potential;
use crate::problem::{initial_value, standard_problem};

/// Exact observations u_h(x₀, t_n), n = 0..=N_fine, from one fine-grid solve.
#[derive(Debug, Clone)]
pub struct FineTrace {
    grid: TimeGrid,
    x0: f64,
    g0: f64,
    values: Vec<f64>,
}

impl FineTrace {
    /// Solves the forward problem with ρ† sampled on `(n_fine, m_fine)`.
    pub fn compute(
        alpha: f64,
        t_final: f64,
        potential: &Potential,
        data: &ProblemData,
        (n_fine, m_fine): (usize, usize),
        c_rho_bar: f64,
    ) -> Result<Self> {
        let grid = TimeGrid::new(t_final, n_fine)?;
        let mesh = build_mesh(m_fine)?;
        let ops = assemble(&mesh);
        let rho = PotentialPath::sample(&grid, c_rho_bar, |t| potential.eval(t, t_final))?;
        let solver = ForwardSolver::new(&mesh, &ops, grid, alpha)?;
        let traj = solver.solve_problem(&rho, data)?;
        Ok(Self {
            grid,
            x0: data.x0,
            g0: (data.u0)(data.x0),
            values: traj.trace(&mesh, data.x0)?,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// g(t_0)..g(t_{N_fine}) on the fine grid.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact measurement on a run grid with `n` steps; the run grid's time
    /// points must be a subset of the fine grid's.
    pub fn measurement(&self, n: usize) -> Result<Measurement> {
        let n_fine = self.grid.steps();
        if n == 0 || n_fine % n != 0 {
            return Err(HarnessError::Invalid(format!(
                "run grid N={n} is not nested in data grid N_fine={n_fine}"
            )));
        }
        let stride = n_fine / n;
        let g = (1..=n).map(|k| self.values[k * stride]).collect();
        Ok(Measurement::exact(
            TimeGrid::new(self.grid.t_final(), n)?,
            self.x0,
            g,
            self.g0,
        )?)
    }
}

/// The model problem for `cfg`, replaced by its interpolant on the run mesh in
/// inverse-crime mode.
pub fn problem_for(cfg: &ExperimentConfig) -> Result<ProblemData> {
    let data = standard_problem(cfg.problem, cfg.x0);
    Ok(if cfg.inverse_crime {
        data.interpolated(&build_mesh(cfg.intervals())?)
    } else {
        data
    })
}

/// Exact data for `cfg` on its run grid. In standard mode the data grid must
/// be at least 4× finer than the run grid in both N and M; in inverse-crime
/// mode data are produced on the run grid itself.
pub fn generate_data(cfg: &ExperimentConfig) -> Result<Measurement> {
    let alpha = cfg.alpha()?;
    let potential = Potential::from_name(cfg.potential_name()?, cfg.potential_file.as_deref())?;
    let fine = if cfg.inverse_crime {
        (cfg.steps(), cfg.intervals())
    } else {
        let (nf, mf) = cfg.fine_grid();
        if nf < 4 * cfg.steps() || mf < 4 * cfg.intervals() {
            return Err(HarnessError::Invalid(format!(
                "data grid ({nf}, {mf}) must be at least 4x finer than run grid ({}, {})",
                cfg.steps(), cfg.intervals()
            )));
        }
        (nf, mf)
    };
    let trace = FineTrace::compute(alpha, cfg.t_final, &potential, &problem_for(cfg)?, fine, cfg.c_rho_bar)?;
    let meas = trace.measurement(cfg.steps())?;
    debug_assert_eq!(meas.g0(), initial_value(cfg.x0));
    Ok(meas)
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_measurement(path: &Path, alpha: f64, meas: &Measurement) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    let grid = meas.grid();
    let seed = meas.seed().map_or_else(|| "none".to_string(), |s| s.to_string());
    w.write_record(["alpha", &fmt(alpha)])?;
    w.write_record(["T", &fmt(grid.t_final())])?;
    w.write_record(["N", &grid.steps().to_string()])?;
    w.write_record(["x0", &fmt(meas.x0())])?;
    w.write_record(["delta_percent", &fmt(meas.delta_percent())])?;
    w.write_record(["epsilon", &fmt(meas.epsilon())])?;
    w.write_record(["seed", &seed])?;
    w.write_record(["g0", &fmt(meas.g0())])?;
    for (n, g) in meas.values().iter().enumerate() {
        w.write_record([fmt(grid.t(n + 1)), fmt(*g)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a measurement file; returns α and the measurement.
pub fn read_measurement(path: &Path) -> Result<(f64, Measurement)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let rows: Vec<csv::StringRecord> = reader.records().collect::<std::result::Result<_, _>>()?;
    let header = |i: usize, key: &str| -> Result<&str> {
        let row = rows
            .get(i)
            .ok_or_else(|| HarnessError::Invalid(format!("measurement file ends before `{key}`")))?;
        if row.get(0) != Some(key) {
            return Err(HarnessError::Invalid(format!(
                "measurement header row {} should be `{key}`, found {:?}",
                i + 1,
                row.get(0)
            )));
        }
        row.get(1)
            .ok_or_else(|| HarnessError::Invalid(format!("`{key}` has no value")))
    };
    let num = |i: usize, key: &str| -> Result<f64> {
        let v = header(i, key)?;
        v.parse().map_err(|_| HarnessError::Parse {
            key: key.into(),
            value: v.into(),
            reason: "not a number".into(),
        })
    };
    let alpha = num(0, "alpha")?;
    let t_final = num(1, "T")?;
    let n = num(2, "N")? as usize;
    let x0 = num(3, "x0")?;
    let delta = num(4, "delta_percent")?;
    let epsilon = num(5, "epsilon")?;
    let seed = match header(6, "seed")? {
        "none" => None,
        s => Some(s.parse().map_err(|_| HarnessError::Parse {
            key: "seed".into(),
            value: s.into(),
            reason: "not an integer".into(),
        })?),
    };
    let g0 = num(7, "g0")?;
    let body = &rows[8..];
    if body.len() != n {
        return Err(HarnessError::Invalid(format!(
            "measurement file declares N={n} but has {} data rows",
            body.len()
        )));
    }
    let g = body
        .iter()
        .map(|r| {
            r.get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| HarnessError::Invalid(format!("bad data row {r:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let meas = Measurement::from_parts(TimeGrid::new(t_final, n)?, x0, g, g0, epsilon, delta, seed)?;
    Ok((alpha, meas))
}
