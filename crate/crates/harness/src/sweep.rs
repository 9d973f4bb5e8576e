//! Parameter sweeps: spatial, temporal and noise convergence, the τ
//! U-curve, and per-iteration error decay.
//!
//! Rows are independent jobs executed on the rayon pool; each job owns its
//! inputs and seeds its own noise, so results do not depend on scheduling.
//!
//! Data grids per sweep (overridable with `N_fine` / `M_fine`):
//!
//! | kind | swept | fixed | data grid |
//! |---|---|---|---|
//! | spatial | M ∈ {10,20,40,80,160} | N = 800 | N, 4·max M |
//! | temporal | N = 2^k, k = 4..10 | M = 100 | 8·max N, 4·M |
//! | noise | δ% ∈ {4,2,1,0.5,0.25,0.125} | coupled (N, M) | 8·max N, 4·max M |
//! | tau_ucurve | N = 2^k, k = 2..13, δ = 0.1% | M = 100 | 8·max N, 4·M |
//! | iteration_decay | iteration k | N = 1024, M = 100 | 8·N, 4·M |
//!
//! The spatial sweep generates data with the run grid's τ: with a finer data
//! τ the O(τ^{1/2}) temporal error of the reconstruction (about 4e-2 at
//! τ = T/800) would swamp the O(h²) term being measured.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use subdiff_core::inverse::{add_noise, NormPair};
use subdiff_core::metrics::{empirical_rate, least_squares_rate};
use subdiff_core::Measurement;

use crate::config::{ExperimentConfig, SweepKind};
use crate::coupling::couple_parameters;
use crate::data::{problem_for, FineTrace};
use crate::error::{HarnessError, Result};
use crate::potentials::Potential;
use crate::run::run_reconstruction;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub n: usize,
    pub m: usize,
    /// Median ℓ² error over seeds.
    pub error: Option<f64>,
    pub per_seed: Vec<f64>,
    /// Largest iteration count over seeds.
    pub iterations: usize,
    pub converged: bool,
    /// Empirical rate between this row and the previous one.
    pub rate: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub param_name: &'static str,
    /// Ordered by decreasing parameter.
    pub rows: Vec<SweepRow>,
    pub least_squares_rate: Option<f64>,
    /// For noise-free refinement sweeps: whether the error decreases over the
    /// last three levels (one non-monotone step tolerated, see [`Self::flagged`]).
    pub monotone_tail: Option<bool>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayResult {
    pub errors: Vec<NormPair<f64>>,
    pub changes: Vec<NormPair<f64>>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepOutput {
    Rates(SweepResult),
    Decay(DecayResult),
}

impl SweepOutput {
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let f = |v: f64| format!("{v:.16e}");
        let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
        match self {
            SweepOutput::Rates(res) => {
                w.write_record([res.param_name, "error", "rate", "N", "M", "iterations", "converged", "per_seed", "status"])?;
                for r in &res.rows {
                    let seeds: Vec<String> = r.per_seed.iter().map(|&v| f(v)).collect();
                    w.write_record([
                        f(r.param),
                        opt(r.error),
                        opt(r.rate),
                        r.n.to_string(),
                        r.m.to_string(),
                        r.iterations.to_string(),
                        r.converged.to_string(),
                        seeds.join(";"),
                        r.failure.clone().unwrap_or_else(|| "ok".into()),
                    ])?;
                }
            }
            SweepOutput::Decay(res) => {
                w.write_record(["k", "error_l2", "error_l2w", "change_l2", "change_l2w"])?;
                for (k, (e, c)) in res.errors.iter().zip(&res.changes).enumerate() {
                    w.write_record([
                        (k + 1).to_string(),
                        f(e.lp),
                        f(e.lp_omega),
                        f(c.lp),
                        f(c.lp_omega),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.write_csv(&mut file)
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// One job: a run grid, the exact data on it, and how to perturb it.
struct Job {
    param: f64,
    n: usize,
    m: usize,
    exact: Result<Measurement>,
    delta_percent: f64,
}

fn run_job(cfg: &ExperimentConfig, alpha: f64, pot: &Potential, job: Job) -> SweepRow {
    let mut row = SweepRow {
        param: job.param,
        n: job.n,
        m: job.m,
        error: None,
        per_seed: Vec::new(),
        iterations: 0,
        converged: true,
        rate: None,
        failure: None,
    };
    let mut run_cfg = cfg.clone();
    run_cfg.n = Some(job.n);
    run_cfg.m = Some(job.m);
    let seeds: Vec<Option<u64>> = if job.delta_percent > 0.0 {
        cfg.seeds.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let exact = match job.exact {
        Ok(m) => m,
        Err(e) => {
            row.failure = Some(e.to_string());
            return row;
        }
    };
    let outcomes: Vec<Result<(f64, usize, bool)>> = seeds
        .par_iter()
        .map(|seed| {
            let meas = match seed {
                Some(s) => add_noise(&exact, job.delta_percent, *s)?,
                None => exact.clone(),
            };
            let out = run_reconstruction(&run_cfg, alpha, &meas, Some(pot))?;
            Ok((
                out.error.unwrap_or(f64::NAN),
                out.report.iterations_used,
                out.report.converged,
            ))
        })
        .collect();
    for o in outcomes {
        match o {
            Ok((err, its, conv)) => {
                row.per_seed.push(err);
                row.iterations = row.iterations.max(its);
                row.converged &= conv;
            }
            Err(e) => {
                row.failure = Some(e.to_string());
                return row;
            }
        }
    }
    row.error = Some(median(&row.per_seed));
    row
}

fn finish(kind: SweepKind, param_name: &'static str, mut rows: Vec<SweepRow>, refinement: bool) -> SweepResult {
    rows.sort_by(|a, b| b.param.total_cmp(&a.param));
    for i in 1..rows.len() {
        if let (Some(a), Some(b)) = (rows[i - 1].error, rows[i].error) {
            rows[i].rate = empirical_rate(&[rows[i - 1].param, rows[i].param], &[a, b])
                .ok()
                .map(|r| r[0]);
        }
    }
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.error.is_some_and(|e| e > 0.0)).collect();
    let params: Vec<f64> = ok.iter().map(|r| r.param).collect();
    let errors: Vec<f64> = ok.iter().filter_map(|r| r.error).collect();
    let least_squares_rate = least_squares_rate(&params, &errors).ok();
    let (monotone_tail, flagged) = if refinement && errors.len() >= 3 {
        let tail = &errors[errors.len() - 3..];
        let ups = tail.windows(2).filter(|w| w[1] >= w[0]).count();
        (Some(ups <= 1), ups == 1)
    } else {
        (None, false)
    };
    SweepResult {
        kind,
        param_name,
        rows,
        least_squares_rate,
        monotone_tail,
        flagged,
    }
}

fn levels_or(cfg: &ExperimentConfig, default: &[f64]) -> Vec<f64> {
    cfg.levels.clone().unwrap_or_else(|| default.to_vec())
}

fn as_count(v: f64, what: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(HarnessError::Invalid(format!("{what} level must be a positive integer, got {v}")))
    }
}

/// Runs the sweep selected by `cfg.kind`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let kind = cfg.sweep_kind()?;
    let alpha = cfg.alpha()?;
    let pot = Potential::from_name(cfg.potential_name()?, cfg.potential_file.as_deref())?;
    let data = problem_for(cfg)?;
    let t_final = cfg.t_final;
    let trace = |grid: (usize, usize)| FineTrace::compute(alpha, t_final, &pot, &data, grid, cfg.c_rho_bar);

    match kind {
        SweepKind::Spatial => {
            let ms = levels_or(cfg, &[10.0, 20.0, 40.0, 80.0, 160.0])
                .into_iter()
                .map(|v| as_count(v, "M"))
                .collect::<Result<Vec<_>>>()?;
            let n = cfg.n.unwrap_or(800);
            let m_max = ms.iter().copied().max().unwrap_or(2);
            let fine = trace((cfg.n_fine.unwrap_or(n), cfg.m_fine.unwrap_or(4 * m_max)))?;
            let rows = ms
                .par_iter()
                .map(|&m| {
                    let job = Job {
                        param: 1.0 / m as f64,
                        n,
                        m,
                        exact: fine.measurement(n),
                        delta_percent: cfg.noise_percent(),
                    };
                    run_job(cfg, alpha, &pot, job)
                })
                .collect();
            Ok(SweepOutput::Rates(finish(kind, "h", rows, cfg.noise_percent() == 0.0)))
        }
        SweepKind::Temporal | SweepKind::TauUcurve => {
            let (default_levels, default_delta): (Vec<f64>, f64) = if kind == SweepKind::Temporal {
                ((4..=10).map(f64::from).collect(), 0.0)
            } else {
                ((2..=13).map(f64::from).collect(), 0.1)
            };
            let ks = levels_or(cfg, &default_levels)
                .into_iter()
                .map(|v| as_count(v, "k").map(|k| k as u32))
                .collect::<Result<Vec<_>>>()?;
            let delta = cfg.delta_percent.unwrap_or(default_delta);
            let m = cfg.intervals();
            let n_max = 1usize << ks.iter().copied().max().unwrap_or(1);
            let fine = trace((cfg.n_fine.unwrap_or(8 * n_max), cfg.m_fine.unwrap_or(4 * m)))?;
            let rows = ks
                .par_iter()
                .map(|&k| {
                    let n = 1usize << k;
                    let job = Job {
                        param: t_final / n as f64,
                        n,
                        m,
                        exact: fine.measurement(n),
                        delta_percent: delta,
                    };
                    run_job(cfg, alpha, &pot, job)
                })
                .collect();
            Ok(SweepOutput::Rates(finish(kind, "tau", rows, delta == 0.0)))
        }
        SweepKind::Noise => {
            let deltas = levels_or(cfg, &[4.0, 2.0, 1.0, 0.5, 0.25, 0.125]);
            let grids = deltas
                .iter()
                .map(|&d| couple_parameters(d, alpha, cfg.p, t_final, cfg.c_tau, cfg.c_h))
                .collect::<Result<Vec<_>>>()?;
            let n_max = grids.iter().map(|g| g.n).max().unwrap_or(1);
            let m_max = grids.iter().map(|g| g.m).max().unwrap_or(2);
            let fine = trace((cfg.n_fine.unwrap_or(8 * n_max), cfg.m_fine.unwrap_or(4 * m_max)))?;
            let rows = deltas
                .par_iter()
                .zip(grids.par_iter())
                .map(|(&d, g)| {
                    let job = Job {
                        param: d,
                        n: g.n,
                        m: g.m,
                        exact: fine.measurement(g.n),
                        delta_percent: d,
                    };
                    run_job(cfg, alpha, &pot, job)
                })
                .collect();
            Ok(SweepOutput::Rates(finish(kind, "delta_percent", rows, false)))
        }
        SweepKind::IterationDecay => {
            let n = cfg.n.unwrap_or(1024);
            let m = cfg.intervals();
            let mut run_cfg = cfg.clone();
            run_cfg.n = Some(n);
            run_cfg.m = Some(m);
            let fine = trace(run_cfg.fine_grid())?;
            let exact = fine.measurement(n)?;
            let meas = match cfg.noise_percent() {
                d if d > 0.0 => add_noise(&exact, d, cfg.seeds[0])?,
                _ => exact,
            };
            let out = run_reconstruction(&run_cfg, alpha, &meas, Some(&pot))?;
            Ok(SweepOutput::Decay(DecayResult {
                errors: out.report.per_iteration_error.unwrap_or_default(),
                changes: out.report.per_iteration_change,
                converged: out.report.converged,
            }))
        }
    }
}
