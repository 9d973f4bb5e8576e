//! A single reconstruction on the run grid.

use subdiff_core::fem1d::{assemble, build_mesh};
use subdiff_core::forward::ForwardSolver;
use subdiff_core::inverse::reconstruct;
use subdiff_core::metrics::reconstruction_error;
use subdiff_core::{Measurement, NormSpec, PotentialPath, ReconstructionConfig, ReconstructionReport};

use crate::config::ExperimentConfig;
use crate::data::problem_for;
use crate::error::Result;
use crate::potentials::Potential;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: ReconstructionReport,
    /// ℓ² error against ρ†, when ρ† is known.
    pub error: Option<f64>,
}

/// Reconstructs ρ from `meas` on an M-interval mesh, starting from the
/// constant `cfg.initial_guess`.
pub fn run_reconstruction(
    cfg: &ExperimentConfig,
    alpha: f64,
    meas: &Measurement,
    truth: Option<&Potential>,
) -> Result<RunOutcome> {
    let mesh = build_mesh(cfg.intervals())?;
    let ops = assemble(&mesh);
    let grid = *meas.grid();
    let solver = ForwardSolver::new(&mesh, &ops, grid, alpha)?;
    let data = problem_for(cfg)?;
    let t_final = grid.t_final();
    let mut rcfg = ReconstructionConfig::new(
        PotentialPath::constant(grid.steps(), cfg.initial_guess, cfg.c_rho_bar)?,
        cfg.c_rho_bar,
    );
    rcfg.p = cfg.p;
    rcfg.omega = cfg.omega;
    rcfg.max_iters = cfg.max_iters;
    rcfg.rel_tol = cfg.rel_tol;
    let truth_path = truth
        .map(|pot| PotentialPath::sample(&grid, f64::MAX, |t| pot.eval(t, t_final)))
        .transpose()?;
    let report = reconstruct(meas, &rcfg, &solver, &data, truth_path.as_ref())?;
    let error = truth
        .map(|pot| {
            reconstruction_error(&report.rho_star, |t| pot.eval(t, t_final), &grid, &NormSpec::l2(grid.tau()))
        })
        .transpose()?;
    Ok(RunOutcome { report, error })
}
