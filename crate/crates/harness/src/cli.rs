//! The `subdiff` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use subdiff_core::fem1d::{assemble, build_mesh};
use subdiff_core::forward::ForwardSolver;
use subdiff_core::inverse::add_noise;
use subdiff_core::metrics::{empirical_rate, least_squares_rate};
use subdiff_core::{PotentialPath, TimeGrid};

use crate::config::{ExperimentConfig, RawConfig};
use crate::data::{generate_data, problem_for, read_measurement, write_measurement};
use crate::error::{HarnessError, Result};
use crate::manifest::Manifest;
use crate::potentials::Potential;
use crate::run::run_reconstruction;
use crate::sweep::{run_sweep, SweepOutput};

#[derive(Debug, Parser)]
#[command(name = "subdiff", version, about = "Time-fractional diffusion: forward solves and potential reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the forward problem and write the trace u(x0, t_n).
    Forward(Common),
    /// Generate (optionally noisy) measurement data.
    Gendata(Common),
    /// Reconstruct the potential from a measurement file.
    Reconstruct(Common),
    /// Run a convergence sweep.
    Sweep(Common),
    /// Empirical rates from a two-column `param,error` CSV.
    Rates(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replay the configuration recorded in a run manifest.
    #[arg(long, conflicts_with = "config")]
    manifest: Option<PathBuf>,
    /// Override a configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn raw_config(&self) -> Result<RawConfig> {
        let mut raw = match (&self.manifest, &self.config) {
            (Some(m), _) => Manifest::read(m)?.config,
            (None, Some(c)) => RawConfig::read(c)?,
            (None, None) => RawConfig::default(),
        };
        for pair in &self.set {
            raw.set_pair(pair)?;
        }
        let flags = [
            ("alpha", self.alpha.clone()),
            ("potential", self.potential.clone()),
            ("kind", self.kind.clone()),
            ("input", self.input.as_ref().map(|p| p.display().to_string())),
            ("output", self.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                raw.set(key, &v)?;
            }
        }
        Ok(raw)
    }
}

/// Runs the CLI on `args` (including the program name); returns the exit code.
pub fn cli_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Forward(c) => forward(&c.raw_config()?),
        Command::Gendata(c) => gendata(&c.raw_config()?),
        Command::Reconstruct(c) => reconstruct(&c.raw_config()?),
        Command::Sweep(c) => sweep(&c.raw_config()?),
        Command::Rates(c) => rates(&c.raw_config()?),
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes to `path`, or to stdout when no output is configured.
fn emit(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(p)?);
            body(&mut file)?;
            file.flush()?;
        }
        None => body(&mut std::io::stdout().lock())?,
    }
    Ok(())
}

fn write_manifest(
    command: &str,
    raw: &RawConfig,
    cfg: &ExperimentConfig,
    summary: serde_json::Value,
) -> Result<()> {
    if let Some(out) = &cfg.output {
        let mut manifest = Manifest::new(command, raw, &cfg.seeds);
        manifest.outputs.push(out.clone());
        manifest.summary = summary;
        manifest.write(&Manifest::path_for(out))?;
    }
    Ok(())
}

fn forward(raw: &RawConfig) -> Result<()> {
    raw.require(&["alpha", "potential"])?;
    let cfg = ExperimentConfig::from_raw(raw)?;
    let alpha = cfg.alpha()?;
    let pot = Potential::from_name(cfg.potential_name()?, cfg.potential_file.as_deref())?;
    let grid = TimeGrid::new(cfg.t_final, cfg.steps())?;
    let mesh = build_mesh(cfg.intervals())?;
    let ops = assemble(&mesh);
    let rho = PotentialPath::sample(&grid, cfg.c_rho_bar, |t| pot.eval(t, cfg.t_final))?;
    let data = problem_for(&cfg)?;
    let trace = ForwardSolver::new(&mesh, &ops, grid, alpha)?
        .solve_problem(&rho, &data)?
        .trace(&mesh, cfg.x0)?;
    emit(cfg.output.as_deref(), |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["t", "u_x0"])?;
        for (n, u) in trace.iter().enumerate() {
            csv.write_record([fmt(grid.t(n)), fmt(*u)])?;
        }
        csv.flush()?;
        Ok(())
    })?;
    write_manifest("forward", raw, &cfg, json!({ "steps": cfg.steps(), "intervals": cfg.intervals() }))
}

fn gendata(raw: &RawConfig) -> Result<()> {
    raw.require(&["alpha", "potential", "output"])?;
    let cfg = ExperimentConfig::from_raw(raw)?;
    let exact = generate_data(&cfg)?;
    let meas = match cfg.noise_percent() {
        d if d > 0.0 => add_noise(&exact, d, cfg.seeds[0])?,
        _ => exact,
    };
    let out = cfg.output.as_deref().ok_or_else(|| HarnessError::MissingKey("output".into()))?;
    write_measurement(out, cfg.alpha()?, &meas)?;
    write_manifest("gendata", raw, &cfg, json!({ "epsilon": meas.epsilon(), "seed": meas.seed() }))
}

fn reconstruct(raw: &RawConfig) -> Result<()> {
    raw.require(&["input"])?;
    let cfg = ExperimentConfig::from_raw(raw)?;
    let input = cfg.input.as_deref().ok_or_else(|| HarnessError::MissingKey("input".into()))?;
    let (alpha, meas) = read_measurement(input)?;
    if let Some(a) = cfg.alpha {
        if a != alpha {
            return Err(HarnessError::Invalid(format!(
                "configured alpha {a} differs from the measurement file's alpha {alpha}"
            )));
        }
    }
    if (meas.x0() - cfg.x0).abs() > 0.0 {
        return Err(HarnessError::Invalid(format!(
            "configured x0 {} differs from the measurement file's x0 {}",
            cfg.x0,
            meas.x0()
        )));
    }
    let truth = cfg
        .potential
        .as_deref()
        .map(|name| Potential::from_name(name, cfg.potential_file.as_deref()))
        .transpose()?;
    let out = run_reconstruction(&cfg, alpha, &meas, truth.as_ref())?;
    let grid = *meas.grid();
    let t_final = grid.t_final();
    emit(cfg.output.as_deref(), |w| {
        let mut csv = csv::Writer::from_writer(w);
        match &truth {
            Some(_) => csv.write_record(["t", "rho", "rho_true"])?,
            None => csv.write_record(["t", "rho"])?,
        }
        for (n, r) in out.report.rho_star.values().iter().enumerate() {
            let t = grid.t(n + 1);
            let mut rec = vec![fmt(t), fmt(*r)];
            if let Some(p) = &truth {
                rec.push(fmt(p.eval(t, t_final)));
            }
            csv.write_record(rec)?;
        }
        csv.flush()?;
        Ok(())
    })?;
    eprintln!(
        "iterations: {}, converged: {}{}",
        out.report.iterations_used,
        out.report.converged,
        out.error.map(|e| format!(", l2 error: {e:.6e}")).unwrap_or_default()
    );
    write_manifest(
        "reconstruct",
        raw,
        &cfg,
        json!({
            "iterations": out.report.iterations_used,
            "converged": out.report.converged,
            "l2_error": out.error,
        }),
    )
}

fn sweep(raw: &RawConfig) -> Result<()> {
    raw.require(&["alpha", "potential", "kind"])?;
    let cfg = ExperimentConfig::from_raw(raw)?;
    let result = run_sweep(&cfg)?;
    emit(cfg.output.as_deref(), |w| result.write_csv(w))?;
    let summary = match &result {
        SweepOutput::Rates(r) => {
            eprintln!(
                "least-squares rate: {}",
                r.least_squares_rate.map_or("n/a".into(), |v| format!("{v:.4}"))
            );
            json!({
                "least_squares_rate": r.least_squares_rate,
                "monotone_tail": r.monotone_tail,
                "failed_rows": r.rows.iter().filter(|row| row.failure.is_some()).count(),
            })
        }
        SweepOutput::Decay(d) => json!({ "iterations": d.changes.len(), "converged": d.converged }),
    };
    write_manifest("sweep", raw, &cfg, summary)
}

fn rates(raw: &RawConfig) -> Result<()> {
    raw.require(&["input"])?;
    let cfg = ExperimentConfig::from_raw(raw)?;
    let input = cfg.input.as_deref().ok_or_else(|| HarnessError::MissingKey("input".into()))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(input)?;
    let param_name = reader.headers()?.get(0).unwrap_or("param").to_string();
    let mut points = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let parse = |i: usize| rec.get(i).and_then(|s| s.parse::<f64>().ok());
        if let (Some(p), Some(e)) = (parse(0), parse(1)) {
            points.push((p, e));
        }
    }
    points.sort_by(|a, b| b.0.total_cmp(&a.0));
    let params: Vec<f64> = points.iter().map(|p| p.0).collect();
    let errors: Vec<f64> = points.iter().map(|p| p.1).collect();
    let local = empirical_rate(&params, &errors)?;
    let ls = least_squares_rate(&params, &errors)?;
    emit(cfg.output.as_deref(), |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record([param_name.as_str(), "error", "rate"])?;
        for (i, (p, e)) in points.iter().enumerate() {
            let rate = if i == 0 { String::new() } else { fmt(local[i - 1]) };
            csv.write_record([fmt(*p), fmt(*e), rate])?;
        }
        csv.flush()?;
        Ok(())
    })?;
    eprintln!("least-squares rate: {ls:.4}");
    write_manifest("rates", raw, &cfg, json!({ "least_squares_rate": ls }))
}
