//! Noisy point observations and the projected fixed-point reconstruction of
//! a time-dependent potential.
//!
//! One sweep of the iteration solves the forward problem with the current
//! potential ρ_k and sets, for n = 1..N,
//!
//! ```text
//! ρ_{k+1}ⁿ = clamp_[0, c̄] ( (Fⁿ + Δ_h u_hⁿ(x₀; ρ_k) − ∂̄_τ^α g_δ(t_n)) / g_δ(t_n) )
//! ```
//!
//! where Fⁿ = f(x₀) for a spatial source and Fⁿ = f(u_h^{n−1}(x₀; ρ_k)) for a
//! state-dependent one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem1d::{discrete_laplacian_apply, eval_at_point};
use crate::forward::{ForwardSolver, PotentialPath, ProblemData, Source};
use crate::fracquad::{caputo_becq_with, TimeGrid};
use crate::metrics::{lp_norm, NormSpec};
use crate::scalar::Real;

/// Observations g(t_1)..g(t_N) at x₀ plus the anchor value g(t_0).
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement<T> {
    grid: TimeGrid<T>,
    x0: T,
    g: Vec<T>,
    g0: T,
    epsilon: T,
    delta_percent: T,
    seed: Option<u64>,
}

impl<T: Real> Measurement<T> {
    /// Noise-free observations.
    pub fn exact(grid: TimeGrid<T>, x0: T, g: Vec<T>, g0: T) -> Result<Self> {
        Self::from_parts(grid, x0, g, g0, T::zero(), T::zero(), None)
    }

    pub fn from_parts(
        grid: TimeGrid<T>,
        x0: T,
        g: Vec<T>,
        g0: T,
        epsilon: T,
        delta_percent: T,
        seed: Option<u64>,
    ) -> Result<Self> {
        if g.len() != grid.steps() {
            return Err(Error::LengthMismatch {
                expected: grid.steps(),
                got: g.len(),
            });
        }
        if let Some((i, &v)) = g.iter().enumerate().find(|(_, &v)| !(v > T::zero() && v.is_finite())) {
            return Err(Error::NonPositiveData {
                index: i + 1,
                value: v.as_f64(),
            });
        }
        if !g0.is_finite() {
            return Err(Error::InvalidArgument("g0 must be finite".into()));
        }
        if !(x0 >= T::zero() && x0 <= T::one()) {
            return Err(Error::Domain {
                what: "observation point must lie in [0, 1]",
                value: x0.as_f64(),
            });
        }
        Ok(Self {
            grid,
            x0,
            g,
            g0,
            epsilon,
            delta_percent,
            seed,
        })
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn x0(&self) -> T {
        self.x0
    }

    /// g(t_1)..g(t_N).
    pub fn values(&self) -> &[T] {
        &self.g
    }

    pub fn g0(&self) -> T {
        self.g0
    }

    /// Absolute noise amplitude ε.
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn delta_percent(&self) -> T {
        self.delta_percent
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// g(t_0)..g(t_N).
    pub fn with_anchor(&self) -> Vec<T> {
        std::iter::once(self.g0).chain(self.g.iter().copied()).collect()
    }
}

/// g_δ(t_n) = g(t_n) + ε ξ_n with ε = max_{n≥0} g(t_n) · δ/100 and ξ_n i.i.d.
/// uniform on [−1, 1].
///
/// ξ_n are drawn in order n = 1..N from a ChaCha8 generator
/// (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`) as `f64` values, so a seed
/// reproduces the same draw on every platform. The anchor g(t_0) is kept
/// noise-free. Fails if any noisy value is not strictly positive.
pub fn add_noise<T: Real>(exact: &Measurement<T>, delta_percent: T, seed: u64) -> Result<Measurement<T>> {
    if !(delta_percent >= T::zero() && delta_percent.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise level must be non-negative, got {delta_percent}"
        )));
    }
    let peak = exact.g.iter().copied().fold(exact.g0, T::max);
    let epsilon = peak * delta_percent / T::lit(100.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = exact
        .g
        .iter()
        .map(|&v| v + epsilon * T::lit(rng.gen_range(-1.0..=1.0)))
        .collect();
    Measurement::from_parts(
        exact.grid,
        exact.x0,
        g,
        exact.g0,
        epsilon,
        delta_percent,
        Some(seed),
    )
}

/// Projection onto [0, c̄_ρ].
pub fn cutoff<T: Real>(a: T, c_rho_bar: T) -> T {
    a.max(T::zero()).min(c_rho_bar)
}

/// Iteration settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionConfig<T> {
    pub c_rho_bar: T,
    /// Norm exponent used for the stopping test, in (1, ∞).
    pub p: T,
    /// Weight of the ℓ^p_ω diagnostics.
    pub omega: T,
    pub max_iters: usize,
    pub rel_tol: T,
    pub initial_guess: PotentialPath<T>,
}

impl<T: Real> ReconstructionConfig<T> {
    /// p = 2, ω = 0, at most 200 sweeps, relative tolerance 1e−10.
    pub fn new(initial_guess: PotentialPath<T>, c_rho_bar: T) -> Self {
        Self {
            c_rho_bar,
            p: T::lit(2.0),
            omega: T::zero(),
            max_iters: 200,
            rel_tol: T::lit(1e-10),
            initial_guess,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_rho_bar > T::zero() && self.c_rho_bar.is_finite()) {
            return Err(Error::InvalidArgument("c_rho_bar must be positive".into()));
        }
        if !(self.p > T::one() && self.p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p must lie in (1, inf), got {}", self.p)));
        }
        if !(self.omega >= T::zero()) {
            return Err(Error::InvalidArgument("omega must be non-negative".into()));
        }
        if !(self.rel_tol > T::zero()) {
            return Err(Error::InvalidArgument("rel_tol must be positive".into()));
        }
        PotentialPath::new(self.initial_guess.values().to_vec(), self.c_rho_bar).map(|_| ())
    }
}

/// ℓ^p and ℓ^p_ω norms of one sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormPair<T> {
    pub lp: T,
    pub lp_omega: T,
}

/// Outcome of [`reconstruct`].
#[derive(Debug, Clone)]
pub struct ReconstructionReport<T> {
    pub rho_star: PotentialPath<T>,
    pub iterations_used: usize,
    pub converged: bool,
    /// Norms of ρ_{k+1} − ρ_k for each sweep.
    pub per_iteration_change: Vec<NormPair<T>>,
    /// Norms of ρ_{k+1} − ρ† for each sweep, when ρ† is supplied.
    pub per_iteration_error: Option<Vec<NormPair<T>>>,
}

/// The map ρ_k ↦ ρ_{k+1} for fixed data and discretization.
pub struct FixedPointMap<'s, 'a, T: Real> {
    solver: &'s ForwardSolver<'a, T>,
    data: &'s ProblemData<T>,
    meas: &'s Measurement<T>,
    data_caputo: Vec<T>,
}

impl<'s, 'a, T: Real> FixedPointMap<'s, 'a, T> {
    pub fn new(
        solver: &'s ForwardSolver<'a, T>,
        data: &'s ProblemData<T>,
        meas: &'s Measurement<T>,
    ) -> Result<Self> {
        let grid = solver.grid();
        if meas.grid.steps() != grid.steps() || meas.grid.t_final() != grid.t_final() {
            return Err(Error::InvalidArgument(format!(
                "measurement grid (N={}, T={}) differs from solver grid (N={}, T={})",
                meas.grid.steps(),
                meas.grid.t_final(),
                grid.steps(),
                grid.t_final()
            )));
        }
        let data_caputo = caputo_becq_with(solver.weights(), &meas.with_anchor(), grid.tau());
        Ok(Self {
            solver,
            data,
            meas,
            data_caputo,
        })
    }

    pub fn apply(&self, rho: &PotentialPath<T>) -> Result<PotentialPath<T>> {
        let traj = self.solver.solve_problem(rho, self.data)?;
        let mesh = self.solver.mesh();
        let ops = self.solver.ops();
        let x0 = self.data.x0;
        let bound = rho.bound();
        let fields = traj.fields();
        let fixed_source = match &self.data.source {
            Source::Spatial(f) => Some(f(x0)),
            Source::StateDependent(_) => None,
        };
        let values = (1..fields.len())
            .map(|n| {
                let lap = eval_at_point(mesh, &discrete_laplacian_apply(ops, &fields[n]), x0)?;
                let source = match (&self.data.source, fixed_source) {
                    (_, Some(v)) => v,
                    (Source::StateDependent(f), None) => f(eval_at_point(mesh, &fields[n - 1], x0)?),
                    (Source::Spatial(_), None) => unreachable!(),
                };
                let g = self.meas.g[n - 1];
                Ok(cutoff((source + lap - self.data_caputo[n - 1]) / g, bound))
            })
            .collect::<Result<Vec<T>>>()?;
        PotentialPath::new(values, bound)
    }
}

/// One sweep of the iteration from `rho_k`.
pub fn fixed_point_step<T: Real>(
    rho_k: &PotentialPath<T>,
    meas: &Measurement<T>,
    solver: &ForwardSolver<'_, T>,
    data: &ProblemData<T>,
) -> Result<PotentialPath<T>> {
    FixedPointMap::new(solver, data, meas)?.apply(rho_k)
}

/// Iterates [`fixed_point_step`] from `cfg.initial_guess` until
/// ‖ρ_{k+1} − ρ_k‖_{ℓ^p} ≤ rel_tol · max(‖ρ_k‖_{ℓ^p}, 1) or `max_iters` sweeps.
pub fn reconstruct<T: Real>(
    meas: &Measurement<T>,
    cfg: &ReconstructionConfig<T>,
    solver: &ForwardSolver<'_, T>,
    data: &ProblemData<T>,
    rho_true: Option<&PotentialPath<T>>,
) -> Result<ReconstructionReport<T>> {
    cfg.validate()?;
    let steps = solver.grid().steps();
    if cfg.initial_guess.len() != steps {
        return Err(Error::LengthMismatch {
            expected: steps,
            got: cfg.initial_guess.len(),
        });
    }
    if let Some(truth) = rho_true {
        if truth.len() != steps {
            return Err(Error::LengthMismatch {
                expected: steps,
                got: truth.len(),
            });
        }
    }
    let map = FixedPointMap::new(solver, data, meas)?;
    let plain = NormSpec::new(cfg.p, T::zero(), solver.grid().tau())?;
    let weighted = plain.with_omega(cfg.omega);
    let pair = |v: &[T]| NormPair {
        lp: lp_norm(v, &plain),
        lp_omega: lp_norm(v, &weighted),
    };
    let diff = |a: &PotentialPath<T>, b: &PotentialPath<T>| -> Vec<T> {
        a.values().iter().zip(b.values()).map(|(&x, &y)| x - y).collect()
    };

    let mut rho = PotentialPath::new(cfg.initial_guess.values().to_vec(), cfg.c_rho_bar)?;
    let mut changes = Vec::new();
    let mut errors = rho_true.map(|_| Vec::new());
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        let next = map.apply(&rho)?;
        let change = pair(&diff(&next, &rho));
        if let (Some(errs), Some(truth)) = (errors.as_mut(), rho_true) {
            errs.push(pair(&diff(&next, truth)));
        }
        let scale = lp_norm(rho.values(), &plain).max(T::one());
        changes.push(change);
        rho = next;
        if change.lp <= cfg.rel_tol * scale {
            converged = true;
            break;
        }
    }
    Ok(ReconstructionReport {
        iterations_used: changes.len(),
        rho_star: rho,
        converged,
        per_iteration_change: changes,
        per_iteration_error: errors,
    })
}
