//! Fully discrete forward solver and the constant-coefficient spectral solution.

use crate::error::{Error, Result};
use crate::fem1d::{self, FemOperators, Mesh1D, NodalField};
use crate::fracquad::{self, check_order, cq_weights, mittag_leffler, CqWeights, TimeGrid};
use crate::history::{self, ConvolutionMode};
use crate::quadrature::GaussRule;
use crate::scalar::{scalar_fn, Real, ScalarFn};

/// Grid samples ρ¹..ρ^N of a potential, each in [0, bound].
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPath<T> {
    values: Vec<T>,
    bound: T,
}

impl<T: Real> PotentialPath<T> {
    pub fn new(values: Vec<T>, bound: T) -> Result<Self> {
        if !(bound > T::zero() && bound.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "potential bound must be positive, got {bound}"
            )));
        }
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v >= T::zero() && v <= bound))
        {
            return Err(Error::Inadmissible {
                index: i + 1,
                value: v.as_f64(),
                bound: bound.as_f64(),
            });
        }
        Ok(Self { values, bound })
    }

    /// Samples `rho` at t_1..t_N.
    pub fn sample(grid: &TimeGrid<T>, bound: T, rho: impl Fn(T) -> T) -> Result<Self> {
        Self::new((1..=grid.steps()).map(|n| rho(grid.t(n))).collect(), bound)
    }

    pub fn constant(steps: usize, value: T, bound: T) -> Result<Self> {
        Self::new(vec![value; steps], bound)
    }

    /// ρ¹..ρ^N; index 0 holds ρ¹.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn bound(&self) -> T {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Right-hand side of the equation.
#[derive(Clone)]
pub enum Source<T> {
    /// f(x).
    Spatial(ScalarFn<T>),
    /// f(u), evaluated at the previous time level.
    StateDependent(ScalarFn<T>),
}

impl<T> std::fmt::Debug for Source<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Spatial(_) => f.write_str("Source::Spatial(..)"),
            Source::StateDependent(_) => f.write_str("Source::StateDependent(..)"),
        }
    }
}

/// Source, initial datum and observation point.
#[derive(Clone)]
pub struct ProblemData<T> {
    pub source: Source<T>,
    pub u0: ScalarFn<T>,
    pub x0: T,
}

impl<T: std::fmt::Debug> std::fmt::Debug for ProblemData<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemData")
            .field("source", &self.source)
            .field("x0", &self.x0)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ProblemData<T> {
    pub fn linear(f: ScalarFn<T>, u0: ScalarFn<T>, x0: T) -> Self {
        Self {
            source: Source::Spatial(f),
            u0,
            x0,
        }
    }

    pub fn nonlinear(f_of_u: ScalarFn<T>, u0: ScalarFn<T>, x0: T) -> Self {
        Self {
            source: Source::StateDependent(f_of_u),
            u0,
            x0,
        }
    }

    pub fn is_nonlinear(&self) -> bool {
        matches!(self.source, Source::StateDependent(_))
    }

    /// Same problem with every function of x replaced by its nodal
    /// interpolant on `mesh`. Data generated from the result satisfy the
    /// discrete reconstruction identity exactly on that mesh.
    pub fn interpolated(&self, mesh: &Mesh1D<T>) -> Self {
        let pl = |g: &ScalarFn<T>| -> ScalarFn<T> {
            let field = fem1d::interpolate(mesh, |x| g(x));
            let mesh = mesh.clone();
            scalar_fn(move |x: T| field.eval(&mesh, x.max(T::zero()).min(T::one())).unwrap_or(T::nan()))
        };
        Self {
            source: match &self.source {
                Source::Spatial(f) => Source::Spatial(pl(f)),
                Source::StateDependent(f) => Source::StateDependent(f.clone()),
            },
            u0: pl(&self.u0),
            x0: self.x0,
        }
    }
}

/// Nodal solutions U⁰..U^N of the fully discrete scheme.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    grid: TimeGrid<T>,
    fields: Vec<NodalField<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    /// U⁰..U^N.
    pub fn fields(&self) -> &[NodalField<T>] {
        &self.fields
    }

    pub fn field(&self, n: usize) -> &NodalField<T> {
        &self.fields[n]
    }

    /// u_h(x, t_n) for n = 0..=N.
    pub fn trace(&self, mesh: &Mesh1D<T>, x: T) -> Result<Vec<T>> {
        self.fields.iter().map(|u| u.eval(mesh, x)).collect()
    }
}

/// Time stepper for (∂̄_τ^α u_h^n, φ) + (∇u_h^n, ∇φ) + ρ^n (u_h^n, φ) = (f, φ).
#[derive(Debug, Clone)]
pub struct ForwardSolver<'a, T: Real> {
    mesh: &'a Mesh1D<T>,
    ops: &'a FemOperators<T>,
    grid: TimeGrid<T>,
    weights: CqWeights<T>,
    sigma: Vec<T>,
    scale: T,
    mode: ConvolutionMode,
}

impl<'a, T: Real> ForwardSolver<'a, T> {
    pub fn new(
        mesh: &'a Mesh1D<T>,
        ops: &'a FemOperators<T>,
        grid: TimeGrid<T>,
        alpha: T,
    ) -> Result<Self> {
        let weights = cq_weights(alpha, grid.steps())?;
        let sigma = weights.partial_sums();
        Ok(Self {
            mesh,
            ops,
            grid,
            scale: grid.tau().powf(-alpha),
            weights,
            sigma,
            mode: ConvolutionMode::Auto,
        })
    }

    pub fn with_mode(mut self, mode: ConvolutionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mesh(&self) -> &Mesh1D<T> {
        self.mesh
    }

    pub fn ops(&self) -> &FemOperators<T> {
        self.ops
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn alpha(&self) -> T {
        self.weights.alpha()
    }

    pub fn weights(&self) -> &CqWeights<T> {
        &self.weights
    }

    fn check_potential(&self, rho: &PotentialPath<T>) -> Result<()> {
        if rho.len() != self.grid.steps() {
            return Err(Error::LengthMismatch {
                expected: self.grid.steps(),
                got: rho.len(),
            });
        }
        Ok(())
    }

    /// Marches from `initial`; `load(n, U^{n−1})` supplies the load vector of step n.
    fn march(
        &self,
        rho: &PotentialPath<T>,
        initial: NodalField<T>,
        mut load: impl FnMut(usize, &[T]) -> Vec<T>,
    ) -> Result<Trajectory<T>> {
        self.check_potential(rho)?;
        let u0 = initial.into_values();
        let mass = self.ops.mass();
        let stiffness = self.ops.stiffness();
        let omega0 = self.weights.as_slice()[0];
        let mut previous = u0.clone();
        let mut tmp = vec![T::zero(); u0.len()];
        let fields = history::march(
            self.weights.as_slice(),
            u0.clone(),
            self.grid.steps(),
            self.mode,
            |n, hist| {
                // Σ_j ω_j (U^{n−j} − U⁰) = ω₀Uⁿ + Hⁿ − σ_n U⁰
                for ((t, &h), &a) in tmp.iter_mut().zip(hist).zip(&u0) {
                    *t = self.sigma[n] * a - h;
                }
                let mut rhs = mass.mul_vec(&tmp);
                let f = load(n, &previous);
                rhs.iter_mut()
                    .zip(&f)
                    .for_each(|(r, &l)| *r = self.scale * *r + l);
                let system = mass.combine(self.scale * omega0 + rho.values()[n - 1], stiffness, T::one());
                system.factor()?.solve_in_place(&mut rhs);
                previous.copy_from_slice(&rhs);
                Ok(rhs)
            },
        )?;
        Ok(Trajectory {
            grid: self.grid,
            fields: fields.into_iter().map(NodalField::from_vec).collect(),
        })
    }

    /// Linear problem with source f(x); U⁰ = R_h u₀.
    pub fn solve(&self, rho: &PotentialPath<T>, data: &ProblemData<T>) -> Result<Trajectory<T>> {
        let Source::Spatial(f) = &data.source else {
            return Err(Error::InvalidArgument(
                "linear solve needs a spatial source f(x)".into(),
            ));
        };
        let initial = fem1d::ritz_project(self.mesh, self.ops, |x| (data.u0)(x))?;
        let load = fem1d::load_vector(self.mesh, |x| f(x), GaussRule::Three);
        self.march(rho, initial, |_, _| load.clone())
    }

    /// Source f(u) lagged to the previous level and weighted by the mass
    /// matrix after nodal evaluation; U⁰ = R_h u₀.
    pub fn solve_nonlinear(
        &self,
        rho: &PotentialPath<T>,
        f_of_u: &ScalarFn<T>,
        u0: &ScalarFn<T>,
    ) -> Result<Trajectory<T>> {
        let initial = fem1d::ritz_project(self.mesh, self.ops, |x| u0(x))?;
        let mass = self.ops.mass();
        self.march(rho, initial, |_, prev| {
            let nodal: Vec<T> = prev.iter().map(|&u| f_of_u(u)).collect();
            mass.mul_vec(&nodal)
        })
    }

    /// Dispatches on the kind of source in `data`.
    pub fn solve_problem(&self, rho: &PotentialPath<T>, data: &ProblemData<T>) -> Result<Trajectory<T>> {
        match &data.source {
            Source::Spatial(_) => self.solve(rho, data),
            Source::StateDependent(f) => self.solve_nonlinear(rho, f, &data.u0),
        }
    }
}

/// Solves the linear scheme on the given discretization.
pub fn solve_forward<T: Real>(
    mesh: &Mesh1D<T>,
    ops: &FemOperators<T>,
    grid: &TimeGrid<T>,
    alpha: T,
    rho: &PotentialPath<T>,
    data: &ProblemData<T>,
) -> Result<Trajectory<T>> {
    ForwardSolver::new(mesh, ops, *grid, alpha)?.solve(rho, data)
}

/// Solves the scheme with the lagged state-dependent source `f_of_u`.
pub fn solve_forward_nonlinear<T: Real>(
    mesh: &Mesh1D<T>,
    ops: &FemOperators<T>,
    grid: &TimeGrid<T>,
    alpha: T,
    rho: &PotentialPath<T>,
    f_of_u: &ScalarFn<T>,
    u0: &ScalarFn<T>,
) -> Result<Trajectory<T>> {
    ForwardSolver::new(mesh, ops, *grid, alpha)?.solve_nonlinear(rho, f_of_u, u0)
}

/// Cosine-series solution of the continuous problem with constant potential
/// ρ₀ and time-independent source f(x):
///
/// ```text
/// u(x,t) = Σ_k [E_α(−μ_k t^α) a_k + f_k/μ_k (1 − E_α(−μ_k t^α))] φ_k(x),   μ_k = (kπ)² + ρ₀
/// ```
///
/// with φ₀ = 1, φ_k = √2 cos(kπx).
#[derive(Debug, Clone)]
pub struct SpectralSolution<T> {
    alpha: T,
    rho0: T,
    u0_coeffs: Vec<T>,
    f_coeffs: Vec<T>,
}

impl<T: Real> SpectralSolution<T> {
    pub fn new(alpha: T, rho0: T, data: &ProblemData<T>, n_modes: usize) -> Result<Self> {
        if n_modes < 1 {
            return Err(Error::InvalidArgument("n_modes must be at least 1".into()));
        }
        if !(alpha > T::zero() && alpha <= T::one()) {
            return Err(Error::InvalidOrder(alpha.as_f64()));
        }
        if !(rho0 >= T::zero()) {
            return Err(Error::InvalidArgument(format!("rho0 must be non-negative, got {rho0}")));
        }
        let Source::Spatial(f) = &data.source else {
            return Err(Error::InvalidArgument(
                "spectral solution needs a spatial source f(x)".into(),
            ));
        };
        let u0 = &data.u0;
        Ok(Self {
            alpha,
            rho0,
            u0_coeffs: cosine_coefficients(|x| u0(x), n_modes),
            f_coeffs: cosine_coefficients(|x| f(x), n_modes),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.u0_coeffs.len() - 1
    }

    /// Temporal factors of each mode at time `t`.
    fn modal_amplitudes(&self, t: T) -> Result<Vec<T>> {
        let pi = T::PI();
        let ta = t.powf(self.alpha);
        (0..self.u0_coeffs.len())
            .map(|k| {
                let kpi = T::of_usize(k) * pi;
                let mu = kpi * kpi + self.rho0;
                let (a, f) = (self.u0_coeffs[k], self.f_coeffs[k]);
                if mu == T::zero() {
                    return Ok(a + f * ta * fracquad::recip_gamma(T::one() + self.alpha));
                }
                let e = mittag_leffler(self.alpha, -mu * ta)?;
                Ok(e * a + f / mu * (T::one() - e))
            })
            .collect()
    }

    pub fn value(&self, x: T, t: T) -> Result<T> {
        Ok(self.profile(t, &[x])?[0])
    }

    /// u(x, t) at each of `xs`.
    pub fn profile(&self, t: T, xs: &[T]) -> Result<Vec<T>> {
        if !(t >= T::zero()) {
            return Err(Error::Domain {
                what: "time must be non-negative",
                value: t.as_f64(),
            });
        }
        let amps = self.modal_amplitudes(t)?;
        let sqrt2 = T::SQRT_2();
        Ok(xs
            .iter()
            .map(|&x| {
                amps.iter()
                    .enumerate()
                    .map(|(k, &c)| {
                        if k == 0 {
                            c
                        } else {
                            c * sqrt2 * (T::of_usize(k) * T::PI() * x).cos()
                        }
                    })
                    .sum()
            })
            .collect())
    }
}

/// ∫₀¹ g φ_k for k = 0..=n_modes, by composite five-point Gauss with enough
/// panels to resolve the highest mode.
fn cosine_coefficients<T: Real>(g: impl Fn(T) -> T, n_modes: usize) -> Vec<T> {
    let panels = 8 * n_modes + 64;
    let width = T::of_usize(panels).recip();
    let sqrt2 = T::SQRT_2();
    (0..=n_modes)
        .map(|k| {
            let kpi = T::of_usize(k) * T::PI();
            let norm = if k == 0 { T::one() } else { sqrt2 };
            (0..panels)
                .map(|p| {
                    let a = T::of_usize(p) * width;
                    GaussRule::Five.integrate(a, a + width, |x| g(x) * (kpi * x).cos())
                })
                .sum::<T>()
                * norm
        })
        .collect()
}

/// Continuous solution at (x, t) for constant potential `rho0`, truncated
/// after `n_modes` cosine modes.
pub fn exact_constant_coeff_solution<T: Real>(
    alpha: T,
    rho0: T,
    data: &ProblemData<T>,
    n_modes: usize,
    x: T,
    t: T,
) -> Result<T> {
    SpectralSolution::new(alpha, rho0, data, n_modes)?.value(x, t)
}

/// Scalar version of the scheme for a spatially constant solution:
/// τ^{−α} Σ_j ω_j (v^{n−j} − v⁰) + ρⁿ vⁿ = f(v^{n−1}). Direct summation.
pub fn scalar_lagged_recursion<T: Real>(
    alpha: T,
    grid: &TimeGrid<T>,
    rho: &[T],
    v0: T,
    f: impl Fn(T) -> T,
) -> Result<Vec<T>> {
    check_order(alpha)?;
    let w = cq_weights(alpha, grid.steps())?;
    let w = w.as_slice();
    let scale = grid.tau().powf(-alpha);
    let mut v = vec![v0];
    for n in 1..=grid.steps() {
        let hist: T = (1..n).map(|j| w[j] * (v[n - j] - v0)).sum();
        let rhs = f(v[n - 1]) + scale * (w[0] * v0 - hist);
        v.push(rhs / (scale * w[0] + rho[n - 1]));
    }
    Ok(v)
}
