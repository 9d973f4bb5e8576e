//! Piecewise-linear finite elements on (0, 1) with natural (Neumann) boundary
//! conditions.

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::scalar::Real;
use crate::tridiag::{SpdFactor, SymTridiag};

/// Uniform mesh 0 = x_0 < x_1 < … < x_M = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D<T> {
    intervals: usize,
    h: T,
    nodes: Vec<T>,
}

impl<T: Real> Mesh1D<T> {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < 2 {
            return Err(Error::InvalidArgument(format!(
                "mesh needs at least 2 intervals, got {intervals}"
            )));
        }
        let m = T::of_usize(intervals);
        let nodes = (0..=intervals)
            .map(|i| if i == intervals { T::one() } else { T::of_usize(i) / m })
            .collect();
        Ok(Self {
            intervals,
            h: m.recip(),
            nodes,
        })
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn node_count(&self) -> usize {
        self.intervals + 1
    }

    /// Mesh size h = 1/M.
    pub fn h(&self) -> T {
        self.h
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Index of the node at `x`, if `x` is a node up to rounding.
    pub fn node_index(&self, x: T) -> Option<usize> {
        let s = x * T::of_usize(self.intervals);
        let i = s.round();
        ((s - i).abs() <= T::epsilon() * T::lit(64.0) && i >= T::zero())
            .then(|| i.to_usize())
            .flatten()
            .filter(|&i| i <= self.intervals)
    }

    /// Element containing `x` and the local coordinate λ ∈ [0, 1] within it.
    fn locate(&self, x: T) -> (usize, T) {
        let s = x * T::of_usize(self.intervals);
        let e = s
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(self.intervals - 1);
        (e, s - T::of_usize(e))
    }
}

/// Builds a uniform mesh with `m_intervals` elements.
pub fn build_mesh<T: Real>(m_intervals: usize) -> Result<Mesh1D<T>> {
    Mesh1D::new(m_intervals)
}

/// Coefficients of a finite element function in the hat basis.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField<T> {
    values: Vec<T>,
}

impl<T: Real> NodalField<T> {
    pub fn new(mesh: &Mesh1D<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(Error::LengthMismatch {
                expected: mesh.node_count(),
                got: values.len(),
            });
        }
        Ok(Self { values })
    }

    pub(crate) fn from_vec(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn constant(mesh: &Mesh1D<T>, c: T) -> Self {
        Self {
            values: vec![c; mesh.node_count()],
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eval(&self, mesh: &Mesh1D<T>, x: T) -> Result<T> {
        eval_at_point(mesh, self, x)
    }
}

/// Mass and stiffness matrices of the hat basis.
#[derive(Debug, Clone)]
pub struct FemOperators<T> {
    mass: SymTridiag<T>,
    stiffness: SymTridiag<T>,
    hat_integrals: Vec<T>,
    mass_factor: SpdFactor<T>,
}

impl<T: Real> FemOperators<T> {
    pub fn mass(&self) -> &SymTridiag<T> {
        &self.mass
    }

    pub fn stiffness(&self) -> &SymTridiag<T> {
        &self.stiffness
    }

    /// ∫ φ_i over the domain; these are also the row sums of the mass matrix.
    pub fn hat_integrals(&self) -> &[T] {
        &self.hat_integrals
    }

    /// ∫ u for a finite element function u.
    pub fn integral(&self, u: &NodalField<T>) -> T {
        self.hat_integrals
            .iter()
            .zip(u.values())
            .map(|(&m, &v)| m * v)
            .sum()
    }
}

/// Exact mass and stiffness matrices; no boundary rows are eliminated.
pub fn assemble<T: Real>(mesh: &Mesh1D<T>) -> FemOperators<T> {
    let n = mesh.node_count();
    let h = mesh.h();
    let two = T::lit(2.0);
    let interior_or = |i: usize, edge: T, inner: T| if i == 0 || i == n - 1 { edge } else { inner };

    let mass_diag = (0..n)
        .map(|i| interior_or(i, h / T::lit(3.0), two * h / T::lit(3.0)))
        .collect();
    let mass = SymTridiag::new(mass_diag, vec![h / T::lit(6.0); n - 1])
        .expect("mass matrix shape");
    let stiff_diag = (0..n).map(|i| interior_or(i, h.recip(), two / h)).collect();
    let stiffness = SymTridiag::new(stiff_diag, vec![-h.recip(); n - 1])
        .expect("stiffness matrix shape");
    let hat_integrals = (0..n).map(|i| interior_or(i, h / two, h)).collect();
    let mass_factor = mass.factor().expect("consistent mass matrix is positive definite");
    FemOperators {
        mass,
        stiffness,
        hat_integrals,
        mass_factor,
    }
}

/// Nodal interpolant of `f`.
pub fn interpolate<T: Real>(mesh: &Mesh1D<T>, f: impl Fn(T) -> T) -> NodalField<T> {
    NodalField::from_vec(mesh.nodes().iter().map(|&x| f(x)).collect())
}

/// Load vector (f, φ_i) by per-element Gauss quadrature.
pub fn load_vector<T: Real>(mesh: &Mesh1D<T>, f: impl Fn(T) -> T, rule: GaussRule) -> Vec<T> {
    let nodes = mesh.nodes();
    let h = mesh.h();
    let mut load = vec![T::zero(); mesh.node_count()];
    for e in 0..mesh.intervals() {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let left = rule.integrate(a, b, |x| f(x) * (b - x) / h);
        let right = rule.integrate(a, b, |x| f(x) * (x - a) / h);
        load[e] += left;
        load[e + 1] += right;
    }
    load
}

/// ∫₀¹ f by five-point Gauss quadrature per element.
pub fn integrate_over_mesh<T: Real>(mesh: &Mesh1D<T>, f: impl Fn(T) -> T) -> T {
    let nodes = mesh.nodes();
    (0..mesh.intervals())
        .map(|e| GaussRule::Five.integrate(nodes[e], nodes[e + 1], &f))
        .sum()
}

/// L² projection P_h f: solves M p = (f, φ_i).
pub fn l2_project<T: Real>(
    mesh: &Mesh1D<T>,
    ops: &FemOperators<T>,
    f: impl Fn(T) -> T,
) -> NodalField<T> {
    l2_project_with(mesh, ops, f, GaussRule::Three)
}

pub fn l2_project_with<T: Real>(
    mesh: &Mesh1D<T>,
    ops: &FemOperators<T>,
    f: impl Fn(T) -> T,
    rule: GaussRule,
) -> NodalField<T> {
    let load = load_vector(mesh, f, rule);
    NodalField::from_vec(ops.mass_factor.solve(&load))
}

/// Ritz projection R_h f: (∇R_h f, ∇φ_i) = (∇f, ∇φ_i) for all i and ∫R_h f = ∫f.
///
/// On each element ∇φ_i is constant, so (∇f, ∇φ_i) reduces exactly to nodal
/// differences of f and no derivative of f is needed. The singular Neumann
/// system is solved with the first node grounded, then the mean is fixed by
/// adding a constant.
pub fn ritz_project<T: Real>(
    mesh: &Mesh1D<T>,
    ops: &FemOperators<T>,
    f: impl Fn(T) -> T,
) -> Result<NodalField<T>> {
    let nodal = interpolate(mesh, &f);
    let rhs = ops.stiffness.mul_vec(nodal.values());
    let target_mean = integrate_over_mesh(mesh, &f);

    let reduced = ops.stiffness.drop_first().factor()?;
    let mut w = Vec::with_capacity(mesh.node_count());
    w.push(T::zero());
    w.extend(reduced.solve(&rhs[1..]));
    let mut field = NodalField::from_vec(w);
    let shift = (target_mean - ops.integral(&field)) / ops.hat_integrals.iter().copied().sum();
    field.values.iter_mut().for_each(|v| *v += shift);

    let mismatch = (ops.integral(&field) - target_mean).abs();
    let tol = T::epsilon() * T::of_usize(64 * mesh.node_count());
    if mismatch > tol * (T::one() + target_mean.abs()) {
        return Err(Error::ConstraintViolation(mismatch.as_f64()));
    }
    Ok(field)
}

/// Nodal coefficients of Δ_h u, i.e. the solution w of M w = −S u.
pub fn discrete_laplacian_apply<T: Real>(ops: &FemOperators<T>, u: &NodalField<T>) -> NodalField<T> {
    let mut w = ops.stiffness.mul_vec(u.values());
    w.iter_mut().for_each(|v| *v = -*v);
    ops.mass_factor.solve_in_place(&mut w);
    NodalField::from_vec(w)
}

/// Piecewise-linear interpolation of nodal values at `x0 ∈ [0, 1]`.
pub fn eval_at_point<T: Real>(mesh: &Mesh1D<T>, u: &NodalField<T>, x0: T) -> Result<T> {
    if !(x0 >= T::zero() && x0 <= T::one()) {
        return Err(Error::Domain {
            what: "evaluation point must lie in [0, 1]",
            value: x0.as_f64(),
        });
    }
    if u.len() != mesh.node_count() {
        return Err(Error::LengthMismatch {
            expected: mesh.node_count(),
            got: u.len(),
        });
    }
    if let Some(i) = mesh.node_index(x0) {
        return Ok(u.values[i]);
    }
    let (e, lambda) = mesh.locate(x0);
    Ok(u.values[e] * (T::one() - lambda) + u.values[e + 1] * lambda)
}
