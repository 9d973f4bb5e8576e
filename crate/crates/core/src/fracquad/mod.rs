//! Backward-Euler convolution quadrature for the Caputo derivative, an L1
//! reference discretization, and the special functions behind the exact
//! constant-coefficient solutions.

mod special;

pub use special::{gamma_fn, ln_gamma, mittag_leffler, recip_gamma};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform partition t_n = nτ, n = 0..=N, of [0, T].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    t_final: T,
    steps: usize,
    tau: T,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t_final: T, steps: usize) -> Result<Self> {
        if !(t_final > T::zero() && t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "final time must be positive and finite, got {t_final}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("time grid needs at least one step".into()));
        }
        Ok(Self {
            t_final,
            steps,
            tau: t_final / T::of_usize(steps),
        })
    }

    pub fn t_final(&self) -> T {
        self.t_final
    }

    /// Number of steps N.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    /// Grid point t_n.
    pub fn t(&self, n: usize) -> T {
        if n == self.steps {
            self.t_final
        } else {
            T::of_usize(n) * self.tau
        }
    }

    /// t_1..t_N.
    pub fn interior_points(&self) -> Vec<T> {
        (1..=self.steps).map(|n| self.t(n)).collect()
    }
}

/// Weights ω_j of (1 − ξ)^α = Σ ω_j ξ^j.
#[derive(Debug, Clone, PartialEq)]
pub struct CqWeights<T> {
    alpha: T,
    weights: Vec<T>,
}

impl<T: Real> CqWeights<T> {
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// ω_0..ω_N.
    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }

    /// Highest index N held.
    pub fn max_index(&self) -> usize {
        self.weights.len() - 1
    }

    /// Partial sums σ_n = Σ_{j≤n} ω_j for n = 0..=N.
    pub fn partial_sums(&self) -> Vec<T> {
        self.weights
            .iter()
            .scan(T::zero(), |acc, &w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }
}

pub(crate) fn check_order<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        Err(Error::InvalidOrder(alpha.as_f64()))
    }
}

/// ω_0..ω_{n_terms} from ω_0 = 1, ω_j = ω_{j−1} (j − 1 − α)/j.
pub fn cq_weights<T: Real>(alpha: T, n_terms: usize) -> Result<CqWeights<T>> {
    check_order(alpha)?;
    if n_terms == 0 {
        return Err(Error::InvalidArgument("n_terms must be positive".into()));
    }
    let mut weights = Vec::with_capacity(n_terms + 1);
    weights.push(T::one());
    for j in 1..=n_terms {
        let jj = T::of_usize(j);
        let prev = weights[j - 1];
        weights.push(prev * (jj - T::one() - alpha) / jj);
    }
    Ok(CqWeights { alpha, weights })
}

fn check_samples<T: Real>(samples: &[T], grid: &TimeGrid<T>) -> Result<()> {
    if samples.len() != grid.steps() + 1 {
        return Err(Error::LengthMismatch {
            expected: grid.steps() + 1,
            got: samples.len(),
        });
    }
    Ok(())
}

/// d^n = τ^{−α} Σ_{j=0}^{n} ω_j (v^{n−j} − v^0) for n = 1..=N, given v^0..v^N.
pub fn caputo_becq<T: Real>(samples: &[T], alpha: T, grid: &TimeGrid<T>) -> Result<Vec<T>> {
    check_samples(samples, grid)?;
    let weights = cq_weights(alpha, grid.steps())?;
    Ok(caputo_becq_with(&weights, samples, grid.tau()))
}

/// [`caputo_becq`] with precomputed weights; `weights` must reach index
/// `samples.len() - 1`.
pub(crate) fn caputo_becq_with<T: Real>(weights: &CqWeights<T>, samples: &[T], tau: T) -> Vec<T> {
    let w = weights.as_slice();
    let scale = tau.powf(-weights.alpha());
    let v0 = samples[0];
    (1..samples.len())
        .map(|n| {
            // The j = n term vanishes identically.
            let s: T = (0..n).map(|j| w[j] * (samples[n - j] - v0)).sum();
            scale * s
        })
        .collect()
}

/// L1 discretization of the Caputo derivative:
/// d^n = τ^{−α}/Γ(2−α) Σ_{k=0}^{n−1} b_k (v^{n−k} − v^{n−k−1}), b_k = (k+1)^{1−α} − k^{1−α}.
///
/// Exact for piecewise-linear v; kept as an independent check on [`caputo_becq`].
pub fn caputo_l1<T: Real>(samples: &[T], alpha: T, grid: &TimeGrid<T>) -> Result<Vec<T>> {
    check_samples(samples, grid)?;
    check_order(alpha)?;
    let one_minus = T::one() - alpha;
    let b: Vec<T> = (0..grid.steps())
        .map(|k| {
            let k = T::of_usize(k);
            (k + T::one()).powf(one_minus) - k.powf(one_minus)
        })
        .collect();
    let scale = grid.tau().powf(-alpha) / gamma_fn(T::lit(2.0) - alpha)?;
    Ok((1..samples.len())
        .map(|n| {
            let s: T = (0..n)
                .map(|k| b[k] * (samples[n - k] - samples[n - k - 1]))
                .sum();
            scale * s
        })
        .collect())
}
