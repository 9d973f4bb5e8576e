//! Discrete ℓ^p and exponentially weighted ℓ^p_ω norms of sequences on t_1..t_N,
//! reconstruction errors and empirical convergence rates.

use crate::error::{Error, Result};
use crate::forward::PotentialPath;
use crate::fracquad::TimeGrid;
use crate::scalar::Real;

/// Exponent p ∈ [1, ∞], weight ω ≥ 0 and step τ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec<T> {
    pub p: T,
    pub omega: T,
    pub tau: T,
}

impl<T: Real> NormSpec<T> {
    pub fn new(p: T, omega: T, tau: T) -> Result<Self> {
        if !(p >= T::one()) {
            return Err(Error::InvalidArgument(format!("norm exponent must be >= 1, got {p}")));
        }
        if !(omega >= T::zero() && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!("weight must be >= 0, got {omega}")));
        }
        if !(tau > T::zero()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {tau}")));
        }
        Ok(Self { p, omega, tau })
    }

    /// Unweighted ℓ² on a grid with step `tau`.
    pub fn l2(tau: T) -> Self {
        Self {
            p: T::lit(2.0),
            omega: T::zero(),
            tau,
        }
    }

    pub fn with_omega(mut self, omega: T) -> Self {
        self.omega = omega;
        self
    }
}

/// (τ Σ_n (e^{−ω t_n}|vⁿ|)^p)^{1/p}, or max_n e^{−ω t_n}|vⁿ| for p = ∞, with
/// `seq[0]` taken at t_1 = τ.
pub fn lp_norm<T: Real>(seq: &[T], spec: &NormSpec<T>) -> T {
    let weighted = seq.iter().enumerate().map(|(i, &v)| {
        let t = T::of_usize(i + 1) * spec.tau;
        (-spec.omega * t).exp() * v.abs()
    });
    if spec.p.is_infinite() {
        return weighted.fold(T::zero(), T::max);
    }
    if spec.p == T::one() {
        return spec.tau * weighted.sum::<T>();
    }
    if spec.p == T::lit(2.0) {
        return (spec.tau * weighted.map(|x| x * x).sum::<T>()).sqrt();
    }
    (spec.tau * weighted.map(|x| x.powf(spec.p)).sum::<T>()).powf(spec.p.recip())
}

/// ‖(ρ†(t_n) − ρ⋆ⁿ)_n‖ in the norm `spec`.
pub fn reconstruction_error<T: Real>(
    rho_star: &PotentialPath<T>,
    rho_true: impl Fn(T) -> T,
    grid: &TimeGrid<T>,
    spec: &NormSpec<T>,
) -> Result<T> {
    if rho_star.len() != grid.steps() {
        return Err(Error::LengthMismatch {
            expected: grid.steps(),
            got: rho_star.len(),
        });
    }
    let diff: Vec<T> = rho_star
        .values()
        .iter()
        .enumerate()
        .map(|(i, &r)| rho_true(grid.t(i + 1)) - r)
        .collect();
    Ok(lp_norm(&diff, spec))
}

fn check_rate_inputs<T: Real>(params: &[T], errors: &[T]) -> Result<()> {
    if params.len() != errors.len() {
        return Err(Error::LengthMismatch {
            expected: params.len(),
            got: errors.len(),
        });
    }
    if params.len() < 2 {
        return Err(Error::InvalidArgument("need at least two refinement levels".into()));
    }
    if let Some(e) = errors.iter().find(|&&e| !(e > T::zero() && e.is_finite())) {
        return Err(Error::Domain {
            what: "rates need positive finite errors",
            value: e.as_f64(),
        });
    }
    if params.iter().any(|&p| !(p > T::zero())) || params.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(
            "parameters must be positive and strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// rate_i = log(e_i/e_{i+1}) / log(p_i/p_{i+1}).
pub fn empirical_rate<T: Real>(params: &[T], errors: &[T]) -> Result<Vec<T>> {
    check_rate_inputs(params, errors)?;
    Ok(params
        .windows(2)
        .zip(errors.windows(2))
        .map(|(p, e)| (e[0] / e[1]).ln() / (p[0] / p[1]).ln())
        .collect())
}

/// Least-squares slope of log(error) against log(param).
pub fn least_squares_rate<T: Real>(params: &[T], errors: &[T]) -> Result<T> {
    check_rate_inputs(params, errors)?;
    let n = T::of_usize(params.len());
    let xs: Vec<T> = params.iter().map(|p| p.ln()).collect();
    let ys: Vec<T> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ones_have_norm_sqrt_t() {
        let t = 0.5;
        let n = 64;
        let spec = NormSpec::l2(t / n as f64);
        assert!((lp_norm(&vec![1.0; n], &spec) - t.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn single_term_weighted() {
        let spec = NormSpec::new(2.0, 3.0, 0.1).unwrap();
        let expected = 0.1f64.sqrt() * (-0.3f64).exp() * 2.5;
        assert!((lp_norm(&[-2.5], &spec) - expected).abs() < 1e-15);
    }

    #[test]
    fn sup_norm_has_no_step_factor() {
        let spec = NormSpec::new(f64::INFINITY, 0.0, 0.01).unwrap();
        assert_eq!(lp_norm(&[1.0, -4.0, 2.0], &spec), 4.0);
    }

    #[test]
    fn general_p_agrees_with_special_cases() {
        let v = [0.3, -1.2, 2.2, 0.7];
        let tau = 0.25;
        let by_formula = |p: f64| (tau * v.iter().map(|x: &f64| x.abs().powf(p)).sum::<f64>()).powf(1.0 / p);
        for p in [1.0, 1.5, 2.0, 3.0] {
            let spec = NormSpec::new(p, 0.0, tau).unwrap();
            assert!((lp_norm(&v, &spec) - by_formula(p)).abs() < 1e-14);
        }
        assert!(NormSpec::new(0.5, 0.0, 1.0).is_err());
        assert!(NormSpec::new(2.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn reconstruction_error_cases() {
        let grid = TimeGrid::new(0.5, 100).unwrap();
        let f = |t: f64| (5.0 * t).cos().exp();
        let exact = PotentialPath::sample(&grid, 5.0, f).unwrap();
        let spec = NormSpec::l2(grid.tau());
        assert_eq!(reconstruction_error(&exact, f, &grid, &spec).unwrap(), 0.0);
        let shifted = PotentialPath::sample(&grid, 5.0, |t| f(t) + 1.0).unwrap();
        let e = reconstruction_error(&shifted, f, &grid, &spec).unwrap();
        assert!((e - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rates() {
        let r = empirical_rate::<f64>(&[0.1, 0.05], &[4e-2, 1e-2]).unwrap();
        assert!((r[0] - 2.0).abs() < 1e-14);
        let r = empirical_rate(&[0.1, 0.05], &[1e-2, 1e-2 * 2f64.powf(-0.5)]).unwrap();
        assert!((r[0] - 0.5).abs() < 1e-14);
        let r = empirical_rate(&[0.4, 0.2, 0.1], &[3.0, 3.0, 3.0]).unwrap();
        assert!(r.iter().all(|&x| x == 0.0));
        assert!(empirical_rate(&[0.1, 0.05], &[0.0, 1.0]).is_err());
        assert!(empirical_rate(&[0.1, 0.2], &[1.0, 1.0]).is_err());
        assert!(empirical_rate(&[0.1], &[1.0]).is_err());
        let ls = least_squares_rate::<f64>(&[0.4, 0.2, 0.1, 0.05], &[16.0, 4.0, 1.0, 0.25]).unwrap();
        assert!((ls - 2.0).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn weighted_norm_equivalence(
            v in prop::collection::vec(-10.0f64..10.0, 1..60),
            omega in 0.0f64..20.0,
        ) {
            let tau = 0.5 / v.len() as f64;
            let t = tau * v.len() as f64;
            let plain = lp_norm(&v, &NormSpec::l2(tau));
            let weighted = lp_norm(&v, &NormSpec::l2(tau).with_omega(omega));
            prop_assert!(weighted <= plain * (1.0 + 1e-14));
            prop_assert!((-omega * t).exp() * plain <= weighted * (1.0 + 1e-14) + 1e-300);
        }

        #[test]
        fn homogeneity_and_triangle(
            pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..40),
            c in -4.0f64..4.0,
            omega in 0.0f64..5.0,
            p_idx in 0usize..3,
        ) {
            let p = [1.0, 2.0, f64::INFINITY][p_idx];
            let spec = NormSpec::new(p, omega, 0.03).unwrap();
            let u: Vec<f64> = pairs.iter().map(|x| x.0).collect();
            let v: Vec<f64> = pairs.iter().map(|x| x.1).collect();
            let cu: Vec<f64> = u.iter().map(|x| c * x).collect();
            let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            let nu = lp_norm(&u, &spec);
            prop_assert!((lp_norm(&cu, &spec) - c.abs() * nu).abs() <= 1e-12 * (1.0 + nu));
            prop_assert!(lp_norm(&sum, &spec) <= nu + lp_norm(&v, &spec) + 1e-12);
        }

        #[test]
        fn omega_monotone(v in prop::collection::vec(0.0f64..3.0, 1..30), w1 in 0.0f64..5.0, dw in 0.0f64..5.0) {
            let spec = NormSpec::l2(0.1);
            let a = lp_norm(&v, &spec.with_omega(w1));
            let b = lp_norm(&v, &spec.with_omega(w1 + dw));
            prop_assert!(b <= a * (1.0 + 1e-14));
        }
    }
}
