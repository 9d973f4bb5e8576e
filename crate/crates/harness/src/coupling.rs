//! Noise-level-dependent choice of the discretization.
//!
//! Balancing the discretization and noise terms of the reconstruction error
//! gives τ = C_τ·δ^{p/(pα+1)} and h = C_h·δ^{1/(2pα+2)}, where δ is the
//! relative noise level as a fraction (δ% / 100). N = T/τ and M = 1/h are
//! then rounded to the nearest power of two (in log scale).

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub n: usize,
    pub m: usize,
    /// Unrounded τ and h.
    pub tau: f64,
    pub h: f64,
}

/// Exponents (a, b) with τ ∝ δ^a and h ∝ δ^b.
pub fn coupling_exponents(alpha: f64, p: f64) -> (f64, f64) {
    (p / (p * alpha + 1.0), 1.0 / (2.0 * p * alpha + 2.0))
}

fn nearest_power_of_two(x: f64, min: usize) -> usize {
    let k = x.log2().round().max(0.0) as u32;
    (1usize << k.min(40)).max(min)
}

pub fn couple_parameters(
    delta_percent: f64,
    alpha: f64,
    p: f64,
    t_final: f64,
    c_tau: f64,
    c_h: f64,
) -> Result<Coupling> {
    if !(delta_percent > 0.0 && delta_percent.is_finite()) {
        return Err(HarnessError::Invalid(format!(
            "parameter coupling needs a positive noise level, got {delta_percent}%"
        )));
    }
    if !(c_tau > 0.0 && c_h > 0.0) {
        return Err(HarnessError::Invalid("coupling constants must be positive".into()));
    }
    let delta = delta_percent / 100.0;
    let (a, b) = coupling_exponents(alpha, p);
    let tau = c_tau * delta.powf(a);
    let h = c_h * delta.powf(b);
    Ok(Coupling {
        n: nearest_power_of_two(t_final / tau, 1),
        m: nearest_power_of_two(1.0 / h, 2),
        tau,
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents() {
        assert_eq!(coupling_exponents(0.5, 2.0), (1.0, 0.25));
        let (a, b) = coupling_exponents(0.25, 2.0);
        assert!((a - 4.0 / 3.0).abs() < 1e-15 && (b - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn halving_delta_doubles_n() {
        let a = couple_parameters(1.0, 0.5, 2.0, 1.0, 1.0, 1.0).unwrap();
        let b = couple_parameters(0.5, 0.5, 2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(a.n, 128);
        assert_eq!(b.n, 2 * a.n);
        assert!(a.m.is_power_of_two() && a.m >= 2);
    }

    #[test]
    fn zero_noise_is_rejected() {
        assert!(couple_parameters(0.0, 0.5, 2.0, 1.0, 1.0, 1.0).is_err());
    }
}
