//! Online evaluation of the convolution-quadrature history sums
//! H^n = Σ_{j=1}^{n} ω_j U^{n−j} while U^n is produced step by step.

use std::collections::HashMap;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::scalar::Real;

/// How history sums are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvolutionMode {
    /// Plain O(N²) summation.
    Direct,
    /// Divide-and-conquer with FFT block products, O(N log² N).
    Fast,
    /// `Direct` for short horizons, `Fast` otherwise.
    #[default]
    Auto,
}

const AUTO_FAST_ABOVE: usize = 512;
const BLOCK: usize = 64;

impl ConvolutionMode {
    fn block_size(self, len: usize) -> usize {
        match self {
            ConvolutionMode::Direct => usize::MAX,
            ConvolutionMode::Fast => BLOCK,
            ConvolutionMode::Auto if len > AUTO_FAST_ABOVE => BLOCK,
            ConvolutionMode::Auto => usize::MAX,
        }
    }
}

/// Runs `step(n, H^n) -> U^n` for n = 1..=steps starting from U^0 = `first`.
/// `weights` must hold ω_0..ω_steps (ω_0 is not used here).
pub(crate) fn march<T, F>(
    weights: &[T],
    first: Vec<T>,
    steps: usize,
    mode: ConvolutionMode,
    step: F,
) -> Result<Vec<Vec<T>>>
where
    T: Real,
    F: FnMut(usize, &[T]) -> Result<Vec<T>>,
{
    assert!(weights.len() > steps, "weights shorter than the horizon");
    let dim = first.len();
    let mut engine = Engine {
        weights,
        dim,
        acc: vec![vec![T::zero(); dim]; steps + 1],
        out: Vec::with_capacity(steps + 1),
        step,
        block: mode.block_size(steps + 1),
        spectra: HashMap::new(),
        planner: FftPlanner::new(),
    };
    engine.out.push(first);
    engine.solve_range(0, steps + 1)?;
    Ok(engine.out)
}

struct Spectrum<T: Real> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    weights_hat: Vec<Complex<T>>,
}

struct Engine<'w, T: Real, F> {
    weights: &'w [T],
    dim: usize,
    acc: Vec<Vec<T>>,
    out: Vec<Vec<T>>,
    step: F,
    block: usize,
    spectra: HashMap<usize, Spectrum<T>>,
    planner: FftPlanner<T>,
}

impl<T, F> Engine<'_, T, F>
where
    T: Real,
    F: FnMut(usize, &[T]) -> Result<Vec<T>>,
{
    // Invariant on entry: acc[m] holds the contributions of every U^i with i < lo.
    fn solve_range(&mut self, lo: usize, hi: usize) -> Result<()> {
        if hi - lo <= self.block {
            for m in lo..hi {
                if m == 0 {
                    continue;
                }
                for i in lo..m {
                    let w = self.weights[m - i];
                    let (src, dst) = (&self.out[i], &mut self.acc[m]);
                    dst.iter_mut().zip(src).for_each(|(d, &s)| *d += w * s);
                }
                let u = (self.step)(m, &self.acc[m])?;
                debug_assert_eq!(u.len(), self.dim);
                self.out.push(u);
            }
            return Ok(());
        }
        let mid = lo + (hi - lo) / 2;
        self.solve_range(lo, mid)?;
        self.spread(lo, mid, hi);
        self.solve_range(mid, hi)
    }

    /// acc[n] += Σ_{i=lo}^{mid−1} ω_{n−i} U^i for n in mid..hi, as one circular
    /// convolution of length P ≥ hi − lo (no wrap-around reaches those n).
    fn spread(&mut self, lo: usize, mid: usize, hi: usize) {
        let p = (hi - lo).next_power_of_two();
        let spectrum = self.spectrum(p);
        let scale = T::of_usize(p).recip();
        let mut buf = vec![Complex::new(T::zero(), T::zero()); p];
        let mut scratch = vec![
            Complex::new(T::zero(), T::zero());
            spectrum
                .forward
                .get_inplace_scratch_len()
                .max(spectrum.inverse.get_inplace_scratch_len())
        ];
        // Two real components ride in one complex transform.
        for c in (0..self.dim).step_by(2) {
            let paired = c + 1 < self.dim;
            for (s, z) in buf.iter_mut().enumerate() {
                *z = if lo + s < mid {
                    let u = &self.out[lo + s];
                    Complex::new(u[c], if paired { u[c + 1] } else { T::zero() })
                } else {
                    Complex::new(T::zero(), T::zero())
                };
            }
            spectrum.forward.process_with_scratch(&mut buf, &mut scratch);
            buf.iter_mut()
                .zip(&spectrum.weights_hat)
                .for_each(|(z, w)| *z = *z * *w);
            spectrum.inverse.process_with_scratch(&mut buf, &mut scratch);
            for n in mid..hi {
                let z = buf[n - lo];
                self.acc[n][c] += z.re * scale;
                if paired {
                    self.acc[n][c + 1] += z.im * scale;
                }
            }
        }
        self.spectra.insert(p, spectrum);
    }

    fn spectrum(&mut self, p: usize) -> Spectrum<T> {
        if let Some(s) = self.spectra.remove(&p) {
            return s;
        }
        let forward = self.planner.plan_fft_forward(p);
        let inverse = self.planner.plan_fft_inverse(p);
        let mut weights_hat: Vec<Complex<T>> = (0..p)
            .map(|j| Complex::new(self.weights.get(j).copied().unwrap_or(T::zero()), T::zero()))
            .collect();
        forward.process(&mut weights_hat);
        Spectrum {
            forward,
            inverse,
            weights_hat,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracquad::cq_weights;

    // An arbitrary history-dependent update driven through both modes.
    fn run(mode: ConvolutionMode, steps: usize, dim: usize) -> Vec<Vec<f64>> {
        let w = cq_weights(0.37, steps).unwrap();
        let first: Vec<f64> = (0..dim).map(|c| 1.0 + c as f64 * 0.1).collect();
        march(w.as_slice(), first, steps, mode, |n, h| {
            Ok(h.iter()
                .enumerate()
                .map(|(c, &x)| (n as f64 * 0.01).sin() + c as f64 - 0.5 * x)
                .collect())
        })
        .unwrap()
    }

    #[test]
    fn fast_matches_direct() {
        for &(steps, dim) in &[(700, 3), (1023, 2), (1500, 1), (64, 5)] {
            let a = run(ConvolutionMode::Direct, steps, dim);
            let b = run(ConvolutionMode::Fast, steps, dim);
            assert_eq!(a.len(), steps + 1);
            for (x, y) in a.iter().zip(&b) {
                for (p, q) in x.iter().zip(y) {
                    assert!((p - q).abs() < 1e-11 * (1.0 + p.abs()), "{p} {q}");
                }
            }
        }
    }

    #[test]
    fn history_sum_is_exact_for_direct_mode() {
        let w = cq_weights(0.5, 5).unwrap();
        let mut seen = Vec::new();
        march(w.as_slice(), vec![2.0], 5, ConvolutionMode::Direct, |_, h| {
            seen.push(h[0]);
            Ok(vec![1.0])
        })
        .unwrap();
        // U = [2, 1, 1, 1, 1, 1]: H^n = 2 ω_n + Σ_{j=1}^{n−1} ω_j.
        let ws = w.as_slice();
        for n in 1..=5 {
            let expected = 2.0 * ws[n] + ws[1..n].iter().sum::<f64>();
            assert!((seen[n - 1] - expected).abs() < 1e-15);
        }
    }
}
