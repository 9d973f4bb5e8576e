//! Fixed Gauss–Legendre rules and an adaptive Gauss–Kronrod integrator.

use crate::scalar::Real;

/// Gauss–Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussRule {
    Three,
    Five,
}

impl GaussRule {
    /// `(node, weight)` pairs on [-1, 1].
    pub fn points(self) -> &'static [(f64, f64)] {
        match self {
            GaussRule::Three => &GAUSS3,
            GaussRule::Five => &GAUSS5,
        }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<T: Real>(self, a: T, b: T, f: impl Fn(T) -> T) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        self.points()
            .iter()
            .map(|&(x, w)| T::lit(w) * f(mid + half * T::lit(x)))
            .sum::<T>()
            * half
    }
}

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

const GAUSS5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

// Kronrod 15-point nodes (non-negative half) with Kronrod and embedded Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<T: Real>(a: T, b: T, f: &impl Fn(T) -> T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive 7/15-point Gauss–Kronrod integration of `f` over
/// `[a, b]`: the panel with the largest error estimate is bisected until the
/// summed estimate drops below `tol` or `max_panels` panels are in use.
pub fn integrate_adaptive<T: Real>(f: impl Fn(T) -> T, a: T, b: T, tol: T, max_panels: usize) -> T {
    let mut panels = vec![(a, b, gauss_kronrod_15(a, b, &f))];
    loop {
        let total_err: T = panels.iter().map(|p| p.2 .1).sum();
        if total_err <= tol || panels.len() >= max_panels.max(1) {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.partial_cmp(&y.1 .2 .1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = (lo + hi) * T::lit(0.5);
        if !(mid > lo && mid < hi) {
            // Panel is at machine resolution; keep it and stop refining.
            panels.push((lo, hi, gauss_kronrod_15(lo, hi, &f)));
            break;
        }
        panels.push((lo, mid, gauss_kronrod_15(lo, mid, &f)));
        panels.push((mid, hi, gauss_kronrod_15(mid, hi, &f)));
    }
    panels.iter().map(|p| p.2 .0).sum()
}
