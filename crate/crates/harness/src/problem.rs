//! The model problem on Ω = (0, 1): source f(x) = 1 + 20x²(1 − x)² (or the
//! state-dependent f(u) = (u − 1)(u − 3)) and initial value u₀(x) = 2 + cos 2πx.

use std::f64::consts::PI;

use subdiff_core::scalar::scalar_fn;
use subdiff_core::ProblemData;

use crate::config::ProblemKind;

pub fn source(x: f64) -> f64 {
    1.0 + 20.0 * x * x * (1.0 - x) * (1.0 - x)
}

pub fn nonlinear_source(u: f64) -> f64 {
    (u - 1.0) * (u - 3.0)
}

pub fn initial_value(x: f64) -> f64 {
    2.0 + (2.0 * PI * x).cos()
}

pub fn standard_problem(kind: ProblemKind, x0: f64) -> ProblemData {
    match kind {
        ProblemKind::Linear => ProblemData::linear(scalar_fn(source), scalar_fn(initial_value), x0),
        ProblemKind::Nonlinear => {
            ProblemData::nonlinear(scalar_fn(nonlinear_source), scalar_fn(initial_value), x0)
        }
    }
}
