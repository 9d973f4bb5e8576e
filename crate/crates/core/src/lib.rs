//! Time-fractional subdiffusion with a time-dependent potential.
//!
//! The crate solves
//!
//! ```text
//! ∂_t^α u − Δu + ρ(t) u = f   in (0,1) × (0,T],   ∂_ν u = 0,   u(0) = u₀
//! ```
//!
//! with piecewise-linear finite elements in space and backward-Euler
//! convolution quadrature in time, and recovers ρ(t) from the trace
//! u(x₀, t) with a projected fixed-point iteration.
//!
//! All numerical code is generic over a [`Real`] scalar (`f32` or `f64`).
//! The `f64` aliases at the crate root are what applications normally use.

pub mod error;
pub mod fem1d;
pub mod forward;
pub mod fracquad;
mod history;
pub mod inverse;
pub mod metrics;
pub mod quadrature;
pub mod scalar;
pub mod tridiag;

pub use error::{Error, Result};
pub use history::ConvolutionMode;
pub use scalar::{Real, ScalarFn};

/// Uniform time partition in double precision.
pub type TimeGrid = fracquad::TimeGrid<f64>;
/// Backward-Euler convolution quadrature weights in double precision.
pub type CqWeights = fracquad::CqWeights<f64>;
/// Uniform mesh of (0,1) in double precision.
pub type Mesh1D = fem1d::Mesh1D<f64>;
/// Assembled mass and stiffness matrices in double precision.
pub type FemOperators = fem1d::FemOperators<f64>;
/// Coefficients of a finite element function in double precision.
pub type NodalField = fem1d::NodalField<f64>;
/// Grid samples of a potential in double precision.
pub type PotentialPath = forward::PotentialPath<f64>;
/// Source, initial datum and observation point in double precision.
pub type ProblemData = forward::ProblemData<f64>;
/// Solution of the fully discrete forward problem in double precision.
pub type Trajectory = forward::Trajectory<f64>;
/// Point observation sequence in double precision.
pub type Measurement = inverse::Measurement<f64>;
/// Fixed-point iteration settings in double precision.
pub type ReconstructionConfig = inverse::ReconstructionConfig<f64>;
/// Fixed-point iteration outcome in double precision.
pub type ReconstructionReport = inverse::ReconstructionReport<f64>;
/// Discrete sequence norm parameters in double precision.
pub type NormSpec = metrics::NormSpec<f64>;
