use std::f64::consts::PI;

use subdiff_core::fem1d::{assemble, build_mesh};
use subdiff_core::forward::{
    scalar_lagged_recursion, solve_forward, ForwardSolver, PotentialPath, ProblemData, SpectralSolution,
};
use subdiff_core::fracquad::{mittag_leffler, TimeGrid};
use subdiff_core::scalar::scalar_fn;
use subdiff_core::ConvolutionMode;

fn model_data() -> ProblemData<f64> {
    ProblemData::linear(
        scalar_fn(|x: f64| 1.0 + 20.0 * x * x * (1.0 - x) * (1.0 - x)),
        scalar_fn(|x: f64| 2.0 + (2.0 * PI * x).cos()),
        0.0,
    )
}

/// Max nodal error against the spectral solution over t_n ≥ T/4.
fn oracle_error(alpha: f64, rho0: f64, m: usize, n: usize, t_final: f64) -> f64 {
    let data = model_data();
    let mesh = build_mesh(m).unwrap();
    let ops = assemble(&mesh);
    let grid = TimeGrid::new(t_final, n).unwrap();
    let rho = PotentialPath::constant(n, rho0, 5.0).unwrap();
    let traj = solve_forward(&mesh, &ops, &grid, alpha, &rho, &data).unwrap();
    let exact = SpectralSolution::new(alpha, rho0, &data, 80).unwrap();
    (0..=n)
        .filter(|&k| grid.t(k) >= 0.25 * t_final)
        .map(|k| {
            let want = exact.profile(grid.t(k), mesh.nodes()).unwrap();
            traj.field(k)
                .values()
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[test]
fn agrees_with_spectral_solution_under_refinement() {
    for &alpha in &[0.25, 0.5, 0.75] {
        for &rho0 in &[0.0, 1.0, 2.0] {
            let errs: Vec<f64> = [(25, 64), (50, 128), (100, 256)]
                .iter()
                .map(|&(m, n)| oracle_error(alpha, rho0, m, n, 0.5))
                .collect();
            assert!(
                errs.windows(2).all(|w| w[1] < w[0]),
                "alpha={alpha} rho0={rho0}: {errs:?}"
            );
            assert!(errs[2] < 5e-3, "alpha={alpha} rho0={rho0}: {errs:?}");
        }
    }
}

#[test]
fn two_mode_solution_matches_closed_form() {
    // u₀ = 2 + cos 2πx, f = 0, ρ = 0: u = 2 + E_α(−4π² t^α) cos 2πx.
    let data = ProblemData::linear(scalar_fn(|_: f64| 0.0), scalar_fn(|x: f64| 2.0 + (2.0 * PI * x).cos()), 0.0);
    let exact = SpectralSolution::new(0.5, 0.0, &data, 16).unwrap();
    for &(x, t) in &[(0.0, 0.1), (0.3, 0.25), (0.9, 0.5)] {
        let want = 2.0 + mittag_leffler(0.5, -4.0 * PI * PI * f64::sqrt(t)).unwrap() * (2.0 * PI * x).cos();
        assert!((exact.value(x, t).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn constant_potential_matches_mittag_leffler_decay() {
    // u₀ ≡ 1, f ≡ 0, ρ ≡ ρ₀: U stays spatially constant and tracks E_α(−ρ₀ t^α).
    // Near t = 0 the error is only O(τ^α), so compare away from the origin.
    let data = ProblemData::linear(scalar_fn(|_: f64| 0.0), scalar_fn(|_: f64| 1.0), 0.5);
    let mesh = build_mesh(10).unwrap();
    let ops = assemble(&mesh);
    let alpha = 0.5;
    let mut prev = f64::INFINITY;
    for &n in &[64usize, 256, 1024] {
        let grid = TimeGrid::new(1.0, n).unwrap();
        let rho = PotentialPath::constant(n, 1.5, 5.0).unwrap();
        let traj = solve_forward(&mesh, &ops, &grid, alpha, &rho, &data).unwrap();
        let err = (n / 4..=n)
            .map(|k| {
                let u = traj.field(k).values();
                let spread = u.iter().fold(0.0f64, |m, v| m.max((v - u[0]).abs()));
                assert!(spread < 1e-12);
                let want = mittag_leffler(alpha, -1.5 * grid.t(k).sqrt()).unwrap();
                (u[0] - want).abs()
            })
            .fold(0.0, f64::max);
        assert!(err < prev, "n={n}: {err}");
        prev = err;
    }
    assert!(prev < 2e-3);
}

#[test]
fn self_convergence_in_time_and_space() {
    let data = model_data();
    let alpha = 0.5;
    let t_final = 0.5;
    let rho = |grid: &TimeGrid<f64>| PotentialPath::sample(grid, 5.0, |t: f64| (5.0 * t).cos().exp()).unwrap();
    let at_final = |m: usize, n: usize| -> Vec<f64> {
        let mesh = build_mesh(m).unwrap();
        let ops = assemble(&mesh);
        let grid = TimeGrid::new(t_final, n).unwrap();
        let traj = solve_forward(&mesh, &ops, &grid, alpha, &rho(&grid), &data).unwrap();
        traj.field(n).values().to_vec()
    };
    // Temporal: fixed mesh, τ halved.
    let u: Vec<Vec<f64>> = [128, 256, 512, 1024].iter().map(|&n| at_final(40, n)).collect();
    let diffs: Vec<f64> = u
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect();
    for r in diffs.windows(2).map(|w| (w[0] / w[1]).log2()) {
        assert!((0.8..=1.2).contains(&r), "temporal rate {r}, diffs {diffs:?}");
    }
    // Spatial: fixed τ, h halved; compare on the coarsest nodes.
    let u: Vec<Vec<f64>> = [10, 20, 40, 80].iter().map(|&m| at_final(m, 200)).collect();
    let diffs: Vec<f64> = u
        .windows(2)
        .map(|w| {
            let stride = w[1].len() / (w[0].len() - 1);
            w[0].iter()
                .enumerate()
                .map(|(i, a)| (a - w[1][i * stride]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    for r in diffs.windows(2).map(|w| (w[0] / w[1]).log2()) {
        assert!((1.7..=2.3).contains(&r), "spatial rate {r}, diffs {diffs:?}");
    }
}

#[test]
fn trajectories_stay_positive_for_admissible_potentials() {
    let data = model_data();
    let mesh = build_mesh(50).unwrap();
    let ops = assemble(&mesh);
    let grid = TimeGrid::new(1.0, 200).unwrap();
    for rho in [
        PotentialPath::constant(200, 5.0, 5.0).unwrap(),
        PotentialPath::sample(&grid, 5.0, |t| if t < 0.5 { 0.0 } else { 5.0 }).unwrap(),
    ] {
        let traj = solve_forward(&mesh, &ops, &grid, 0.5, &rho, &data).unwrap();
        assert!(traj.fields().iter().all(|u| u.values().iter().all(|&v| v > 0.0)));
    }
}

#[test]
fn nonlinear_source_matches_scalar_recursion() {
    // f(u) = (u − 1)(u − 3), u₀ ≡ 2, ρ ≡ 0: the solution stays spatially constant.
    let f = |u: f64| (u - 1.0) * (u - 3.0);
    let data = ProblemData::nonlinear(scalar_fn(f), scalar_fn(|_: f64| 2.0), 0.0);
    let mesh = build_mesh(12).unwrap();
    let ops = assemble(&mesh);
    let grid = TimeGrid::new(2.0, 300).unwrap();
    let rho = PotentialPath::constant(300, 0.0, 5.0).unwrap();
    let solver = ForwardSolver::new(&mesh, &ops, grid, 0.6).unwrap();
    let traj = solver.solve_problem(&rho, &data).unwrap();
    let scalar = scalar_lagged_recursion(0.6, &grid, rho.values(), 2.0, f).unwrap();
    for (u, v) in traj.fields().iter().zip(&scalar) {
        assert!(u.values().iter().all(|x| (x - v).abs() < 1e-12));
    }
    assert!(scalar.last().unwrap() < &2.0);
}

#[test]
fn fast_and_direct_histories_agree_on_model_problem() {
    let data = model_data();
    let mesh = build_mesh(30).unwrap();
    let ops = assemble(&mesh);
    let grid = TimeGrid::new(0.5, 1500).unwrap();
    let rho = PotentialPath::sample(&grid, 5.0, |t: f64| (5.0 * t).cos().exp()).unwrap();
    let solve = |mode| {
        ForwardSolver::new(&mesh, &ops, grid, 0.3)
            .unwrap()
            .with_mode(mode)
            .solve(&rho, &data)
            .unwrap()
    };
    let (a, b) = (solve(ConvolutionMode::Direct), solve(ConvolutionMode::Fast));
    for (u, v) in a.fields().iter().zip(b.fields()) {
        for (x, y) in u.values().iter().zip(v.values()) {
            assert!((x - y).abs() < 1e-11);
        }
    }
}

#[test]
fn single_precision_solver_tracks_double_precision() {
    let mesh64 = build_mesh::<f64>(20).unwrap();
    let mesh32 = build_mesh::<f32>(20).unwrap();
    let (ops64, ops32) = (assemble(&mesh64), assemble(&mesh32));
    let g64 = TimeGrid::new(0.5, 100).unwrap();
    let g32 = TimeGrid::new(0.5f32, 100).unwrap();
    let d64 = model_data();
    let d32 = ProblemData::linear(
        scalar_fn(|x: f32| 1.0 + 20.0 * x * x * (1.0 - x) * (1.0 - x)),
        scalar_fn(|x: f32| 2.0 + (2.0 * std::f32::consts::PI * x).cos()),
        0.0,
    );
    let r64 = PotentialPath::constant(100, 1.0, 5.0).unwrap();
    let r32 = PotentialPath::constant(100, 1.0f32, 5.0).unwrap();
    let a = solve_forward(&mesh64, &ops64, &g64, 0.5, &r64, &d64).unwrap();
    let b = solve_forward(&mesh32, &ops32, &g32, 0.5f32, &r32, &d32).unwrap();
    for (u, v) in a.field(100).values().iter().zip(b.field(100).values()) {
        assert!((u - f64::from(*v)).abs() < 1e-4);
    }
}
