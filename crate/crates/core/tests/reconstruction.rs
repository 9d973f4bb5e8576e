use std::f64::consts::PI;

use subdiff_core::fem1d::{assemble, build_mesh};
use subdiff_core::forward::{ForwardSolver, PotentialPath, ProblemData};
use subdiff_core::fracquad::TimeGrid;
use subdiff_core::inverse::{add_noise, fixed_point_step, reconstruct, Measurement, ReconstructionConfig};
use subdiff_core::metrics::{reconstruction_error, NormSpec};
use subdiff_core::scalar::scalar_fn;

fn model_data(x0: f64) -> ProblemData<f64> {
    ProblemData::linear(
        scalar_fn(|x: f64| 1.0 + 20.0 * x * x * (1.0 - x) * (1.0 - x)),
        scalar_fn(|x: f64| 2.0 + (2.0 * PI * x).cos()),
        x0,
    )
}

fn potentials(t_final: f64) -> Vec<(&'static str, Box<dyn Fn(f64) -> f64>)> {
    let s = 8.0 / t_final;
    vec![
        ("smooth", Box::new(|t: f64| (5.0 * t).cos().exp())),
        (
            "zig-zag",
            Box::new(move |t: f64| {
                if t <= 0.25 * t_final {
                    s * t + 0.7
                } else if t <= 0.5 * t_final {
                    -s * t + 4.7
                } else if t <= 0.75 * t_final {
                    s * t - 3.3
                } else {
                    -s * t + 8.7
                }
            }),
        ),
        (
            "steps",
            Box::new(move |t: f64| match t / t_final {
                r if r < 0.25 => 1.0,
                r if r < 0.5 => 2.5,
                r if r < 0.75 => 1.5,
                _ => 2.0,
            }),
        ),
    ]
}

#[test]
fn same_grid_data_is_a_fixed_point() {
    let t_final = 0.5;
    let mesh = build_mesh(40).unwrap();
    let ops = assemble(&mesh);
    let grid = TimeGrid::new(t_final, 128).unwrap();
    for &x0 in &[0.0, 0.5] {
        let data = model_data(x0).interpolated(&mesh);
        let solver = ForwardSolver::new(&mesh, &ops, grid, 0.5).unwrap();
        for (name, rho) in potentials(t_final) {
            let truth = PotentialPath::sample(&grid, 5.0, |t| rho(t)).unwrap();
            let g = solver.solve(&truth, &data).unwrap().trace(&mesh, x0).unwrap();
            let meas = Measurement::exact(grid, x0, g[1..].to_vec(), (data.u0)(x0)).unwrap();
            let next = fixed_point_step(&truth, &meas, &solver, &data).unwrap();
            let gap = next
                .values()
                .iter()
                .zip(truth.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(gap <= 1e-9, "{name} x0={x0}: {gap}");
        }
    }
}

#[test]
fn iteration_recovers_potential_from_same_grid_data() {
    let t_final = 0.5;
    let mesh = build_mesh(30).unwrap();
    let ops = assemble(&mesh);
    let grid = TimeGrid::new(t_final, 100).unwrap();
    let data = model_data(0.0).interpolated(&mesh);
    let solver = ForwardSolver::new(&mesh, &ops, grid, 0.5).unwrap();
    let truth = PotentialPath::sample(&grid, 5.0, |t: f64| (5.0 * t).cos().exp()).unwrap();
    let g = solver.solve(&truth, &data).unwrap().trace(&mesh, 0.0).unwrap();
    let meas = Measurement::exact(grid, 0.0, g[1..].to_vec(), 3.0).unwrap();
    let cfg = ReconstructionConfig::new(PotentialPath::constant(100, 2.0, 5.0).unwrap(), 5.0);
    let report = reconstruct(&meas, &cfg, &solver, &data, Some(&truth)).unwrap();
    assert!(report.converged);
    assert!(report.iterations_used <= 15);
    let err = report.per_iteration_error.unwrap();
    assert!(err.last().unwrap().lp < 1e-9);
    for pair in report.per_iteration_change.windows(2).take(5) {
        assert!(pair[1].lp < pair[0].lp);
    }
}

#[test]
fn every_iterate_is_admissible_and_noise_runs_are_reproducible() {
    let t_final = 0.5;
    let (fine_mesh, mesh) = (build_mesh(80).unwrap(), build_mesh(20).unwrap());
    let (fine_ops, ops) = (assemble(&fine_mesh), assemble(&mesh));
    let fine_grid = TimeGrid::new(t_final, 512).unwrap();
    let grid = TimeGrid::new(t_final, 64).unwrap();
    let data = model_data(0.0);
    let truth_fine = PotentialPath::sample(&fine_grid, 5.0, |t: f64| (5.0 * t).cos().exp()).unwrap();
    let trace = ForwardSolver::new(&fine_mesh, &fine_ops, fine_grid, 0.5)
        .unwrap()
        .solve(&truth_fine, &data)
        .unwrap()
        .trace(&fine_mesh, 0.0)
        .unwrap();
    let g: Vec<f64> = (1..=64).map(|n| trace[8 * n]).collect();
    let exact = Measurement::exact(grid, 0.0, g, 3.0).unwrap();
    let solver = ForwardSolver::new(&mesh, &ops, grid, 0.5).unwrap();
    let run = |seed| {
        let meas = add_noise(&exact, 5.0, seed).unwrap();
        let mut cfg = ReconstructionConfig::new(PotentialPath::constant(64, 1.0, 1.5).unwrap(), 1.5);
        cfg.max_iters = 12;
        reconstruct(&meas, &cfg, &solver, &data, None).unwrap()
    };
    let (a, b) = (run(9), run(9));
    assert_eq!(a.rho_star.values(), b.rho_star.values());
    assert!(a.rho_star.values().iter().all(|&r| (0.0..=1.5).contains(&r)));
    assert!(a.rho_star.values().iter().any(|&r| r == 1.5));
    let mut rho = PotentialPath::constant(64, 2.0, 5.0).unwrap();
    let meas = add_noise(&exact, 5.0, 3).unwrap();
    for _ in 0..5 {
        rho = fixed_point_step(&rho, &meas, &solver, &data).unwrap();
        assert!(rho.values().iter().all(|&r| (0.0..=5.0).contains(&r)));
    }
}

#[test]
fn zero_iterations_return_initial_guess() {
    let mesh = build_mesh(8).unwrap();
    let ops = assemble(&mesh);
    let grid = TimeGrid::new(1.0, 10).unwrap();
    let solver = ForwardSolver::new(&mesh, &ops, grid, 0.5).unwrap();
    let meas = Measurement::exact(grid, 0.0, vec![3.0; 10], 3.0).unwrap();
    let mut cfg = ReconstructionConfig::new(PotentialPath::constant(10, 2.0, 5.0).unwrap(), 5.0);
    cfg.max_iters = 0;
    let report = reconstruct(&meas, &cfg, &solver, &model_data(0.0), None).unwrap();
    assert_eq!(report.iterations_used, 0);
    assert!(!report.converged);
    assert_eq!(report.rho_star.values(), &[2.0; 10]);
}

/// Σ τ (ρ†(t_n) − ρ⋆ⁿ)² with error-free products and Neumaier summation.
fn resummed_l2(truth: &[f64], approx: &[f64], tau: f64) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut add = |x: f64| {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    };
    for (a, b) in truth.iter().zip(approx) {
        let d = a - b;
        let p = d * d;
        add(p);
        add(d.mul_add(d, -p));
    }
    (tau * (sum + comp)).sqrt()
}

#[test]
fn reconstruction_error_matches_compensated_resummation() {
    let t_final = 0.5;
    let (_, zigzag) = potentials(t_final).swap_remove(1);
    let grid = TimeGrid::new(t_final, 1000).unwrap();
    let approx = PotentialPath::sample(&grid, 5.0, |t| zigzag(t) + 1e-3 * (40.0 * t).sin()).unwrap();
    let got = reconstruction_error(&approx, |t| zigzag(t), &grid, &NormSpec::l2(grid.tau())).unwrap();
    let truth: Vec<f64> = (1..=1000).map(|n| zigzag(grid.t(n))).collect();
    let want = resummed_l2(&truth, approx.values(), grid.tau());
    assert!((got - want).abs() < 1e-12, "{got} {want}");
}
