use std::fs::File;
use std::io::BufReader;

use choquard_core::functionals::{dilation_max, Formulation, FunctionalCoefficients, ProblemParams};
use choquard_core::profiles::{limit_ground_state, LimitKind};
use choquard_core::radial::io::read_field;
use choquard_core::solver::{
    continue_branch, read_params, shooting_oracle, shooting_profile, solve, solve_cached, solve_model, write_run,
    InitialGuess, Model, OperatorCache, SolverConfig,
};
use choquard_core::Error;

fn gpp(eps: f64) -> ProblemParams<f64> {
    ProblemParams::new(3, 2.0, 2.0, 4.0, Formulation::Frequency(eps)).unwrap()
}

fn max_relative(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (&x, &y)| m.max((x - y).abs())) / scale
}

#[test]
fn gross_pitaevskii_poisson_certificates() {
    let mut cache = OperatorCache::new();
    let cfg = SolverConfig::default();
    let s = solve_cached(&gpp(1.0), &cfg, &mut cache).unwrap();
    assert!(s.converged);
    assert!(s.nehari_residual <= 1e-6 && s.pohozaev_residual <= 1e-6 && s.el_residual <= 1e-6);
    assert!(s.field.is_ground_state_candidate());
    let mut fine = cfg.clone();
    fine.grid.nodes = 4000;
    let f = solve_cached(&gpp(1.0), &fine, &mut cache).unwrap();
    assert!(f.converged);
    assert!(((f.action - s.action) / s.action).abs() <= 1e-5, "{} vs {}", f.action, s.action);
}

#[test]
fn ground_state_is_its_own_dilation_maximizer() {
    let mut cache = OperatorCache::new();
    let s = solve_cached(&gpp(1.0), &SolverConfig::default(), &mut cache).unwrap();
    let op = cache.get(s.field.grid(), 2.0).unwrap();
    let (t, value) = dilation_max(&s.field, Some(&op), &s.model.coeffs, 2.0, 4.0).unwrap();
    assert!((t - 1.0).abs() < 1e-6, "t* = {t}");
    assert!(((value - s.action) / s.action).abs() < 1e-10);
}

#[test]
fn accepted_actions_never_increase() {
    let s = solve(&gpp(0.3), &SolverConfig::default()).unwrap();
    assert!(s.history.len() > 2);
    for w in s.history.windows(2) {
        assert!(w[1] <= w[0] + 1e-12 * w[0].abs(), "{} after {}", w[1], w[0]);
    }
}

#[test]
fn pure_power_matches_shooting_oracle() {
    let mut cache = OperatorCache::new();
    for (n, q) in [(3usize, 4.0), (5, 3.0)] {
        let params = ProblemParams::new(n, 1.0, (n as f64 + 1.0) / n as f64, q, Formulation::Frequency(1.0)).unwrap();
        let s = limit_ground_state(LimitKind::Power, &params, &SolverConfig::default(), &mut cache).unwrap();
        assert!(s.converged);
        let oracle = shooting_oracle(n, q, 1.0, s.field.grid()).unwrap();
        let d = max_relative(s.field.values(), oracle.field.values());
        assert!(d <= 1e-4, "N = {n}, q = {q}: max-norm difference {d}");
    }
}

#[test]
fn shooting_oracle_is_step_stable_and_scale_covariant() {
    let grid = std::sync::Arc::new(choquard_core::Grid::new(3, 30.0, 2000, 2.0).unwrap());
    let coarse = shooting_profile(3, 4.0, 1.0, &grid, 1e-10).unwrap().u0;
    let fine = shooting_profile(3, 4.0, 1.0, &grid, 1e-12).unwrap().u0;
    assert!(((coarse - fine) / fine).abs() < 1e-6, "{coarse} vs {fine}");
    let eps = 2.5;
    let scaled = shooting_profile(3, 4.0, eps, &grid, 1e-12).unwrap().u0;
    assert!((scaled - eps.powf(0.5) * fine).abs() <= 1e-8 * scaled);
    assert!(shooting_profile(3, 6.0 + 1e-6, 1.0, &grid, 1e-12).is_err());
}

#[test]
fn power_limit_state_identities() {
    let mut cache = OperatorCache::new();
    for (n, q) in [(3usize, 4.0), (5, 3.0), (4, 3.5)] {
        let nf = n as f64;
        let params = ProblemParams::new(n, 1.0, (nf + 1.0) / nf, q, Formulation::Frequency(1.0)).unwrap();
        let s = limit_ground_state(LimitKind::Power, &params, &SolverConfig::default(), &mut cache).unwrap();
        let m = s.action;
        assert!(((s.terms.grad2 - nf * m) / (nf * m)).abs() <= 1e-5, "N = {n}: ‖∇v‖² = {}", s.terms.grad2);
        let mass = (2.0 * nf - q * (nf - 2.0)) / (q - 2.0) * m;
        assert!(((s.terms.mass - mass) / mass).abs() <= 1e-5, "N = {n}: ‖v‖² = {}", s.terms.mass);
    }
}

#[test]
fn pure_power_scaling_symmetry() {
    let mut cache = OperatorCache::new();
    let (q, eps) = (4.0, 4.0f64);
    let model = |e: f64| Model { n: 3, alpha: 2.0, p: 2.0, q, coeffs: FunctionalCoefficients::new(1.0, e, 0.0, 1.0) };
    let mut cfg = SolverConfig::default();
    cfg.grid.radius = Some(30.0);
    let one = solve_model(&model(1.0), &cfg, &mut cache).unwrap();
    // on a grid of radius 30/√ε the rescaled state lives on the same nodes
    cfg.grid.radius = Some(30.0 / eps.sqrt());
    let s = solve_model(&model(eps), &cfg, &mut cache).unwrap();
    let w = s.field.power_rescale(eps.powf(-1.0 / (q - 2.0)), eps.powf(-0.5)).unwrap();
    for (a, b) in w.grid().nodes().iter().zip(one.field.grid().nodes()) {
        assert!((a - b).abs() <= 1e-12 * b);
    }
    let d = max_relative(w.values(), one.field.values());
    assert!(d <= 1e-6, "rescaled state differs by {d}");
}

#[test]
fn continuation_identity_and_warm_start() {
    let mut cache = OperatorCache::new();
    let cfg = SolverConfig::default();
    let s = solve_cached(&gpp(0.2), &cfg, &mut cache).unwrap();
    let same = continue_branch(&s, &gpp(0.2), &cfg, &mut cache).unwrap();
    assert_eq!(same.iterations, s.iterations);
    assert_eq!(same.field.values(), s.field.values());
    let warm = continue_branch(&s, &gpp(0.1), &cfg, &mut cache).unwrap();
    let cold = solve_cached(&gpp(0.1), &cfg, &mut cache).unwrap();
    assert!(warm.converged && cold.converged);
    assert!(warm.iterations <= cold.iterations, "warm {} cold {}", warm.iterations, cold.iterations);
    assert!(((warm.action - cold.action) / cold.action).abs() < 1e-8);
    let other = ProblemParams::new(3, 2.0, 2.0, 3.5, Formulation::Frequency(0.1)).unwrap();
    assert!(continue_branch(&s, &other, &cfg, &mut cache).is_err());
}

#[test]
fn run_directory_round_trip() {
    let s = solve(&gpp(2.0), &SolverConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_run(dir.path(), &s).unwrap();
    let params = read_params(&dir.path().join("params.txt")).unwrap();
    assert_eq!(params["N"], "3");
    assert_eq!(params["formulation"], "eps");
    assert_eq!(params["value"].parse::<f64>().unwrap(), 2.0);
    let field: choquard_core::Field = read_field(BufReader::new(File::open(dir.path().join("field.csv")).unwrap())).unwrap();
    assert_eq!(field.values(), s.field.values());
    let diag = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    let row: Vec<&str> = diag.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0].parse::<f64>().unwrap(), s.action);
    assert_eq!(row[11], "true");
}

#[test]
fn lower_critical_state_converges_on_a_stretched_grid() {
    let params = ProblemParams::new(3, 2.0, 5.0 / 3.0, 3.0, Formulation::Frequency(0.1)).unwrap();
    let s = solve(&params, &SolverConfig::default()).unwrap();
    assert!(s.converged, "el = {:e}, pz = {:e}", s.el_residual, s.pohozaev_residual);
    assert!(s.internal_field.grid().radius() > 300.0);
    assert_eq!(s.internal_field.grid().gamma(), 3.0);
}

#[test]
fn lambda_and_mu_forms_solve_as_given() {
    let mut cache = OperatorCache::new();
    for f in [Formulation::Lambda(0.5), Formulation::Mu(0.5)] {
        let params = ProblemParams::new(3, 2.0, 2.0, 4.0, f).unwrap();
        let s = solve_cached(&params, &SolverConfig::default(), &mut cache).unwrap();
        assert!(s.converged, "{f:?}");
        assert_eq!((s.scaling.a, s.scaling.b), (1.0, 1.0));
    }
}

#[test]
fn invalid_parameters_and_iteration_cap() {
    assert!(matches!(
        ProblemParams::new(3, 2.0, 2.0, 7.0, Formulation::Frequency(1.0)),
        Err(Error::InvalidParameter(_))
    ));
    let mut cfg = SolverConfig::default();
    cfg.max_iters = 2;
    let s = solve(&gpp(1.0), &cfg).unwrap();
    assert!(!s.converged);
    assert_eq!(s.iterations, 2);
    cfg.backtrack = 1.5;
    assert!(matches!(solve(&gpp(1.0), &cfg), Err(Error::InvalidParameter(_))));
}

/// Wide-low and narrow-tall seeds in the upper-critical regime below q₀.
/// Both are certified; the lower action is the ground state.
#[test]
fn both_seeds_are_certified_in_the_two_branch_regime() {
    let params = ProblemParams::new(5, 1.0, 2.0, 2.5, Formulation::Frequency(1.0)).unwrap();
    let mut cache = OperatorCache::new();
    let mut states = Vec::new();
    for (amplitude, width) in [(0.1, 10.0), (10.0, 0.1)] {
        let mut cfg = SolverConfig::default();
        cfg.guess = InitialGuess::Gaussian { amplitude, width };
        let s = solve_cached(&params, &cfg, &mut cache).unwrap();
        assert!(s.converged);
        eprintln!("seed ({amplitude}, {width}): m = {:.10e}, |grad u|^2 = {:.10e}", s.action, s.terms.grad2);
        states.push(s);
    }
    let ground = states.iter().map(|s| s.action).fold(f64::INFINITY, f64::min);
    assert!(states.iter().all(|s| s.action >= ground));
}

#[test]
fn single_precision_pure_power_solve() {
    let model = Model::<f32> { n: 3, alpha: 2.0, p: 2.0, q: 4.0, coeffs: FunctionalCoefficients::pure_power() };
    let mut cfg = SolverConfig::<f32>::default();
    // single-precision roundoff in the second differences floors the residuals near 1e-3
    cfg.tol = 3e-3;
    cfg.grid.nodes = 1000;
    let s = solve_model(&model, &cfg, &mut OperatorCache::new()).unwrap();
    assert!(s.converged, "iters {} nz {:e} pz {:e} el {:e}", s.iterations, s.nehari_residual, s.pohozaev_residual, s.el_residual);
    let m = s.action;
    assert!(((s.terms.grad2 - 3.0 * m) / (3.0 * m)).abs() < 1e-2);
}
