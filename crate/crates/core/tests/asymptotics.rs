use choquard_core::asymptotics::{
    classify_regime, default_windows, fit_against, log_spaced, mass_map_invert, mass_map_roots, predicted_exponents,
    read_records, run_sweep, write_records, Limit, MassLimit, Observable, Prediction, SweepPlan, MASS_TOL,
};
use choquard_core::functionals::{Formulation, ProblemParams};
use choquard_core::solver::{solve_cached, OperatorCache, SolverConfig};

fn gpp() -> ProblemParams<f64> {
    ProblemParams::new(3, 2.0, 2.0, 4.0, Formulation::Frequency(1.0)).unwrap()
}

#[test]
fn sweep_records_satisfy_the_constraint_bookkeeping() {
    let mut cache = OperatorCache::new();
    let plan = SweepPlan::new(gpp(), log_spaced(1e-2, 1e2, 2).unwrap(), SolverConfig::default());
    let sweep = run_sweep(&plan, &mut cache).unwrap();
    assert_eq!(sweep.records.len(), 9);
    assert_eq!(sweep.converged_fraction(), 1.0);
    for r in &sweep.records {
        assert!(r.nehari_defect().abs() <= 1e-8, "ε = {}: defect {:e}", r.param, r.nehari_defect());
        let m = r.action_from_norms(2.0, 4.0);
        assert!(((m - r.action) / r.action).abs() <= 1e-10, "ε = {}", r.param);
    }
    for w in sweep.records.windows(2) {
        assert!(w[1].param > w[0].param);
    }
}

#[test]
fn mass_slope_signs_follow_the_regime() {
    let mut cache = OperatorCache::new();
    let params = gpp();
    let regime = classify_regime(&params);
    assert_eq!(regime.mass_at_zero, MassLimit::Zero);
    assert_eq!(regime.mass_at_infinity, MassLimit::Zero);
    let plan = SweepPlan::new(params, log_spaced(1e-3, 1e3, 3).unwrap(), SolverConfig::default());
    let sweep = run_sweep(&plan, &mut cache).unwrap();
    let (low, high) = default_windows(&sweep.records).unwrap();
    assert_eq!((low, high), ((1e-3, 1e-2), (1e2, 1e3)));
    for (limit, window, sign) in [(Limit::Zero, low, 1.0), (Limit::Infinity, high, -1.0)] {
        let table = predicted_exponents(&regime, limit);
        let Prediction::Law(law) = table.get(Observable::Mass) else { panic!("mass law missing at {limit}") };
        assert_eq!(law.value_f64().signum(), sign);
        let fit = fit_against(&sweep.records, &table, Observable::Mass, window).unwrap();
        assert_eq!(fit.slope.signum(), sign, "{limit}: slope {}", fit.slope);
    }
}

#[test]
fn mass_map_roots_reproduce_the_target() {
    let mut cache = OperatorCache::new();
    let cfg = SolverConfig::default();
    let plan = SweepPlan::new(gpp(), log_spaced(1e-2, 1e2, 2).unwrap(), cfg.clone());
    let sweep = run_sweep(&plan, &mut cache).unwrap();
    let peak = sweep.records.iter().map(|r| r.mass).fold(0.0, f64::max);
    let c2 = 0.8 * peak;
    let inv = mass_map_roots(c2, &sweep, &cfg, &mut cache).unwrap();
    assert_eq!(inv.roots.len(), 2, "GPP mass map is unimodal");
    assert!(inv.note.is_none());
    for r in &inv.roots {
        assert!(r.relative_error <= MASS_TOL);
        let params = gpp().with_formulation(Formulation::Frequency(r.param)).unwrap();
        let cold = solve_cached(&params, &cfg, &mut cache).unwrap();
        assert!(((cold.mass() - c2) / c2).abs() <= 1e-5, "ε = {}: M = {}", r.param, cold.mass());
    }
    assert!(inv.roots[0].param < inv.roots[1].param);
}

#[test]
fn unreachable_mass_returns_no_roots_with_a_note() {
    let mut cache = OperatorCache::new();
    let inv = mass_map_invert(1e6, (0.1, 10.0), &gpp(), &SolverConfig::default(), 1, &mut cache).unwrap();
    assert!(inv.roots.is_empty());
    assert!(inv.note.unwrap().contains("not crossed"));
    assert!(mass_map_invert(-1.0, (0.1, 10.0), &gpp(), &SolverConfig::default(), 1, &mut cache).is_err());
}

#[test]
fn records_round_trip_through_csv() {
    let mut cache = OperatorCache::new();
    let plan = SweepPlan::new(gpp(), log_spaced(0.5, 2.0, 3).unwrap(), SolverConfig::default());
    let sweep = run_sweep(&plan, &mut cache).unwrap();
    let mut buf = Vec::new();
    write_records(&sweep.params, &sweep.records, &mut buf).unwrap();
    let back = read_records(buf.as_slice()).unwrap();
    assert_eq!(back.records, sweep.records);
    assert_eq!((back.n, back.alpha, back.p, back.q), (3, 2.0, 2.0, 4.0));
    let params = back.params().unwrap();
    assert_eq!(params.formulation, Formulation::Frequency(1.0));
}

#[test]
fn cold_and_warm_sweeps_agree() {
    let values = log_spaced(0.1, 10.0, 1).unwrap();
    let mut warm = SweepPlan::new(gpp(), values, SolverConfig::default());
    let a = run_sweep(&warm, &mut OperatorCache::new()).unwrap();
    warm.warm = false;
    let b = run_sweep(&warm, &mut OperatorCache::new()).unwrap();
    for (x, y) in a.records.iter().zip(&b.records) {
        assert!(x.converged && y.converged);
        assert_eq!(x.param, y.param);
        assert!(((x.action - y.action) / y.action).abs() <= 1e-8, "ε = {}", x.param);
        assert!(((x.mass - y.mass) / y.mass).abs() <= 1e-6, "ε = {}", x.param);
    }
}
