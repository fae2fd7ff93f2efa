use std::fs;
use std::path::Path;

use choquard_cli::{dispatch, RunConfig, EXIT_CONFIG, EXIT_OK};
use proptest::prelude::*;

/// Runs the CLI in-process; returns (code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["choquard".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dispatch(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn supercritical_q_is_an_invalid_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let (code, _, err) = run(&["--out", &out, "solve", "N=3", "alpha=2", "p=2", "q=7", "value=1"]);
    assert_eq!(code, EXIT_CONFIG);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains('q'), "{err}");
}

#[test]
fn empty_config_names_the_missing_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "empty.cfg", "# nothing here\n");
    let (code, _, err) = run(&["solve", "--config", &cfg]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("'N'"), "{err}");
    let (code, _, err) = run(&["mass-map", "N=3", "alpha=2", "p=2", "q=4", "sweep_lo=0.1", "sweep_hi=1"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("'c2'"), "{err}");
}

#[test]
fn unknown_and_malformed_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "N = 3\nepsilon = 1\n");
    let (code, _, err) = run(&["solve", "--config", &cfg]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("'epsilon'"), "{err}");
    let (code, _, err) = run(&["solve", "N=3", "alpha=2", "p=2", "q=4", "value=fast"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("'value'"), "{err}");
    let (code, _, _) = run(&["solve", "bogus"]);
    assert_eq!(code, EXIT_CONFIG);
    let (code, _, _) = run(&["launch"]);
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn duplicate_key_warns_and_last_wins() {
    let dir = tempfile::tempdir().unwrap();
    // q = 7 first would be invalid; the later q = 4 must win
    let cfg = write(dir.path(), "dup.cfg", "N = 3\nalpha = 2\np = 2\nq = 7\nq = 4\nvalue = 1\nnodes = 400\n");
    let run_dir = dir.path().join("run");
    let (code, _, err) = run(&["solve", "--config", &cfg, &format!("output={}", run_dir.display())]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(err.contains("warning") && err.contains("'q'"), "{err}");
    let echo = fs::read_to_string(run_dir.join("config.txt")).unwrap();
    assert!(echo.contains("q = 4\n"));
}

#[test]
fn solve_writes_a_self_describing_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let args = ["--out", &out, "solve", "N=3", "alpha=2", "p=2", "q=4", "value=1", "nodes=800"];
    let (code, stdout, err) = run(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(stdout.contains("action"));
    let run_dir = dir.path().join("solve");
    for f in ["params.txt", "field.csv", "diagnostics.csv", "config.txt"] {
        assert!(run_dir.join(f).exists(), "{f} missing");
    }
    let echo = fs::read_to_string(run_dir.join("config.txt")).unwrap();
    let (back, _) = RunConfig::parse(&echo).unwrap();
    assert_eq!((back.n, back.q, back.nodes), (Some(3), Some(4.0), 800));
    // determinism: a second run produces the same field bit for bit
    let first = fs::read(run_dir.join("field.csv")).unwrap();
    assert_eq!(run(&args).0, EXIT_OK);
    assert_eq!(fs::read(run_dir.join("field.csv")).unwrap(), first);
}

#[test]
fn unconverged_solve_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let (code, _, err) =
        run(&["--out", &out, "solve", "N=3", "alpha=2", "p=2", "q=4", "value=1", "nodes=400", "max_iters=2"]);
    assert_eq!(code, choquard_cli::EXIT_UNCONVERGED);
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn sweep_then_fit_reports_predicted_and_fitted_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let (code, _, err) = run(&[
        "--out", &out, "sweep", "N=3", "alpha=2", "p=2", "q=4", "sweep_lo=1e-3", "sweep_hi=1e-2", "per_decade=4",
        "nodes=1000",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let records = dir.path().join("sweep/records.csv");
    let first = fs::read(&records).unwrap();
    let (code, report, err) = run(&["fit", &records.display().to_string(), "window_low=1e-3:1e-2"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(report.contains("predicted"), "{report}");
    let fits = fs::read_to_string(dir.path().join("sweep/fits.csv")).unwrap();
    let mass = fits.lines().find(|l| l.starts_with("mass,")).unwrap();
    let slope: f64 = mass.split(',').nth(3).unwrap().parse().unwrap();
    assert!((slope - 0.5).abs() < 0.05, "mass slope {slope}");
    // records are bit-identical on a rerun, apart from the timing column
    assert_eq!(run(&["--out", &out, "sweep", "N=3", "alpha=2", "p=2", "q=4", "sweep_lo=1e-3", "sweep_hi=1e-2", "per_decade=4", "nodes=1000"]).0, EXIT_OK);
    let strip = |b: &[u8]| -> Vec<String> {
        String::from_utf8(b.to_vec()).unwrap().lines().map(|l| l.rsplit_once(',').map_or(l, |x| x.0).to_string()).collect()
    };
    assert_eq!(strip(&fs::read(&records).unwrap()), strip(&first));
}

#[test]
fn fit_on_a_missing_file_is_an_io_error() {
    let (code, _, err) = run(&["fit", "/nonexistent/records.csv"]);
    assert_eq!(code, choquard_cli::EXIT_IO);
    assert!(err.contains("records.csv"));
}

fn configs() -> impl Strategy<Value = RunConfig> {
    (
        (prop::option::of(3usize..8), prop::option::of(0.1f64..2.9), prop::option::of(1.0f64..5.0), prop::option::of(2.01f64..6.0)),
        (0usize..3, prop::option::of(1e-4f64..1e4), 16usize..5000, prop::option::of(1.0f64..3.0), prop::option::of(1.0f64..500.0)),
        (1usize..10000, 1e-12f64..1e-3, 0.01f64..2.0, 0.1f64..0.9, any::<bool>(), 0.01f64..10.0, 0.1f64..10.0),
        (prop::option::of(1e-6f64..1.0), prop::option::of(1.0f64..1e6), 1usize..10, any::<bool>(), prop::option::of(1e-3f64..10.0)),
        (prop::option::of((1e-6f64..1e-3, 2.0f64..10.0)), prop::option::of("[a-z]{1,8}(/[a-z]{1,8}){0,2}")),
    )
        .prop_map(|((n, alpha, p, q), (f, value, nodes, gamma, radius), solver, sweep, (window, output))| {
            let (max_iters, tol, step, backtrack, clamp, seed_amplitude, seed_width) = solver;
            let (sweep_lo, sweep_hi, per_decade, warm, c2) = sweep;
            let formulation = [choquard_cli::config::FormKind::Eps, choquard_cli::config::FormKind::Lambda, choquard_cli::config::FormKind::Mu][f];
            RunConfig {
                n,
                alpha,
                p,
                q,
                formulation,
                value,
                nodes,
                gamma,
                radius,
                max_iters,
                tol,
                step,
                backtrack,
                clamp,
                seed_amplitude,
                seed_width,
                sweep_lo,
                sweep_hi,
                per_decade,
                warm,
                c2,
                window_low: window.map(|(a, k)| (a, a * k)),
                window_high: window.map(|(a, k)| (a * 1e4, a * 1e4 * k)),
                output: output.map(Into::into),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn config_round_trips_through_its_text_form(cfg in configs()) {
        let text = cfg.write();
        let (back, warnings) = RunConfig::parse(&text).unwrap();
        prop_assert!(warnings.is_empty());
        prop_assert_eq!(back, cfg);
    }
}
