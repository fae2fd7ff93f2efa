//! Subcommand dispatch.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use choquard_core::asymptotics::{
    classify_regime, default_windows, fit_against, log_spaced, mass_map_roots, predicted_exponents, read_records,
    run_sweep, write_fits, write_records, Limit, Observable, Prediction, SweepPlan,
};
use choquard_core::functionals::ProblemParams;
use choquard_core::profiles::{
    best_constant, bubble, resolve_u_amplitude, rho0, ConstantKind, ProfileLab, ProfileSpec, Rho0Kind,
};
use choquard_core::radial::io::{fmt17, write_field};
use choquard_core::solver::{solve_cached, write_run, OperatorCache};
use clap::{Parser, Subcommand};

use crate::config::{ConfigError, RunConfig};
use crate::verify;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "CHOQUARD_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNCONVERGED: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "choquard", version, about = "Radial ground states of the Choquard equation with a local power term")]
struct Cli {
    /// Output root; defaults to $CHOQUARD_OUT, then ./runs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Default)]
struct Settings {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides applied after the file, as KEY=VALUE.
    #[arg(value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one ground state and write its run directory.
    Solve(Settings),
    /// Sweep the parameter over [sweep_lo, sweep_hi] and write records.csv.
    Sweep(Settings),
    /// Fit scaling exponents to a records.csv and write fits.csv beside it.
    Fit {
        records: PathBuf,
        #[command(flatten)]
        settings: Settings,
    },
    /// Write the explicit limit profiles and the best constants.
    Profiles(Settings),
    /// Find every parameter value whose ground state has mass c2.
    MassMap(Settings),
    /// Run the identity suite, or every acceptance check with --full.
    Verify {
        #[arg(long)]
        full: bool,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(EXIT_CONFIG, e.to_string())
    }
}

impl From<choquard_core::Error> for Failure {
    fn from(e: choquard_core::Error) -> Self {
        use choquard_core::Error as E;
        let code = match e {
            E::Io(_) => EXIT_IO,
            E::InvalidParameter(_) | E::Regime(_) | E::Parse(_) | E::InsufficientData(_) => EXIT_CONFIG,
            _ => EXIT_UNCONVERGED,
        };
        Failure::new(code, e.to_string())
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::new(EXIT_IO, format!("{}: {e}", path.display()))
}

/// Parses `argv` (argv[0] is the program name) and runs the subcommand.
/// Output goes to `out`, diagnostics to `err`.
pub fn dispatch(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let first = e.to_string();
                    let line = first.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(err, "{line}");
                    EXIT_CONFIG
                }
            };
        }
    };
    let root = cli
        .out
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    let result = match cli.command {
        Command::Solve(s) => settings(&s, err).and_then(|c| solve(&c, &root, out)),
        Command::Sweep(s) => settings(&s, err).and_then(|c| sweep(&c, &root, out)),
        Command::Fit { records, settings: s } => settings(&s, err).and_then(|c| fit(&c, &records, out)),
        Command::Profiles(s) => settings(&s, err).and_then(|c| profiles(&c, &root, out)),
        Command::MassMap(s) => settings(&s, err).and_then(|c| mass_map(&c, &root, out)),
        Command::Verify { full } => verify_cmd(full, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message.replace('\n', " "));
            f.code
        }
    }
}

/// The config file (if any) followed by the KEY=VALUE overrides.
fn settings(s: &Settings, err: &mut dyn Write) -> Result<RunConfig, Failure> {
    let mut cfg = match &s.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io(path))?;
            let (cfg, warnings) = RunConfig::parse(&text)?;
            for w in warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            cfg
        }
        None => RunConfig::default(),
    };
    for kv in &s.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::new(EXIT_CONFIG, format!("override '{kv}' is not KEY=VALUE")))?;
        let key = k.trim();
        if !crate::config::KEYS.contains(&key) {
            return Err(ConfigError::Unknown(key.to_string()).into());
        }
        cfg.set(key, v.trim())?;
    }
    Ok(cfg)
}

/// `output` when set, else `<root>/<name>`.
fn run_dir(cfg: &RunConfig, root: &Path, name: &str) -> Result<PathBuf, Failure> {
    let dir = cfg.output.clone().unwrap_or_else(|| root.join(name));
    fs::create_dir_all(&dir).map_err(io(&dir))?;
    fs::write(dir.join("config.txt"), cfg.write()).map_err(io(&dir))?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(io(path))
}

fn params(cfg: &RunConfig) -> Result<ProblemParams<f64>, Failure> {
    Ok(cfg.problem()?)
}

fn solve(cfg: &RunConfig, root: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    cfg.require(&["N", "alpha", "p", "q", "value"])?;
    let params = params(cfg)?;
    let solver = cfg.solver()?;
    let state = solve_cached(&params, &solver, &mut OperatorCache::new())?;
    let dir = run_dir(cfg, root, "solve")?;
    write_run(&dir, &state)?;
    let _ = writeln!(
        out,
        "{} = {}: action {}, mass {}, u(0) {}, residuals Nehari {:.1e} Pohozaev {:.1e} EL {:.1e}, {} iterations -> {}",
        cfg.formulation.name(),
        params.formulation.value(),
        fmt17(state.action),
        fmt17(state.mass()),
        fmt17(state.peak),
        state.nehari_residual,
        state.pohozaev_residual,
        state.el_residual,
        state.iterations,
        dir.display()
    );
    if state.converged {
        Ok(EXIT_OK)
    } else {
        Err(Failure::new(
            EXIT_UNCONVERGED,
            format!("solver stopped after {} iterations with EL residual {:.2e}", state.iterations, state.el_residual),
        ))
    }
}

fn sweep_plan(cfg: &RunConfig) -> Result<SweepPlan<f64>, Failure> {
    cfg.require(&["N", "alpha", "p", "q"])?;
    let params = params(cfg)?;
    let (lo, hi) = cfg.bracket()?;
    let mut plan = SweepPlan::new(params, log_spaced(lo, hi, cfg.per_decade)?, cfg.solver()?);
    plan.warm = cfg.warm;
    Ok(plan)
}

fn sweep(cfg: &RunConfig, root: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let plan = sweep_plan(cfg)?;
    let result = run_sweep(&plan, &mut OperatorCache::new())?;
    let dir = run_dir(cfg, root, "sweep")?;
    let path = dir.join("records.csv");
    let mut w = create(&path)?;
    write_records(&result.params, &result.records, &mut w)?;
    w.flush().map_err(io(&path))?;
    let done = result.records.iter().filter(|r| r.converged).count();
    let _ = writeln!(out, "{done}/{} points converged -> {}", result.records.len(), path.display());
    if done == 0 {
        return Err(Failure::new(EXIT_UNCONVERGED, "no sweep point converged"));
    }
    Ok(EXIT_OK)
}

fn fit(cfg: &RunConfig, records: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let file = read_records(BufReader::new(File::open(records).map_err(io(records))?))?;
    let regime = classify_regime(&file.params()?);
    let defaults = default_windows(&file.records)
        .ok_or_else(|| Failure::new(EXIT_CONFIG, format!("{}: no converged records", records.display())))?;
    let windows = [
        (Limit::Zero, cfg.window_low.unwrap_or(defaults.0)),
        (Limit::Infinity, cfg.window_high.unwrap_or(defaults.1)),
    ];
    let mut fits = Vec::new();
    for (limit, window) in windows {
        let table = predicted_exponents(&regime, limit);
        for obs in Observable::ALL {
            let pred = table.get(obs);
            let source = match &pred {
                Prediction::Law(e) => format!("predicted {} [{}]", e.value, e.source),
                Prediction::Unpredicted(why) => format!("no prediction: {why}"),
            };
            match fit_against(&file.records, &table, obs, window) {
                Ok(f) => {
                    let (s, e) = f.best();
                    let _ = writeln!(
                        out,
                        "{limit} {obs:<6} window [{:e}, {:e}] fitted {s:.4} ± {e:.1e}, {source}",
                        window.0, window.1
                    );
                    fits.push(f);
                }
                Err(choquard_core::Error::InsufficientData(why)) => {
                    let _ = writeln!(out, "{limit} {obs:<6} skipped: {why}");
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let path = records.with_file_name("fits.csv");
    let mut w = create(&path)?;
    write_fits(&fits, &mut w)?;
    w.flush().map_err(io(&path))?;
    let _ = writeln!(out, "{} fits -> {}", fits.len(), path.display());
    Ok(EXIT_OK)
}

fn profiles(cfg: &RunConfig, root: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    cfg.require(&["N", "alpha"])?;
    let n = cfg.n.unwrap_or_default();
    let alpha = cfg.alpha.unwrap_or_default();
    if n < 3 {
        return Err(Failure::new(EXIT_CONFIG, format!("N = {n} must be at least 3")));
    }
    let nf = n as f64;
    let mut lab = ProfileLab::<f64>::for_dim(n)?;
    let op = lab.operator(alpha)?;
    let amplitude = resolve_u_amplitude(&op)?.value;
    let dir = run_dir(cfg, root, "profiles")?;
    let specs = [
        ("U1.csv", ProfileSpec::u(n, amplitude, 1.0)?),
        ("V1.csv", ProfileSpec::v(n, 1.0)?),
        ("W1.csv", ProfileSpec::w(n, 1.0)?),
    ];
    for (name, spec) in specs {
        let path = dir.join(name);
        let mut w = create(&path)?;
        write_field(&bubble(&spec, lab.grid())?, &mut w)?;
        w.flush().map_err(io(&path))?;
    }
    // exponents for S, S₁, S_α come from N and α alone
    let p = cfg.p.unwrap_or((nf + alpha) / nf);
    let q = cfg.q.unwrap_or(2.0 * nf / (nf - 2.0));
    let base = ProblemParams::new(n, alpha, p, q, cfg.formulation.with(cfg.value.unwrap_or(1.0)))
        .map_err(|e| Failure::new(EXIT_CONFIG, e.to_string()))?;
    let solver = cfg.solver()?;
    let mut rows: Vec<(String, f64)> = vec![("A".into(), amplitude)];
    for (name, kind) in [("S", ConstantKind::S), ("S1", ConstantKind::S1), ("S_alpha", ConstantKind::SAlpha)] {
        rows.push((name.into(), best_constant(kind, &base, &mut lab, &solver)?));
    }
    if cfg.p.is_some() {
        rows.push(("S_p".into(), best_constant(ConstantKind::Sp, &base, &mut lab, &solver)?));
    }
    if cfg.q.is_some() {
        rows.push(("S_q".into(), best_constant(ConstantKind::Sq, &base, &mut lab, &solver)?));
    }
    for (name, kind) in [
        ("rho0_lower", Rho0Kind::LowerChoquard),
        ("rho0_upper", Rho0Kind::UpperChoquard),
        ("rho0_sobolev", Rho0Kind::Sobolev),
    ] {
        // ρ₀ exists only in its own regime
        if let Ok(v) = rho0(kind, &base, &mut lab) {
            rows.push((name.into(), v));
        }
    }
    let path = dir.join("constants.csv");
    let mut w = create(&path)?;
    writeln!(w, "name,value").map_err(io(&path))?;
    for (name, v) in &rows {
        writeln!(w, "{name},{}", fmt17(*v)).map_err(io(&path))?;
        let _ = writeln!(out, "{name:<13} {}", fmt17(*v));
    }
    w.flush().map_err(io(&path))?;
    let _ = writeln!(out, "profiles and constants -> {}", dir.display());
    Ok(EXIT_OK)
}

fn mass_map(cfg: &RunConfig, root: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    cfg.require(&["N", "alpha", "p", "q", "sweep_lo", "sweep_hi", "c2"])?;
    let plan = sweep_plan(cfg)?;
    let c2 = cfg.c2.unwrap_or_default();
    let mut cache = OperatorCache::new();
    let sweep = run_sweep(&plan, &mut cache)?;
    let inv = mass_map_roots(c2, &sweep, &plan.config, &mut cache)?;
    let dir = run_dir(cfg, root, "mass-map")?;
    let path = dir.join("records.csv");
    let mut w = create(&path)?;
    write_records(&sweep.params, &sweep.records, &mut w)?;
    w.flush().map_err(io(&path))?;
    let path = dir.join("roots.csv");
    let mut w = create(&path)?;
    writeln!(w, "param,mass,relative_error,action,solves").map_err(io(&path))?;
    for r in &inv.roots {
        writeln!(w, "{},{},{},{},{}", fmt17(r.param), fmt17(r.mass), fmt17(r.relative_error), fmt17(r.state.action), r.solves)
            .map_err(io(&path))?;
        let _ = writeln!(
            out,
            "{} = {} mass {} action {}",
            plan.params.formulation.name(),
            fmt17(r.param),
            fmt17(r.mass),
            fmt17(r.state.action)
        );
    }
    w.flush().map_err(io(&path))?;
    if let Some(note) = &inv.note {
        let _ = writeln!(out, "{note}");
    }
    let _ = writeln!(out, "{} roots -> {}", inv.roots.len(), path.display());
    Ok(EXIT_OK)
}

fn verify_cmd(full: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let ids: &[&'static str] = if full { &verify::ALL } else { &verify::IDENTITY_SUITE };
    let checks = verify::run_checks(ids, |c| {
        let _ = writeln!(out, "{}", c.line());
    });
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{}/{} checks passed", checks.len() - failed, checks.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY })
}
