use std::io::{BufRead, Write};
use std::thread;

use crate::asymptotics::exponents::Observable;
use crate::error::{invalid, Error, Result};
use crate::functionals::{Formulation, ProblemParams};
use crate::radial::io::fmt17;
use crate::scalar::Scalar;
use crate::solver::{continue_branch, solve_cached, GroundState, OperatorCache, SolverConfig};

/// Observables of one sweep point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRecord {
    /// ε, λ or μ.
    pub param: f64,
    pub u0: f64,
    pub mass: f64,
    pub grad2: f64,
    pub lq: f64,
    pub dpp: f64,
    pub energy: f64,
    pub action: f64,
    pub converged: bool,
    pub iters: usize,
    pub seconds: f64,
}

impl SweepRecord {
    fn from_state<T: Scalar>(param: T, s: &GroundState<T>) -> Self {
        Self {
            param: param.as_f64(),
            u0: s.peak.as_f64(),
            mass: s.terms.mass.as_f64(),
            grad2: s.terms.grad2.as_f64(),
            lq: s.terms.lq.as_f64(),
            dpp: s.terms.dpp.as_f64(),
            energy: s.energy.as_f64(),
            action: s.action.as_f64(),
            converged: s.converged,
            iters: s.iterations,
            seconds: s.seconds,
        }
    }

    fn failed<T: Scalar>(param: T) -> Self {
        Self {
            param: param.as_f64(),
            u0: f64::NAN,
            mass: f64::NAN,
            grad2: f64::NAN,
            lq: f64::NAN,
            dpp: f64::NAN,
            energy: f64::NAN,
            action: f64::NAN,
            converged: false,
            iters: 0,
            seconds: 0.0,
        }
    }

    pub fn get(&self, obs: Observable) -> f64 {
        match obs {
            Observable::Peak => self.u0,
            Observable::Mass => self.mass,
            Observable::Grad2 => self.grad2,
            Observable::Lq => self.lq,
            Observable::Dpp => self.dpp,
            Observable::Energy => self.energy,
            Observable::Action => self.action,
        }
    }

    /// ½‖∇u‖₂² + (ε/2)M − D_p/(2p) − ‖u‖_q^q/q from the stored norms, for a
    /// frequency sweep.
    pub fn action_from_norms(&self, p: f64, q: f64) -> f64 {
        0.5 * self.grad2 + 0.5 * self.param * self.mass - self.dpp / (2.0 * p) - self.lq / q
    }

    /// (εM + ‖∇u‖₂² − D_p − ‖u‖_q^q)/(εM + ‖∇u‖₂²) for a frequency sweep.
    pub fn nehari_defect(&self) -> f64 {
        let quad = self.param * self.mass + self.grad2;
        (quad - self.dpp - self.lq) / quad
    }
}

/// Parameter values of a sweep and how to solve them.
#[derive(Clone, Debug)]
pub struct SweepPlan<T: Scalar> {
    /// Dimension, exponents and the formulation kind; its parameter value is
    /// replaced by each entry of `values`.
    pub params: ProblemParams<T>,
    /// Increasing, positive.
    pub values: Vec<T>,
    pub config: SolverConfig<T>,
    /// Continue each point from its neighbor (sequential) instead of cold
    /// starts (concurrent).
    pub warm: bool,
}

impl<T: Scalar> SweepPlan<T> {
    pub fn new(params: ProblemParams<T>, values: Vec<T>, config: SolverConfig<T>) -> Self {
        Self { params, values, config, warm: true }
    }
}

/// `per_decade` log-spaced values from `lo` to `hi`, both included.
pub fn log_spaced<T: Scalar>(lo: T, hi: T, per_decade: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi >= lo && hi.is_finite() && per_decade > 0) {
        return invalid(format!("log range [{lo}, {hi}] with {per_decade} points per decade"));
    }
    let (a, b) = (lo.as_f64().log10(), hi.as_f64().log10());
    let steps = ((b - a) * per_decade as f64).round().max(0.0) as usize;
    if steps == 0 {
        return Ok(vec![lo]);
    }
    Ok((0..=steps).map(|k| T::of(10f64.powf(a + (b - a) * k as f64 / steps as f64))).collect())
}

/// Records of a sweep, ordered by parameter, with the computed states.
#[derive(Clone, Debug)]
pub struct Sweep<T: Scalar> {
    pub params: ProblemParams<T>,
    pub records: Vec<SweepRecord>,
    /// `None` where the solve failed outright.
    pub states: Vec<Option<GroundState<T>>>,
}

impl<T: Scalar> Sweep<T> {
    pub fn converged(&self) -> impl Iterator<Item = (&SweepRecord, &GroundState<T>)> {
        self.records.iter().zip(&self.states).filter_map(|(r, s)| match s {
            Some(s) if r.converged => Some((r, s)),
            _ => None,
        })
    }

    pub fn converged_fraction(&self) -> f64 {
        self.records.iter().filter(|r| r.converged).count() as f64 / self.records.len().max(1) as f64
    }
}

fn point<T: Scalar>(params: &ProblemParams<T>, value: T) -> Result<ProblemParams<T>> {
    params.with_formulation(params.formulation.with_value(value))
}

fn outcome<T: Scalar>(value: T, res: Result<GroundState<T>>) -> (SweepRecord, Option<GroundState<T>>) {
    match res {
        Ok(s) => (SweepRecord::from_state(value, &s), Some(s)),
        Err(_) => (SweepRecord::failed(value), None),
    }
}

/// Solves every point of the plan. Warm sweeps start at the value closest to
/// 1 and continue outward in both directions, each point seeded by the last
/// converged neighbor; cold sweeps solve all points concurrently. Failed
/// points are recorded, not fatal.
pub fn run_sweep<T: Scalar>(plan: &SweepPlan<T>, cache: &mut OperatorCache<T>) -> Result<Sweep<T>> {
    plan.config.validate()?;
    if plan.values.is_empty() {
        return Err(Error::InsufficientData("empty sweep".into()));
    }
    if !plan.values.iter().all(|&v| v > T::zero() && v.is_finite()) || plan.values.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("sweep values must be positive and strictly increasing");
    }
    let params = point(&plan.params, plan.values[0])?;
    let n = plan.values.len();
    let mut slots: Vec<Option<(SweepRecord, Option<GroundState<T>>)>> = vec![None; n];
    if plan.warm {
        let pivot = (0..n)
            .min_by(|&i, &j| {
                let d = |k: usize| plan.values[k].as_f64().ln().abs();
                d(i).total_cmp(&d(j))
            })
            .expect("nonempty");
        let first = solve_cached(&point(&params, plan.values[pivot])?, &plan.config, cache);
        let first = outcome(plan.values[pivot], first);
        let anchor = first.1.clone().filter(|s| s.converged);
        slots[pivot] = Some(first);
        for dir in [1isize, -1] {
            let mut seed = anchor.clone();
            let mut i = pivot as isize + dir;
            while i >= 0 && (i as usize) < n {
                let v = plan.values[i as usize];
                let p = point(&params, v)?;
                let res = match &seed {
                    Some(prev) => continue_branch(prev, &p, &plan.config, cache),
                    None => solve_cached(&p, &plan.config, cache),
                };
                let out = outcome(v, res);
                if let Some(s) = out.1.as_ref().filter(|s| s.converged) {
                    seed = Some(s.clone());
                }
                slots[i as usize] = Some(out);
                i += dir;
            }
        }
    } else {
        let workers = thread::available_parallelism().map(|k| k.get()).unwrap_or(1).min(n);
        let results: Vec<Vec<(usize, (SweepRecord, Option<GroundState<T>>))>> = thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let (params, plan) = (&params, &plan);
                    scope.spawn(move || {
                        let mut local = OperatorCache::new();
                        (w..n)
                            .step_by(workers)
                            .map(|i| {
                                let v = plan.values[i];
                                let res = point(params, v).and_then(|p| solve_cached(&p, &plan.config, &mut local));
                                (i, outcome(v, res))
                            })
                            .collect()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
        });
        for (i, out) in results.into_iter().flatten() {
            slots[i] = Some(out);
        }
    }
    let (records, states) = slots.into_iter().map(|s| s.expect("every point visited")).unzip();
    Ok(Sweep { params, records, states })
}

/// Column header of `records.csv`.
pub const RECORDS_HEADER: &str = "param,u0,mass,grad2,lq,dpp,energy,action,converged,iters,seconds";

/// Writes a `# N=.. alpha=.. p=.. q=.. formulation=..` line, the column
/// header and one row per record.
pub fn write_records<T: Scalar, W: Write>(params: &ProblemParams<T>, records: &[SweepRecord], mut out: W) -> Result<()> {
    writeln!(
        out,
        "# N={} alpha={} p={} q={} formulation={}",
        params.n,
        fmt17(params.alpha.as_f64()),
        fmt17(params.p.as_f64()),
        fmt17(params.q.as_f64()),
        params.formulation.name()
    )?;
    writeln!(out, "{RECORDS_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt17(r.param),
            fmt17(r.u0),
            fmt17(r.mass),
            fmt17(r.grad2),
            fmt17(r.lq),
            fmt17(r.dpp),
            fmt17(r.energy),
            fmt17(r.action),
            r.converged,
            r.iters,
            fmt17(r.seconds)
        )?;
    }
    Ok(())
}

/// Contents of a `records.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordsFile {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub formulation: String,
    pub records: Vec<SweepRecord>,
}

impl RecordsFile {
    /// Problem parameters of the sweep, with the formulation value set to 1.
    pub fn params(&self) -> Result<ProblemParams<f64>> {
        let f = match self.formulation.as_str() {
            "eps" => Formulation::Frequency(1.0),
            "lambda" => Formulation::Lambda(1.0),
            "mu" => Formulation::Mu(1.0),
            other => return Err(Error::Parse(format!("unknown formulation '{other}'"))),
        };
        ProblemParams::new(self.n, self.alpha, self.p, self.q, f)
    }
}

fn parse<V: std::str::FromStr>(s: &str, what: &str) -> Result<V>
where
    V::Err: std::fmt::Display,
{
    s.trim().parse::<V>().map_err(|e| Error::Parse(format!("{what}: '{s}': {e}")))
}

pub fn read_records<R: BufRead>(input: R) -> Result<RecordsFile> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty records file".into()))??;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing '# N=..' header".into()))?;
    let (mut n, mut alpha, mut p, mut q, mut form) = (None, None, None, None, None);
    for tok in header.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse(format!("bad header token '{tok}'")))?;
        match k {
            "N" => n = Some(parse::<usize>(v, "N")?),
            "alpha" => alpha = Some(parse::<f64>(v, "alpha")?),
            "p" => p = Some(parse::<f64>(v, "p")?),
            "q" => q = Some(parse::<f64>(v, "q")?),
            "formulation" => form = Some(v.to_string()),
            other => return Err(Error::Parse(format!("unknown header key '{other}'"))),
        }
    }
    let missing = |k: &str| Error::Parse(format!("header lacks {k}"));
    let cols = lines.next().ok_or_else(|| Error::Parse("missing column header".into()))??;
    if cols.trim() != RECORDS_HEADER {
        return Err(Error::Parse(format!("unexpected columns '{cols}'")));
    }
    let mut records = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return Err(Error::Parse(format!("row {}: expected 11 fields, got {}", k + 1, f.len())));
        }
        records.push(SweepRecord {
            param: parse(f[0], "param")?,
            u0: parse(f[1], "u0")?,
            mass: parse(f[2], "mass")?,
            grad2: parse(f[3], "grad2")?,
            lq: parse(f[4], "lq")?,
            dpp: parse(f[5], "dpp")?,
            energy: parse(f[6], "energy")?,
            action: parse(f[7], "action")?,
            converged: parse(f[8], "converged")?,
            iters: parse(f[9], "iters")?,
            seconds: parse(f[10], "seconds")?,
        });
    }
    Ok(RecordsFile {
        n: n.ok_or_else(|| missing("N"))?,
        alpha: alpha.ok_or_else(|| missing("alpha"))?,
        p: p.ok_or_else(|| missing("p"))?,
        q: q.ok_or_else(|| missing("q"))?,
        formulation: form.ok_or_else(|| missing("formulation"))?,
        records,
    })
}
