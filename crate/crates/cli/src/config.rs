//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;

use choquard_core::functionals::{Formulation, ProblemParams};
use choquard_core::solver::{GridSpec, InitialGuess, SolverConfig};

/// Every accepted key, in the order [`RunConfig::write`] emits them.
pub const KEYS: [&str; 24] = [
    "N",
    "alpha",
    "p",
    "q",
    "formulation",
    "value",
    "nodes",
    "gamma",
    "radius",
    "max_iters",
    "tol",
    "step",
    "backtrack",
    "clamp",
    "seed_amplitude",
    "seed_width",
    "sweep_lo",
    "sweep_hi",
    "per_decade",
    "warm",
    "c2",
    "window_low",
    "window_high",
    "output",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected 'key = value', got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("unknown key '{0}'")]
    Unknown(String),
    #[error("key '{key}': cannot read '{value}' as {expected}")]
    Malformed { key: String, value: String, expected: &'static str },
    #[error("missing required key '{0}'")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

/// Which parameter a sweep or solve varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormKind {
    #[default]
    Eps,
    Lambda,
    Mu,
}

impl FormKind {
    pub fn name(self) -> &'static str {
        match self {
            FormKind::Eps => "eps",
            FormKind::Lambda => "lambda",
            FormKind::Mu => "mu",
        }
    }

    pub fn with(self, value: f64) -> Formulation<f64> {
        match self {
            FormKind::Eps => Formulation::Frequency(value),
            FormKind::Lambda => Formulation::Lambda(value),
            FormKind::Mu => Formulation::Mu(value),
        }
    }
}

/// Parsed configuration. Unset optional keys take the library defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub formulation: FormKind,
    pub value: Option<f64>,
    pub nodes: usize,
    pub gamma: Option<f64>,
    pub radius: Option<f64>,
    pub max_iters: usize,
    pub tol: f64,
    pub step: f64,
    pub backtrack: f64,
    pub clamp: bool,
    pub seed_amplitude: f64,
    pub seed_width: f64,
    pub sweep_lo: Option<f64>,
    pub sweep_hi: Option<f64>,
    pub per_decade: usize,
    pub warm: bool,
    pub c2: Option<f64>,
    pub window_low: Option<(f64, f64)>,
    pub window_high: Option<(f64, f64)>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolverConfig::<f64>::default();
        let (seed_amplitude, seed_width) = match s.guess {
            InitialGuess::Gaussian { amplitude, width } => (amplitude, width),
            InitialGuess::Seed(_) => (1.0, 1.0),
        };
        Self {
            n: None,
            alpha: None,
            p: None,
            q: None,
            formulation: FormKind::Eps,
            value: None,
            nodes: s.grid.nodes,
            gamma: s.grid.gamma,
            radius: s.grid.radius,
            max_iters: s.max_iters,
            tol: s.tol,
            step: s.step,
            backtrack: s.backtrack,
            clamp: s.clamp,
            seed_amplitude,
            seed_width,
            sweep_lo: None,
            sweep_hi: None,
            per_decade: 4,
            warm: true,
            c2: None,
            window_low: None,
            window_high: None,
            output: None,
        }
    }
}

fn malformed(key: &str, value: &str, expected: &'static str) -> ConfigError {
    ConfigError::Malformed { key: key.into(), value: value.into(), expected }
}

fn real(key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(malformed(key, v, "a finite number")),
    }
}

fn count(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse::<usize>().map_err(|_| malformed(key, v, "a non-negative integer"))
}

fn flag(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(malformed(key, v, "a boolean")),
    }
}

fn window(key: &str, v: &str) -> Result<(f64, f64), ConfigError> {
    let (a, b) = v.split_once(':').ok_or_else(|| malformed(key, v, "'lo:hi'"))?;
    let (a, b) = (real(key, a.trim())?, real(key, b.trim())?);
    if !(a > 0.0 && b > a) {
        return Err(malformed(key, v, "'lo:hi' with 0 < lo < hi"));
    }
    Ok((a, b))
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment. A repeated key
    /// keeps its last value and adds a warning.
    pub fn parse(text: &str) -> Result<(Self, Vec<String>), ConfigError> {
        let mut cfg = Self::default();
        let mut warnings = Vec::new();
        let mut seen: Vec<&str> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| ConfigError::Syntax { line: k + 1, text: raw.to_string() })?;
            let key = KEYS.iter().copied().find(|&x| x == key).ok_or_else(|| ConfigError::Unknown(key.to_string()))?;
            if seen.contains(&key) {
                warnings.push(format!("key '{key}' given more than once; line {} wins", k + 1));
            } else {
                seen.push(key);
            }
            cfg.set(key, value)?;
        }
        Ok((cfg, warnings))
    }

    /// Applies one assignment.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "N" => self.n = Some(count(key, v)?),
            "alpha" => self.alpha = Some(real(key, v)?),
            "p" => self.p = Some(real(key, v)?),
            "q" => self.q = Some(real(key, v)?),
            "formulation" => {
                self.formulation = match v {
                    "eps" => FormKind::Eps,
                    "lambda" => FormKind::Lambda,
                    "mu" => FormKind::Mu,
                    _ => return Err(malformed(key, v, "one of eps, lambda, mu")),
                }
            }
            "value" => self.value = Some(real(key, v)?),
            "nodes" => self.nodes = count(key, v)?,
            "gamma" => self.gamma = Some(real(key, v)?),
            "radius" => self.radius = Some(real(key, v)?),
            "max_iters" => self.max_iters = count(key, v)?,
            "tol" => self.tol = real(key, v)?,
            "step" => self.step = real(key, v)?,
            "backtrack" => self.backtrack = real(key, v)?,
            "clamp" => self.clamp = flag(key, v)?,
            "seed_amplitude" => self.seed_amplitude = real(key, v)?,
            "seed_width" => self.seed_width = real(key, v)?,
            "sweep_lo" => self.sweep_lo = Some(real(key, v)?),
            "sweep_hi" => self.sweep_hi = Some(real(key, v)?),
            "per_decade" => self.per_decade = count(key, v)?,
            "warm" => self.warm = flag(key, v)?,
            "c2" => self.c2 = Some(real(key, v)?),
            "window_low" => self.window_low = Some(window(key, v)?),
            "window_high" => self.window_high = Some(window(key, v)?),
            "output" => {
                if v.is_empty() {
                    return Err(malformed(key, v, "a path"));
                }
                self.output = Some(PathBuf::from(v))
            }
            other => return Err(ConfigError::Unknown(other.to_string())),
        }
        Ok(())
    }

    /// The effective configuration, one `key = value` line per set key.
    /// Numbers use the shortest representation that reads back exactly.
    pub fn write(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(n) = self.n {
            put("N", n.to_string());
        }
        for (k, v) in [("alpha", self.alpha), ("p", self.p), ("q", self.q)] {
            if let Some(x) = v {
                put(k, x.to_string());
            }
        }
        put("formulation", self.formulation.name().into());
        if let Some(x) = self.value {
            put("value", x.to_string());
        }
        put("nodes", self.nodes.to_string());
        if let Some(x) = self.gamma {
            put("gamma", x.to_string());
        }
        if let Some(x) = self.radius {
            put("radius", x.to_string());
        }
        put("max_iters", self.max_iters.to_string());
        put("tol", self.tol.to_string());
        put("step", self.step.to_string());
        put("backtrack", self.backtrack.to_string());
        put("clamp", self.clamp.to_string());
        put("seed_amplitude", self.seed_amplitude.to_string());
        put("seed_width", self.seed_width.to_string());
        if let Some(x) = self.sweep_lo {
            put("sweep_lo", x.to_string());
        }
        if let Some(x) = self.sweep_hi {
            put("sweep_hi", x.to_string());
        }
        put("per_decade", self.per_decade.to_string());
        put("warm", self.warm.to_string());
        if let Some(x) = self.c2 {
            put("c2", x.to_string());
        }
        if let Some((a, b)) = self.window_low {
            put("window_low", format!("{a}:{b}"));
        }
        if let Some((a, b)) = self.window_high {
            put("window_high", format!("{a}:{b}"));
        }
        if let Some(o) = &self.output {
            put("output", o.display().to_string());
        }
        s
    }

    /// Fails on the first key of `keys` that is unset.
    pub fn require(&self, keys: &[&'static str]) -> Result<(), ConfigError> {
        for &k in keys {
            let set = match k {
                "N" => self.n.is_some(),
                "alpha" => self.alpha.is_some(),
                "p" => self.p.is_some(),
                "q" => self.q.is_some(),
                "value" => self.value.is_some(),
                "sweep_lo" => self.sweep_lo.is_some(),
                "sweep_hi" => self.sweep_hi.is_some(),
                "c2" => self.c2.is_some(),
                _ => true,
            };
            if !set {
                return Err(ConfigError::Missing(k));
            }
        }
        Ok(())
    }

    /// Dimension and exponents with the parameter `value` (1 when unset).
    pub fn problem(&self) -> Result<ProblemParams<f64>, ConfigError> {
        self.require(&["N", "alpha", "p", "q"])?;
        let value = self.value.unwrap_or(1.0);
        ProblemParams::new(
            self.n.unwrap_or_default(),
            self.alpha.unwrap_or_default(),
            self.p.unwrap_or_default(),
            self.q.unwrap_or_default(),
            self.formulation.with(value),
        )
        .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn solver(&self) -> Result<SolverConfig<f64>, ConfigError> {
        let cfg = SolverConfig {
            max_iters: self.max_iters,
            tol: self.tol,
            step: self.step,
            backtrack: self.backtrack,
            guess: InitialGuess::Gaussian { amplitude: self.seed_amplitude, width: self.seed_width },
            clamp: self.clamp,
            grid: GridSpec { nodes: self.nodes, gamma: self.gamma, radius: self.radius },
        };
        cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.nodes < 16 {
            return Err(ConfigError::Invalid(format!("nodes = {} must be at least 16", self.nodes)));
        }
        Ok(cfg)
    }

    /// The sweep bracket, checked.
    pub fn bracket(&self) -> Result<(f64, f64), ConfigError> {
        self.require(&["sweep_lo", "sweep_hi"])?;
        let (lo, hi) = (self.sweep_lo.unwrap_or_default(), self.sweep_hi.unwrap_or_default());
        if !(lo > 0.0 && hi > lo) {
            return Err(ConfigError::Invalid(format!("sweep range [{lo}, {hi}] needs 0 < sweep_lo < sweep_hi")));
        }
        if self.per_decade == 0 {
            return Err(ConfigError::Invalid("per_decade must be positive".into()));
        }
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_defaults() {
        let (c, w) = RunConfig::parse("# GPP\nN = 3\nalpha=2 # Newton\np = 2\nq = 4\nvalue = 0.5\n\n").unwrap();
        assert!(w.is_empty());
        assert_eq!((c.n, c.alpha, c.value), (Some(3), Some(2.0), Some(0.5)));
        assert_eq!(c.nodes, 2000);
        assert_eq!(c.problem().unwrap().formulation, Formulation::Frequency(0.5));
    }

    #[test]
    fn duplicate_key_keeps_the_last_value() {
        let (c, w) = RunConfig::parse("q = 3\nq = 4\n").unwrap();
        assert_eq!(c.q, Some(4.0));
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("'q'"));
    }

    #[test]
    fn errors_name_the_offending_key() {
        assert_eq!(RunConfig::parse("eps = 1").unwrap_err(), ConfigError::Unknown("eps".into()));
        let e = RunConfig::parse("tol = fast").unwrap_err();
        assert!(e.to_string().contains("'tol'"));
        assert!(matches!(RunConfig::parse("N 3"), Err(ConfigError::Syntax { line: 1, .. })));
        assert_eq!(RunConfig::default().problem().unwrap_err(), ConfigError::Missing("N"));
        assert!(RunConfig::parse("window_low = 1e-1:1e-3").is_err());
    }

    #[test]
    fn out_of_range_exponent_is_invalid() {
        let (c, _) = RunConfig::parse("N = 3\nalpha = 2\np = 2\nq = 7").unwrap();
        assert!(matches!(c.problem(), Err(ConfigError::Invalid(_))));
    }
}
