use std::io::Write;

use crate::asymptotics::exponents::{ExponentTable, Observable, Prediction};
use crate::asymptotics::sweep::SweepRecord;
use crate::error::{invalid, Error, Result};
use crate::radial::io::fmt17;

/// Least-squares slope of log|obs| against log(param).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub observable: Observable,
    pub window: (f64, f64),
    pub slope: f64,
    pub stderr: f64,
    /// Slope after removing |ln param|^b, when a log power b was given.
    pub corrected: Option<(f64, f64)>,
    pub count: usize,
    /// Predicted exponent, when known.
    pub predicted: Option<f64>,
}

impl Fit {
    /// The corrected slope and its error if present, else the raw ones.
    pub fn best(&self) -> (f64, f64) {
        self.corrected.unwrap_or((self.slope, self.stderr))
    }

    /// |best slope − predicted|, if a prediction is attached.
    pub fn deviation(&self) -> Option<f64> {
        self.predicted.map(|e| (self.best().0 - e).abs())
    }
}

/// Ordinary least squares y = a + s·x; returns (s, standard error of s).
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InsufficientData(format!("{n} points")));
    }
    let nf = n as f64;
    let (mx, my) = (x.iter().sum::<f64>() / nf, y.iter().sum::<f64>() / nf);
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let s = sxy / sxx;
    let a = my - s * mx;
    let stderr = if n > 2 {
        let ssr: f64 = x.iter().zip(y).map(|(&a0, &b)| (b - a - s * a0).powi(2)).sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((s, stderr))
}

/// Fits log|obs| ∼ slope·log(param) over converged records with param in
/// `window`. With `log_power = Some(b)` the corrected slope fits
/// log|obs| − b·log|ln param| instead; the raw slope is always reported.
pub fn fit_exponent(records: &[SweepRecord], obs: Observable, window: (f64, f64), log_power: Option<f64>) -> Result<Fit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi >= lo) {
        return invalid(format!("fit window [{lo}, {hi}]"));
    }
    let slack = 1e-9;
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.converged && r.param >= lo * (1.0 - slack) && r.param <= hi * (1.0 + slack))
        .map(|r| (r.param, r.get(obs).abs()))
        .filter(|&(_, v)| v.is_finite() && v > 0.0)
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} converged records for {obs} in [{lo:e}, {hi:e}], need 4",
            pts.len()
        )));
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (slope, stderr) = least_squares(&x, &y)?;
    let corrected = match log_power {
        Some(b) if b != 0.0 => {
            if pts.iter().any(|p| p.0.ln().abs() < 1e-12) {
                return invalid("log correction needs the window to exclude param = 1");
            }
            let yc: Vec<f64> = pts.iter().zip(&y).map(|(p, &v)| v - b * p.0.ln().abs().ln()).collect();
            Some(least_squares(&x, &yc)?)
        }
        _ => None,
    };
    Ok(Fit { observable: obs, window, slope, stderr, corrected, count: pts.len(), predicted: None })
}

/// Fits `obs` with the log power of `table` and attaches its prediction.
pub fn fit_against(records: &[SweepRecord], table: &ExponentTable, obs: Observable, window: (f64, f64)) -> Result<Fit> {
    let pred = table.get(obs);
    let law = pred.law();
    let log_power = law.filter(|e| e.has_log()).map(|e| e.log_power_f64());
    let mut fit = fit_exponent(records, obs, window, log_power)?;
    fit.predicted = match pred {
        Prediction::Law(e) => Some(e.value_f64()),
        Prediction::Unpredicted(_) => None,
    };
    Ok(fit)
}

/// The first and last decades of the converged records: the default
/// windows for ε → 0 and ε → ∞ fits.
pub fn default_windows(records: &[SweepRecord]) -> Option<((f64, f64), (f64, f64))> {
    let mut v: Vec<f64> = records.iter().filter(|r| r.converged).map(|r| r.param).collect();
    v.sort_by(f64::total_cmp);
    let (&lo, &hi) = (v.first()?, v.last()?);
    Some(((lo, (lo * 10.0).min(hi)), ((hi / 10.0).max(lo), hi)))
}

/// Column header of `fits.csv`.
pub const FITS_HEADER: &str = "observable,window_lo,window_hi,slope,stderr,predicted,corrected_flag,raw_slope";

/// One row per fit. `slope`/`stderr` are the corrected values when a log
/// correction was applied; `raw_slope` is the uncorrected slope.
pub fn write_fits<W: Write>(fits: &[Fit], mut out: W) -> Result<()> {
    writeln!(out, "{FITS_HEADER}")?;
    for f in fits {
        let (s, e) = f.best();
        let pred = f.predicted.map(fmt17).unwrap_or_else(|| "NaN".into());
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            f.observable,
            fmt17(f.window.0),
            fmt17(f.window.1),
            fmt17(s),
            fmt17(e),
            pred,
            f.corrected.is_some(),
            fmt17(f.slope)
        )?;
    }
    Ok(())
}
