use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::radial::io::{fmt17, write_field};
use crate::scalar::Scalar;
use crate::solver::solve::GroundState;

/// Columns of `diagnostics.csv`.
pub const DIAGNOSTICS_HEADER: &str =
    "action,energy,nehari_rel,pohozaev_rel,el_rel,u0,mass,grad2,lq,dpp,iterations,converged,seconds";

/// Writes `params.txt`, `field.csv` and `diagnostics.csv` into `dir`.
pub fn write_run<T: Scalar>(dir: &Path, state: &GroundState<T>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let f = |x: T| fmt17(x.as_f64());
    let m = &state.model;
    let g = state.field.grid();
    let mut params = BufWriter::new(fs::File::create(dir.join("params.txt"))?);
    writeln!(params, "N = {}", m.n)?;
    writeln!(params, "alpha = {}", f(m.alpha))?;
    writeln!(params, "p = {}", f(m.p))?;
    writeln!(params, "q = {}", f(m.q))?;
    if let Some(pp) = &state.params {
        writeln!(params, "formulation = {}", pp.formulation.name())?;
        writeln!(params, "value = {}", f(pp.formulation.value()))?;
    }
    let c = &m.coeffs;
    writeln!(params, "a_grad = {}", f(c.a_grad))?;
    writeln!(params, "a_mass = {}", f(c.a_mass))?;
    writeln!(params, "a_choq = {}", f(c.a_choq))?;
    writeln!(params, "a_pow = {}", f(c.a_pow))?;
    writeln!(params, "scale_a = {}", f(state.scaling.a))?;
    writeln!(params, "scale_b = {}", f(state.scaling.b))?;
    writeln!(params, "grid_R = {}", f(g.radius()))?;
    writeln!(params, "grid_M = {}", g.len())?;
    writeln!(params, "grid_gamma = {}", f(g.gamma()))?;
    params.flush()?;

    write_field(&state.field, BufWriter::new(fs::File::create(dir.join("field.csv"))?))?;

    let mut diag = BufWriter::new(fs::File::create(dir.join("diagnostics.csv"))?);
    writeln!(diag, "{DIAGNOSTICS_HEADER}")?;
    let t = &state.terms;
    writeln!(
        diag,
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        f(state.action),
        f(state.energy),
        f(state.nehari_residual),
        f(state.pohozaev_residual),
        f(state.el_residual),
        f(state.peak),
        f(t.mass),
        f(t.grad2),
        f(t.lq),
        f(t.dpp),
        state.iterations,
        state.converged,
        fmt17(state.seconds)
    )?;
    diag.flush()?;
    Ok(())
}

/// Reads a `key = value` file, `#` starting a comment.
pub fn read_params(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key = value", k + 1)))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}
