use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial::field::RadialField;
use crate::radial::grid::RadialGrid;
use crate::scalar::Scalar;

/// Formats a float with 17 significant digits, round-trip exact for `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `# N=.. R=.. M=.. gamma=..`, the `r,value` header and one row per
/// node.
pub fn write_field<T: Scalar, W: Write>(field: &RadialField<T>, mut out: W) -> Result<()> {
    let g = field.grid();
    writeln!(
        out,
        "# N={} R={} M={} gamma={}",
        g.dim(),
        fmt17(g.radius().as_f64()),
        g.len(),
        fmt17(g.gamma().as_f64())
    )?;
    writeln!(out, "r,value")?;
    for (r, v) in g.nodes().iter().zip(field.values()) {
        writeln!(out, "{},{}", fmt17(r.as_f64()), fmt17(v.as_f64()))?;
    }
    Ok(())
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{what}: '{s}': {e}")))
}

/// Reads a field written by [`write_field`], rebuilding its grid from the
/// header and checking the node column against it.
pub fn read_field<T: Scalar, R: BufRead>(input: R) -> Result<RadialField<T>> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))??;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing '# N=..' header".into()))?;
    let (mut n, mut r, mut m, mut g) = (None, None, None, None);
    for tok in header.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse(format!("bad header token '{tok}'")))?;
        match k {
            "N" => n = Some(v.parse::<usize>().map_err(|e| Error::Parse(format!("N: {e}")))?),
            "R" => r = Some(parse_f64(v, "R")?),
            "M" => m = Some(v.parse::<usize>().map_err(|e| Error::Parse(format!("M: {e}")))?),
            "gamma" => g = Some(parse_f64(v, "gamma")?),
            other => return Err(Error::Parse(format!("unknown header key '{other}'"))),
        }
    }
    let missing = |k: &str| Error::Parse(format!("header lacks {k}"));
    let grid = RadialGrid::new(
        n.ok_or_else(|| missing("N"))?,
        T::of(r.ok_or_else(|| missing("R"))?),
        m.ok_or_else(|| missing("M"))?,
        T::of(g.ok_or_else(|| missing("gamma"))?),
    )?;
    let cols = lines.next().ok_or_else(|| Error::Parse("missing column header".into()))??;
    if cols.trim() != "r,value" {
        return Err(Error::Parse(format!("expected 'r,value', found '{cols}'")));
    }
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (rs, vs) = line.split_once(',').ok_or_else(|| Error::Parse(format!("row {i}: expected 'r,value'")))?;
        let ri = parse_f64(rs, "r")?;
        if let Some(&node) = grid.nodes().get(i) {
            let node = node.as_f64();
            if (ri - node).abs() > 1e-12 * node.abs().max(1e-300) {
                return Err(Error::Parse(format!("row {i}: node {ri} does not match grid node {node}")));
            }
        }
        values.push(T::of(parse_f64(vs, "value")?));
    }
    RadialField::new(Arc::new(grid), values)
}
