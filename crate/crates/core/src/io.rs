//! CSV artifacts. Every file starts with a `#`-prefixed metadata block that
//! records the format version, the artifact kind and the full run config.

use std::io::{BufRead, Write};

use serde_json::Value;

use crate::bounds::BoundReport;
use crate::eigen::{IterationRecord, Spectrum};
use crate::mesh::Grid;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Model(#[from] crate::Error),
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_header(w: &mut impl Write, artifact: &str, config: &Value) -> std::io::Result<()> {
    writeln!(w, "# fracweyl format-version {FORMAT_VERSION}")?;
    writeln!(w, "# artifact: {artifact}")?;
    writeln!(w, "# config: {config}")
}

fn coord_columns(dim: usize) -> &'static str {
    if dim == 1 {
        "x"
    } else {
        "x,y"
    }
}

fn coords(grid: &Grid, i: usize) -> String {
    let x = grid.nodes()[i];
    if grid.dim() == 1 {
        num(x[0])
    } else {
        format!("{},{}", num(x[0]), num(x[1]))
    }
}

/// One row per node: `index, x, (y), kappa`.
pub fn write_grid(
    w: &mut impl Write,
    grid: &Grid,
    kappa: &[f64],
    config: &Value,
) -> std::io::Result<()> {
    write_header(w, "grid", config)?;
    writeln!(w, "index,{},kappa", coord_columns(grid.dim()))?;
    for (i, k) in kappa.iter().enumerate() {
        writeln!(w, "{i},{},{}", coords(grid, i), num(*k))?;
    }
    Ok(())
}

/// One row per node: `index, x, (y), value`.
pub fn write_function(
    w: &mut impl Write,
    grid: &Grid,
    u: &[f64],
    config: &Value,
) -> std::io::Result<()> {
    write_header(w, "function", config)?;
    writeln!(w, "index,{},value", coord_columns(grid.dim()))?;
    for (i, v) in u.iter().enumerate() {
        writeln!(w, "{i},{},{}", coords(grid, i), num(*v))?;
    }
    Ok(())
}

/// `k, lambda_k` with `k` starting at 1.
pub fn write_spectrum(
    w: &mut impl Write,
    spectrum: &Spectrum,
    config: &Value,
) -> std::io::Result<()> {
    write_header(w, "spectrum", config)?;
    writeln!(w, "k,lambda_k")?;
    for (k, l) in spectrum.eigenvalues.iter().enumerate() {
        writeln!(w, "{},{}", k + 1, num(*l))?;
    }
    Ok(())
}

pub fn write_counting(
    w: &mut impl Write,
    samples: &[(f64, usize)],
    config: &Value,
) -> std::io::Result<()> {
    write_header(w, "counting", config)?;
    writeln!(w, "lambda,N")?;
    for (l, n) in samples {
        writeln!(w, "{},{n}", num(*l))?;
    }
    Ok(())
}

pub fn write_iteration_log(
    w: &mut impl Write,
    log: &[IterationRecord],
    config: &Value,
) -> std::io::Result<()> {
    write_header(w, "iterations", config)?;
    writeln!(w, "iter,rayleigh,residual,step")?;
    for r in log {
        writeln!(
            w,
            "{},{},{},{}",
            r.iter,
            num(r.rayleigh),
            num(r.residual),
            num(r.step)
        )?;
    }
    Ok(())
}

/// Bound table; optional columns are left empty when not available.
pub fn write_bounds(
    w: &mut impl Write,
    report: &BoundReport,
    config: &Value,
) -> std::io::Result<()> {
    write_header(w, "bounds", config)?;
    if !report.calibrated {
        writeln!(w, "# uncalibrated")?;
    }
    writeln!(w, "lambda,lower,lower_valid,upper,upper_valid,measured_N")?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for s in &report.samples {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            num(s.lambda),
            num(s.lower),
            s.lower_valid,
            opt(s.upper.map(num)),
            opt(s.upper_valid.map(|b| b.to_string())),
            opt(s.measured.map(|m| m.to_string())),
        )?;
    }
    Ok(())
}

/// Reads a spectrum written by [`write_spectrum`] (or any `k,lambda_k` CSV).
pub fn read_spectrum(r: impl BufRead) -> Result<Spectrum, IoError> {
    let mut values = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("k,") {
            continue;
        }
        let field = line.split(',').nth(1).ok_or_else(|| IoError::Parse {
            line: n + 1,
            msg: "expected two columns".into(),
        })?;
        let v: f64 = field.trim().parse().map_err(|e| IoError::Parse {
            line: n + 1,
            msg: format!("{e}"),
        })?;
        values.push(v);
    }
    Ok(Spectrum::from_eigenvalues(values)?)
}
