use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use fracweyl::bounds::{
    bound_report, conjectured_exponent, log_grid, BoundRequest, CubeCalibration,
};
use fracweyl::eigen::{
    counting_function, first_eigenpair, linear_spectrum, percentile, weyl_slope,
};
use fracweyl::io;
use fracweyl::properties::{
    check_domain_monotonicity, check_poincare, check_scaling, check_sign_change,
    check_simplicity_gap, check_symmetry, PropertyReport, DEFAULT_GAP_TOL, RESTARTS,
};
use fracweyl::{build_grid, DomainSpec, NonlocalEnergy, Spectrum};
use serde_json::{json, Value};

use crate::config::{RunConfig, Window};
use crate::CliError;

pub const PROPERTIES: [&str; 6] = [
    "scaling",
    "monotonicity",
    "sign_change",
    "symmetry",
    "simplicity",
    "poincare",
];

/// Properties whose preconditions hold for this run.
pub fn applicable(cfg: &RunConfig) -> Vec<String> {
    PROPERTIES
        .iter()
        .filter(|name| match **name {
            "sign_change" | "simplicity" => cfg.params.is_linear(),
            "symmetry" => cfg.domain.is_ball(),
            _ => true,
        })
        .map(|s| s.to_string())
        .collect()
}

const COUNTING_SAMPLES: usize = 200;
const BOUND_SAMPLES: usize = 200;
const POINCARE_TRIALS: usize = 1000;
const DEFAULT_TAU: f64 = 2.0;
const FIT_WINDOW: (f64, f64) = (0.5, 0.8);

fn setup_threads(cfg: &RunConfig) {
    if let Some(k) = cfg.threads {
        // Only fails if a global pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
}

fn energy(cfg: &RunConfig) -> Result<NonlocalEnergy, CliError> {
    let grid = build_grid(&cfg.domain, cfg.params, cfg.n)?;
    Ok(NonlocalEnergy::assemble(&grid))
}

fn config_json(cfg: &RunConfig, extra: Value) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    if let (Value::Object(base), Value::Object(more)) = (&mut v, extra) {
        base.extend(more);
    }
    v
}

fn artifact(
    dir: &Path,
    name: &str,
    write: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    write(&mut w)?;
    w.flush()?;
    Ok(())
}

/// 12 significant digits.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn checked_window(w: Window) -> Result<(f64, f64), CliError> {
    if !(w.0 > 0.0 && w.1 > w.0) {
        return Err(CliError::Usage(format!(
            "lambda window needs 0 < LO < HI, got {},{}",
            w.0, w.1
        )));
    }
    Ok((w.0, w.1))
}

pub fn solve(cfg: RunConfig) -> Result<(), CliError> {
    setup_threads(&cfg);
    let e = energy(&cfg)?;
    let pair = first_eigenpair(&e, &cfg.solver_config())?.require_converged()?;
    let meta = config_json(&cfg, json!({}));
    artifact(&cfg.out, "eigenfunction.csv", |w| {
        io::write_function(w, e.grid(), &pair.u, &meta)
    })?;
    artifact(&cfg.out, "iterations.csv", |w| {
        io::write_iteration_log(w, &pair.log, &meta)
    })?;
    let record = json!({
        "config": meta,
        "lambda1": pair.lambda,
        "iterations": pair.iterations,
        "residual": pair.residual,
        "energy": e.report(&pair.u)?,
    });
    artifact(&cfg.out, "solve.json", |w| writeln!(w, "{record}"))?;
    println!("{}", sig12(pair.lambda));
    Ok(())
}

pub fn spectrum(cfg: RunConfig) -> Result<(), CliError> {
    setup_threads(&cfg);
    let e = energy(&cfg)?;
    let spec = linear_spectrum(&e)?;
    let (lo, hi) = match cfg.raw.lambda_window {
        Some(w) => checked_window(w)?,
        None => (
            percentile(&spec, FIT_WINDOW.0),
            percentile(&spec, FIT_WINDOW.1),
        ),
    };
    let fit = weyl_slope(&spec, lo, hi)?;
    let meta = config_json(&cfg, json!({"lambda_window": [lo, hi]}));
    let first = spec.eigenvalues[0];
    let last = spec.eigenvalues[spec.len() - 1];
    let counts: Vec<(f64, usize)> = log_grid(first, last, COUNTING_SAMPLES)
        .into_iter()
        .map(|l| (l, counting_function(&spec, l)))
        .collect();
    artifact(&cfg.out, "spectrum.csv", |w| {
        io::write_spectrum(w, &spec, &meta)
    })?;
    artifact(&cfg.out, "counting.csv", |w| {
        io::write_counting(w, &counts, &meta)
    })?;
    if let Some(vecs) = &spec.eigenvectors {
        artifact(&cfg.out, "eigenvector_1.csv", |w| {
            io::write_function(w, e.grid(), &vecs[0], &meta)
        })?;
    }
    let record = json!({
        "fit": fit,
        "conjectured_slope": conjectured_exponent(cfg.params),
        "eigenvalues": spec.len(),
    });
    artifact(&cfg.out, "slope.json", |w| {
        writeln!(w, "{}", json!({"config": meta, "slope": record}))
    })?;
    println!("{record}");
    Ok(())
}

/// First eigenvalue of the unit cube at the same parameters and resolution.
fn unit_cube_lambda1(cfg: &RunConfig) -> Result<f64, CliError> {
    let grid = build_grid(&DomainSpec::unit_cube(cfg.params.dim()), cfg.params, cfg.n)?;
    let e = NonlocalEnergy::assemble(&grid);
    if cfg.params.is_linear() {
        return Ok(linear_spectrum(&e)?.eigenvalues[0]);
    }
    Ok(first_eigenpair(&e, &cfg.solver_config())?
        .require_converged()?
        .lambda)
}

pub fn bounds(
    cfg: RunConfig,
    spectrum: Option<PathBuf>,
    upper: Option<bool>,
) -> Result<(), CliError> {
    setup_threads(&cfg);
    let raw = &cfg.raw;
    let calibrated = raw.lambda0.is_some() && raw.r.is_some();
    let lambda0 = match raw.lambda0 {
        Some(l) => l,
        None => unit_cube_lambda1(&cfg)?,
    };
    let r = raw.r.unwrap_or(1);
    let cal = CubeCalibration::new(lambda0, r, raw.q.unwrap_or(r))?;
    let spec: Option<Spectrum> = match &spectrum {
        Some(path) => Some(io::read_spectrum(BufReader::new(File::open(path)?))?),
        None => None,
    };
    let (lo, hi) = match (raw.lambda_window, &spec) {
        (Some(w), _) => checked_window(w)?,
        (None, Some(s)) => (s.eigenvalues[0], s.eigenvalues[s.len() - 1]),
        (None, None) => (lambda0, 1e3 * lambda0),
    };
    let request = BoundRequest {
        upper,
        calibrated,
        ..BoundRequest::default()
    };
    let lambdas = log_grid(lo, hi, BOUND_SAMPLES);
    let report = bound_report(
        &cfg.domain,
        cfg.params,
        cal,
        &lambdas,
        spec.as_ref(),
        request,
    )?;
    let meta = config_json(
        &cfg,
        json!({
            "calibration": cal,
            "calibrated": calibrated,
            "spectrum": spectrum.as_ref().map(|p| p.display().to_string()),
            "lambda_window": [lo, hi],
        }),
    );
    artifact(&cfg.out, "bounds.csv", |w| {
        io::write_bounds(w, &report, &meta)
    })?;
    let summary = json!({
        "calibrated": calibrated,
        "lambda0": lambda0,
        "c1": report.c1,
        "c2": report.c2,
        "lower_exponent": report.lower_exponent,
        "conjectured_exponent": report.conjectured_exponent,
        "upper_exponent": report.upper_exponent,
        "lower_threshold": report.lower_threshold,
        "upper_threshold": report.upper_threshold,
    });
    artifact(&cfg.out, "bounds.json", |w| {
        writeln!(w, "{}", json!({"config": meta, "summary": summary}))
    })?;
    println!("{summary}");
    Ok(())
}

/// Nested chain ending at the configured domain, on a common lattice.
fn nested_chain(cfg: &RunConfig) -> Result<Vec<(DomainSpec, usize)>, CliError> {
    let n = cfg.n;
    let grid = build_grid(&cfg.domain, cfg.params, n)?;
    let h = grid.spacing();
    let k = (n / 8).max(1);
    let trim = |lo: &[f64], hi: &[f64]| -> Option<(Vec<f64>, Vec<f64>)> {
        let mut a = lo.to_vec();
        let mut b = hi.to_vec();
        for d in 0..lo.len() {
            if hi[d] - lo[d] > 2.0 * (k + 1) as f64 * h {
                a[d] += k as f64 * h;
                b[d] -= k as f64 * h;
            }
        }
        (n > 2 * k + 1).then_some((a, b))
    };
    let chain = match &cfg.domain {
        DomainSpec::Interval { a, b } => match trim(&[*a], &[*b]) {
            Some((lo, hi)) => vec![
                (DomainSpec::interval(lo[0], hi[0]), n - 2 * k),
                (cfg.domain.clone(), n),
            ],
            None => vec![(cfg.domain.clone(), n)],
        },
        DomainSpec::Box { lo, hi } => match trim(lo, hi) {
            Some((a, b)) => vec![
                (DomainSpec::Box { lo: a, hi: b }, n - 2 * k),
                (cfg.domain.clone(), n),
            ],
            None => vec![(cfg.domain.clone(), n)],
        },
        other => {
            let (lo, hi) = other.bounding_box();
            let dim = other.dim();
            let bbox = DomainSpec::Box {
                lo: lo[..dim].to_vec(),
                hi: hi[..dim].to_vec(),
            };
            let bbox = if dim == 1 {
                DomainSpec::interval(lo[0], hi[0])
            } else {
                bbox
            };
            vec![(other.clone(), n), (bbox, n)]
        }
    };
    Ok(chain)
}

pub fn check(cfg: RunConfig, names: &[String], corrupt: Option<f64>) -> Result<(), CliError> {
    for name in names {
        if !PROPERTIES.contains(&name.as_str()) {
            return Err(CliError::Usage(format!(
                "unknown property '{name}' (expected one of {})",
                PROPERTIES.join(", ")
            )));
        }
    }
    setup_threads(&cfg);
    let solver = cfg.solver_config();
    let clean = energy(&cfg)?;
    let tested = match corrupt {
        Some(f) => clean.with_corrupted_weights(f),
        None => clean.clone(),
    };
    let mut reports: Vec<PropertyReport> = Vec::new();
    for name in names {
        let report = match name.as_str() {
            "scaling" => check_scaling(
                &cfg.domain,
                cfg.params,
                cfg.raw.tau.unwrap_or(DEFAULT_TAU),
                cfg.n,
                &solver,
            )?,
            "monotonicity" => check_domain_monotonicity(&nested_chain(&cfg)?, cfg.params, &solver)?,
            "sign_change" => check_sign_change(&tested)?,
            "symmetry" => check_symmetry(&cfg.domain, cfg.params, cfg.n, &solver)?,
            "simplicity" => check_simplicity_gap(&tested, &solver, DEFAULT_GAP_TOL, RESTARTS)?,
            "poincare" => {
                let lambda1 = first_eigenpair(&clean, &solver)?
                    .require_converged()?
                    .lambda;
                check_poincare(&tested, lambda1, POINCARE_TRIALS, cfg.seed)?
            }
            _ => unreachable!("names validated above"),
        };
        println!(
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        );
        reports.push(report);
    }
    let meta = config_json(
        &cfg,
        json!({"properties": names, "corrupt_weights": corrupt}),
    );
    artifact(&cfg.out, "check.jsonl", |w| {
        writeln!(
            w,
            "{}",
            json!({"format_version": io::FORMAT_VERSION, "config": meta})
        )?;
        for r in &reports {
            writeln!(
                w,
                "{}",
                serde_json::to_string(r).expect("report serializes")
            )?;
        }
        Ok(())
    })?;
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(CliError::CheckFailed(failed));
    }
    Ok(())
}

pub fn grid_dump(cfg: RunConfig) -> Result<(), CliError> {
    setup_threads(&cfg);
    let e = energy(&cfg)?;
    let meta = config_json(&cfg, json!({}));
    artifact(&cfg.out, "grid.csv", |w| {
        io::write_grid(w, e.grid(), &e.kappa().kappa, &meta)
    })?;
    println!("{}", e.len());
    Ok(())
}
