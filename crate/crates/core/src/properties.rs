//! Executable checks of qualitative spectral properties, each producing a
//! machine-readable [`PropertyReport`].

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::eigen::{
    first_eigenpair, first_eigenpair_from, linear_spectrum, random_start, SolverConfig,
};
use crate::energy::NonlocalEnergy;
use crate::error::{Error, Result};
use crate::mesh::{build_grid, DomainSpec, Grid};
use crate::params::FracParams;

/// Relative tolerance for identities that are exact up to rounding.
pub const SCALING_TOL: f64 = 1e-10;
/// Orbit and ray tolerance for the symmetry check, relative to `max |u|`.
/// Must stay above the solver's accuracy on eigenvectors.
pub const SYMMETRY_TOL: f64 = 1e-6;
/// Sign tolerance relative to `max |u|`.
pub const SIGN_TOL: f64 = 1e-8;
/// Slack on the discrete Poincaré inequality.
pub const POINCARE_SLACK: f64 = 1e-9;
/// Agreement of `λ₁` across random restarts.
pub const RESTART_TOL: f64 = 1e-6;
pub const DEFAULT_GAP_TOL: f64 = 1e-3;
pub const RANDOM_FUNCTIONS: usize = 20;
pub const RESTARTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub inputs: Value,
    pub measured: BTreeMap<String, Value>,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl PropertyReport {
    fn new(property: &str, inputs: Value, tolerance: f64) -> Self {
        Self {
            property: property.to_string(),
            inputs,
            measured: BTreeMap::new(),
            tolerance,
            verdict: Verdict::Inconclusive,
            notes: Vec::new(),
        }
    }

    fn measure(&mut self, key: &str, value: impl Serialize) {
        self.measured.insert(key.to_string(), json!(value));
    }

    fn decide(&mut self, pass: bool) {
        self.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn energy_inputs(e: &NonlocalEnergy, seed: u64) -> Value {
    let g = e.grid();
    json!({
        "domain": g.domain(),
        "params": g.params(),
        "resolution": g.resolution(),
        "seed": seed,
    })
}

fn random_functions(len: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Homothety: for functions transported from `Ω` to `τΩ` at the same
/// resolution, `J` scales by `τ^{N-sp}`, `I` by `τ^N` and `λ₁` by `τ^{-sp}`.
pub fn check_scaling(
    domain: &DomainSpec,
    params: FracParams,
    tau: f64,
    resolution: usize,
    cfg: &SolverConfig,
) -> Result<PropertyReport> {
    let dilated = domain.dilate(tau)?;
    let base = NonlocalEnergy::assemble(&build_grid(domain, params, resolution)?);
    let scaled = NonlocalEnergy::assemble(&build_grid(&dilated, params, resolution)?);
    let mut report = PropertyReport::new(
        "scaling",
        json!({
            "domain": domain,
            "params": params,
            "tau": tau,
            "resolution": resolution,
            "seed": cfg.seed,
        }),
        SCALING_TOL,
    );
    if base.grid().lattice() != scaled.grid().lattice() {
        report
            .notes
            .push("dilated grid has a different node lattice".into());
        report.decide(false);
        return Ok(report);
    }
    let n = params.dim() as f64;
    let j_factor = tau.powf(n - params.sp());
    let i_factor = tau.powf(n);
    let l_factor = tau.powf(-params.sp());
    let (mut j_err, mut i_err) = (0.0f64, 0.0f64);
    for u in random_functions(base.len(), RANDOM_FUNCTIONS, cfg.seed) {
        j_err = j_err.max(rel(scaled.seminorm_p(&u)? / base.seminorm_p(&u)?, j_factor));
        i_err = i_err.max(rel(scaled.lp_norm_p(&u)? / base.lp_norm_p(&u)?, i_factor));
    }
    let l0 = first_eigenpair(&base, cfg)?;
    let l1 = first_eigenpair(&scaled, cfg)?;
    let l_err = rel(l1.lambda / l0.lambda, l_factor);
    report.measure("seminorm_ratio_expected", j_factor);
    report.measure("seminorm_ratio_max_rel_err", j_err);
    report.measure("lp_ratio_max_rel_err", i_err);
    report.measure("lambda1", l0.lambda);
    report.measure("lambda1_dilated", l1.lambda);
    report.measure("lambda_ratio_rel_err", l_err);
    if !(l0.converged && l1.converged) {
        report
            .notes
            .push("first-eigenpair solve did not converge".into());
    }
    report.decide(
        j_err <= SCALING_TOL
            && i_err <= SCALING_TOL
            && l_err <= SCALING_TOL
            && l0.converged
            && l1.converged,
    );
    Ok(report)
}

fn ensure_nested(inner: &Grid, outer: &Grid) -> Result<()> {
    let h = outer.spacing();
    if (inner.spacing() - h).abs() > 1e-12 * h {
        return Err(Error::NotNested(format!(
            "spacings differ ({} vs {})",
            inner.spacing(),
            outer.spacing()
        )));
    }
    let key = |x: &[f64; 2]| [(x[0] / h).round() as i64, (x[1] / h).round() as i64];
    let outer_keys: std::collections::HashSet<[i64; 2]> = outer.nodes().iter().map(key).collect();
    for x in inner.nodes() {
        let k = key(x);
        let on_lattice = (0..inner.dim()).all(|d| (x[d] - k[d] as f64 * h).abs() <= 1e-9 * h);
        if !on_lattice || !outer_keys.contains(&k) {
            return Err(Error::NotNested(format!(
                "inner node {x:?} is not an outer node"
            )));
        }
    }
    Ok(())
}

/// Discrete domain monotonicity along a chain of nested domains, innermost
/// first: `λ₁` must be nonincreasing.
pub fn check_domain_monotonicity(
    chain: &[(DomainSpec, usize)],
    params: FracParams,
    cfg: &SolverConfig,
) -> Result<PropertyReport> {
    if chain.is_empty() {
        return Err(Error::InvalidParams(
            "monotonicity check needs at least one domain".into(),
        ));
    }
    let grids = chain
        .iter()
        .map(|(d, n)| build_grid(d, params, *n))
        .collect::<Result<Vec<_>>>()?;
    for w in grids.windows(2) {
        ensure_nested(&w[0], &w[1])?;
    }
    let mut report = PropertyReport::new(
        "monotonicity",
        json!({
            "chain": chain.iter().map(|(d, n)| json!({"domain": d, "resolution": n})).collect::<Vec<_>>(),
            "params": params,
            "seed": cfg.seed,
        }),
        0.0,
    );
    let mut lambdas = Vec::new();
    let mut converged = true;
    for g in &grids {
        let r = first_eigenpair(&NonlocalEnergy::assemble(g), cfg)?;
        converged &= r.converged;
        lambdas.push(r.lambda);
    }
    let nonincreasing = lambdas.windows(2).all(|w| w[1] <= w[0]);
    let strict: Vec<bool> = lambdas.windows(2).map(|w| w[1] < w[0]).collect();
    report.measure("lambda1", &lambdas);
    report.measure("strict", &strict);
    if !converged {
        report
            .notes
            .push("a first-eigenpair solve did not converge".into());
    }
    report.decide(nonincreasing && converged);
    Ok(report)
}

/// First eigenvector nonnegative; every higher eigenvector takes both signs.
pub fn check_sign_change(energy: &NonlocalEnergy) -> Result<PropertyReport> {
    let spec = linear_spectrum(energy)?;
    let mut report = PropertyReport::new("sign_change", energy_inputs(energy, 0), SIGN_TOL);
    let vecs = spec
        .eigenvectors
        .as_ref()
        .expect("linear spectrum carries eigenvectors");
    let extremes = |v: &[f64]| {
        let max = v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        let min = v.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        let scale = max.abs().max(min.abs());
        (min, max, scale)
    };
    let (min1, _, scale1) = extremes(&vecs[0]);
    let first_nonnegative = min1 >= -SIGN_TOL * scale1;
    let mut non_changing = Vec::new();
    for (k, v) in vecs.iter().enumerate().skip(1) {
        let (min, max, scale) = extremes(v);
        if !(max > SIGN_TOL * scale && min < -SIGN_TOL * scale) {
            non_changing.push(k + 1);
        }
    }
    report.measure("eigenvalues", spec.len());
    report.measure("first_min_over_max", min1 / scale1);
    report.measure("first_nonnegative", first_nonnegative);
    report.measure("higher_without_sign_change", &non_changing);
    if spec.len() == 1 {
        report
            .notes
            .push("single node: no higher eigenvalues".into());
    }
    report.decide(first_nonnegative && non_changing.is_empty());
    Ok(report)
}

fn max_spread<K>(groups: &BTreeMap<K, Vec<f64>>) -> f64 {
    groups
        .values()
        .map(|vals| {
            let max = vals.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            let min = vals.iter().fold(f64::INFINITY, |m, &v| m.min(v));
            max - min
        })
        .fold(0.0f64, f64::max)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Radial symmetry and monotone decrease of the positive first eigenfunction
/// on a ball, tested on lattice-symmetry orbits and lattice rays through the
/// centre.
pub fn check_symmetry(
    domain: &DomainSpec,
    params: FracParams,
    resolution: usize,
    cfg: &SolverConfig,
) -> Result<PropertyReport> {
    let DomainSpec::Ball { center, .. } = domain else {
        return Err(Error::NotABall);
    };
    let grid = build_grid(domain, params, resolution)?;
    let h = grid.spacing();
    let origin = grid.origin();
    let dim = grid.dim();
    let mut kc = [0i64; 2];
    for d in 0..dim {
        let k = ((center[d] - origin[d]) / h).round();
        if (origin[d] + k * h - center[d]).abs() > 1e-9 * h {
            return Err(Error::InvalidDomain(
                "ball centre is not a lattice node; use an even resolution".into(),
            ));
        }
        kc[d] = k as i64;
    }
    let Some(centre_idx) = grid.index_of(kc) else {
        return Err(Error::InvalidDomain(
            "ball centre is not an interior node".into(),
        ));
    };

    let energy = NonlocalEnergy::assemble(&grid);
    let pair = first_eigenpair(&energy, cfg)?;
    let u = pair.u.values();
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let offsets: Vec<[i64; 2]> = grid
        .lattice()
        .iter()
        .map(|l| [l[0] - kc[0], l[1] - kc[1]])
        .collect();
    let mut orbits: BTreeMap<(i64, i64), Vec<f64>> = BTreeMap::new();
    let mut shells: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for (o, &v) in offsets.iter().zip(u) {
        let (a, b) = (o[0].abs(), o[1].abs());
        orbits.entry((a.min(b), a.max(b))).or_default().push(v);
        shells.entry(a * a + b * b).or_default().push(v);
    }
    let orbit_err = max_spread(&orbits) / scale;
    let shell_err = max_spread(&shells) / scale;

    // Rays through the centre, indexed by primitive direction.
    let mut rays: BTreeMap<[i64; 2], Vec<(i64, f64)>> = BTreeMap::new();
    for (o, &v) in offsets.iter().zip(u) {
        if *o == [0, 0] {
            continue;
        }
        let g = gcd(o[0], o[1]);
        rays.entry([o[0] / g, o[1] / g]).or_default().push((g, v));
    }
    let centre_value = u[centre_idx];
    let mut ray_violation = f64::NEG_INFINITY;
    let mut negated_violation = f64::NEG_INFINITY;
    for points in rays.values_mut() {
        points.sort_by_key(|p| p.0);
        let mut prev = centre_value;
        for &(_, v) in points.iter() {
            ray_violation = ray_violation.max(v - prev);
            negated_violation = negated_violation.max((-prev) - (-v));
            prev = v;
        }
    }
    let ray_violation = ray_violation.max(0.0) / scale;
    let negated_increasing = negated_violation.max(0.0) / scale <= SYMMETRY_TOL;

    let mut report = PropertyReport::new(
        "symmetry",
        json!({"domain": domain, "params": params, "resolution": resolution, "seed": cfg.seed}),
        SYMMETRY_TOL,
    );
    report.measure("nodes", grid.len());
    report.measure("lambda1", pair.lambda);
    report.measure("orbit_max_rel_spread", orbit_err);
    report.measure("equidistant_max_rel_spread", shell_err);
    report.measure("ray_max_rel_increase", ray_violation);
    report.measure("rays", rays.len());
    report.measure("negated_radially_increasing", negated_increasing);
    if shell_err > SYMMETRY_TOL {
        report.notes.push(
            "equidistant nodes outside a common lattice orbit differ (staircase boundary)".into(),
        );
    }
    if !pair.converged {
        report
            .notes
            .push("first-eigenpair solve did not converge".into());
    }
    report.decide(orbit_err <= SYMMETRY_TOL && ray_violation <= SYMMETRY_TOL && pair.converged);
    Ok(report)
}

/// Positive gap `λ₂ - λ₁` for `p = 2` and agreement of `λ₁` across random
/// restarts of the nonlinear solver.
pub fn check_simplicity_gap(
    energy: &NonlocalEnergy,
    cfg: &SolverConfig,
    gap_tol: f64,
    restarts: usize,
) -> Result<PropertyReport> {
    let spec = linear_spectrum(energy)?;
    let mut report = PropertyReport::new("simplicity", energy_inputs(energy, cfg.seed), gap_tol);
    let lambda1 = spec.eigenvalues[0];
    let gap = spec.eigenvalues.get(1).map(|l2| (l2 - lambda1) / lambda1);

    let mut found = Vec::with_capacity(restarts);
    for k in 0..restarts {
        let init = random_start(energy.len(), cfg.seed.wrapping_add(k as u64));
        found.push(first_eigenpair_from(energy, cfg, &init)?.lambda);
    }
    let lo = found.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = found.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = if found.is_empty() {
        0.0
    } else {
        (hi - lo) / lo
    };
    let pencil_err = if found.is_empty() {
        0.0
    } else {
        rel(lo, lambda1)
    };

    report.measure("lambda1", lambda1);
    report.measure("relative_gap", gap);
    report.measure("restart_lambdas", &found);
    report.measure("restart_rel_spread", spread);
    report.measure("restart_vs_pencil_rel_err", pencil_err);
    let restarts_agree = spread <= RESTART_TOL && pencil_err <= RESTART_TOL;
    report.verdict = match gap {
        None => {
            report
                .notes
                .push("single node: no second eigenvalue".into());
            if restarts_agree {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        }
        Some(g) if g <= 0.0 || !restarts_agree => Verdict::Fail,
        Some(g) if g <= gap_tol => {
            report.notes.push(format!(
                "near-degenerate: relative gap {g:e} below {gap_tol:e}"
            ));
            Verdict::Inconclusive
        }
        Some(_) => Verdict::Pass,
    };
    Ok(report)
}

/// Discrete Poincaré inequality `λ₁ I(u) ≤ J(u)` on random samples and the zero
/// function.
pub fn check_poincare(
    energy: &NonlocalEnergy,
    lambda1: f64,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport> {
    let mut report = PropertyReport::new("poincare", energy_inputs(energy, seed), POINCARE_SLACK);
    let zero = vec![0.0; energy.len()];
    let mut ok = energy.lp_norm_p(&zero)? * lambda1 <= energy.seminorm_p(&zero)?;
    let mut violations = 0usize;
    let mut min_ratio = f64::INFINITY;
    for u in random_functions(energy.len(), trials, seed) {
        let j = energy.seminorm_p(&u)?;
        let i = energy.lp_norm_p(&u)?;
        if i * lambda1 > j * (1.0 + POINCARE_SLACK) {
            violations += 1;
        }
        min_ratio = min_ratio.min(j / (lambda1 * i));
    }
    ok &= violations == 0;
    report.measure("lambda1", lambda1);
    report.measure("trials", trials);
    report.measure("violations", violations);
    report.measure("min_rayleigh_over_lambda1", min_ratio);
    report.decide(ok);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_energy(s: f64, p: f64, n: usize) -> NonlocalEnergy {
        let params = FracParams::new(s, p, 1).unwrap();
        NonlocalEnergy::assemble(&build_grid(&DomainSpec::interval(0.0, 1.0), params, n).unwrap())
    }

    #[test]
    fn scaling_trivial_cases() {
        let cfg = SolverConfig::default();
        let prm = FracParams::new(0.5, 2.0, 1).unwrap();
        let r = check_scaling(&DomainSpec::interval(0.0, 1.0), prm, 3.0, 16, &cfg).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.measured["seminorm_ratio_expected"], json!(1.0));
        let r = check_scaling(&DomainSpec::interval(0.0, 1.0), prm, 1.0, 16, &cfg).unwrap();
        assert!(r.passed());
        assert_eq!(r.measured["lambda_ratio_rel_err"], json!(0.0));
    }

    #[test]
    fn scaling_two_dimensional_ratio() {
        let prm = FracParams::new(0.5, 3.0, 2).unwrap();
        let r = check_scaling(
            &DomainSpec::unit_cube(2),
            prm,
            2.0,
            6,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(r.passed(), "{r:?}");
        let expected = r.measured["seminorm_ratio_expected"].as_f64().unwrap();
        assert!((expected - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn monotonicity_errors_and_equality() {
        let prm = FracParams::new(0.5, 2.0, 1).unwrap();
        let cfg = SolverConfig::default();
        let d = DomainSpec::interval(0.0, 1.0);
        let r = check_domain_monotonicity(&[(d.clone(), 16), (d.clone(), 16)], prm, &cfg).unwrap();
        assert!(r.passed());
        assert_eq!(r.measured["strict"], json!([false]));
        let err =
            check_domain_monotonicity(&[(DomainSpec::interval(0.0, 0.5), 7), (d, 16)], prm, &cfg);
        assert!(matches!(err, Err(Error::NotNested(_))));
    }

    #[test]
    fn sign_change_single_node_is_vacuous() {
        let r = check_sign_change(&interval_energy(0.5, 2.0, 2)).unwrap();
        assert!(r.passed());
        assert!(matches!(
            check_sign_change(&interval_energy(0.5, 3.0, 8)),
            Err(Error::WrongExponent(_))
        ));
    }

    #[test]
    fn symmetry_requires_ball_and_centre() {
        let prm = FracParams::new(0.5, 2.0, 1).unwrap();
        let cfg = SolverConfig::default();
        assert_eq!(
            check_symmetry(&DomainSpec::interval(-1.0, 1.0), prm, 8, &cfg).unwrap_err(),
            Error::NotABall
        );
        assert!(matches!(
            check_symmetry(&DomainSpec::ball(&[0.0], 1.0), prm, 7, &cfg),
            Err(Error::InvalidDomain(_))
        ));
    }

    #[test]
    fn poincare_with_eigenfunction_and_corruption() {
        let e = interval_energy(0.5, 2.0, 16);
        let pair = first_eigenpair(&e, &SolverConfig::default()).unwrap();
        let ratio = e.rayleigh(&pair.u).unwrap() / pair.lambda;
        assert!((ratio - 1.0).abs() < 1e-12);
        let r = check_poincare(&e, pair.lambda, 200, 3).unwrap();
        assert!(r.passed());
        let bad = check_poincare(&e.with_corrupted_weights(0.01), pair.lambda, 200, 3).unwrap();
        assert_eq!(bad.verdict, Verdict::Fail);
    }

    #[test]
    fn report_serializes_as_one_json_object() {
        let r = check_sign_change(&interval_energy(0.5, 2.0, 8)).unwrap();
        let line = serde_json::to_string(&r).unwrap();
        assert!(!line.contains('\n'));
        let back: PropertyReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back.verdict, Verdict::Pass);
    }
}
