//! Explicit two-sided counting-function bounds.
//!
//! The lower bound `N(λ) ≥ C₁ |Ω|^{sp/(Np-N+sp)} λ^{N/(Np-N+sp)}` and, for
//! `sp > N`, the upper bound `N(λ) ≤ C₂ |Ω|^{sp/(sp-N)} λ^{N/(sp-N)}` are built
//! from a unit-cube calibration `(λ₀, r, q)`: the genus `r` of the sublevel set
//! at `λ₀` and the co-genus `q` of the superlevel set. Neither integer can be
//! computed, so both are inputs.

use serde::{Deserialize, Serialize};

use crate::eigen::{counting_function, Spectrum};
use crate::error::{Error, Result};
use crate::mesh::DomainSpec;
use crate::params::FracParams;

const FLOOR_SLACK: f64 = 1e-12;

/// `floor` that treats values within rounding of an integer as that integer.
fn robust_floor(x: f64) -> f64 {
    (x + FLOOR_SLACK * x.abs().max(1.0)).floor()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubeCalibration {
    pub lambda0: f64,
    pub r: u64,
    pub q: u64,
}

impl CubeCalibration {
    pub fn new(lambda0: f64, r: u64, q: u64) -> Result<Self> {
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "lambda0 must be positive, got {lambda0}"
            )));
        }
        if r < 1 || q < r {
            return Err(Error::InvalidParams(format!(
                "calibration needs 1 <= r <= q, got r={r}, q={q}"
            )));
        }
        Ok(Self { lambda0, r, q })
    }
}

/// Cube side `(λ₀/λ')^{1/sp}` at which the rescaled unit-cube level matches `λ'`.
pub fn homothety_factor(lambda0: f64, lambda_prime: f64, params: FracParams) -> Result<f64> {
    if !(lambda_prime > lambda0) {
        return Err(Error::OrderViolation {
            lambda0,
            lambda_prime,
        });
    }
    Ok((lambda0 / lambda_prime).powf(1.0 / params.sp()))
}

/// Number of copies of the cube of side `a_prime` packed in the cube of side
/// `a`: `floor(a/a')^N`.
pub fn packing_count(a: f64, a_prime: f64, dim: usize) -> Result<u64> {
    if !(a_prime > 0.0) || a_prime > a {
        return Err(Error::SizeOrder {
            small: a_prime,
            large: a,
        });
    }
    Ok((robust_floor(a / a_prime) as u64).pow(dim as u32))
}

/// Number of copies of the cube of side `a_prime` covering the cube of side
/// `b`: `(floor(b/a') + 1)^N`.
pub fn covering_count(b: f64, a_prime: f64, dim: usize) -> Result<u64> {
    if !(a_prime > 0.0) || a_prime > b {
        return Err(Error::SizeOrder {
            small: a_prime,
            large: b,
        });
    }
    Ok((robust_floor(b / a_prime) as u64 + 1).pow(dim as u32))
}

/// `N / (Np - N + sp)`
pub fn lower_exponent(params: FracParams) -> f64 {
    let n = params.dim() as f64;
    n / (n * params.p() - n + params.sp())
}

/// `N / sp`
pub fn conjectured_exponent(params: FracParams) -> f64 {
    params.dim() as f64 / params.sp()
}

/// `N / (sp - N)`, defined only for `sp > N`.
pub fn upper_exponent(params: FracParams) -> Result<f64> {
    let n = params.dim() as f64;
    if params.sp() <= n {
        return Err(Error::SubcriticalExponent {
            sp: params.sp(),
            dim: params.dim(),
        });
    }
    Ok(n / (params.sp() - n))
}

/// `C₁ = 2^{-(N²p - N² + Nsp + sp)/(Np - N + sp)} r λ₀^{-N/(Np - N + sp)}`
pub fn constant_c1(cal: &CubeCalibration, params: FracParams) -> f64 {
    let n = params.dim() as f64;
    let (p, sp) = (params.p(), params.sp());
    let denom = n * p - n + sp;
    let two_exp = -(n * n * p - n * n + n * sp + sp) / denom;
    2f64.powf(two_exp) * cal.r as f64 * cal.lambda0.powf(-n / denom)
}

/// `C₂ = 2^{(Nsp + sp + N)/(sp - N)} q λ₀^{-N/(sp - N)}`
pub fn constant_c2(cal: &CubeCalibration, params: FracParams) -> Result<f64> {
    let n = params.dim() as f64;
    let sp = params.sp();
    if sp <= n {
        return Err(Error::SubcriticalExponent {
            sp,
            dim: params.dim(),
        });
    }
    let denom = sp - n;
    Ok(2f64.powf((n * sp + sp + n) / denom) * cal.q as f64 * cal.lambda0.powf(-n / denom))
}

/// `count` disjoint cubes of side `side` inside the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Packing {
    pub count: u64,
    pub side: f64,
    /// `count * side^N / |Ω|`; at least 1/2 for a usable packing.
    pub ratio: f64,
}

/// `count` disjoint cubes of side `side` whose union contains the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub count: u64,
    pub side: f64,
    /// `count * side^N / |Ω|`; at most 2 for a usable covering.
    pub ratio: f64,
}

fn cube_lattice(domain: &DomainSpec, granularity: usize) -> (f64, [f64; 2], [usize; 2]) {
    let (lo, hi) = domain.bounding_box();
    let dim = domain.dim();
    let extent = (0..dim).map(|d| hi[d] - lo[d]).fold(0.0, f64::max);
    let side = extent / granularity as f64;
    let mut counts = [1usize; 2];
    for d in 0..dim {
        counts[d] = ((hi[d] - lo[d]) / side - FLOOR_SLACK).ceil() as usize;
    }
    (side, lo, counts)
}

/// Classifies each lattice cube of the bounding box as fully inside the domain
/// or meeting it. The domain's shape enters through point-membership tests at
/// cube corners and centres.
fn classify_cubes(domain: &DomainSpec, granularity: usize) -> (f64, u64, u64) {
    let (side, lo, counts) = cube_lattice(domain, granularity);
    let dim = domain.dim();
    let (mut inside, mut meeting) = (0u64, 0u64);
    for i in 0..counts[0] {
        for j in 0..counts[1] {
            let corner = [lo[0] + i as f64 * side, lo[1] + j as f64 * side];
            let (full, touches) = match domain {
                DomainSpec::Ball { center, radius } => {
                    // Farthest and nearest points of the cube from the centre.
                    let (mut far, mut near) = (0.0, 0.0);
                    for d in 0..dim {
                        let (a, b) = (corner[d] - center[d], corner[d] + side - center[d]);
                        far += a.abs().max(b.abs()).powi(2);
                        if a > 0.0 {
                            near += a * a;
                        } else if b < 0.0 {
                            near += b * b;
                        }
                    }
                    (far.sqrt() <= *radius, near.sqrt() < *radius)
                }
                _ => {
                    let mut centre = corner;
                    for c in centre.iter_mut().take(dim) {
                        *c += 0.5 * side;
                    }
                    let hit = domain.contains_strict(&centre, 0.0);
                    (hit, hit)
                }
            };
            if full {
                inside += 1;
            }
            if touches {
                meeting += 1;
            }
        }
    }
    (side, inside, meeting)
}

/// Cube packing for the lower bound.
///
/// Boxes, intervals and cube unions are tiled exactly by cubes of side
/// `extent / granularity` when their sides are commensurate; balls use the
/// cubes of that lattice lying entirely inside.
pub fn inscribed_packing(domain: &DomainSpec, granularity: usize) -> Result<Packing> {
    domain.validate()?;
    let g = granularity.max(1);
    let (side, count) = match domain {
        DomainSpec::CubeUnion { side, corners } => {
            let a = side / g as f64;
            (
                a,
                corners.len() as u64 * (g as u64).pow(domain.dim() as u32),
            )
        }
        _ => {
            let (side, inside, _) = classify_cubes(domain, g);
            (side, inside)
        }
    };
    if count == 0 {
        return Err(Error::InvalidDomain(format!(
            "no cube of side {side} fits inside the domain; increase the granularity"
        )));
    }
    let ratio = count as f64 * side.powi(domain.dim() as i32) / domain.measure();
    Ok(Packing { count, side, ratio })
}

/// Cube covering for the upper bound.
pub fn circumscribed_covering(domain: &DomainSpec, granularity: usize) -> Result<Covering> {
    domain.validate()?;
    let g = granularity.max(1);
    let (side, count) = match domain {
        DomainSpec::CubeUnion { side, corners } => {
            let a = side / g as f64;
            (
                a,
                corners.len() as u64 * (g as u64).pow(domain.dim() as u32),
            )
        }
        _ => {
            let (side, _, meeting) = classify_cubes(domain, g);
            (side, meeting)
        }
    };
    let ratio = count as f64 * side.powi(domain.dim() as i32) / domain.measure();
    Ok(Covering { count, side, ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    /// Whether `λ` lies in the range where the bound is proven.
    pub valid: bool,
}

/// Level from which the lower bound holds: `λ₀ n^{p-1} a^{-sp}`.
pub fn lower_threshold(cal: &CubeCalibration, params: FracParams, packing: &Packing) -> f64 {
    cal.lambda0 * (packing.count as f64).powf(params.p() - 1.0) * packing.side.powf(-params.sp())
}

/// Level from which the upper bound holds: `λ₀ / (2^{N+1} h b^{sp})`.
pub fn upper_threshold(cal: &CubeCalibration, params: FracParams, covering: &Covering) -> f64 {
    let n = params.dim() as i32;
    cal.lambda0 / (2f64.powi(n + 1) * covering.count as f64 * covering.side.powf(params.sp()))
}

pub fn lower_bound(
    cal: &CubeCalibration,
    params: FracParams,
    volume: f64,
    lambda: f64,
    packing: &Packing,
) -> BoundValue {
    let e = lower_exponent(params);
    let n = params.dim() as f64;
    let vol_exp = params.sp() / (n * params.p() - n + params.sp());
    BoundValue {
        value: constant_c1(cal, params) * volume.powf(vol_exp) * lambda.powf(e),
        valid: lambda >= lower_threshold(cal, params, packing),
    }
}

pub fn upper_bound(
    cal: &CubeCalibration,
    params: FracParams,
    volume: f64,
    lambda: f64,
    covering: &Covering,
) -> Result<BoundValue> {
    let c2 = constant_c2(cal, params)?;
    let e = upper_exponent(params)?;
    let vol_exp = params.sp() / (params.sp() - params.dim() as f64);
    Ok(BoundValue {
        value: c2 * volume.powf(vol_exp) * lambda.powf(e),
        valid: lambda >= upper_threshold(cal, params, covering),
    })
}

/// Largest `λ_k` compatible with the lower bound:
/// `λ_k ≤ C₁^{-(Np-N+sp)/N} |Ω|^{-sp/N} k^{(Np-N+sp)/N}`.
pub fn eigenvalue_ceiling(cal: &CubeCalibration, params: FracParams, volume: f64, k: f64) -> f64 {
    let inv = 1.0 / lower_exponent(params);
    let n = params.dim() as f64;
    constant_c1(cal, params).powf(-inv) * volume.powf(-params.sp() / n) * k.powf(inv)
}

/// Smallest `λ_k` compatible with the upper bound:
/// `λ_k ≥ C₂^{-(sp-N)/N} |Ω|^{-sp/N} k^{(sp-N)/N}`.
pub fn eigenvalue_floor(
    cal: &CubeCalibration,
    params: FracParams,
    volume: f64,
    k: f64,
) -> Result<f64> {
    let inv = 1.0 / upper_exponent(params)?;
    let n = params.dim() as f64;
    Ok(constant_c2(cal, params)?.powf(-inv) * volume.powf(-params.sp() / n) * k.powf(inv))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub lambda: f64,
    pub lower: f64,
    pub lower_valid: bool,
    pub upper: Option<f64>,
    pub upper_valid: Option<bool>,
    pub measured: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub calibration: CubeCalibration,
    /// False when `r`, `q` (and possibly `λ₀`) are defaults rather than known.
    pub calibrated: bool,
    pub volume: f64,
    pub c1: f64,
    pub c2: Option<f64>,
    pub lower_exponent: f64,
    pub conjectured_exponent: f64,
    pub upper_exponent: Option<f64>,
    pub packing: Packing,
    pub covering: Option<Covering>,
    pub lower_threshold: f64,
    pub upper_threshold: Option<f64>,
    pub samples: Vec<BoundSample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRequest {
    pub granularity: usize,
    /// `None` includes the upper bound exactly when `sp > N`; `Some(true)`
    /// with `sp <= N` is an error.
    pub upper: Option<bool>,
    pub calibrated: bool,
}

impl Default for BoundRequest {
    fn default() -> Self {
        Self {
            granularity: 2,
            upper: None,
            calibrated: false,
        }
    }
}

/// Evaluates both bounds at each `λ` and, when a spectrum is given, the
/// measured counting function alongside.
pub fn bound_report(
    domain: &DomainSpec,
    params: FracParams,
    cal: CubeCalibration,
    lambdas: &[f64],
    spectrum: Option<&Spectrum>,
    request: BoundRequest,
) -> Result<BoundReport> {
    let volume = domain.measure();
    let supercritical = params.sp() > params.dim() as f64;
    let with_upper = match request.upper {
        Some(true) if !supercritical => {
            return Err(Error::SubcriticalExponent {
                sp: params.sp(),
                dim: params.dim(),
            })
        }
        Some(flag) => flag,
        None => supercritical,
    };
    let packing = inscribed_packing(domain, request.granularity)?;
    let covering = if with_upper {
        Some(circumscribed_covering(domain, request.granularity)?)
    } else {
        None
    };
    let samples = lambdas
        .iter()
        .map(|&lambda| -> Result<BoundSample> {
            let lower = lower_bound(&cal, params, volume, lambda, &packing);
            let upper = covering
                .as_ref()
                .map(|cov| upper_bound(&cal, params, volume, lambda, cov))
                .transpose()?;
            Ok(BoundSample {
                lambda,
                lower: lower.value,
                lower_valid: lower.valid,
                upper: upper.map(|u| u.value),
                upper_valid: upper.map(|u| u.valid),
                measured: spectrum.map(|s| counting_function(s, lambda)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        calibration: cal,
        calibrated: request.calibrated,
        volume,
        c1: constant_c1(&cal, params),
        c2: if with_upper {
            Some(constant_c2(&cal, params)?)
        } else {
            None
        },
        lower_exponent: lower_exponent(params),
        conjectured_exponent: conjectured_exponent(params),
        upper_exponent: if with_upper {
            Some(upper_exponent(params)?)
        } else {
            None
        },
        packing,
        covering,
        lower_threshold: lower_threshold(&cal, params, &packing),
        upper_threshold: covering.as_ref().map(|c| upper_threshold(&cal, params, c)),
        samples,
    })
}

/// `count` points spaced geometrically between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}
