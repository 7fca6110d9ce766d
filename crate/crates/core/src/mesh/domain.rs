use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in one or two dimensions. One-dimensional points keep `0.0` in the
/// second slot.
pub type Point = [f64; 2];

/// Geometric description of a bounded domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Interval {
        a: f64,
        b: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Congruent axis-aligned cubes given by their lower corners.
    CubeUnion {
        side: f64,
        corners: Vec<Vec<f64>>,
    },
}

impl DomainSpec {
    pub fn interval(a: f64, b: f64) -> Self {
        DomainSpec::Interval { a, b }
    }

    pub fn unit_cube(dim: usize) -> Self {
        match dim {
            1 => DomainSpec::interval(0.0, 1.0),
            _ => DomainSpec::Box {
                lo: vec![0.0; dim],
                hi: vec![1.0; dim],
            },
        }
    }

    pub fn ball(center: &[f64], radius: f64) -> Self {
        DomainSpec::Ball {
            center: center.to_vec(),
            radius,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Box { lo, .. } => lo.len(),
            DomainSpec::Ball { center, .. } => center.len(),
            DomainSpec::CubeUnion { corners, .. } => corners.first().map_or(0, Vec::len),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDomain(msg));
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            DomainSpec::Interval { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return bad(format!("interval requires a < b, got ({a}, {b})"));
                }
            }
            DomainSpec::Box { lo, hi } => {
                if lo.len() != hi.len() || !(1..=2).contains(&lo.len()) {
                    return bad("box corners must share dimension 1 or 2".into());
                }
                if !finite(lo) || !finite(hi) || lo.iter().zip(hi).any(|(l, h)| l >= h) {
                    return bad(format!(
                        "box requires lo < hi on every axis, got {lo:?}, {hi:?}"
                    ));
                }
            }
            DomainSpec::Ball { center, radius } => {
                if !(1..=2).contains(&center.len()) || !finite(center) {
                    return bad("ball center must be a finite point in 1 or 2 dimensions".into());
                }
                if !(*radius > 0.0 && radius.is_finite()) {
                    return bad(format!("ball radius must be positive, got {radius}"));
                }
            }
            DomainSpec::CubeUnion { side, corners } => {
                if corners.is_empty() {
                    return bad("cube union needs at least one cube".into());
                }
                if !(*side > 0.0 && side.is_finite()) {
                    return bad(format!("cube side must be positive, got {side}"));
                }
                let dim = corners[0].len();
                if !(1..=2).contains(&dim) || corners.iter().any(|c| c.len() != dim || !finite(c)) {
                    return bad("cube corners must share dimension 1 or 2".into());
                }
                let slack = 1e-12 * side;
                for (i, ci) in corners.iter().enumerate() {
                    for cj in &corners[i + 1..] {
                        if ci.iter().zip(cj).all(|(x, y)| (x - y).abs() < side - slack) {
                            return bad(format!("cubes at {ci:?} and {cj:?} overlap"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        match self {
            DomainSpec::Interval { a, b } => {
                lo[0] = *a;
                hi[0] = *b;
            }
            DomainSpec::Box { lo: l, hi: h } => {
                lo[..l.len()].copy_from_slice(l);
                hi[..h.len()].copy_from_slice(h);
            }
            DomainSpec::Ball { center, radius } => {
                for (d, c) in center.iter().enumerate() {
                    lo[d] = c - radius;
                    hi[d] = c + radius;
                }
            }
            DomainSpec::CubeUnion { side, corners } => {
                let dim = self.dim();
                for d in 0..dim {
                    lo[d] = corners.iter().map(|c| c[d]).fold(f64::INFINITY, f64::min);
                    hi[d] = corners
                        .iter()
                        .map(|c| c[d] + side)
                        .fold(f64::NEG_INFINITY, f64::max);
                }
            }
        }
        (lo, hi)
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> f64 {
        match self {
            DomainSpec::Interval { a, b } => b - a,
            DomainSpec::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
            DomainSpec::Ball { center, radius } => match center.len() {
                1 => 2.0 * radius,
                _ => PI * radius * radius,
            },
            DomainSpec::CubeUnion { side, corners } => {
                corners.len() as f64 * side.powi(self.dim() as i32)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            DomainSpec::Ball { radius, .. } => 2.0 * radius,
            _ => {
                let (lo, hi) = self.bounding_box();
                (0..self.dim())
                    .map(|d| (hi[d] - lo[d]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    /// Whether `x` lies in the domain at distance more than `eps` from its boundary.
    ///
    /// For cube unions the domain is the interior of the union of the closed
    /// cubes, so shared faces between adjacent cubes count as interior.
    pub fn contains_strict(&self, x: &Point, eps: f64) -> bool {
        let dim = self.dim();
        match self {
            DomainSpec::Interval { a, b } => x[0] > a + eps && x[0] < b - eps,
            DomainSpec::Box { lo, hi } => {
                (0..dim).all(|d| x[d] > lo[d] + eps && x[d] < hi[d] - eps)
            }
            DomainSpec::Ball { center, radius } => {
                let r2: f64 = (0..dim).map(|d| (x[d] - center[d]).powi(2)).sum();
                r2.sqrt() < radius - eps
            }
            DomainSpec::CubeUnion { side, corners } => {
                // Every closed orthant around x must fit inside some cube.
                (0..1usize << dim).all(|mask| {
                    corners.iter().any(|c| {
                        (0..dim).all(|d| {
                            let (lo, hi) = (c[d], c[d] + side);
                            if mask >> d & 1 == 0 {
                                x[d] >= lo - eps && x[d] < hi - eps
                            } else {
                                x[d] > lo + eps && x[d] <= hi + eps
                            }
                        })
                    })
                })
            }
        }
    }

    /// The homothetic image `tau * domain`.
    pub fn dilate(&self, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::NonpositiveScale(tau));
        }
        let scale = |v: &[f64]| v.iter().map(|x| x * tau).collect::<Vec<_>>();
        Ok(match self {
            DomainSpec::Interval { a, b } => DomainSpec::Interval {
                a: a * tau,
                b: b * tau,
            },
            DomainSpec::Box { lo, hi } => DomainSpec::Box {
                lo: scale(lo),
                hi: scale(hi),
            },
            DomainSpec::Ball { center, radius } => DomainSpec::Ball {
                center: scale(center),
                radius: radius * tau,
            },
            DomainSpec::CubeUnion { side, corners } => DomainSpec::CubeUnion {
                side: side * tau,
                corners: corners.iter().map(|c| scale(c)).collect(),
            },
        })
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, DomainSpec::Ball { .. })
    }
}

/// Compact textual form used on the command line:
///
/// * `interval:A,B`
/// * `box:X0,Y0;X1,Y1` (lower then upper corner; 1D boxes take one coordinate)
/// * `ball:CX,CY;R`
/// * `cubes:SIDE;X0,Y0;X1,Y1;...` (lower corners)
impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDomain(format!("cannot parse domain '{s}'"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let nums = |t: &str| -> Result<Vec<f64>> {
            t.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        let parts: Vec<&str> = rest.split(';').collect();
        let domain = match kind.trim() {
            "interval" => {
                let v = nums(rest)?;
                if v.len() != 2 {
                    return Err(bad());
                }
                DomainSpec::Interval { a: v[0], b: v[1] }
            }
            "box" => {
                if parts.len() != 2 {
                    return Err(bad());
                }
                DomainSpec::Box {
                    lo: nums(parts[0])?,
                    hi: nums(parts[1])?,
                }
            }
            "ball" => {
                if parts.len() != 2 {
                    return Err(bad());
                }
                let r = nums(parts[1])?;
                if r.len() != 1 {
                    return Err(bad());
                }
                DomainSpec::Ball {
                    center: nums(parts[0])?,
                    radius: r[0],
                }
            }
            "cubes" => {
                if parts.len() < 2 {
                    return Err(bad());
                }
                let side = nums(parts[0])?;
                if side.len() != 1 {
                    return Err(bad());
                }
                let corners = parts[1..]
                    .iter()
                    .map(|p| nums(p))
                    .collect::<Result<Vec<_>>>()?;
                DomainSpec::CubeUnion {
                    side: side[0],
                    corners,
                }
            }
            _ => return Err(bad()),
        };
        domain.validate()?;
        Ok(domain)
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            DomainSpec::Interval { a, b } => write!(f, "interval:{a},{b}"),
            DomainSpec::Box { lo, hi } => write!(f, "box:{};{}", join(lo), join(hi)),
            DomainSpec::Ball { center, radius } => write!(f, "ball:{};{radius}", join(center)),
            DomainSpec::CubeUnion { side, corners } => {
                write!(f, "cubes:{side}")?;
                for c in corners {
                    write!(f, ";{}", join(c))?;
                }
                Ok(())
            }
        }
    }
}
