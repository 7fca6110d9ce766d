use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractional order `s`, integrability exponent `p` and spatial dimension.
///
/// The product `s * p` appears in every kernel exponent and is cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct FracParams {
    s: f64,
    p: f64,
    dim: usize,
    sp: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    s: f64,
    p: f64,
    dim: usize,
}

impl TryFrom<RawParams> for FracParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        FracParams::new(raw.s, raw.p, raw.dim)
    }
}

impl From<FracParams> for RawParams {
    fn from(p: FracParams) -> Self {
        RawParams {
            s: p.s,
            p: p.p,
            dim: p.dim,
        }
    }
}

impl FracParams {
    pub fn new(s: f64, p: f64, dim: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParams(format!(
                "s must lie in (0,1), got {s}"
            )));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParams(format!("p must exceed 1, got {p}")));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParams(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        Ok(Self {
            s,
            p,
            dim,
            sp: s * p,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The product `s * p`.
    pub fn sp(&self) -> f64 {
        self.sp
    }

    /// Kernel exponent `N + sp`.
    pub fn kernel_exponent(&self) -> f64 {
        self.dim as f64 + self.sp
    }

    pub fn is_linear(&self) -> bool {
        self.p == 2.0
    }
}
