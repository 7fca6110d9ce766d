//! Discrete Gagliardo energy `J`, the `L^p` functional `I`, their quotient and
//! the energy gradient.
//!
//! On a grid with interior nodes `x_i` and spacing `h`,
//!
//! ```text
//! J(u) = Σ_{i≠j} w_ij |u_i - u_j|^p + 2 Σ_i h^N κ_i |u_i|^p,   w_ij = h^{2N} / |x_i - x_j|^{N+sp}
//! I(u) = h^N Σ_i |u_i|^p
//! ```
//!
//! where `κ` is the complement potential. Every term scales monomially under
//! dilation of the domain, so the homothety identities hold exactly.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mesh::{complement_potential_with, ComplementPotential, Grid, PotentialOptions};
use crate::params::FracParams;

/// Nodal values of a function on the interior lattice; zero everywhere else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscreteFunction(Vec<f64>);

impl DiscreteFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(
                "function values must be finite".into(),
            ));
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|v| c * v).collect())
    }
}

impl Deref for DiscreteFunction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for DiscreteFunction {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AssemblyOptions {
    pub potential: PotentialOptions,
    pub execution: Execution,
}

/// `|t|^p`
#[inline]
pub(crate) fn abs_pow(t: f64, p: f64) -> f64 {
    if p == 2.0 {
        t * t
    } else {
        t.abs().powf(p)
    }
}

/// `|t|^{p-2} t`, extended by zero at `t = 0`.
#[inline]
pub(crate) fn signed_pow(t: f64, p: f64) -> f64 {
    if p == 2.0 {
        t
    } else if t == 0.0 {
        0.0
    } else {
        t.abs().powf(p - 2.0) * t
    }
}

/// Pairwise weights and complement potential for one grid.
#[derive(Debug, Clone)]
pub struct NonlocalEnergy {
    grid: Grid,
    /// Upper triangle of `w`, row-major, `i < j`.
    weights: Vec<f64>,
    kappa: ComplementPotential,
    execution: Execution,
}

impl NonlocalEnergy {
    pub fn assemble(grid: &Grid) -> Self {
        Self::assemble_with(grid, AssemblyOptions::default())
            .expect("default assembly options are valid")
    }

    pub fn assemble_with(grid: &Grid, opts: AssemblyOptions) -> Result<Self> {
        let kappa = complement_potential_with(grid, opts.potential, opts.execution)?;
        let m = grid.len();
        let params = grid.params();
        let dim = params.dim() as f64;
        // w_ij = h^{2N} / (h |Δk|)^{N+sp} = h^{N-sp} |Δk|^{-N-sp}
        let scale = grid.spacing().powf(dim - params.sp());
        let half_exp = -0.5 * params.kernel_exponent();
        let rows = opts.execution.map_indices(m, |i| {
            ((i + 1)..m)
                .map(|j| scale * (grid.lattice_distance2(i, j) as f64).powf(half_exp))
                .collect::<Vec<_>>()
        });
        let weights = rows.concat();
        Ok(Self {
            grid: grid.clone(),
            weights,
            kappa,
            execution: opts.execution,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> FracParams {
        self.grid.params()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn kappa(&self) -> &ComplementPotential {
        &self.kappa
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    #[inline]
    fn packed(&self, i: usize, j: usize) -> usize {
        let m = self.len();
        i * (2 * m - i - 1) / 2 + (j - i - 1)
    }

    /// Weight `w_ij` for `i != j`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        assert_ne!(i, j, "self-pair weights are not defined");
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.weights[self.packed(a, b)]
    }

    /// Test hook: a copy whose weights and potential are multiplied by `factor`.
    pub fn with_corrupted_weights(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.weights.iter_mut().for_each(|w| *w *= factor);
        out.kappa.kappa.iter_mut().for_each(|k| *k *= factor);
        out
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.len() {
            return Err(Error::GridMismatch {
                expected: self.len(),
                got: u.len(),
            });
        }
        Ok(())
    }

    /// `J(u)`, the `p`-th power of the discrete Gagliardo seminorm.
    pub fn seminorm_p(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        let p = self.params().p();
        let m = self.len();
        let hn = self.grid.measure_weight();
        Ok(self.execution.sum_indices(m, |i| {
            let row = &self.weights[self.packed_row_start(i)..];
            let ui = u[i];
            let pairs: f64 = ((i + 1)..m)
                .zip(row)
                .map(|(j, w)| w * abs_pow(ui - u[j], p))
                .sum();
            2.0 * pairs + 2.0 * hn * self.kappa.kappa[i] * abs_pow(ui, p)
        }))
    }

    #[inline]
    fn packed_row_start(&self, i: usize) -> usize {
        let m = self.len();
        i * (2 * m - i - 1) / 2
    }

    /// `I(u) = h^N Σ |u_i|^p`.
    pub fn lp_norm_p(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        Ok(lp_norm_p(u, self.grid.measure_weight(), self.params().p()))
    }

    /// `J(u) / I(u)`.
    pub fn rayleigh(&self, u: &[f64]) -> Result<f64> {
        let i = self.lp_norm_p(u)?;
        if i == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok(self.seminorm_p(u)? / i)
    }

    /// Gradient of `J`:
    /// `2p Σ_{j≠i} w_ij |u_i-u_j|^{p-2}(u_i-u_j) + 2p h^N κ_i |u_i|^{p-2} u_i`.
    pub fn gradient(&self, u: &[f64]) -> Result<DiscreteFunction> {
        self.check(u)?;
        let p = self.params().p();
        let m = self.len();
        let hn = self.grid.measure_weight();
        let values = self.execution.map_indices(m, |i| {
            let ui = u[i];
            let mut acc = 0.0;
            for (j, uj) in u[..i].iter().enumerate() {
                acc += self.weights[self.packed(j, i)] * signed_pow(ui - uj, p);
            }
            let row = &self.weights[self.packed_row_start(i)..];
            for (uj, w) in u[i + 1..].iter().zip(row) {
                acc += w * signed_pow(ui - uj, p);
            }
            2.0 * p * (acc + hn * self.kappa.kappa[i] * signed_pow(ui, p))
        });
        Ok(DiscreteFunction(values))
    }

    /// Gradient of `I`: `p h^N |u_i|^{p-2} u_i`.
    pub fn lp_gradient(&self, u: &[f64]) -> Result<DiscreteFunction> {
        self.check(u)?;
        let p = self.params().p();
        let hn = self.grid.measure_weight();
        Ok(DiscreteFunction(
            u.iter().map(|&v| p * hn * signed_pow(v, p)).collect(),
        ))
    }

    pub fn report(&self, u: &[f64]) -> Result<EnergyReport> {
        let j = self.seminorm_p(u)?;
        let i = self.lp_norm_p(u)?;
        let rayleigh = if i > 0.0 { Some(j / i) } else { None };
        Ok(EnergyReport { j, i, rayleigh })
    }
}

/// `h^N Σ |u_i|^p` for a given cell measure.
pub fn lp_norm_p(u: &[f64], measure_weight: f64, p: f64) -> f64 {
    measure_weight * u.iter().map(|&v| abs_pow(v, p)).sum::<f64>()
}

/// Energy summary serialized as `{"J": .., "I": .., "rayleigh": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "I")]
    pub i: f64,
    pub rayleigh: Option<f64>,
}
