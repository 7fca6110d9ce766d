//! First eigenpair for general `p` by projected gradient descent on the
//! constraint set `{ I(u) = 1 }`.
//!
//! Each iteration takes a step along the negative Rayleigh gradient, rescales
//! back onto the sphere and accepts the step only under an Armijo sufficient
//! decrease condition, so the Rayleigh quotient never increases. Trial step
//! lengths come from the Barzilai-Borwein formula.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{lp_norm_p, DiscreteFunction, NonlocalEnergy};
use crate::error::{Error, Result};

/// Consecutive stalled iterations required before declaring convergence.
const STALL_WINDOW: usize = 5;
/// Consecutive stalled iterations accepted as convergence without the
/// residual test. The residual cannot drop much below `sqrt(eps)` once the
/// Rayleigh quotient is exact to rounding, and for `p < 2` the energy is not
/// twice differentiable where nodal differences vanish.
const PLATEAU_WINDOW: usize = 100;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Relative Rayleigh-quotient stall tolerance.
    pub tol: f64,
    /// Bound on the scaled Euler-Lagrange residual
    /// `‖∇J - λ∇I‖_∞ / (λ ‖∇I‖_∞)`.
    pub residual_tol: f64,
    /// First trial step relative to `‖u‖ / ‖d‖` for the starting iterate `u`
    /// and descent direction `d`.
    pub step0: f64,
    pub backtrack: f64,
    pub seed: u64,
    pub record_log: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 200_000,
            tol: 1e-14,
            residual_tol: 1e-6,
            step0: 0.1,
            backtrack: 0.5,
            seed: 0,
            record_log: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0) || !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParams("tolerances must be positive".into()));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidParams(format!(
                "backtrack factor must lie in (0,1), got {}",
                self.backtrack
            )));
        }
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return Err(Error::InvalidParams("step0 must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub rayleigh: f64,
    pub residual: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstEigenpair {
    pub lambda: f64,
    /// Normalized to `I(u) = 1` with nonnegative sum.
    pub u: DiscreteFunction,
    pub iterations: usize,
    pub residual: f64,
    /// False when the iteration budget ran out; `lambda` and `u` then hold the
    /// best iterate.
    pub converged: bool,
    pub log: Vec<IterationRecord>,
}

impl FirstEigenpair {
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                iterations: self.iterations,
                best: self.lambda,
            })
        }
    }
}

/// Strictly positive starting guess: discrete distance to the boundary raised
/// to the power `s`.
pub fn positive_bump(energy: &NonlocalEnergy) -> DiscreteFunction {
    let grid = energy.grid();
    let s = grid.params().s();
    (0..grid.len())
        .map(|i| grid.boundary_distance(i).powf(s))
        .collect::<Vec<_>>()
        .into()
}

/// Seeded random starting guess with mixed signs and a positive bias.
pub fn random_start(len: usize, seed: u64) -> DiscreteFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| rng.gen_range(-0.5..1.0))
        .collect::<Vec<_>>()
        .into()
}

pub fn first_eigenpair(energy: &NonlocalEnergy, cfg: &SolverConfig) -> Result<FirstEigenpair> {
    first_eigenpair_from(energy, cfg, &positive_bump(energy))
}

fn normalize(u: &mut [f64], hn: f64, p: f64) -> Result<()> {
    let norm = lp_norm_p(u, hn, p);
    if !(norm > 0.0) {
        return Err(Error::ZeroFunction);
    }
    let c = norm.powf(-1.0 / p);
    u.iter_mut().for_each(|v| *v *= c);
    Ok(())
}

fn weighted_dot(a: &[f64], b: &[f64], hn: f64) -> f64 {
    hn * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

pub fn first_eigenpair_from(
    energy: &NonlocalEnergy,
    cfg: &SolverConfig,
    init: &[f64],
) -> Result<FirstEigenpair> {
    cfg.validate()?;
    if init.len() != energy.len() {
        return Err(Error::GridMismatch {
            expected: energy.len(),
            got: init.len(),
        });
    }
    let p = energy.params().p();
    let hn = energy.grid().measure_weight();

    let mut u = init.to_vec();
    normalize(&mut u, hn, p)?;
    let mut lambda = energy.seminorm_p(&u)?;
    let mut log = Vec::new();

    // Riesz representative of the Rayleigh gradient in the h^N-weighted inner
    // product, with the scaled residual.
    let descent = |u: &[f64], lambda: f64| -> Result<(Vec<f64>, f64)> {
        let gj = energy.gradient(u)?;
        let gi = energy.lp_gradient(u)?;
        let r: Vec<f64> = gj
            .iter()
            .zip(gi.iter())
            .map(|(a, b)| a - lambda * b)
            .collect();
        let gi_max = gi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let r_max = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let residual = if gi_max > 0.0 {
            r_max / (lambda * gi_max)
        } else {
            f64::INFINITY
        };
        Ok((r.into_iter().map(|v| -v / hn).collect(), residual))
    };

    let (mut d, mut residual) = descent(&u, lambda)?;
    // Relative first step: keeps the iteration equivariant under dilation of
    // the domain, where λ, u and d pick up different powers of the scale.
    let d_norm2 = weighted_dot(&d, &d, hn);
    let mut alpha = if d_norm2 > 0.0 {
        cfg.step0 * (weighted_dot(&u, &u, hn) / d_norm2).sqrt()
    } else {
        cfg.step0
    };
    let mut stalled = 0usize;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        if (stalled >= STALL_WINDOW && residual <= cfg.residual_tol) || stalled >= PLATEAU_WINDOW {
            converged = true;
            break;
        }
        iterations += 1;
        let slope = weighted_dot(&d, &d, hn);
        if slope == 0.0 {
            converged = true;
            break;
        }

        let mut accepted = None;
        let mut step = alpha;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            if normalize(&mut trial, hn, p).is_ok() {
                let trial_lambda = energy.seminorm_p(&trial)?;
                if trial_lambda <= lambda - ARMIJO * step * slope {
                    accepted = Some((trial, trial_lambda));
                    break;
                }
            }
            step *= cfg.backtrack;
        }
        let Some((next, next_lambda)) = accepted else {
            // No sufficient decrease is representable any more.
            converged = residual <= cfg.residual_tol || stalled >= STALL_WINDOW;
            break;
        };
        debug_assert!(next_lambda <= lambda);

        if (lambda - next_lambda).abs() <= cfg.tol * next_lambda {
            stalled += 1;
        } else {
            stalled = 0;
        }
        let (next_d, next_residual) = descent(&next, next_lambda)?;

        // Barzilai-Borwein step for the next trial.
        let s: Vec<f64> = next.iter().zip(&u).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = d.iter().zip(&next_d).map(|(a, b)| a - b).collect();
        let sy = weighted_dot(&s, &y, hn);
        let ss = weighted_dot(&s, &s, hn);
        alpha = if sy > 0.0 && ss > 0.0 {
            ss / sy
        } else {
            step / cfg.backtrack
        };

        u = next;
        lambda = next_lambda;
        d = next_d;
        residual = next_residual;
        if cfg.record_log {
            log.push(IterationRecord {
                iter: iterations,
                rayleigh: lambda,
                residual,
                step,
            });
        }
    }

    if u.iter().sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(FirstEigenpair {
        lambda,
        u: u.into(),
        iterations,
        residual,
        converged,
        log,
    })
}
