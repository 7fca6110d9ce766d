//! First eigenpair for any `p`, full linear spectrum, counting function and
//! power-law fits.

mod counting;
mod linear;
mod solver;

pub use counting::{
    counting_function, percentile, weyl_slope, WeylFit, MIN_FIT_POINTS, UPPER_TAIL_FRACTION,
};
pub use linear::{linear_spectrum, stiffness_matrix};
pub use solver::{
    first_eigenpair, first_eigenpair_from, positive_bump, random_start, FirstEigenpair,
    IterationRecord, SolverConfig,
};

use crate::energy::DiscreteFunction;
use crate::error::{Error, Result};

/// Nondecreasing list of positive eigenvalues, optionally with eigenvectors
/// normalized to `I(v) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<DiscreteFunction>>,
}

impl Spectrum {
    pub fn from_eigenvalues(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParams(
                "eigenvalues must be positive and finite".into(),
            ));
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParams("eigenvalues must be sorted".into()));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors: None,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}
