//! Per-node data-parallel maps with a sequential fallback.
//!
//! Every parallel loop in the crate goes through [`Execution::map_indices`], which
//! evaluates a pure per-index closure and collects in index order. Reductions over
//! the collected vector are done sequentially, so both modes give bit-identical
//! results.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Serial,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs serially.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }
}

impl Execution {
    pub fn map_indices<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }

    /// Sum of `f(i)` over `0..len`, accumulated left to right.
    pub fn sum_indices<F>(self, len: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        self.map_indices(len, f).into_iter().sum()
    }
}
