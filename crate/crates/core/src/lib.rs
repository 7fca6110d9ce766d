//! Discretization and spectral toolkit for the fractional p-Laplacian with
//! homogeneous Dirichlet (zero-extension) conditions.
//!
//! The crate assembles a lattice Gagliardo energy on a bounded domain, computes
//! the first eigenpair for any `p > 1` by constrained Rayleigh minimization and
//! the full spectrum for `p = 2`, and evaluates the explicit two-sided
//! counting-function bounds for comparison with measured spectra.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod eigen;
pub mod energy;
pub mod error;
pub mod exec;
pub mod io;
pub mod mesh;
pub mod params;
pub mod properties;

pub use eigen::{first_eigenpair, linear_spectrum, SolverConfig, Spectrum};
pub use energy::{DiscreteFunction, NonlocalEnergy};
pub use error::{Error, Result};
pub use exec::Execution;
pub use mesh::{build_grid, complement_potential, ComplementPotential, DomainSpec, Grid};
pub use params::FracParams;
