//! Domains, interior lattices and the complement potential induced by the
//! zero-extension boundary condition.

mod domain;
mod grid;
mod potential;

pub use domain::{DomainSpec, Point};
pub use grid::{build_grid, Grid};
pub use potential::{
    complement_potential, complement_potential_with, kernel_tail, ComplementPotential,
    PotentialOptions,
};
