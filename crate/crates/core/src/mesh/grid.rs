use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mesh::domain::{DomainSpec, Point};
use crate::params::FracParams;

/// Relative slack, in units of the spacing, used to decide whether a lattice
/// point lies strictly inside the domain.
const BOUNDARY_SLACK: f64 = 1e-9;

/// Uniform vertex-centred lattice restricted to the interior of a domain.
///
/// A discrete function is one value per interior node and is implicitly zero
/// at every other point of space.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: DomainSpec,
    params: FracParams,
    resolution: usize,
    origin: Point,
    spacing: f64,
    nodes: Vec<Point>,
    lattice: Vec<[i64; 2]>,
    node_index: HashMap<[i64; 2], usize>,
}

/// Builds the interior lattice of `domain` with `n` cells along the longest
/// side of its bounding box.
pub fn build_grid(domain: &DomainSpec, params: FracParams, n: usize) -> Result<Grid> {
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "resolution must be at least 2, got {n}"
        )));
    }
    domain.validate()?;
    let dim = params.dim();
    if domain.dim() != dim {
        return Err(Error::InvalidDomain(format!(
            "domain is {}-dimensional but parameters request N = {dim}",
            domain.dim()
        )));
    }
    let (lo, hi) = domain.bounding_box();
    let extent = (0..dim).map(|d| hi[d] - lo[d]).fold(0.0, f64::max);
    let h = extent / n as f64;
    let eps = BOUNDARY_SLACK * h;
    let counts: Vec<i64> = (0..dim)
        .map(|d| ((hi[d] - lo[d]) / h - BOUNDARY_SLACK).ceil() as i64)
        .collect();

    let mut nodes = Vec::new();
    let mut lattice = Vec::new();
    let y_range = if dim == 2 { 0..=counts[1] } else { 0..=0 };
    for i in 0..=counts[0] {
        for j in y_range.clone() {
            let mut x = [lo[0] + i as f64 * h, 0.0];
            if dim == 2 {
                x[1] = lo[1] + j as f64 * h;
            }
            if domain.contains_strict(&x, eps) {
                nodes.push(x);
                lattice.push([i, j]);
            }
        }
    }
    if nodes.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let node_index = lattice.iter().enumerate().map(|(k, l)| (*l, k)).collect();
    Ok(Grid {
        domain: domain.clone(),
        params,
        resolution: n,
        origin: lo,
        spacing: h,
        nodes,
        lattice,
        node_index,
    })
}

impl Grid {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn params(&self) -> FracParams {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Lattice origin, the lower corner of the domain's bounding box.
    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Cell measure `h^N` attached to each node.
    pub fn measure_weight(&self) -> f64 {
        self.spacing.powi(self.dim() as i32)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    /// Integer lattice coordinates of each node relative to the origin.
    pub fn lattice(&self) -> &[[i64; 2]] {
        &self.lattice
    }

    pub fn index_of(&self, lattice: [i64; 2]) -> Option<usize> {
        self.node_index.get(&lattice).copied()
    }

    /// Squared lattice distance between nodes `i` and `j`, in units of `h^2`.
    pub fn lattice_distance2(&self, i: usize, j: usize) -> i64 {
        let (a, b) = (self.lattice[i], self.lattice[j]);
        (a[0] - b[0]).pow(2) + (a[1] - b[1]).pow(2)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.spacing * (self.lattice_distance2(i, j) as f64).sqrt()
    }

    /// Discrete distance to the boundary: `h` times the fewest axis steps from
    /// node `i` that leave the node set.
    pub fn boundary_distance(&self, i: usize) -> f64 {
        let start = self.lattice[i];
        let mut best = i64::MAX;
        for d in 0..self.dim() {
            for dir in [-1i64, 1] {
                let mut steps = 1;
                loop {
                    let mut l = start;
                    l[d] += dir * steps;
                    if !self.node_index.contains_key(&l) {
                        break;
                    }
                    steps += 1;
                }
                best = best.min(steps);
            }
        }
        best as f64 * self.spacing
    }
}
