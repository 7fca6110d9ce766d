use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mesh::grid::Grid;

/// Quadrature settings for the complement potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialOptions {
    /// Quadrature cells per grid cell along each axis.
    pub subdivisions: usize,
    /// Truncation radius as a multiple of the domain diameter. The radius is
    /// rounded up to a whole number of quadrature cells.
    pub radius_factor: f64,
}

impl Default for PotentialOptions {
    fn default() -> Self {
        Self {
            subdivisions: 1,
            radius_factor: 10.0,
        }
    }
}

/// Per-node integral of the kernel over the complement of the domain,
/// `kappa_i = ∫_{R^N \ Ω} |x_i - y|^{-N-sp} dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementPotential {
    pub kappa: Vec<f64>,
    pub truncation_radius: f64,
    /// Analytic value of the kernel integral beyond the truncation radius.
    pub tail_constant: f64,
}

/// `∫_{|z| > R} |z|^{-N-sp} dz`.
pub fn kernel_tail(dim: usize, sp: f64, radius: f64) -> f64 {
    let sphere = if dim == 1 { 2.0 } else { 2.0 * PI };
    sphere / sp * radius.powf(-sp)
}

pub fn complement_potential(grid: &Grid) -> ComplementPotential {
    complement_potential_with(grid, PotentialOptions::default(), Execution::default())
        .expect("default potential options are valid")
}

/// Midpoint quadrature over the complement cells lying within the truncation
/// radius of each node, plus the analytic tail beyond it.
pub fn complement_potential_with(
    grid: &Grid,
    opts: PotentialOptions,
    exec: Execution,
) -> Result<ComplementPotential> {
    if opts.subdivisions == 0 || !(opts.radius_factor > 0.0) {
        return Err(Error::InvalidParams(format!(
            "invalid quadrature options {opts:?}"
        )));
    }
    let params = grid.params();
    let dim = params.dim();
    let sp = params.sp();
    let domain = grid.domain();
    let sub = opts.subdivisions as i64;
    let hq = grid.spacing() / opts.subdivisions as f64;
    let cells = (opts.radius_factor * domain.diameter() / hq - 1e-9)
        .ceil()
        .max(1.0) as i64;
    let radius = cells as f64 * hq;

    // Offsets m of cell centres (m + 1/2) hq relative to a node, and the
    // scale-free kernel weight |m + 1/2|^{-N-sp} of each.
    let exponent = -(dim as f64 + sp);
    let mut table: Vec<([i64; 2], f64)> = Vec::new();
    if dim == 1 {
        for m in -cells..cells {
            table.push(([m, 0], (m as f64 + 0.5).abs().powf(exponent)));
        }
    } else {
        let limit2 = (cells * cells) as f64;
        for m0 in -cells..cells {
            for m1 in -cells..cells {
                let r2 = (m0 as f64 + 0.5).powi(2) + (m1 as f64 + 0.5).powi(2);
                if r2 <= limit2 {
                    table.push(([m0, m1], r2.sqrt().powf(exponent)));
                }
            }
        }
    }

    let (bb_lo, bb_hi) = domain.bounding_box();
    let origin = grid.origin();
    let scale = hq.powf(-sp);
    let tail = kernel_tail(dim, sp, radius);
    let kappa = exec.map_indices(grid.len(), |i| {
        let k = grid.lattice()[i];
        let mut acc = 0.0;
        for (m, w) in &table {
            let mut c = [0.0; 2];
            let mut inside_box = true;
            for d in 0..dim {
                c[d] = origin[d] + ((k[d] * sub + m[d]) as f64 + 0.5) * hq;
                inside_box &= c[d] > bb_lo[d] && c[d] < bb_hi[d];
            }
            if !inside_box || !domain.contains_strict(&c, 0.0) {
                acc += w;
            }
        }
        scale * acc + tail
    });
    Ok(ComplementPotential {
        kappa,
        truncation_radius: radius,
        tail_constant: tail,
    })
}
