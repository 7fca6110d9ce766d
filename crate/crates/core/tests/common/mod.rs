//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use fracweyl::{build_grid, DomainSpec, FracParams, Grid, NonlocalEnergy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn energy(domain: &DomainSpec, s: f64, p: f64, n: usize) -> NonlocalEnergy {
    let params = FracParams::new(s, p, domain.dim()).unwrap();
    NonlocalEnergy::assemble(&build_grid(domain, params, n).unwrap())
}

pub fn random_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn cell(g: &Grid) -> f64 {
    g.spacing().powi(g.dim() as i32)
}

/// Pairwise weight from Euclidean node coordinates.
pub fn naive_weight(g: &Grid, i: usize, j: usize) -> f64 {
    let (a, b) = (g.nodes()[i], g.nodes()[j]);
    let r = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let prm = g.params();
    cell(g).powi(2) / r.powf(g.dim() as f64 + prm.sp())
}

/// Double loop over ordered pairs.
pub fn naive_seminorm(e: &NonlocalEnergy, u: &[f64]) -> f64 {
    let g = e.grid();
    let p = g.params().p();
    let kappa = &e.kappa().kappa;
    let mut total = 0.0;
    for i in 0..u.len() {
        for j in 0..u.len() {
            if i != j {
                total += naive_weight(g, i, j) * (u[i] - u[j]).abs().powf(p);
            }
        }
        total += 2.0 * cell(g) * kappa[i] * u[i].abs().powf(p);
    }
    total
}

pub fn naive_gradient(e: &NonlocalEnergy, u: &[f64]) -> Vec<f64> {
    let g = e.grid();
    let p = g.params().p();
    let kappa = &e.kappa().kappa;
    let phi = |t: f64| {
        if t == 0.0 {
            0.0
        } else {
            t.abs().powf(p - 1.0) * t.signum()
        }
    };
    (0..u.len())
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..u.len() {
                if i != j {
                    acc += 2.0 * p * naive_weight(g, i, j) * phi(u[i] - u[j]);
                }
            }
            acc + 2.0 * p * cell(g) * kappa[i] * phi(u[i])
        })
        .collect()
}

pub fn finite_difference_gradient(e: &NonlocalEnergy, u: &[f64], step: f64) -> Vec<f64> {
    (0..u.len())
        .map(|i| {
            let mut plus = u.to_vec();
            let mut minus = u.to_vec();
            plus[i] += step;
            minus[i] -= step;
            (e.seminorm_p(&plus).unwrap() - e.seminorm_p(&minus).unwrap()) / (2.0 * step)
        })
        .collect()
}

/// Smallest eigenvalue of the 2-node pencil `K v = λ h^N v` in closed form.
pub fn pencil_2x2(e: &NonlocalEnergy) -> f64 {
    let g = e.grid();
    assert_eq!(g.len(), 2);
    let hn = cell(g);
    let w = naive_weight(g, 0, 1);
    let kappa = &e.kappa().kappa;
    let a = 2.0 * w + 2.0 * hn * kappa[0];
    let d = 2.0 * w + 2.0 * hn * kappa[1];
    let b = -2.0 * w;
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d).powi(2) + b * b).sqrt();
    (mean - rad) / hn
}

/// Minimum of the Rayleigh quotient by nested box refinement over nonnegative
/// vectors with one coordinate pinned to 1 (the quotient is 0-homogeneous, so
/// this scans the constraint sphere).
pub fn grid_search_lambda1(e: &NonlocalEnergy, pinned: usize) -> f64 {
    let m = e.len();
    let free: Vec<usize> = (0..m).filter(|&i| i != pinned).collect();
    let eval = |x: &[f64]| {
        let mut u = vec![1.0; m];
        for (k, &i) in free.iter().enumerate() {
            u[i] = x[k];
        }
        naive_seminorm(e, &u)
            / (cell(e.grid()) * u.iter().map(|v| v.abs().powf(e.params().p())).sum::<f64>())
    };
    let mut centre = vec![1.0; free.len()];
    let mut half = 1.0;
    let pts = 9usize;
    let mut best = eval(&centre);
    for _level in 0..40 {
        let total = pts.pow(free.len() as u32);
        let mut best_x = centre.clone();
        for flat in 0..total {
            let mut r = flat;
            let x: Vec<f64> = centre
                .iter()
                .map(|&c| {
                    let k = r % pts;
                    r /= pts;
                    (c - half + 2.0 * half * k as f64 / (pts - 1) as f64).max(0.0)
                })
                .collect();
            let v = eval(&x);
            if v < best {
                best = v;
                best_x = x;
            }
        }
        centre = best_x;
        half *= 0.5;
    }
    best
}
