//! Full spectrum of the linear (`p = 2`) problem as a dense symmetric pencil.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::eigen::Spectrum;
use crate::energy::{DiscreteFunction, NonlocalEnergy};
use crate::error::{Error, Result};

/// Stiffness matrix with `uᵀ K u = J(u)` for `p = 2`:
/// `K_ij = -2 w_ij`, `K_ii = 2 Σ_{j≠i} w_ij + 2 h^N κ_i`.
pub fn stiffness_matrix(energy: &NonlocalEnergy) -> Result<DMatrix<f64>> {
    let p = energy.params().p();
    if p != 2.0 {
        return Err(Error::WrongExponent(p));
    }
    let m = energy.len();
    let hn = energy.grid().measure_weight();
    let mut k = DMatrix::zeros(m, m);
    for i in 0..m {
        let mut diag = 0.0;
        for j in 0..m {
            if i != j {
                let w = energy.weight(i, j);
                k[(i, j)] = -2.0 * w;
                diag += w;
            }
        }
        k[(i, i)] = 2.0 * diag + 2.0 * hn * energy.kappa().kappa[i];
    }
    Ok(k)
}

/// All eigenvalues of `K v = λ h^N v`, ascending, with eigenvectors
/// normalized to `h^N Σ v_i^2 = 1` and nonnegative sum.
pub fn linear_spectrum(energy: &NonlocalEnergy) -> Result<Spectrum> {
    let k = stiffness_matrix(energy)?;
    let hn = energy.grid().measure_weight();
    let eig = SymmetricEigen::new(k / hn);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let scale = hn.sqrt().recip();
    let mut eigenvalues = Vec::with_capacity(order.len());
    let mut eigenvectors = Vec::with_capacity(order.len());
    for &idx in &order {
        eigenvalues.push(eig.eigenvalues[idx]);
        let col = eig.eigenvectors.column(idx);
        let sign = if col.sum() < 0.0 { -scale } else { scale };
        eigenvectors.push(DiscreteFunction::from(
            col.iter().map(|v| sign * v).collect::<Vec<_>>(),
        ));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(eigenvectors),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_grid, DomainSpec};
    use crate::params::FracParams;

    fn energy(s: f64, p: f64, n: usize) -> NonlocalEnergy {
        let params = FracParams::new(s, p, 1).unwrap();
        NonlocalEnergy::assemble(&build_grid(&DomainSpec::interval(0.0, 1.0), params, n).unwrap())
    }

    #[test]
    fn rejects_nonlinear() {
        assert_eq!(
            linear_spectrum(&energy(0.5, 3.0, 8)).unwrap_err(),
            Error::WrongExponent(3.0)
        );
    }

    #[test]
    fn orthonormal_positive_sorted() {
        let e = energy(0.5, 2.0, 32);
        let spec = linear_spectrum(&e).unwrap();
        assert_eq!(spec.len(), e.len());
        assert!(spec.eigenvalues.iter().all(|&l| l > 0.0));
        assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let hn = e.grid().measure_weight();
        let vecs = spec.eigenvectors.as_ref().unwrap();
        for a in 0..vecs.len() {
            for b in 0..vecs.len() {
                let dot: f64 = hn
                    * vecs[a]
                        .iter()
                        .zip(vecs[b].iter())
                        .map(|(x, y)| x * y)
                        .sum::<f64>();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-10);
            }
        }
    }
}
