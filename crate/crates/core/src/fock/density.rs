use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64;

use crate::fock::{FockVector, Parity};
use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Single-mode density matrix on a truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    matrix: DMatrix<Complex64>,
}

impl FockDensity {
    /// Validates squareness and hermiticity (within 1e-12).
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let dim = matrix.nrows();
        for i in 0..dim {
            for j in i..dim {
                if (matrix[(i, j)] - matrix[(j, i)].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::param(
                        "matrix",
                        format!("not Hermitian at ({i}, {j})"),
                    ));
                }
            }
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn from_pure(state: &FockVector) -> Self {
        let v = state.amplitudes();
        Self {
            matrix: v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|c| c.re).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::NotNormalized { trace: tr });
        }
        Ok(Self {
            matrix: &self.matrix / Complex64::from(tr),
        })
    }

    pub fn population(&self, n: usize) -> f64 {
        if n < self.dim() {
            self.matrix[(n, n)].re
        } else {
            0.0
        }
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_in(&self, state: &FockVector) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: state.dim(),
            });
        }
        let v = state.amplitudes();
        Ok(v.dotc(&(&self.matrix * v)).re)
    }

    /// Largest `|ρ_mn|` with `m` or `n` of the wrong parity.
    pub fn wrong_parity_amplitude(&self, parity: Parity) -> f64 {
        let mut worst = 0.0f64;
        for ((m, n), c) in self.indexed() {
            if !parity.contains(m) || !parity.contains(n) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    fn indexed(&self) -> impl Iterator<Item = ((usize, usize), &Complex64)> {
        let rows = self.dim();
        self.matrix
            .iter()
            .enumerate()
            .map(move |(k, c)| ((k % rows, k / rows), c))
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        SymmetricEigen::new(self.matrix.clone()).eigenvalues
    }

    /// Decomposes into `Σ pₖ|ψₖ⟩⟨ψₖ|`, dropping weights below `cutoff`.
    pub fn ensemble(&self, cutoff: f64) -> Vec<(f64, DVector<Complex64>)> {
        // Rank-one matrices are common; skip the eigensolver for them.
        if let Some(v) = self.rank_one_vector() {
            let w = v.norm_squared();
            return vec![(w, v / Complex64::from(w.sqrt()))];
        }
        let eig = SymmetricEigen::new(self.matrix.clone());
        eig.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > cutoff)
            .map(|(k, &p)| (p, eig.eigenvectors.column(k).into_owned()))
            .collect()
    }

    fn rank_one_vector(&self) -> Option<DVector<Complex64>> {
        let dim = self.dim();
        let (pivot, diag) = (0..dim)
            .map(|i| (i, self.matrix[(i, i)].re))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if diag <= 0.0 {
            return None;
        }
        let v: DVector<Complex64> = self.matrix.column(pivot) / Complex64::from(diag.sqrt());
        let residual = (&self.matrix - &v * v.adjoint()).norm();
        (residual < 1e-13 * self.matrix.norm().max(1.0)).then_some(v)
    }

    /// Mean quadratures `(⟨X⁺⟩, ⟨X⁻⟩)` and their symmetrized covariance in SNL
    /// units (vacuum covariance = identity), for a normalized state.
    pub fn quadrature_moments_snl(&self) -> (Vector2<f64>, Matrix2<f64>) {
        let dim = self.dim();
        let rho = &self.matrix;
        let tr = self.trace();
        // tr(ρa) = Σ √n ρ_{n,n-1}, tr(ρa²) = Σ √(n(n-1)) ρ_{n,n-2}
        let mut a = Complex64::default();
        let mut a2 = Complex64::default();
        let mut n_mean = 0.0;
        for n in 0..dim {
            n_mean += n as f64 * rho[(n, n)].re;
            if n >= 1 {
                a += rho[(n, n - 1)] * (n as f64).sqrt();
            }
            if n >= 2 {
                a2 += rho[(n, n - 2)] * ((n * (n - 1)) as f64).sqrt();
            }
        }
        let (a, a2, n_mean) = (a / tr, a2 / tr, n_mean / tr);
        let mean = Vector2::new(2.0 * a.re, 2.0 * a.im);
        let vx = 2.0 * a2.re + 2.0 * n_mean + 1.0 - mean.x * mean.x;
        let vp = -2.0 * a2.re + 2.0 * n_mean + 1.0 - mean.y * mean.y;
        let cxp = 2.0 * a2.im - mean.x * mean.y;
        (mean, Matrix2::new(vx, cxp, cxp, vp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_squeeze, coherent_state, fock_state, squeezed_vacuum};

    #[test]
    fn coherent_moments() {
        let g = Complex64::new(0.7, -0.4);
        let (m, v) = coherent_state(g, 40)
            .unwrap()
            .to_density()
            .quadrature_moments_snl();
        assert!((m - Vector2::new(1.4, -0.8)).amax() < 1e-10);
        assert!((v - Matrix2::identity()).amax() < 1e-9);
    }

    #[test]
    fn squeezed_moments() {
        let (m, v) = squeezed_vacuum(0.5, 40)
            .unwrap()
            .to_density()
            .quadrature_moments_snl();
        assert!(m.amax() < 1e-15);
        assert!((v[(0, 0)] - 1f64.exp()).abs() < 1e-9);
        assert!((v[(1, 1)] - (-1f64).exp()).abs() < 1e-9);
        assert!(v[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn squeezed_photon_variance() {
        let rho = apply_squeeze(&fock_state(1, 60).unwrap(), 0.3)
            .unwrap()
            .to_density();
        let (_, v) = rho.quadrature_moments_snl();
        assert!((v[(0, 0)] - 3.0 * 0.6f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn validation_and_basic_quantities() {
        let bad = DMatrix::from_element(2, 3, Complex64::default());
        assert!(FockDensity::new(bad).is_err());
        let mut m = DMatrix::from_element(2, 2, Complex64::default());
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(FockDensity::new(m).is_err());
        let mixed = FockDensity::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::from(0.25),
            Complex64::from(0.75),
        ])))
        .unwrap();
        assert!((mixed.purity() - 0.625).abs() < 1e-15);
        assert_eq!(mixed.ensemble(1e-12).len(), 2);
        assert_eq!(mixed.wrong_parity_amplitude(Parity::Even), 0.75);
        assert_eq!(mixed.wrong_parity_amplitude(Parity::Odd), 0.25);
    }
}
