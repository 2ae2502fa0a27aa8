//! Two-mode beam splitter and the joint (transmitted ⊗ reflected) state.
//!
//! The unitary conserves total photon number, so it is block diagonal over
//! `N = n_t + n_r`. Each block `{|k, N−k⟩}` is closed under the generator and is
//! exponentiated exactly; the only approximation is cropping outputs to `dim`
//! levels per mode.
//!
//! Orientation: output amplitudes are `a_t = √T a_in − √R a_anc` and
//! `a_r = √R a_in + √T a_anc`, so the joint Wigner function is
//! `W_in(√T α + √R β) · W_anc(−√R α + √T β)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::conventions::check_reflectivity;
use crate::fock::{FockDensity, FockVector};
use crate::{Error, Result};

const ENSEMBLE_CUTOFF: f64 = 1e-14;

/// Joint density matrix of the transmitted and reflected modes.
///
/// Stored as a weighted ensemble `Σ pₖ |Ψₖ⟩⟨Ψₖ|` where each `Ψₖ` is a `dim × dim`
/// amplitude table indexed `[n_t, n_r]`.
#[derive(Debug, Clone)]
pub struct TwoModeDensity {
    dim: usize,
    components: Vec<(f64, DMatrix<Complex64>)>,
    tail_mass: f64,
}

impl TwoModeDensity {
    /// Uncoupled product `ρ_t ⊗ ρ_r`.
    pub fn product(rho_t: &FockDensity, rho_r: &FockDensity) -> Result<Self> {
        if rho_t.dim() != rho_r.dim() {
            return Err(Error::DimensionMismatch {
                left: rho_t.dim(),
                right: rho_r.dim(),
            });
        }
        let et = rho_t.ensemble(ENSEMBLE_CUTOFF);
        let er = rho_r.ensemble(ENSEMBLE_CUTOFF);
        let mut components = Vec::with_capacity(et.len() * er.len());
        for (pt, vt) in &et {
            for (pr, vr) in &er {
                components.push((pt * pr, vt * vr.transpose()));
            }
        }
        Ok(Self {
            dim: rho_t.dim(),
            components,
            tail_mass: 0.0,
        })
    }

    pub fn from_pure(psi: DMatrix<Complex64>) -> Result<Self> {
        if !psi.is_square() {
            return Err(Error::DimensionMismatch {
                left: psi.nrows(),
                right: psi.ncols(),
            });
        }
        Ok(Self {
            dim: psi.nrows(),
            components: vec![(1.0, psi)],
            tail_mass: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Weighted pure components; amplitude tables are indexed `[n_t, n_r]`.
    pub fn components(&self) -> &[(f64, DMatrix<Complex64>)] {
        &self.components
    }

    /// Population cropped away by the beam splitter.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn trace(&self) -> f64 {
        self.components
            .iter()
            .map(|(p, psi)| p * psi.norm_squared())
            .sum()
    }

    /// Dense `(dim²) × (dim²)` matrix with row index `n_t · dim + n_r`.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let d2 = self.dim * self.dim;
        let mut out = DMatrix::from_element(d2, d2, Complex64::default());
        for (p, psi) in &self.components {
            // row-major flattening of psi
            let v = DVector::from_iterator(d2, psi.transpose().iter().copied());
            out += (&v * v.adjoint()) * Complex64::from(*p);
        }
        out
    }

    pub fn reduced_transmitted(&self) -> FockDensity {
        let mut m = DMatrix::from_element(self.dim, self.dim, Complex64::default());
        for (p, psi) in &self.components {
            m += (psi * psi.adjoint()) * Complex64::from(*p);
        }
        FockDensity::from_matrix_unchecked(m)
    }

    pub fn reduced_reflected(&self) -> FockDensity {
        let mut m = DMatrix::from_element(self.dim, self.dim, Complex64::default());
        for (p, psi) in &self.components {
            m += (psi.transpose() * psi.map(|c| c.conj())) * Complex64::from(*p);
        }
        FockDensity::from_matrix_unchecked(m)
    }
}

/// Beam-splitter unitary for a given reflectivity and per-mode truncation.
#[derive(Debug, Clone)]
pub struct BeamSplitter {
    reflectivity: f64,
    dim: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl BeamSplitter {
    pub fn new(reflectivity: f64, dim: usize) -> Result<Self> {
        check_reflectivity(reflectivity)?;
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        // R = sin²(θ/2)
        let half_theta = reflectivity.sqrt().asin();
        let blocks = (0..2 * dim - 1)
            .map(|n| block_unitary(n, half_theta))
            .collect();
        Ok(Self {
            reflectivity,
            dim,
            blocks,
        })
    }

    pub fn reflectivity(&self) -> f64 {
        self.reflectivity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Transforms a joint amplitude table `[n_in, n_anc]` into `[n_t, n_r]`.
    /// Returns the output table and the norm cropped away.
    pub fn apply(&self, psi: &DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, f64)> {
        let d = self.dim;
        if psi.nrows() != d || psi.ncols() != d {
            return Err(Error::DimensionMismatch {
                left: d,
                right: psi.nrows().max(psi.ncols()),
            });
        }
        let mut out = DMatrix::from_element(d, d, Complex64::default());
        let mut lost = 0.0;
        for (n, u) in self.blocks.iter().enumerate() {
            let lo = n.saturating_sub(d - 1);
            let hi = n.min(d - 1);
            let input: Vec<(usize, Complex64)> = (lo..=hi)
                .map(|k| (k, psi[(k, n - k)]))
                .filter(|(_, c)| *c != Complex64::default())
                .collect();
            if input.is_empty() {
                continue;
            }
            for row in 0..=n {
                let amp: Complex64 = input.iter().map(|&(k, c)| c * u[(row, k)]).sum();
                if row < d && n - row < d {
                    out[(row, n - row)] = amp;
                } else {
                    lost += amp.norm_sqr();
                }
            }
        }
        Ok((out, lost))
    }

    pub fn apply_pure(&self, input: &FockVector, ancilla: &FockVector) -> Result<TwoModeDensity> {
        let table = input.amplitudes() * ancilla.amplitudes().transpose();
        let (out, lost) = self.apply(&table)?;
        Ok(TwoModeDensity {
            dim: self.dim,
            components: vec![(1.0, out)],
            tail_mass: lost,
        })
    }

    pub fn apply_density(&self, joint: &TwoModeDensity) -> Result<TwoModeDensity> {
        let mut components = Vec::with_capacity(joint.components.len());
        let mut lost = joint.tail_mass;
        for (p, psi) in &joint.components {
            let (out, l) = self.apply(psi)?;
            lost += p * l;
            components.push((*p, out));
        }
        Ok(TwoModeDensity {
            dim: self.dim,
            components,
            tail_mass: lost,
        })
    }
}

/// Block of `exp{−(θ/2)(a†b − b†a)}` on `{|k, N−k⟩ : k = 0..=N}`.
fn block_unitary(total: usize, half_theta: f64) -> DMatrix<f64> {
    let size = total + 1;
    if half_theta == 0.0 {
        return DMatrix::identity(size, size);
    }
    let mut g = DMatrix::zeros(size, size);
    for k in 0..total {
        let w = (((k + 1) * (total - k)) as f64).sqrt() * half_theta;
        g[(k + 1, k)] = -w;
        g[(k, k + 1)] = w;
    }
    g.exp()
}

/// Interferes two single-mode states; output ordering is (transmitted, reflected).
pub fn beam_splitter(
    rho_in: &FockDensity,
    rho_anc: &FockDensity,
    reflectivity: f64,
) -> Result<TwoModeDensity> {
    check_reflectivity(reflectivity)?;
    let joint = TwoModeDensity::product(rho_in, rho_anc)?;
    BeamSplitter::new(reflectivity, rho_in.dim())?.apply_density(&joint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, fock_state, squeezed_vacuum};

    fn rho(v: FockVector) -> FockDensity {
        v.to_density()
    }

    #[test]
    fn zero_reflectivity_is_identity() {
        let a = rho(coherent_state(Complex64::new(0.4, 0.1), 16).unwrap());
        let b = rho(squeezed_vacuum(0.3, 16).unwrap());
        let out = beam_splitter(&a, &b, 0.0).unwrap();
        let direct = TwoModeDensity::product(&a, &b).unwrap();
        assert!((out.to_matrix() - direct.to_matrix()).norm() < 1e-12);
    }

    #[test]
    fn full_reflectivity_swaps_modes() {
        let a = rho(fock_state(1, 8).unwrap());
        let b = rho(fock_state(0, 8).unwrap());
        let out = beam_splitter(&a, &b, 1.0).unwrap();
        assert!((out.reduced_reflected().population(1) - 1.0).abs() < 1e-12);
        assert!((out.reduced_transmitted().population(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_photon_splits_by_reflectivity() {
        let one = rho(fock_state(1, 10).unwrap());
        let vac = rho(fock_state(0, 10).unwrap());
        for r in [0.5, 0.75] {
            let out = beam_splitter(&one, &vac, r).unwrap();
            // oracle: |1,0⟩ → √T|1,0⟩ + √R|0,1⟩ up to sign
            assert!((out.reduced_reflected().population(1) - r).abs() < 1e-12);
            assert!((out.reduced_transmitted().population(1) - (1.0 - r)).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_is_preserved() {
        let a = rho(fock_state(2, 30).unwrap());
        let b = rho(squeezed_vacuum(0.5, 30).unwrap());
        let out = beam_splitter(&a, &b, 0.3).unwrap();
        assert!((out.trace() + out.tail_mass() - 1.0).abs() < 1e-9);
        assert!((out.trace() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mixed_inputs_are_decomposed() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::from(0.6),
            Complex64::from(0.4),
            Complex64::default(),
            Complex64::default(),
        ]));
        let mixed = FockDensity::new(m).unwrap();
        let vac = rho(fock_state(0, 4).unwrap());
        let out = beam_splitter(&mixed, &vac, 0.5).unwrap();
        assert_eq!(out.components().len(), 2);
        assert!((out.reduced_reflected().population(1) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_reflectivity() {
        let v = rho(fock_state(0, 4).unwrap());
        assert!(beam_splitter(&v, &v, 1.5).is_err());
        assert!(beam_splitter(&v, &v, -0.1).is_err());
    }
}
