use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::FockDensity;
use crate::{Error, Result};

/// Photon-number parity of a cat state or of a Fock index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn contains(self, n: usize) -> bool {
        Parity::of(n) == self
    }
}

/// Pure state `Σ cₙ|n⟩` on a truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: DVector<Complex64>,
    tail_mass: f64,
}

impl FockVector {
    /// Wraps user-supplied amplitudes, rescaling them to unit norm.
    pub fn from_amplitudes(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::param("amplitudes", "zero or non-finite norm"));
        }
        Ok(Self {
            amplitudes: amplitudes / Complex64::from(norm),
            tail_mass: 0.0,
        })
    }

    pub(crate) fn with_tail(amplitudes: DVector<Complex64>, tail_mass: f64) -> Self {
        Self {
            amplitudes,
            tail_mass: tail_mass.max(0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
    }

    /// Population lost outside the retained basis when the state was prepared.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Same state rescaled to unit norm; the tail mass is kept as a record.
    pub fn normalized(&self) -> Self {
        let n = self.amplitudes.norm();
        Self {
            amplitudes: &self.amplitudes / Complex64::from(n),
            tail_mass: self.tail_mass,
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `⟨a⟩` using the truncated ladder operator.
    pub fn mean_annihilation(&self) -> Complex64 {
        (1..self.dim())
            .map(|n| self.amplitudes[n - 1].conj() * self.amplitudes[n] * (n as f64).sqrt())
            .sum()
    }

    /// Largest modulus among amplitudes whose index has the wrong parity.
    pub fn wrong_parity_amplitude(&self, parity: Parity) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(n, _)| !parity.contains(*n))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn to_density(&self) -> FockDensity {
        FockDensity::from_pure(self)
    }
}
