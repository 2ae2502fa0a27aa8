use nalgebra::DVector;
use num_complex::Complex64;

use crate::conventions::TAIL_MASS_LIMIT;
use crate::fock::{FockVector, Parity};
use crate::{Error, Result};

// Preparers never look past this many levels when searching for an adequate dim.
const MAX_SEARCH_DIM: usize = 4096;

fn require_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::param("dim", "must be positive"));
    }
    Ok(())
}

/// Builds amplitudes from a term generator and enforces the tail-mass policy.
///
/// `term(n, prev)` returns the amplitude of `|n⟩` given the one of `|n−1⟩`;
/// the full (untruncated) state must have unit norm.
fn truncated_series<F>(dim: usize, first: Complex64, mut next: F) -> Result<FockVector>
where
    F: FnMut(usize, Complex64) -> Complex64,
{
    let mut amps = DVector::from_element(dim, Complex64::default());
    let mut c = first;
    let mut kept = 0.0;
    for n in 0..dim {
        if n > 0 {
            c = next(n, c);
        }
        amps[n] = c;
        kept += c.norm_sqr();
    }
    let tail = (1.0 - kept).max(0.0);
    if tail > TAIL_MASS_LIMIT {
        let mut d = dim;
        let mut total = kept;
        while d < MAX_SEARCH_DIM && 1.0 - total > TAIL_MASS_LIMIT {
            c = next(d, c);
            total += c.norm_sqr();
            d += 1;
        }
        return Err(Error::InsufficientDimension {
            dim,
            tail_mass: tail,
            limit: TAIL_MASS_LIMIT,
            min_dim: (d < MAX_SEARCH_DIM).then_some(d),
        });
    }
    Ok(FockVector::with_tail(amps, tail))
}

/// Number state `|n⟩`.
pub fn fock_state(n: usize, dim: usize) -> Result<FockVector> {
    if n >= dim {
        return Err(Error::FockIndex { n, dim });
    }
    let mut amps = DVector::from_element(dim, Complex64::default());
    amps[n] = Complex64::new(1.0, 0.0);
    Ok(FockVector::with_tail(amps, 0.0))
}

/// Coherent state `|γ⟩ = e^{−|γ|²/2} Σ γⁿ/√(n!) |n⟩`.
pub fn coherent_state(gamma: Complex64, dim: usize) -> Result<FockVector> {
    require_dim(dim)?;
    if !gamma.re.is_finite() || !gamma.im.is_finite() {
        return Err(Error::param("gamma", "non-finite amplitude"));
    }
    let first = Complex64::from((-gamma.norm_sqr() / 2.0).exp());
    truncated_series(dim, first, |n, prev| prev * gamma / (n as f64).sqrt())
}

/// Squeezed vacuum `Ŝ(s)|0⟩` with `Ŝ(s) = exp[−(s/2)(a² − a†²)]`.
///
/// With this operator, `s > 0` stretches `α⁺` (variance `e^{2s}/4`) and
/// compresses `α⁻` (variance `e^{−2s}/4`). The amplitudes are
/// `⟨2k|Ŝ(s)|0⟩ = sech(s)^{1/2} tanh(s)^k √((2k)!)/(2^k k!)`.
pub fn squeezed_vacuum(s: f64, dim: usize) -> Result<FockVector> {
    require_dim(dim)?;
    if !s.is_finite() {
        return Err(Error::param("s", "non-finite squeezing"));
    }
    let t = s.tanh();
    let first = Complex64::from(1.0 / s.cosh().sqrt());
    let mut even = first;
    truncated_series(dim, first, move |n, _prev| {
        if n % 2 == 1 {
            Complex64::default()
        } else {
            even *= t * ((n - 1) as f64 / n as f64).sqrt();
            even
        }
    })
}

/// Normalized cat state `|γ⟩ ± |−γ⟩`.
pub fn scs_state(gamma: Complex64, parity: Parity, dim: usize) -> Result<FockVector> {
    let coh = coherent_state(gamma, dim)?;
    let overlap = (-2.0 * gamma.norm_sqr()).exp();
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let norm_sqr = 2.0 * (1.0 + sign * overlap);
    if norm_sqr <= 0.0 {
        return Err(Error::Domain("odd cat state of zero amplitude".into()));
    }
    let scale = 2.0 / norm_sqr.sqrt();
    let amps = DVector::from_fn(dim, |n, _| {
        if parity.contains(n) {
            coh.amplitude(n) * scale
        } else {
            Complex64::default()
        }
    });
    let tail = (1.0 - amps.norm_squared()).max(0.0);
    if tail > TAIL_MASS_LIMIT {
        return Err(Error::InsufficientDimension {
            dim,
            tail_mass: tail,
            limit: TAIL_MASS_LIMIT,
            min_dim: None,
        });
    }
    Ok(FockVector::with_tail(amps, tail))
}
