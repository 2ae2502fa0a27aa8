use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::conventions::{OPERATOR_BUFFER, TAIL_MASS_LIMIT};
use crate::fock::FockVector;
use crate::{Error, Result};

/// Truncated annihilation operator, `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::from((j as f64).sqrt())
        } else {
            Complex64::default()
        }
    })
}

fn squeeze_generator(s: f64, dim: usize) -> DMatrix<f64> {
    // −(s/2)(a² − a†²); a² has entries ⟨n|a²|n+2⟩ = √((n+1)(n+2)).
    DMatrix::from_fn(dim, dim, |i, j| {
        let w = |n: usize| (((n + 1) * (n + 2)) as f64).sqrt();
        if j == i + 2 {
            -0.5 * s * w(i)
        } else if i == j + 2 {
            0.5 * s * w(j)
        } else {
            0.0
        }
    })
}

fn buffered_squeeze(s: f64, dim: usize) -> DMatrix<Complex64> {
    squeeze_generator(s, dim + OPERATOR_BUFFER)
        .exp()
        .map(Complex64::from)
}

fn buffered_displacement(gamma: Complex64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim + OPERATOR_BUFFER);
    let generator = a.adjoint() * gamma - &a * gamma.conj();
    generator.exp()
}

/// `Ŝ(s) = exp[−(s/2)(a² − a†²)]`, exponentiated on `dim + 20` levels and cropped.
pub fn squeeze_operator(s: f64, dim: usize) -> DMatrix<Complex64> {
    buffered_squeeze(s, dim)
        .view((0, 0), (dim, dim))
        .into_owned()
}

/// `D(γ) = exp[γa† − γ*a]`, exponentiated on `dim + 20` levels and cropped.
pub fn displacement_operator(gamma: Complex64, dim: usize) -> DMatrix<Complex64> {
    buffered_displacement(gamma, dim)
        .view((0, 0), (dim, dim))
        .into_owned()
}

fn apply_buffered(state: &FockVector, op: DMatrix<Complex64>) -> Result<FockVector> {
    let dim = state.dim();
    let mut padded = DVector::from_element(op.nrows(), Complex64::default());
    padded.rows_mut(0, dim).copy_from(state.amplitudes());
    let out = op * padded;
    let lost: f64 = out.rows(dim, out.len() - dim).norm_squared();
    if lost > TAIL_MASS_LIMIT {
        return Err(Error::InsufficientDimension {
            dim,
            tail_mass: lost,
            limit: TAIL_MASS_LIMIT,
            min_dim: None,
        });
    }
    Ok(FockVector::with_tail(
        out.rows(0, dim).into_owned(),
        state.tail_mass() + lost,
    ))
}

/// Applies `Ŝ(s)` to a state.
pub fn apply_squeeze(state: &FockVector, s: f64) -> Result<FockVector> {
    if !s.is_finite() {
        return Err(Error::param("s", "non-finite squeezing"));
    }
    if s == 0.0 {
        return Ok(state.clone());
    }
    apply_buffered(state, buffered_squeeze(s, state.dim()))
}

/// Applies `D(γ)` to a state.
pub fn apply_displace(state: &FockVector, gamma: Complex64) -> Result<FockVector> {
    if !gamma.re.is_finite() || !gamma.im.is_finite() {
        return Err(Error::param("gamma", "non-finite amplitude"));
    }
    if gamma == Complex64::default() {
        return Ok(state.clone());
    }
    apply_buffered(state, buffered_displacement(gamma, state.dim()))
}
