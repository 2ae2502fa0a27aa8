//! Closed-form engine for Gaussian states in shot-noise units.
//!
//! Quadratures are `X⁺ = a + a†` and `X⁻ = −i(a − a†)`, so vacuum has unit
//! variance and a coherent amplitude `γ` has mean `(2γ⁺, 2γ⁻)`. Two-mode
//! vectors are ordered `(x_t, p_t, x_r, p_r)`.

use nalgebra::{DMatrix, Matrix2, Matrix4, SymmetricEigen, Vector2, Vector4};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::conditioner::s_prime;
use crate::conventions::{check_reflectivity, transmissivity};
use crate::{Error, Result};

const UNCERTAINTY_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;

/// Smallest eigenvalue of `V + iΩ`; negative values violate the uncertainty relation.
pub fn uncertainty_margin(cov: &DMatrix<f64>) -> f64 {
    let n = cov.nrows();
    let mut h = DMatrix::from_fn(n, n, |i, j| Complex64::from(cov[(i, j)]));
    for k in (0..n).step_by(2) {
        h[(k, k + 1)] += Complex64::i();
        h[(k + 1, k)] -= Complex64::i();
    }
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn check_cov(cov: &DMatrix<f64>) -> Result<()> {
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("covariance", "non-finite entry"));
    }
    if (cov - cov.transpose()).amax() > SYMMETRY_TOL * cov.amax().max(1.0) {
        return Err(Error::param("covariance", "not symmetric"));
    }
    let m = uncertainty_margin(cov);
    if m < -UNCERTAINTY_TOL {
        return Err(Error::param(
            "covariance",
            format!("violates the uncertainty relation (min eigenvalue {m:.3e})"),
        ));
    }
    Ok(())
}

/// Single-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    mean: Vector2<f64>,
    cov: Matrix2<f64>,
}

impl GaussianState {
    pub fn new(mean: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("mean", "non-finite entry"));
        }
        check_cov(&DMatrix::from_column_slice(2, 2, cov.as_slice()))?;
        Ok(Self { mean, cov })
    }

    /// Diagonal covariance `(V⁺, V⁻)`.
    pub fn from_variances(mean: Vector2<f64>, v_plus: f64, v_minus: f64) -> Result<Self> {
        Self::new(mean, Matrix2::new(v_plus, 0.0, 0.0, v_minus))
    }

    /// Accepts any positive variances without the uncertainty check, for
    /// sample estimates that may dip below it through statistical noise.
    pub fn from_estimate(mean: Vector2<f64>, v_plus: f64, v_minus: f64) -> Result<Self> {
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("mean", "non-finite entry"));
        }
        if !(v_plus > 0.0 && v_minus > 0.0 && v_plus.is_finite() && v_minus.is_finite()) {
            return Err(Error::param(
                "variance",
                format!("estimates ({v_plus}, {v_minus}) must be positive"),
            ));
        }
        Ok(Self {
            mean,
            cov: Matrix2::new(v_plus, 0.0, 0.0, v_minus),
        })
    }

    pub fn vacuum() -> Self {
        Self {
            mean: Vector2::zeros(),
            cov: Matrix2::identity(),
        }
    }

    pub fn coherent(gamma: Complex64) -> Self {
        Self {
            mean: Vector2::new(2.0 * gamma.re, 2.0 * gamma.im),
            cov: Matrix2::identity(),
        }
    }

    /// `Ŝ(s)|0⟩`: variances `(e^{2s}, e^{−2s})`.
    pub fn squeezed(s: f64) -> Self {
        Self::displaced_squeezed(Complex64::default(), s)
    }

    /// `D(β) Ŝ(s)|0⟩`.
    pub fn displaced_squeezed(beta: Complex64, s: f64) -> Self {
        Self {
            mean: Vector2::new(2.0 * beta.re, 2.0 * beta.im),
            cov: Matrix2::new((2.0 * s).exp(), 0.0, 0.0, (-2.0 * s).exp()),
        }
    }

    pub fn mean(&self) -> Vector2<f64> {
        self.mean
    }

    pub fn cov(&self) -> Matrix2<f64> {
        self.cov
    }

    /// `(V⁺, V⁻)`.
    pub fn variances(&self) -> (f64, f64) {
        (self.cov[(0, 0)], self.cov[(1, 1)])
    }

    pub fn uncertainty_margin(&self) -> f64 {
        uncertainty_margin(&DMatrix::from_column_slice(2, 2, self.cov.as_slice()))
    }

    /// Wigner function at `α = α⁺ + iα⁻` (Wigner units, integrates to 1 over `d²α`).
    pub fn wigner(&self, alpha: Complex64) -> f64 {
        let v = self.cov / 4.0;
        let d = Vector2::new(alpha.re, alpha.im) - self.mean / 2.0;
        let det = v.determinant();
        let inv = v.try_inverse().unwrap_or_else(Matrix2::zeros);
        (-0.5 * (d.transpose() * inv * d)[(0, 0)]).exp() / (2.0 * PI * det.sqrt())
    }
}

/// Two-mode Gaussian state with ordering `(x_t, p_t, x_r, p_r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeGaussian {
    mean: Vector4<f64>,
    cov: Matrix4<f64>,
}

impl TwoModeGaussian {
    pub fn product(a: &GaussianState, b: &GaussianState) -> Self {
        let mut mean = Vector4::zeros();
        let mut cov = Matrix4::zeros();
        mean.fixed_rows_mut::<2>(0).copy_from(&a.mean);
        mean.fixed_rows_mut::<2>(2).copy_from(&b.mean);
        cov.fixed_view_mut::<2, 2>(0, 0).copy_from(&a.cov);
        cov.fixed_view_mut::<2, 2>(2, 2).copy_from(&b.cov);
        Self { mean, cov }
    }

    pub fn mean(&self) -> Vector4<f64> {
        self.mean
    }

    pub fn cov(&self) -> Matrix4<f64> {
        self.cov
    }

    pub fn uncertainty_margin(&self) -> f64 {
        uncertainty_margin(&DMatrix::from_column_slice(4, 4, self.cov.as_slice()))
    }

    fn transform(&self, s: &Matrix4<f64>) -> Self {
        Self {
            mean: s * self.mean,
            cov: s * self.cov * s.transpose(),
        }
    }

    /// Mode 0 is the input, mode 1 the ancilla; afterwards mode 0 is
    /// `√T a − √R b` (transmitted) and mode 1 is `√R a + √T b` (reflected).
    pub fn beam_splitter(&self, reflectivity: f64) -> Result<Self> {
        check_reflectivity(reflectivity)?;
        let t = transmissivity(reflectivity).sqrt();
        let r = reflectivity.sqrt();
        #[rustfmt::skip]
        let s = Matrix4::new(
            t, 0.0, -r, 0.0,
            0.0, t, 0.0, -r,
            r, 0.0, t, 0.0,
            0.0, r, 0.0, t,
        );
        Ok(self.transform(&s))
    }

    /// Pure loss on `mode` with transmission `eta`, admixing vacuum.
    pub fn loss(&self, mode: usize, eta: f64) -> Result<Self> {
        if mode > 1 {
            return Err(Error::param("mode", format!("{mode} out of range")));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::param("eta", format!("{eta} outside [0, 1]")));
        }
        let mut s = Matrix4::identity();
        s[(2 * mode, 2 * mode)] = eta.sqrt();
        s[(2 * mode + 1, 2 * mode + 1)] = eta.sqrt();
        let mut out = self.transform(&s);
        out.cov[(2 * mode, 2 * mode)] += 1.0 - eta;
        out.cov[(2 * mode + 1, 2 * mode + 1)] += 1.0 - eta;
        Ok(out)
    }

    /// Adds classical Gaussian noise of variance `var` to quadrature `index`.
    pub fn add_noise(&self, index: usize, var: f64) -> Result<Self> {
        if index > 3 {
            return Err(Error::param("index", format!("{index} out of range")));
        }
        if !(var >= 0.0) {
            return Err(Error::param("noise variance", format!("{var} must be ≥ 0")));
        }
        let mut out = *self;
        out.cov[(index, index)] += var;
        Ok(out)
    }

    pub fn transmitted(&self) -> GaussianState {
        self.marginal(0)
    }

    pub fn reflected(&self) -> GaussianState {
        self.marginal(1)
    }

    fn marginal(&self, mode: usize) -> GaussianState {
        GaussianState {
            mean: self.mean.fixed_rows::<2>(2 * mode).into(),
            cov: self.cov.fixed_view::<2, 2>(2 * mode, 2 * mode).into(),
        }
    }

    /// Transmitted state after measuring `x_r = x` (SNL units). The
    /// covariance does not depend on `x`.
    pub fn condition_reflected_x(&self, x: f64) -> Result<GaussianState> {
        if !x.is_finite() {
            return Err(Error::param("x", "non-finite outcome"));
        }
        let vk = self.cov[(2, 2)];
        if !(vk > 0.0) {
            return Err(Error::Domain(format!(
                "measured quadrature variance {vk} is not positive"
            )));
        }
        let c: Vector2<f64> = self.cov.fixed_view::<2, 1>(0, 2).into();
        let mean = Vector2::new(self.mean[0], self.mean[1]) + c * ((x - self.mean[2]) / vk);
        let cov = self.cov.fixed_view::<2, 2>(0, 0) - c * c.transpose() / vk;
        Ok(GaussianState { mean, cov })
    }
}

/// Transmitted output for a general Gaussian input and ancilla, conditioned on `x_r = x` (SNL).
pub fn condition_on_reflected(
    input: &GaussianState,
    ancilla: &GaussianState,
    reflectivity: f64,
    x_snl: f64,
) -> Result<GaussianState> {
    TwoModeGaussian::product(input, ancilla)
        .beam_splitter(reflectivity)?
        .condition_reflected_x(x_snl)
}

/// Coherent input `γ`, ancilla `Ŝ(s)|0⟩`, outcome `x_snl = 2·x_wig`.
pub fn condition_coherent(
    gamma: Complex64,
    reflectivity: f64,
    s: f64,
    x_snl: f64,
) -> Result<GaussianState> {
    condition_on_reflected(
        &GaussianState::coherent(gamma),
        &GaussianState::squeezed(s),
        reflectivity,
        x_snl,
    )
}

/// Ideal squeezer with `s′ = −ln T / 2` applied to the input's mean and covariance.
pub fn ideal_target(input: &GaussianState, reflectivity: f64) -> Result<GaussianState> {
    check_reflectivity(reflectivity)?;
    let t = transmissivity(reflectivity);
    if t <= 0.0 {
        return Err(Error::Domain("ideal squeezer undefined at R = 1".into()));
    }
    let k = Matrix2::new(1.0 / t.sqrt(), 0.0, 0.0, t.sqrt());
    Ok(GaussianState {
        mean: k * input.mean,
        cov: k * input.cov * k,
    })
}

/// Displaced squeezed state produced from `|γ⟩` at `x = 0`:
/// `D(√T[e^{2s′}γ⁺ + iγ⁻]) Ŝ(s′)|0⟩`.
pub fn coherent_output_target(
    gamma: Complex64,
    reflectivity: f64,
    s: f64,
) -> Result<GaussianState> {
    let sp = s_prime(reflectivity, s)?;
    let t = transmissivity(reflectivity).sqrt();
    let beta = Complex64::new(t * (2.0 * sp).exp() * gamma.re, t * gamma.im);
    Ok(GaussianState::displaced_squeezed(beta, sp))
}

fn positive_definite(cov: &Matrix2<f64>) -> bool {
    cov[(0, 0)] > 0.0 && cov.determinant() > 0.0
}

/// `π ∫ W_a W_b d²α` in closed form.
pub fn gaussian_fidelity(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    if !positive_definite(&a.cov) || !positive_definite(&b.cov) {
        return Err(Error::param("covariance", "must be positive definite"));
    }
    let sigma = a.cov + b.cov;
    let d = a.mean - b.mean;
    let inv = sigma
        .try_inverse()
        .ok_or_else(|| Error::Domain("singular covariance sum".into()))?;
    Ok(2.0 / sigma.determinant().sqrt() * (-0.5 * (d.transpose() * inv * d)[(0, 0)]).exp())
}

/// `tr ρ² = (det V)^{−1/2}`.
pub fn purity(state: &GaussianState) -> Result<f64> {
    if !positive_definite(&state.cov) {
        return Err(Error::param("covariance", "must be positive definite"));
    }
    Ok(1.0 / state.cov.determinant().sqrt())
}

pub fn purity_norm(output: &GaussianState, input: &GaussianState) -> Result<f64> {
    Ok(purity(output)? / purity(input)?)
}

/// Best classical fidelity for the two splitting ratios that have a known value.
pub fn classical_limit(reflectivity: f64) -> Result<f64> {
    if (reflectivity - 0.75).abs() < 1e-12 {
        Ok(0.8)
    } else if (reflectivity - 0.5).abs() < 1e-12 {
        Ok(8f64.sqrt() / 3.0)
    } else {
        Err(Error::Unsupported(format!(
            "no classical fidelity bound known for R = {reflectivity}"
        )))
    }
}

/// Mean-displacement gains `g± = ⟨X±_out⟩ / ⟨X±_in⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainReport {
    pub g_plus: Option<f64>,
    pub g_minus: Option<f64>,
    pub ideal_g_plus: f64,
    pub ideal_g_minus: f64,
}

impl GainReport {
    /// Gains are `None` where the input mean vanishes.
    pub fn new(
        output_mean: Vector2<f64>,
        input_mean: Vector2<f64>,
        reflectivity: f64,
    ) -> Result<Self> {
        check_reflectivity(reflectivity)?;
        let t = transmissivity(reflectivity);
        let ratio = |o: f64, i: f64| (i != 0.0).then(|| o / i).filter(|g| g.is_finite());
        Ok(Self {
            g_plus: ratio(output_mean[0], input_mean[0]),
            g_minus: ratio(output_mean[1], input_mean[1]),
            ideal_g_plus: 1.0 / t.sqrt(),
            ideal_g_minus: t.sqrt(),
        })
    }
}
