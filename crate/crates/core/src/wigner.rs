//! Wigner functions: number-basis evaluation, closed forms, and overlaps.
//!
//! Units follow [`conventions`](crate::conventions): the vacuum is
//! `(2/π) e^{−2|α|²}` and `∫ W d²α = 1` with `d²α = dα⁺ dα⁻`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::fock::{FockDensity, Parity, TwoModeDensity};
use crate::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-4;

/// Rectangular sampling grid over `(α⁺, α⁻)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl Default for GridSpec {
    /// 241 × 241 points over `[−6, 6]²`.
    fn default() -> Self {
        Self::square(6.0, 241)
    }
}

impl GridSpec {
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            nx: points,
            p_min: -half_width,
            p_max: half_width,
            np: points,
        }
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        let h = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| lo + i as f64 * h).collect()
    }

    pub fn x_axis(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.nx)
    }

    pub fn p_axis(&self) -> Vec<f64> {
        Self::axis(self.p_min, self.p_max, self.np)
    }

    pub fn spacing(&self) -> (f64, f64) {
        let step = |lo: f64, hi: f64, n: usize| {
            if n > 1 {
                (hi - lo) / (n - 1) as f64
            } else {
                0.0
            }
        };
        (
            step(self.x_min, self.x_max, self.nx),
            step(self.p_min, self.p_max, self.np),
        )
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.np < 2 || !(self.x_max > self.x_min) || !(self.p_max > self.p_min) {
            return Err(Error::param(
                "grid",
                "need at least 2 points on ordered axes",
            ));
        }
        Ok(())
    }
}

/// Sampled Wigner function. `values[(i, j)]` is `W(x_axis[j] + i·p_axis[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    values: DMatrix<f64>,
    x_axis: Vec<f64>,
    p_axis: Vec<f64>,
    spacing: (f64, f64),
    normalization_warning: bool,
}

impl WignerGrid {
    /// Samples an arbitrary function of `α` on the grid.
    pub fn from_fn<F>(spec: &GridSpec, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> f64 + Sync,
    {
        spec.validate()?;
        let x_axis = spec.x_axis();
        let p_axis = spec.p_axis();
        let rows: Vec<Vec<f64>> = p_axis
            .par_iter()
            .map(|&p| x_axis.iter().map(|&x| f(Complex64::new(x, p))).collect())
            .collect();
        let values = DMatrix::from_fn(spec.np, spec.nx, |i, j| rows[i][j]);
        Ok(Self {
            values,
            x_axis,
            p_axis,
            spacing: spec.spacing(),
            normalization_warning: false,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn x_axis(&self) -> &[f64] {
        &self.x_axis
    }

    pub fn p_axis(&self) -> &[f64] {
        &self.p_axis
    }

    pub fn spacing(&self) -> (f64, f64) {
        self.spacing
    }

    /// Set when the grid sum of a normalized state misses 1 by more than 1e-4.
    pub fn normalization_warning(&self) -> bool {
        self.normalization_warning
    }

    /// Riemann sum `Σ W dx dp`.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.spacing.0 * self.spacing.1
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// `∫ W dα⁻` at each `α⁺` node: the amplitude-quadrature density.
    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.x_axis.len())
            .map(|j| self.values.column(j).sum() * self.spacing.1)
            .collect()
    }

    fn same_grid(&self, other: &WignerGrid) -> bool {
        self.x_axis == other.x_axis && self.p_axis == other.p_axis
    }
}

/// Wigner functions of the dyads `|m⟩⟨n|` at one phase-space point.
///
/// `K[(m, n)]` for `n ≥ m` is `(2/π)(−1)^m e^{−2|α|²} (2α)^{n−m} √(m!/n!) L_m^{(n−m)}(4|α|²)`;
/// the lower triangle is the complex conjugate. The Laguerre factor is carried
/// with its factorial normalization through the three-term recurrence.
pub fn fock_kernel(alpha: Complex64, dim: usize) -> DMatrix<Complex64> {
    let mut k = DMatrix::from_element(dim, dim, Complex64::default());
    for_each_kernel(alpha, dim, |m, n, v| {
        k[(m, n)] = v;
        k[(n, m)] = v.conj();
    });
    k
}

fn for_each_kernel<F: FnMut(usize, usize, Complex64)>(alpha: Complex64, dim: usize, mut f: F) {
    let z = 4.0 * alpha.norm_sqr();
    let two_alpha = alpha * 2.0;
    let pref = 2.0 / PI;
    let mut lead = Complex64::from((-z / 2.0).exp());
    for off in 0..dim {
        if off > 0 {
            lead = lead * two_alpha / (off as f64).sqrt();
        }
        let kf = off as f64;
        let mut prev = Complex64::default();
        let mut cur = lead;
        for m in 0..dim - off {
            if m > 0 {
                let mf = (m - 1) as f64;
                let next = (cur * (2.0 * mf + 1.0 + kf - z) - prev * (mf * (mf + kf)).sqrt())
                    / ((mf + 1.0) * (mf + 1.0 + kf)).sqrt();
                prev = cur;
                cur = next;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            f(m, m + off, cur * (pref * sign));
        }
    }
}

/// `W(α) = Σ ρ_mn K_mn(α)` for a single-mode density.
pub fn wigner_point(rho: &FockDensity, alpha: Complex64) -> f64 {
    let r = rho.matrix();
    let mut w = 0.0;
    for_each_kernel(alpha, rho.dim(), |m, n, v| {
        if m == n {
            w += r[(m, m)].re * v.re;
        } else {
            w += 2.0 * (r[(m, n)] * v).re;
        }
    });
    w
}

/// Samples the Wigner function of `rho` on a grid (rows computed in parallel).
pub fn wigner_from_density(rho: &FockDensity, spec: &GridSpec) -> Result<WignerGrid> {
    let mut grid = WignerGrid::from_fn(spec, |a| wigner_point(rho, a))?;
    grid.normalization_warning = (grid.integral() - rho.trace()).abs() > NORMALIZATION_TOL;
    Ok(grid)
}

/// Joint Wigner function `W(α, β)` of a two-mode state (α transmitted, β reflected).
pub fn wigner_two_mode(joint: &TwoModeDensity, alpha: Complex64, beta: Complex64) -> f64 {
    let ka = fock_kernel(alpha, joint.dim());
    let kb = fock_kernel(beta, joint.dim());
    joint
        .components()
        .iter()
        .map(|(p, psi)| {
            let inner = psi * &kb * psi.adjoint();
            p * ka.component_mul(&inner).sum().re
        })
        .sum()
}

/// Closed-form single-mode Wigner functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Vacuum,
    Coherent {
        gamma: Complex64,
    },
    /// `Ŝ(s)|0⟩`: `(2/π) exp[−2(α⁺)² e^{−2s} − 2(α⁻)² e^{2s}]`.
    Squeezed {
        s: f64,
    },
    /// `|1⟩`: `(2/π) e^{−2|α|²}(4|α|² − 1)`.
    SinglePhoton,
    /// `Ŝ(s)|1⟩`.
    SqueezedSinglePhoton {
        s: f64,
    },
    /// `|γ⟩ ± |−γ⟩`, normalized.
    Cat {
        gamma: Complex64,
        parity: Parity,
    },
}

pub fn closed_form(kind: ClosedForm, alpha: Complex64) -> f64 {
    let g0 = 2.0 / PI;
    match kind {
        ClosedForm::Vacuum => g0 * (-2.0 * alpha.norm_sqr()).exp(),
        ClosedForm::Coherent { gamma } => g0 * (-2.0 * (alpha - gamma).norm_sqr()).exp(),
        ClosedForm::Squeezed { s } => {
            g0 * (-2.0 * alpha.re.powi(2) * (-2.0 * s).exp()
                - 2.0 * alpha.im.powi(2) * (2.0 * s).exp())
            .exp()
        }
        ClosedForm::SinglePhoton => {
            let r2 = alpha.norm_sqr();
            g0 * (-2.0 * r2).exp() * (4.0 * r2 - 1.0)
        }
        ClosedForm::SqueezedSinglePhoton { s } => {
            let q = (-2.0 * s).exp() * alpha.re.powi(2) + (2.0 * s).exp() * alpha.im.powi(2);
            g0 * (-2.0 * q).exp() * (4.0 * q - 1.0)
        }
        ClosedForm::Cat { gamma, parity } => {
            let overlap = (-2.0 * gamma.norm_sqr()).exp();
            let sign = match parity {
                Parity::Even => 1.0,
                Parity::Odd => -1.0,
            };
            let n1 = 1.0 / (PI * (1.0 + sign * overlap));
            let fringe =
                2.0 * (-2.0 * alpha.norm_sqr()).exp() * (4.0 * (gamma.conj() * alpha).im).cos();
            n1 * ((-2.0 * (alpha - gamma).norm_sqr()).exp()
                + (-2.0 * (alpha + gamma).norm_sqr()).exp()
                + sign * fringe)
        }
    }
}

/// `π Σ W₁ W₂ dx dp`, the phase-space overlap `tr(ρ₁ρ₂)`.
pub fn overlap(w1: &WignerGrid, w2: &WignerGrid) -> Result<f64> {
    if !w1.same_grid(w2) {
        return Err(Error::GridMismatch);
    }
    Ok(PI * w1.values.dot(&w2.values) * w1.spacing.0 * w1.spacing.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_squeeze, coherent_state, fock_state, scs_state, squeezed_vacuum};

    fn close_on_box(rho: &FockDensity, kind: ClosedForm, tol: f64) {
        let mut worst: f64 = 0.0;
        for i in 0..31 {
            for j in 0..31 {
                let a = Complex64::new(-3.0 + 0.2 * i as f64, -3.0 + 0.2 * j as f64);
                worst = worst.max((wigner_point(rho, a) - closed_form(kind, a)).abs());
            }
        }
        assert!(worst < tol, "{kind:?}: max deviation {worst:e}");
    }

    #[test]
    fn fock_wigner_matches_closed_forms() {
        let d = 40;
        close_on_box(
            &fock_state(0, d).unwrap().to_density(),
            ClosedForm::Vacuum,
            1e-6,
        );
        close_on_box(
            &fock_state(1, d).unwrap().to_density(),
            ClosedForm::SinglePhoton,
            1e-6,
        );
        let g = Complex64::new(0.8, -0.5);
        close_on_box(
            &coherent_state(g, d).unwrap().to_density(),
            ClosedForm::Coherent { gamma: g },
            1e-6,
        );
        for s in [-0.37, 0.52] {
            close_on_box(
                &squeezed_vacuum(s, d).unwrap().to_density(),
                ClosedForm::Squeezed { s },
                1e-6,
            );
        }
        let cat = Complex64::new(0.0, 1.1);
        close_on_box(
            &scs_state(cat, Parity::Even, d).unwrap().to_density(),
            ClosedForm::Cat {
                gamma: cat,
                parity: Parity::Even,
            },
            1e-6,
        );
        // Ŝ(0.67)|1⟩ leaks ~1e-9 past 40 levels, which shows up at the 1e-5 level here
        let sp = apply_squeeze(&fock_state(1, 60).unwrap(), 0.67).unwrap();
        close_on_box(
            &sp.to_density(),
            ClosedForm::SqueezedSinglePhoton { s: 0.67 },
            1e-6,
        );
    }

    #[test]
    fn point_values() {
        let vac = fock_state(0, 10).unwrap().to_density();
        assert!((wigner_point(&vac, Complex64::default()) - 2.0 / PI).abs() < 1e-14);
        let one = fock_state(1, 10).unwrap().to_density();
        assert!((wigner_point(&one, Complex64::default()) + 2.0 / PI).abs() < 1e-14);
        assert!(
            (closed_form(ClosedForm::Squeezed { s: 0.0 }, Complex64::default()) - 2.0 / PI).abs()
                < 1e-15
        );
        assert!(closed_form(ClosedForm::SinglePhoton, Complex64::new(0.3, 0.4)).abs() < 1e-15);
        let cat = ClosedForm::Cat {
            gamma: Complex64::new(0.0, 1.1),
            parity: Parity::Even,
        };
        assert!((closed_form(cat, Complex64::default()) - 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn cat_cosine_form_matches_complex_exponentials() {
        let gamma = Complex64::new(0.3, 1.1);
        let n1 = 1.0 / (PI * (1.0 + (-2.0 * gamma.norm_sqr()).exp()));
        for &(x, p) in &[(0.1, 0.2), (-0.7, 1.3), (1.5, -0.4)] {
            let a = Complex64::new(x, p);
            let cross = (-2.0 * gamma.norm_sqr()).exp()
                * ((-2.0 * (a + gamma).conj() * (a - gamma)).exp()
                    + (-2.0 * (a + gamma) * (a - gamma).conj()).exp());
            let literal = n1
                * ((-2.0 * (a - gamma).norm_sqr()).exp()
                    + (-2.0 * (a + gamma).norm_sqr()).exp()
                    + cross.re);
            let cf = closed_form(
                ClosedForm::Cat {
                    gamma,
                    parity: Parity::Even,
                },
                a,
            );
            assert!((literal - cf).abs() < 1e-13);
        }
    }

    #[test]
    fn overlaps_and_grid_checks() {
        let spec = GridSpec::default();
        let vac = wigner_from_density(&fock_state(0, 20).unwrap().to_density(), &spec).unwrap();
        let one = wigner_from_density(&fock_state(1, 20).unwrap().to_density(), &spec).unwrap();
        assert!(!vac.normalization_warning());
        assert!((overlap(&vac, &vac).unwrap() - 1.0).abs() < 1e-4);
        assert!(overlap(&vac, &one).unwrap().abs() < 1e-4);
        assert!(one.min() >= -2.0 / PI - 1e-9);
        let other = wigner_from_density(
            &fock_state(0, 20).unwrap().to_density(),
            &GridSpec::square(5.0, 101),
        )
        .unwrap();
        assert!(matches!(overlap(&vac, &other), Err(Error::GridMismatch)));
    }

    #[test]
    fn coarse_grid_is_flagged() {
        let rho = squeezed_vacuum(0.7, 40).unwrap().to_density();
        let g = wigner_from_density(&rho, &GridSpec::square(6.0, 9)).unwrap();
        assert!(g.normalization_warning());
    }
}
