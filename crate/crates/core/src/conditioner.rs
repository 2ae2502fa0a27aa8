//! Homodyne post-selection on the reflected mode.
//!
//! The reflected mode of the joint state is projected onto the amplitude
//! quadrature eigenstate `|x⟩` (Wigner units). `P₁(x)` is the probability
//! density of that outcome, so integrating it over `[−x0, x0]` gives the
//! success probability of the window.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::conventions::{check_reflectivity, transmissivity};
use crate::fock::{
    apply_displace, apply_squeeze, coherent_state, fock_state, quadrature_wavefunctions, scs_state,
    squeezed_vacuum, BeamSplitter, FockDensity, FockVector, Parity, TwoModeDensity,
};
use crate::wigner::{wigner_from_density, GridSpec, WignerGrid};
use crate::{Error, Result};

/// Trace and norm tolerance accepted by [`fidelity`].
const NORMALIZATION_TOL: f64 = 1e-6;
/// Node-doubling tolerance for window integrals.
const CONVERGENCE_TOL: f64 = 1e-4;
pub const DEFAULT_WINDOW_NODES: usize = 65;
pub const MIN_WINDOW_NODES: usize = 33;

/// State sent into the beam splitter.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    Fock { n: usize },
    Coherent { gamma: Complex64 },
    Custom(FockVector),
}

/// Reference state for fidelities.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    /// `Ŝ(s′)|n⟩`; `s′` defaults to [`s_prime`] of the protocol.
    SqueezedFock {
        n: usize,
        s_prime: Option<f64>,
    },
    Cat {
        gamma: Complex64,
        parity: Parity,
    },
    /// Output of the `x = 0` transform of a coherent input,
    /// `D(√T[e^{2s′}γ⁺ + iγ⁻]) Ŝ(s′)|0⟩`.
    DisplacedSqueezed,
    /// Ideal squeezer `Ŝ(−ln T / 2)` applied to the input state.
    IdealSqueezedInput,
    Custom(FockVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub reflectivity: f64,
    /// Ancilla squeezing parameter `s`.
    pub squeezing: f64,
    /// Post-selection half-width, Wigner units.
    pub x0: f64,
    pub input: InputSpec,
    pub target: TargetSpec,
    pub dim: usize,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        check_reflectivity(self.reflectivity)?;
        if !self.squeezing.is_finite() {
            return Err(Error::param("squeezing", "non-finite"));
        }
        if !(self.x0 >= 0.0) || !self.x0.is_finite() {
            return Err(Error::param(
                "x0",
                format!("{} must be finite and ≥ 0", self.x0),
            ));
        }
        if self.dim < 2 {
            return Err(Error::param("dim", "need at least 2 levels"));
        }
        Ok(())
    }
}

/// Conditional output for one homodyne outcome.
#[derive(Debug, Clone)]
pub struct ConditionalResult {
    pub x: f64,
    /// Normalized conditional state.
    pub state: FockDensity,
    /// `P₁(x)`, probability per unit `x`.
    pub density: f64,
    pub fidelity: f64,
}

/// Window-averaged output over `|x| < x0`.
#[derive(Debug, Clone)]
pub struct WindowResult {
    pub x0: f64,
    pub avg_fidelity: f64,
    pub success_prob: f64,
    /// Normalized mixture `∫ ρ̃(x) dx / P_s`, the state behind `W_ave`.
    pub avg_state: FockDensity,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Estimates from the node-doubled rule used for the convergence check.
    pub refined_fidelity: f64,
    pub refined_success_prob: f64,
}

impl WindowResult {
    pub fn average_wigner(&self, spec: &GridSpec) -> Result<WignerGrid> {
        wigner_from_density(&self.avg_state, spec)
    }
}

/// `s′ = −ln[(T + e^{−2s} R)²] / 4`.
pub fn s_prime(reflectivity: f64, s: f64) -> Result<f64> {
    check_reflectivity(reflectivity)?;
    let arg = transmissivity(reflectivity) + (-2.0 * s).exp() * reflectivity;
    if !(arg > 0.0) || !arg.is_finite() {
        return Err(Error::Domain(format!(
            "log argument {arg} for R={reflectivity}, s={s}"
        )));
    }
    Ok(-(arg * arg).ln() / 4.0)
}

/// `⟨ψ|ρ|ψ⟩`; equals `π∫W_ρ W_ψ d²α` for a pure target.
pub fn fidelity(rho: &FockDensity, target: &FockVector) -> Result<f64> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { trace: tr });
    }
    let n = target.norm_sqr();
    if (n - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { trace: n });
    }
    rho.expectation_in(target)
}

/// Projects the reflected mode onto `|x⟩`; returns the unnormalized
/// transmitted state and `P₁(x)` (its trace).
pub fn homodyne_project(joint: &TwoModeDensity, x: f64) -> Result<(FockDensity, f64)> {
    if !x.is_finite() {
        return Err(Error::param("x", "non-finite outcome"));
    }
    let w = wavefunction_vector(x, joint.dim());
    let rho = project_components(joint.components(), &w);
    let p = rho.trace();
    Ok((rho, p))
}

fn wavefunction_vector(x: f64, dim: usize) -> DVector<Complex64> {
    DVector::from_iterator(
        dim,
        quadrature_wavefunctions(x, dim)
            .into_iter()
            .map(Complex64::from),
    )
}

fn project_components(
    components: &[(f64, DMatrix<Complex64>)],
    w: &DVector<Complex64>,
) -> FockDensity {
    let dim = w.len();
    let mut m = DMatrix::from_element(dim, dim, Complex64::default());
    for (p, psi) in components {
        let phi = psi * w;
        m += (&phi * phi.adjoint()) * Complex64::from(*p);
    }
    FockDensity::from_matrix_unchecked(m)
}

/// Composite Simpson nodes and weights on `[a, b]` with an odd node count.
pub fn simpson_rule(a: f64, b: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::param("n_nodes", format!("{n} must be odd and ≥ 3")));
    }
    let h = (b - a) / (n - 1) as f64;
    let nodes = (0..n).map(|i| a + i as f64 * h).collect();
    let weights = (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect();
    Ok((nodes, weights))
}

/// Joint state and target prepared once for repeated conditioning.
#[derive(Debug, Clone)]
pub struct Protocol {
    config: ProtocolConfig,
    joint: TwoModeDensity,
    target: FockVector,
}

struct Integrals {
    success_prob: f64,
    weighted_overlap: f64,
    mixture: DMatrix<Complex64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

struct NodeValue {
    rho: FockDensity,
    density: f64,
    overlap: f64,
}

impl Protocol {
    pub fn prepare(config: &ProtocolConfig) -> Result<Self> {
        config.validate()?;
        let dim = config.dim;
        let input = match &config.input {
            InputSpec::Fock { n } => fock_state(*n, dim)?,
            InputSpec::Coherent { gamma } => coherent_state(*gamma, dim)?,
            InputSpec::Custom(v) => {
                if v.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        left: dim,
                        right: v.dim(),
                    });
                }
                v.clone()
            }
        };
        let ancilla = squeezed_vacuum(config.squeezing, dim)?;
        let target = build_target(config, &input)?.normalized();
        let joint = BeamSplitter::new(config.reflectivity, dim)?.apply_pure(&input, &ancilla)?;
        Ok(Self {
            config: config.clone(),
            joint,
            target,
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn joint(&self) -> &TwoModeDensity {
        &self.joint
    }

    pub fn target(&self) -> &FockVector {
        &self.target
    }

    fn evaluate(&self, x: f64) -> NodeValue {
        let w = wavefunction_vector(x, self.config.dim);
        let rho = project_components(self.joint.components(), &w);
        let density = rho.trace();
        let t = self.target.amplitudes();
        let overlap = t.dotc(&(rho.matrix() * t)).re;
        NodeValue {
            rho,
            density,
            overlap,
        }
    }

    /// Conditional state, `P₁(x)` and fidelity for one outcome.
    pub fn conditional(&self, x: f64) -> Result<ConditionalResult> {
        if !x.is_finite() {
            return Err(Error::param("x", "non-finite outcome"));
        }
        let node = self.evaluate(x);
        let state = node.rho.normalized()?;
        let fid = fidelity(&state, &self.target)?;
        Ok(ConditionalResult {
            x,
            state,
            density: node.density,
            fidelity: fid,
        })
    }

    /// One result per grid node, evaluated in parallel and returned in grid order.
    pub fn map(&self, xs: &[f64]) -> Result<Vec<ConditionalResult>> {
        xs.par_iter().map(|&x| self.conditional(x)).collect()
    }

    fn integrate(&self, x0: f64, n_nodes: usize) -> Result<Integrals> {
        let (nodes, weights) = simpson_rule(-x0, x0, n_nodes)?;
        let values: Vec<NodeValue> = nodes.par_iter().map(|&x| self.evaluate(x)).collect();
        let dim = self.config.dim;
        let mut p_s = 0.0;
        let mut pf = 0.0;
        let mut mix = DMatrix::from_element(dim, dim, Complex64::default());
        for (v, w) in values.iter().zip(&weights) {
            p_s += w * v.density;
            pf += w * v.overlap;
            mix += v.rho.matrix() * Complex64::from(*w);
        }
        Ok(Integrals {
            success_prob: p_s,
            weighted_overlap: pf,
            mixture: mix,
            nodes,
            weights,
        })
    }

    /// Integrates `P₁`, `P₁F₁` and `P₁ρ` over `[−x0, x0]`, checking the result
    /// against the rule with doubled node density.
    pub fn window(&self, x0: f64, n_nodes: usize) -> Result<WindowResult> {
        if !(x0 > 0.0) || !x0.is_finite() {
            return Err(Error::param("x0", "window half-width must be positive"));
        }
        if n_nodes < MIN_WINDOW_NODES || n_nodes.is_multiple_of(2) {
            return Err(Error::param(
                "n_nodes",
                format!("{n_nodes} must be odd and ≥ {MIN_WINDOW_NODES}"),
            ));
        }
        let Integrals {
            success_prob: p_s,
            weighted_overlap: pf,
            mixture: mix,
            nodes,
            weights,
        } = self.integrate(x0, n_nodes)?;
        let fine = self.integrate(x0, 2 * n_nodes - 1)?;
        let (p_fine, pf_fine) = (fine.success_prob, fine.weighted_overlap);
        if !(p_s > 0.0) {
            return Err(Error::NotNormalized { trace: p_s });
        }
        let f = pf / p_s;
        let f_fine = pf_fine / p_fine;
        for (quantity, coarse, fine) in [
            ("success probability", p_s, p_fine),
            ("average fidelity", f, f_fine),
        ] {
            let relative = ((fine - coarse) / fine).abs();
            if relative > CONVERGENCE_TOL {
                return Err(Error::NonConvergence {
                    quantity,
                    coarse,
                    fine,
                    relative,
                });
            }
        }
        let avg_state = FockDensity::from_matrix_unchecked(mix / Complex64::from(p_s));
        Ok(WindowResult {
            x0,
            avg_fidelity: f,
            success_prob: p_s,
            avg_state,
            nodes,
            weights,
            refined_fidelity: f_fine,
            refined_success_prob: p_fine,
        })
    }

    /// `∫ P₁(x) dx` over `[−half_width, half_width]` by Simpson's rule.
    pub fn total_probability(&self, half_width: f64, n_nodes: usize) -> Result<f64> {
        let (nodes, weights) = simpson_rule(-half_width, half_width, n_nodes)?;
        let dens: Vec<f64> = nodes
            .par_iter()
            .map(|&x| self.evaluate(x).density)
            .collect();
        Ok(dens.iter().zip(&weights).map(|(d, w)| d * w).sum())
    }
}

fn build_target(config: &ProtocolConfig, input: &FockVector) -> Result<FockVector> {
    let dim = config.dim;
    let r = config.reflectivity;
    match &config.target {
        TargetSpec::SqueezedFock { n, s_prime: sp } => {
            let sp = match sp {
                Some(v) => *v,
                None => s_prime(r, config.squeezing)?,
            };
            apply_squeeze(&fock_state(*n, dim)?, sp)
        }
        TargetSpec::Cat { gamma, parity } => scs_state(*gamma, *parity, dim),
        TargetSpec::DisplacedSqueezed => {
            let InputSpec::Coherent { gamma } = config.input else {
                return Err(Error::param(
                    "target",
                    "displaced-squeezed target needs a coherent input",
                ));
            };
            let sp = s_prime(r, config.squeezing)?;
            let t = transmissivity(r).sqrt();
            let shift = Complex64::new(t * (2.0 * sp).exp() * gamma.re, t * gamma.im);
            apply_displace(&squeezed_vacuum(sp, dim)?, shift)
        }
        TargetSpec::IdealSqueezedInput => {
            let t = transmissivity(r);
            if t <= 0.0 {
                return Err(Error::Domain("ideal squeezer undefined at R = 1".into()));
            }
            apply_squeeze(input, -t.ln() / 2.0)
        }
        TargetSpec::Custom(v) => {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: v.dim(),
                });
            }
            Ok(v.clone())
        }
    }
}

/// Prepares the protocol and integrates the post-selection window.
pub fn run_window(config: &ProtocolConfig, n_nodes: usize) -> Result<WindowResult> {
    Protocol::prepare(config)?.window(config.x0, n_nodes)
}

/// Conditional results at every grid point.
pub fn postselect_map(config: &ProtocolConfig, xs: &[f64]) -> Result<Vec<ConditionalResult>> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("x_grid", "non-finite node"));
    }
    Protocol::prepare(config)?.map(xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::beam_splitter;
    use std::f64::consts::PI;

    fn single_photon(r: f64, s: f64, dim: usize) -> ProtocolConfig {
        ProtocolConfig {
            reflectivity: r,
            squeezing: s,
            x0: 0.025,
            input: InputSpec::Fock { n: 1 },
            target: TargetSpec::SqueezedFock {
                n: 1,
                s_prime: None,
            },
            dim,
        }
    }

    #[test]
    fn s_prime_values() {
        for r in [0.0, 0.3, 0.98] {
            assert!(s_prime(r, 0.0).unwrap().abs() < 1e-15);
        }
        assert!((s_prime(0.98, 0.7).unwrap() - 0.670).abs() < 1e-3);
        assert!((s_prime(1.0, 0.4).unwrap() - 0.4).abs() < 1e-12);
        assert!((s_prime(0.75, 10.0).unwrap() - 2f64.ln()).abs() < 1e-3);
        assert!(s_prime(1.2, 0.1).is_err());
        let mut last = f64::NEG_INFINITY;
        for i in 0..20 {
            let v = s_prime(0.6, -1.0 + 0.1 * i as f64).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn vacuum_projection() {
        let vac = fock_state(0, 10).unwrap().to_density();
        let joint = TwoModeDensity::product(&vac, &vac).unwrap();
        let (rho, p) = homodyne_project(&joint, 0.0).unwrap();
        assert!((p - (2.0 / PI).sqrt()).abs() < 1e-12);
        assert!((rho.normalized().unwrap().population(0) - 1.0).abs() < 1e-12);
        assert!(homodyne_project(&joint, f64::NAN).is_err());
    }

    #[test]
    fn nothing_reflected_leaves_input() {
        let one = fock_state(1, 12).unwrap().to_density();
        let vac = fock_state(0, 12).unwrap().to_density();
        let joint = beam_splitter(&one, &vac, 0.0).unwrap();
        for x in [-0.7, 0.0, 0.3] {
            let (rho, _) = homodyne_project(&joint, x).unwrap();
            assert!((rho.normalized().unwrap().population(1) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_cases() {
        let psi = coherent_state(Complex64::new(0.3, -0.2), 20)
            .unwrap()
            .normalized();
        assert!((fidelity(&psi.to_density(), &psi).unwrap() - 1.0).abs() < 1e-12);
        let target = apply_squeeze(&fock_state(1, 40).unwrap(), 0.67).unwrap();
        let vac = fock_state(0, 40).unwrap().to_density();
        assert!(fidelity(&vac, &target).unwrap().abs() < 1e-15);
        let g = Complex64::new(0.9, 0.4);
        let coh = coherent_state(g, 40).unwrap().normalized().to_density();
        let f = fidelity(&coh, &fock_state(0, 40).unwrap()).unwrap();
        assert!((f - (-g.norm_sqr()).exp()).abs() < 1e-10);
        let half = FockDensity::from_matrix_unchecked(vac.matrix() * Complex64::from(0.5));
        assert!(matches!(
            fidelity(&half, &target),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn parity_is_conserved_at_zero_outcome() {
        for n in [1usize, 2] {
            let cfg = ProtocolConfig {
                input: InputSpec::Fock { n },
                target: TargetSpec::SqueezedFock { n, s_prime: None },
                ..single_photon(0.6, 0.5, 40)
            };
            let res = Protocol::prepare(&cfg).unwrap().conditional(0.0).unwrap();
            assert!(res.state.wrong_parity_amplitude(Parity::of(n)) < 1e-10);
        }
    }

    #[test]
    fn squeezed_photon_is_exact_at_zero() {
        let res = Protocol::prepare(&single_photon(0.98, 0.7, 60))
            .unwrap()
            .conditional(0.0)
            .unwrap();
        assert!(res.fidelity >= 1.0 - 1e-6, "{}", res.fidelity);
    }

    #[test]
    fn map_is_symmetric_and_consistent() {
        let p = Protocol::prepare(&single_photon(0.5, 0.4, 30)).unwrap();
        let xs: Vec<f64> = (-5..=5).map(|i| 0.1 * i as f64).collect();
        let res = p.map(&xs).unwrap();
        for i in 0..xs.len() {
            assert!((res[i].density - res[xs.len() - 1 - i].density).abs() < 1e-9);
        }
        let single = postselect_map(p.config(), &[0.0]).unwrap();
        let (_, direct) = homodyne_project(p.joint(), 0.0).unwrap();
        assert_eq!(single[0].density, direct);
    }

    #[test]
    fn density_integrates_to_one() {
        let p = Protocol::prepare(&single_photon(0.5, 0.4, 40)).unwrap();
        assert!((p.total_probability(6.0, 193).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wide_window_has_unit_success() {
        let p = Protocol::prepare(&single_photon(0.5, 0.4, 40)).unwrap();
        let w = p.window(6.0, 193).unwrap();
        assert!((w.success_prob - 1.0).abs() < 1e-6);
        assert!((w.avg_state.trace() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn window_argument_checks() {
        let p = Protocol::prepare(&single_photon(0.5, 0.4, 20)).unwrap();
        assert!(p.window(0.0, 65).is_err());
        assert!(p.window(0.1, 64).is_err());
        assert!(p.window(0.1, 31).is_err());
    }

    #[test]
    fn coarse_rule_on_wide_window_fails_convergence() {
        let p = Protocol::prepare(&single_photon(1.0, -0.9, 80)).unwrap();
        assert!(matches!(
            p.window(6.0, 33),
            Err(Error::NonConvergence { .. })
        ));
    }
}
