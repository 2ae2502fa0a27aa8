use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64;

use crate::conditioner::{InputSpec, Protocol, ProtocolConfig, TargetSpec};
use crate::fock::Parity;
use crate::gaussian::condition_coherent;
use crate::wigner::{wigner_from_density, GridSpec};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {:<30} {}", self.name, self.detail)
    }
}

fn check(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match body() {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn fock_config(n: usize, r: f64, s: f64, dim: usize) -> ProtocolConfig {
    ProtocolConfig {
        reflectivity: r,
        squeezing: s,
        x0: 0.025,
        input: InputSpec::Fock { n },
        target: TargetSpec::SqueezedFock { n, s_prime: None },
        dim,
    }
}

/// Fast invariant suite at truncation `dim`.
pub fn selfcheck(dim: usize) -> Vec<Check> {
    vec![
        check("density normalization", || {
            let total =
                Protocol::prepare(&fock_config(1, 0.5, 0.4, dim))?.total_probability(6.0, 193)?;
            Ok(((total - 1.0).abs() < 1e-6, format!("∫P₁ = {total:.10}")))
        }),
        check("parity at x = 0", || {
            let mut worst = 0.0f64;
            for n in [1, 2] {
                let c = Protocol::prepare(&fock_config(n, 0.6, 0.5, dim))?.conditional(0.0)?;
                worst = worst.max(c.state.wrong_parity_amplitude(Parity::of(n)));
            }
            Ok((
                worst < 1e-10,
                format!("max wrong-parity amplitude {worst:.2e}"),
            ))
        }),
        check("squeezed photon exactness", || {
            let f = Protocol::prepare(&fock_config(1, 0.98, 0.7, dim))?
                .conditional(0.0)?
                .fidelity;
            Ok((f >= 1.0 - 1e-6, format!("fidelity {f:.12} at dim {dim}")))
        }),
        check("cross-engine agreement", || {
            let gamma = Complex64::new(0.5, 0.3);
            let cfg = ProtocolConfig {
                input: InputSpec::Coherent { gamma },
                target: TargetSpec::DisplacedSqueezed,
                ..fock_config(1, 0.75, 0.52, dim)
            };
            let cond = Protocol::prepare(&cfg)?.conditional(0.1)?;
            let (m, v) = cond.state.quadrature_moments_snl();
            let g = condition_coherent(gamma, 0.75, 0.52, 0.2)?;
            let dev = (m - g.mean()).amax().max((v - g.cov()).amax());
            Ok((dev < 1e-6, format!("max deviation {dev:.2e}")))
        }),
        check("wigner normalization", || {
            let c = Protocol::prepare(&fock_config(1, 0.98, 0.7, dim))?.conditional(0.0)?;
            let grid = wigner_from_density(&c.state, &GridSpec::square(6.0, 121))?;
            let (integral, min) = (grid.integral(), grid.min());
            let ok = (integral - 1.0).abs() < 1e-4 && min >= -FRAC_2_PI - 1e-9;
            Ok((ok, format!("integral {integral:.8}, min {min:.6}")))
        }),
        check("gaussian outcome independence", || {
            let gamma = Complex64::new(0.3, -0.2);
            let c0 = condition_coherent(gamma, 0.75, 0.52, 0.0)?;
            let mut dev = 0.0f64;
            let mut margin = c0.uncertainty_margin();
            for x in [-1.0, 1.0] {
                let c = condition_coherent(gamma, 0.75, 0.52, x)?;
                dev = dev.max((c.cov() - c0.cov()).amax());
                margin = margin.min(c.uncertainty_margin());
            }
            Ok((
                dev < 1e-12 && margin > -1e-9,
                format!("cov change {dev:.1e}, uncertainty margin {margin:.2e}"),
            ))
        }),
    ]
}
