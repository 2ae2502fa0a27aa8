// Coherent inputs: the measurement-induced squeezer in both engines.

use cv_postselect::conditioner::{InputSpec, Protocol, ProtocolConfig, TargetSpec};
use cv_postselect::gaussian::{
    condition_coherent, gaussian_fidelity, ideal_target, GainReport, GaussianState,
};
use num_complex::Complex64;

pub fn run_example() -> cv_postselect::Result<f64> {
    let gamma = Complex64::new(0.5, 0.3);
    let (r, s) = (0.75, 0.52);

    let fock = Protocol::prepare(&ProtocolConfig {
        reflectivity: r,
        squeezing: s,
        x0: 0.1,
        input: InputSpec::Coherent { gamma },
        target: TargetSpec::DisplacedSqueezed,
        dim: 60,
    })?
    .conditional(0.1)?;
    let (mean, cov) = fock.state.quadrature_moments_snl();
    // Outcomes are x_wig in the Fock engine and 2·x_wig in the Gaussian one.
    let gauss = condition_coherent(gamma, r, s, 0.2)?;
    let deviation = (mean - gauss.mean()).amax().max((cov - gauss.cov()).amax());
    println!("engine deviation at x = 0.1: {deviation:.2e}");

    let input = GaussianState::coherent(gamma);
    let target = ideal_target(&input, r)?;
    println!("{:>6} {:>8} {:>8} {:>8} {:>8}", "s", "V+", "V-", "g+", "F");
    for s in [0.0, 0.35, 0.69, 1.03, 10.0] {
        let out = condition_coherent(gamma, r, s, 0.0)?;
        let (vp, vm) = out.variances();
        let g = GainReport::new(out.mean(), input.mean(), r)?;
        let f = gaussian_fidelity(&out, &target)?;
        println!(
            "{s:>6} {vp:>8.4} {vm:>8.4} {:>8.4} {f:>8.4}",
            g.g_plus.unwrap_or(f64::NAN)
        );
    }
    Ok(deviation)
}

fn main() {
    run_example().expect("coherent squeezer example");
}
