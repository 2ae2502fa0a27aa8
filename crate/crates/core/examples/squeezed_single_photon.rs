// Squeezed single photon from |1⟩ and a weakly reflecting beam splitter.

use cv_postselect::conditioner::{s_prime, InputSpec, Protocol, ProtocolConfig, TargetSpec};

pub fn run_example() -> cv_postselect::Result<f64> {
    let config = ProtocolConfig {
        reflectivity: 0.98,
        squeezing: 0.7,
        x0: 0.025,
        input: InputSpec::Fock { n: 1 },
        target: TargetSpec::SqueezedFock {
            n: 1,
            s_prime: None,
        },
        dim: 60,
    };
    let protocol = Protocol::prepare(&config)?;
    println!(
        "s' = {:.4}",
        s_prime(config.reflectivity, config.squeezing)?
    );

    let at_zero = protocol.conditional(0.0)?;
    println!(
        "x = 0: P1 = {:.4}, F1 = {:.10}",
        at_zero.density, at_zero.fidelity
    );

    println!("{:>8} {:>10} {:>10}", "x0", "F_ave", "P_s");
    let mut fig = 0.0;
    for x0 in [0.005, 0.01, 0.025, 0.05, 0.1] {
        let w = protocol.window(x0, 65)?;
        println!("{x0:>8} {:>10.5} {:>10.6}", w.avg_fidelity, w.success_prob);
        if x0 == 0.025 {
            fig = w.avg_fidelity;
        }
    }
    Ok(fig)
}

fn main() {
    run_example().expect("squeezed single photon example");
}
