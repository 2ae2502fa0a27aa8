// Even cat state from a two-photon Fock input.

use cv_postselect::conditioner::{InputSpec, Protocol, ProtocolConfig, TargetSpec};
use cv_postselect::fock::Parity;
use cv_postselect::wigner::{closed_form, overlap, ClosedForm, GridSpec, WignerGrid};
use num_complex::Complex64;

pub fn run_example() -> cv_postselect::Result<(f64, f64)> {
    let gamma = Complex64::new(0.0, 1.1);
    let config = ProtocolConfig {
        reflectivity: 0.5,
        squeezing: -0.37,
        x0: 0.084,
        input: InputSpec::Fock { n: 2 },
        target: TargetSpec::Cat {
            gamma,
            parity: Parity::Even,
        },
        dim: 60,
    };
    let protocol = Protocol::prepare(&config)?;
    let window = protocol.window(config.x0, 65)?;
    println!(
        "F_ave = {:.4}, P_s = {:.4}",
        window.avg_fidelity, window.success_prob
    );

    // Same fidelity from the phase-space overlap of the averaged state.
    let spec = GridSpec::square(6.0, 241);
    let averaged = window.average_wigner(&spec)?;
    let cat = WignerGrid::from_fn(&spec, |a| {
        closed_form(
            ClosedForm::Cat {
                gamma,
                parity: Parity::Even,
            },
            a,
        )
    })?;
    println!(
        "grid overlap = {:.4}, min W = {:.4}",
        overlap(&averaged, &cat)?,
        averaged.min()
    );
    Ok((window.avg_fidelity, window.success_prob))
}

fn main() {
    run_example().expect("cat state example");
}
