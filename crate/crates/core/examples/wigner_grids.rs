// Wigner grids of number-basis states against their closed forms.

use cv_postselect::fock::{apply_squeeze, fock_state, scs_state, Parity};
use cv_postselect::wigner::{closed_form, wigner_from_density, ClosedForm, GridSpec, WignerGrid};
use num_complex::Complex64;

pub fn run_example() -> cv_postselect::Result<f64> {
    let spec = GridSpec::square(4.0, 161);
    let gamma = Complex64::new(0.0, 1.1);
    let cases = [
        (
            "single photon",
            fock_state(1, 40)?,
            ClosedForm::SinglePhoton,
        ),
        (
            "squeezed photon",
            apply_squeeze(&fock_state(1, 60)?, 0.67)?,
            ClosedForm::SqueezedSinglePhoton { s: 0.67 },
        ),
        (
            "even cat",
            scs_state(gamma, Parity::Even, 40)?,
            ClosedForm::Cat {
                gamma,
                parity: Parity::Even,
            },
        ),
    ];
    let mut worst = 0.0f64;
    for (name, psi, kind) in cases {
        let numeric = wigner_from_density(&psi.to_density(), &spec)?;
        let exact = WignerGrid::from_fn(&spec, |a| closed_form(kind, a))?;
        let diff = (numeric.values() - exact.values()).amax();
        worst = worst.max(diff);
        println!(
            "{name:<16} integral {:.6}  min {:+.4}  max |Δ| {diff:.1e}",
            numeric.integral(),
            numeric.min()
        );
    }
    Ok(worst)
}

fn main() {
    run_example().expect("wigner grid example");
}
