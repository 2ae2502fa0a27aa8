// Monte Carlo version of the bench experiment with a threshold scan.

use cv_postselect::emulator::{emulate, ExperimentParams};
use cv_postselect::gaussian::classical_limit;

pub fn run_example() -> cv_postselect::Result<f64> {
    let base = ExperimentParams::default();
    println!(
        "ancilla anti-squeezing {:+} dB{}",
        base.antisqueezing_db(),
        if base.antisqueezing_assumed() {
            " (assumed)"
        } else {
            ""
        }
    );
    println!("classical limit {:.3}", classical_limit(base.reflectivity)?);
    println!(
        "{:>7} {:>9} {:>14} {:>14} {:>7} {:>7}",
        "x0", "P_s", "F", "P_norm", "g+", "g-"
    );
    let mut fid = 0.0;
    for x0 in [0.1, 0.03, 0.01] {
        let e = emulate(&ExperimentParams {
            x0_snl: x0,
            ..base.clone()
        })?;
        let s = &e.stats;
        println!(
            "{x0:>7} {:>9.5} {:>7.4}±{:<6.4} {:>7.3}±{:<6.3} {:>7.3} {:>7.3}",
            s.success_prob,
            s.fidelity_est,
            s.fidelity_se,
            s.purity_norm,
            s.purity_norm_se,
            s.gains.g_plus.unwrap_or(f64::NAN),
            s.gains.g_minus.unwrap_or(f64::NAN),
        );
        fid = s.fidelity_est;
    }
    Ok(fid)
}

fn main() {
    run_example().expect("bench emulation example");
}
