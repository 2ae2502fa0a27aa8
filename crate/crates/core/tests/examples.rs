macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(squeezed_single_photon, "squeezed_single_photon.rs");
example!(cat_state, "cat_state.rs");
example!(coherent_squeezer, "coherent_squeezer.rs");
example!(wigner_grids, "wigner_grids.rs");
example!(bench_emulation, "bench_emulation.rs");
example!(scenario_config, "scenario_config.rs");

#[test]
fn squeezed_single_photon_runs() {
    let f = squeezed_single_photon::run_example().expect("example runs");
    assert!((f - 0.99).abs() < 0.005);
}

#[test]
fn cat_state_runs() {
    let (f, p) = cat_state::run_example().expect("example runs");
    assert!(f > 0.985 && p > 0.04);
}

#[test]
fn coherent_squeezer_runs() {
    assert!(coherent_squeezer::run_example().expect("example runs") < 1e-6);
}

#[test]
fn wigner_grids_runs() {
    assert!(wigner_grids::run_example().expect("example runs") < 1e-6);
}

#[test]
fn bench_emulation_runs() {
    let f = bench_emulation::run_example().expect("example runs");
    assert!(f > 0.5 && f < 1.0);
}

#[test]
fn scenario_config_runs() {
    let out = scenario_config::run_example().expect("example runs");
    assert!(out.join("result.json").exists());
}
