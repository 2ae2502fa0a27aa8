// Running a scenario file programmatically, as `cvps run` does.

use cv_postselect::cli::{run_scenario, ScenarioConfig};

const SCENARIO: &str = r#"
mode = "sweep"
dim = 60

[sweep]
base = "two-photon"
axis = "x0_wig"
start = 0.02
stop = 0.2
points = 4

[output]
wigner = false
"#;

pub fn run_example() -> Result<std::path::PathBuf, Box<dyn std::error::Error>> {
    let config = ScenarioConfig::parse(SCENARIO, false)?.resolve()?;
    let out = std::env::temp_dir().join("cvps-scenario-example");
    run_scenario(&config, &out)?;
    print!("{}", std::fs::read_to_string(out.join("curve.csv"))?);
    Ok(out)
}

fn main() {
    run_example().expect("scenario example");
}
