use std::fs::File;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Axis, ConfigError, Mode, ScenarioConfig};
use super::output::{cell, opt_cell, write_table, write_wigner};
use crate::conditioner::{s_prime, Protocol};
use crate::emulator::{
    emulate, predict, synthesize_prefix, write_samples_csv, Emulation, ExperimentParams,
};
use crate::gaussian::{
    coherent_output_target, condition_coherent, gaussian_fidelity, ideal_target, purity,
    GainReport, GaussianState,
};
use crate::wigner::{wigner_from_density, GridSpec};
use crate::Error;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_ENGINE: i32 = 3;

#[derive(Debug)]
pub enum RunError {
    Validation(String),
    Engine(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => EXIT_VALIDATION,
            RunError::Engine(_) => EXIT_ENGINE,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Validation(m) => write!(f, "invalid configuration: {m}"),
            RunError::Engine(e) => write!(f, "engine failure: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Validation(e.0)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::Unsupported(_)
            | Error::DimensionMismatch { .. }
            | Error::FockIndex { .. }
            | Error::GridMismatch
            | Error::Io(_)
            | Error::Csv(_) => RunError::Validation(e.to_string()),
            other => RunError::Engine(other),
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dim: Option<usize>,
}

pub fn load_config(path: &Path, overrides: Overrides) -> Result<ScenarioConfig, RunError> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(seed) = overrides.seed {
        cfg.emulator.rng_seed = seed;
    }
    if let Some(dim) = overrides.dim {
        cfg.dim = Some(dim);
    }
    Ok(cfg.resolve()?)
}

/// Runs a resolved scenario and writes its artifacts into `out`.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<Value, RunError> {
    std::fs::create_dir_all(out)
        .map_err(|e| RunError::Validation(format!("output directory {}: {e}", out.display())))?;
    let mut notes = Vec::new();
    let results = match cfg.mode {
        Mode::SinglePhoton | Mode::TwoPhoton => photon(cfg, out)?,
        Mode::Coherent => coherent(cfg, out)?,
        Mode::Emulate => {
            notes.extend(emulator_notes(&cfg.emulator));
            emulation(cfg, out)?
        }
        Mode::Sweep => {
            if cfg.engine_mode() == Mode::Emulate {
                notes.extend(emulator_notes(&cfg.emulator));
            }
            sweep(cfg, out)?
        }
    };
    let doc = json!({
        "tool": "cvps",
        "version": env!("CARGO_PKG_VERSION"),
        "mode": cfg.mode,
        "config": cfg,
        "results": results,
        "notes": notes,
    });
    let file = File::create(out.join("result.json")).map_err(Error::from)?;
    serde_json::to_writer_pretty(file, &doc).map_err(|e| RunError::Validation(e.to_string()))?;
    Ok(doc)
}

fn emulator_notes(p: &ExperimentParams) -> Vec<String> {
    let mut n = vec!["x0_snl applies to the detected gate record in shot-noise units".to_string()];
    if p.antisqueezing_assumed() {
        n.push(format!(
            "anc_antisqz_db not configured; assumed {:+} dB, not a measured value",
            p.antisqueezing_db()
        ));
    }
    n
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn grid_spec(cfg: &ScenarioConfig) -> GridSpec {
    GridSpec::square(cfg.output.grid_half_width_wig, cfg.output.grid_points)
}

fn photon(cfg: &ScenarioConfig, out: &Path) -> Result<Value, RunError> {
    let pc = cfg.protocol_config().map_err(RunError::Validation)?;
    let n_nodes = cfg.protocol.n_nodes.unwrap_or_default();
    let protocol = Protocol::prepare(&pc)?;
    let window = protocol.window(pc.x0, n_nodes)?;
    let at_zero = protocol.conditional(0.0)?;
    let mut result = json!({
        "x0_wig": pc.x0,
        "n_nodes": n_nodes,
        "avg_fidelity": window.avg_fidelity,
        "success_prob": window.success_prob,
        "refined_avg_fidelity": window.refined_fidelity,
        "refined_success_prob": window.refined_success_prob,
        "s_prime": s_prime(pc.reflectivity, pc.squeezing)?,
        "fidelity_at_zero": at_zero.fidelity,
        "density_at_zero": at_zero.density,
        "avg_state_purity": window.avg_state.purity(),
    });
    if cfg.output.wigner {
        let grid = window.average_wigner(&grid_spec(cfg))?;
        write_wigner(&out.join("wigner.csv"), &grid)?;
        result["wigner"] = json!({
            "integral": grid.integral(),
            "min": grid.min(),
            "max": grid.max(),
            "normalization_warning": grid.normalization_warning(),
        });
    }
    Ok(result)
}

fn coherent(cfg: &ScenarioConfig, out: &Path) -> Result<Value, RunError> {
    let pc = cfg.protocol_config().map_err(RunError::Validation)?;
    let p = &cfg.protocol;
    let gamma = Complex64::new(
        p.gamma_plus_wig.unwrap_or_default(),
        p.gamma_minus_wig.unwrap_or_default(),
    );
    let outcome = p.outcome_wig.unwrap_or_default();
    let protocol = Protocol::prepare(&pc)?;
    let window = protocol.window(pc.x0, p.n_nodes.unwrap_or_default())?;
    let cond = protocol.conditional(outcome)?;
    let (fm, fc) = cond.state.quadrature_moments_snl();
    let g = condition_coherent(gamma, pc.reflectivity, pc.squeezing, 2.0 * outcome)?;
    let deviation = (fm - g.mean()).amax().max((fc - g.cov()).amax());
    let g0 = condition_coherent(gamma, pc.reflectivity, pc.squeezing, 0.0)?;
    let input = GaussianState::coherent(gamma);
    let mut result = json!({
        "x0_wig": pc.x0,
        "avg_fidelity": window.avg_fidelity,
        "success_prob": window.success_prob,
        "s_prime": s_prime(pc.reflectivity, pc.squeezing)?,
        "outcome_wig": outcome,
        "fock_mean_snl": [fm[0], fm[1]],
        "fock_cov_snl": [[fc[(0, 0)], fc[(0, 1)]], [fc[(1, 0)], fc[(1, 1)]]],
        "gaussian_mean_snl": [g.mean()[0], g.mean()[1]],
        "gaussian_cov_snl": [[g.cov()[(0, 0)], g.cov()[(0, 1)]], [g.cov()[(1, 0)], g.cov()[(1, 1)]]],
        "max_engine_deviation": deviation,
        "purity": purity(&g)?,
        "gains_at_zero": to_value(&GainReport::new(g0.mean(), input.mean(), pc.reflectivity)?),
        "target_fidelity_at_zero": gaussian_fidelity(&g0, &coherent_output_target(gamma, pc.reflectivity, pc.squeezing)?)?,
        "ideal_squeezer_fidelity_at_zero": gaussian_fidelity(&g0, &ideal_target(&input, pc.reflectivity)?)?,
    });
    if cfg.output.wigner {
        let grid = wigner_from_density(&window.avg_state, &grid_spec(cfg))?;
        write_wigner(&out.join("wigner.csv"), &grid)?;
        result["wigner"] =
            json!({ "integral": grid.integral(), "min": grid.min(), "max": grid.max() });
    }
    Ok(result)
}

fn emulation(cfg: &ScenarioConfig, out: &Path) -> Result<Value, RunError> {
    let e = emulate(&cfg.emulator)?;
    if cfg.output.sample_rows > 0 {
        let samples = synthesize_prefix(&cfg.emulator, cfg.output.sample_rows)?;
        write_samples_csv(
            &samples,
            File::create(out.join("samples.csv")).map_err(Error::from)?,
        )?;
    }
    Ok(to_value(&e))
}

/// Smallest `x0_snl` whose predicted success probability reaches `target`.
pub fn x0_for_success(params: &ExperimentParams, target: f64) -> Result<f64, RunError> {
    let prob = |x0: f64| {
        predict(&ExperimentParams {
            x0_snl: x0,
            ..params.clone()
        })
        .map(|p| p.success_prob)
    };
    let (mut lo, mut hi) = (1e-9f64, 1.0f64);
    while prob(hi)? < target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(RunError::Validation(format!(
                "success probability {target} unreachable"
            )));
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if prob(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

const PHOTON_COLUMNS: [&str; 5] = [
    "x0_wig",
    "avg_fidelity",
    "success_prob",
    "refined_avg_fidelity",
    "refined_success_prob",
];
const EMULATE_COLUMNS: [&str; 15] = [
    "axis_value",
    "x0_snl",
    "gamma_plus_wig",
    "fidelity_est",
    "fidelity_se",
    "purity_norm",
    "purity_norm_se",
    "unselected_purity_norm",
    "g_plus",
    "g_minus",
    "success_prob",
    "n_selected",
    "predicted_fidelity",
    "predicted_purity_norm",
    "predicted_success_prob",
];

fn sweep(cfg: &ScenarioConfig, out: &Path) -> Result<Value, RunError> {
    let s = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| RunError::Validation("sweep section missing".into()))?;
    let values = s.values();
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = if s.base == Mode::Emulate {
        let mut rows = Vec::with_capacity(values.len());
        for &v in &values {
            let mut p = cfg.emulator.clone();
            match s.axis {
                Axis::X0Snl => p.x0_snl = v,
                Axis::GammaPlusWig => p.gamma_plus_wig = v,
                Axis::SuccessProb => p.x0_snl = x0_for_success(&p, v)?,
                Axis::X0Wig => {
                    return Err(RunError::Validation(
                        "x0_wig axis needs a Fock-engine base".into(),
                    ))
                }
            }
            rows.push(emulate_row(v, &p, &emulate(&p)?));
        }
        (EMULATE_COLUMNS.to_vec(), rows)
    } else {
        let pc = cfg.protocol_config().map_err(RunError::Validation)?;
        let protocol = Protocol::prepare(&pc)?;
        let n_nodes = cfg.protocol.n_nodes.unwrap_or_default();
        let mut rows = Vec::with_capacity(values.len());
        for &x0 in &values {
            let w = protocol.window(x0, n_nodes)?;
            rows.push(
                [
                    x0,
                    w.avg_fidelity,
                    w.success_prob,
                    w.refined_fidelity,
                    w.refined_success_prob,
                ]
                .map(cell)
                .to_vec(),
            );
        }
        (PHOTON_COLUMNS.to_vec(), rows)
    };
    write_table(&out.join("curve.csv"), &header, &rows)?;
    Ok(json!({
        "base": s.base,
        "axis": s.axis,
        "points": values.len(),
        "curve": "curve.csv",
        "columns": header,
        "rows": rows,
    }))
}

fn emulate_row(v: f64, p: &ExperimentParams, e: &Emulation) -> Vec<String> {
    let s = &e.stats;
    vec![
        cell(v),
        cell(p.x0_snl),
        cell(p.gamma_plus_wig),
        cell(s.fidelity_est),
        cell(s.fidelity_se),
        cell(s.purity_norm),
        cell(s.purity_norm_se),
        cell(e.unselected_purity_norm),
        opt_cell(s.gains.g_plus),
        opt_cell(s.gains.g_minus),
        cell(s.success_prob),
        s.n_selected.to_string(),
        cell(e.prediction.fidelity),
        cell(e.prediction.purity_norm),
        cell(e.prediction.success_prob),
    ]
}
