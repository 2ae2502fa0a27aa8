//! Scenario files. TOML or JSON, chosen by file extension.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditioner::{
    InputSpec, ProtocolConfig, TargetSpec, DEFAULT_WINDOW_NODES, MIN_WINDOW_NODES,
};
use crate::emulator::ExperimentParams;
use crate::fock::Parity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SinglePhoton,
    TwoPhoton,
    Coherent,
    Emulate,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X0Wig,
    X0Snl,
    GammaPlusWig,
    SuccessProb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolSection {
    pub reflectivity: Option<f64>,
    pub squeezing: Option<f64>,
    pub x0_wig: Option<f64>,
    pub n_nodes: Option<usize>,
    /// Coherent mode: input amplitude.
    pub gamma_plus_wig: Option<f64>,
    pub gamma_minus_wig: Option<f64>,
    /// Coherent mode: single outcome compared across engines.
    pub outcome_wig: Option<f64>,
    /// Two-photon mode: cat target.
    pub cat_gamma_plus_wig: Option<f64>,
    pub cat_gamma_minus_wig: Option<f64>,
    pub cat_parity: Option<Parity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub base: Mode,
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub wigner: bool,
    pub grid_half_width_wig: f64,
    pub grid_points: usize,
    /// Emulate mode: leading raw samples written to samples.csv (0 disables).
    pub sample_rows: u64,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            wigner: true,
            grid_half_width_wig: 6.0,
            grid_points: 241,
            sample_rows: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub emulator: ExperimentParams,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(field: &str, reason: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{field}: {reason}"))
}

pub const DEFAULT_PHOTON_DIM: usize = 60;

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| invalid(&path.display().to_string(), e))?;
        let json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        Self::parse(&text, json)
    }

    pub fn parse(text: &str, json: bool) -> Result<Self, ConfigError> {
        if json {
            serde_json::from_str(text).map_err(|e| invalid("config", e))
        } else {
            toml::from_str(text).map_err(|e| invalid("config", e))
        }
    }

    /// Mode whose engine parameters apply (the sweep base for sweeps).
    pub fn engine_mode(&self) -> Mode {
        match (&self.mode, &self.sweep) {
            (Mode::Sweep, Some(s)) => s.base,
            (m, _) => *m,
        }
    }

    /// Fills every unset protocol field with the figure default of the mode.
    pub fn resolve(mut self) -> Result<Self, ConfigError> {
        let mode = self.engine_mode();
        let p = &mut self.protocol;
        let (r, s, x0) = match mode {
            Mode::SinglePhoton => (0.98, 0.7, 0.025),
            Mode::TwoPhoton => (0.5, -0.37, 0.084),
            _ => (0.75, 0.52, 0.1),
        };
        p.reflectivity.get_or_insert(r);
        p.squeezing.get_or_insert(s);
        p.x0_wig.get_or_insert(x0);
        p.n_nodes.get_or_insert(DEFAULT_WINDOW_NODES);
        match mode {
            Mode::TwoPhoton => {
                p.cat_gamma_plus_wig.get_or_insert(0.0);
                p.cat_gamma_minus_wig.get_or_insert(1.1);
                p.cat_parity.get_or_insert(Parity::Even);
            }
            Mode::Coherent => {
                p.gamma_plus_wig.get_or_insert(0.5);
                p.gamma_minus_wig.get_or_insert(0.3);
                p.outcome_wig.get_or_insert(0.1);
            }
            _ => {}
        }
        if matches!(mode, Mode::SinglePhoton | Mode::TwoPhoton | Mode::Coherent) {
            self.dim.get_or_insert(DEFAULT_PHOTON_DIM);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match (&self.mode, &self.sweep) {
            (Mode::Sweep, None) => {
                return Err(invalid("sweep", "mode = \"sweep\" needs a [sweep] section"))
            }
            (Mode::Sweep, Some(s)) => validate_sweep(s)?,
            (_, Some(_)) => return Err(invalid("sweep", "only allowed with mode = \"sweep\"")),
            _ => {}
        }
        let mode = self.engine_mode();
        if mode == Mode::Emulate {
            self.emulator
                .validate()
                .map_err(|e| invalid("emulator", e))?;
        } else {
            let cfg = self.protocol_config().map_err(|e| invalid("protocol", e))?;
            cfg.validate().map_err(|e| invalid("protocol", e))?;
            let n = self.protocol.n_nodes.unwrap_or(DEFAULT_WINDOW_NODES);
            if n < MIN_WINDOW_NODES || n.is_multiple_of(2) {
                return Err(invalid(
                    "protocol.n_nodes",
                    format!("{n} must be odd and ≥ {MIN_WINDOW_NODES}"),
                ));
            }
            if self.mode != Mode::Sweep && !(cfg.x0 > 0.0) {
                return Err(invalid("protocol.x0_wig", "must be > 0"));
            }
        }
        let o = &self.output;
        if !(o.grid_half_width_wig > 0.0 && o.grid_half_width_wig.is_finite()) {
            return Err(invalid(
                "output.grid_half_width_wig",
                "must be positive and finite",
            ));
        }
        if o.grid_points < 3 {
            return Err(invalid("output.grid_points", "need at least 3"));
        }
        Ok(())
    }

    /// Protocol for the photon and coherent modes.
    pub fn protocol_config(&self) -> Result<ProtocolConfig, String> {
        let p = &self.protocol;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| format!("{name} unset"));
        let dim = self.dim.ok_or("dim unset")?;
        let (input, target) = match self.engine_mode() {
            Mode::SinglePhoton => (
                InputSpec::Fock { n: 1 },
                TargetSpec::SqueezedFock {
                    n: 1,
                    s_prime: None,
                },
            ),
            Mode::TwoPhoton => (
                InputSpec::Fock { n: 2 },
                TargetSpec::Cat {
                    gamma: Complex64::new(
                        need(p.cat_gamma_plus_wig, "cat_gamma_plus_wig")?,
                        need(p.cat_gamma_minus_wig, "cat_gamma_minus_wig")?,
                    ),
                    parity: p.cat_parity.ok_or("cat_parity unset")?,
                },
            ),
            Mode::Coherent => (
                InputSpec::Coherent {
                    gamma: Complex64::new(
                        need(p.gamma_plus_wig, "gamma_plus_wig")?,
                        need(p.gamma_minus_wig, "gamma_minus_wig")?,
                    ),
                },
                TargetSpec::DisplacedSqueezed,
            ),
            m => return Err(format!("{m:?} has no Fock-engine protocol")),
        };
        Ok(ProtocolConfig {
            reflectivity: need(p.reflectivity, "reflectivity")?,
            squeezing: need(p.squeezing, "squeezing")?,
            x0: need(p.x0_wig, "x0_wig")?,
            input,
            target,
            dim,
        })
    }
}

fn validate_sweep(s: &SweepSection) -> Result<(), ConfigError> {
    if s.base == Mode::Sweep {
        return Err(invalid("sweep.base", "cannot be \"sweep\""));
    }
    let allowed = match s.base {
        Mode::Emulate => matches!(s.axis, Axis::X0Snl | Axis::GammaPlusWig | Axis::SuccessProb),
        _ => s.axis == Axis::X0Wig,
    };
    if !allowed {
        return Err(invalid(
            "sweep.axis",
            format!("{:?} is not available for base {:?}", s.axis, s.base),
        ));
    }
    if s.points == 0 {
        return Err(invalid("sweep.points", "range is empty"));
    }
    if !(s.start.is_finite() && s.stop.is_finite()) {
        return Err(invalid("sweep", "start and stop must be finite"));
    }
    if s.points == 1 && s.start > s.stop || s.points > 1 && s.start >= s.stop {
        return Err(invalid(
            "sweep",
            format!("range [{}, {}] is empty or unordered", s.start, s.stop),
        ));
    }
    if s.spacing == Spacing::Log && s.start <= 0.0 {
        return Err(invalid("sweep.start", "log spacing needs start > 0"));
    }
    let positive = matches!(s.axis, Axis::X0Wig | Axis::X0Snl | Axis::SuccessProb);
    if positive && s.start <= 0.0 {
        return Err(invalid("sweep.start", "must be > 0 for this axis"));
    }
    if s.axis == Axis::SuccessProb && s.stop >= 1.0 {
        return Err(invalid(
            "sweep.stop",
            "success probability must stay below 1",
        ));
    }
    Ok(())
}

impl SweepSection {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => {
                        (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                    }
                }
            })
            .collect()
    }
}
