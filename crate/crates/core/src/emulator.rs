//! Monte Carlo emulation of the bench experiment.
//!
//! Samples are demodulated quadrature records in shot-noise units. Each
//! sample carries both transmitted quadratures and the reflected amplitude
//! quadrature (the gate). Transmitted records have the homodyne efficiency
//! inferred out by rescaling; the gate record is left as detected.
//!
//! The ancilla is squeezed in `X⁻` and anti-squeezed in `X⁺`, matching
//! `Ŝ(s)|0⟩` with `s > 0`; this is the orientation that amplifies `X⁺` of
//! the transmitted beam.

use std::io::Write;

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::conventions::{check_reflectivity, db_to_variance, transmissivity};
use crate::gaussian::{
    gaussian_fidelity, ideal_target, purity_norm, GainReport, GaussianState, TwoModeGaussian,
};
use crate::{Error, Result};

/// Anti-squeezing used when none is configured. Not a measured value.
pub const DEFAULT_ANTISQUEEZING_DB: f64 = 8.5;
/// Minimum selected samples for variance estimates.
pub const MIN_SELECTED: usize = 10_000;
pub const SAMPLE_CSV_HEADER: [&str; 3] = ["x_t_plus", "x_t_minus", "x_r_plus"];

const CHUNK: u64 = 1 << 16;
const STREAM_OUTPUT: u64 = 1;
const STREAM_INPUT: u64 = 2;
const STREAM_BOOTSTRAP: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentParams {
    pub reflectivity: f64,
    pub v_in_plus_snl: f64,
    pub v_in_minus_snl: f64,
    /// Squeezed-quadrature level of the ancilla (negative is below shot noise).
    pub anc_sqz_db: f64,
    /// `None` uses [`DEFAULT_ANTISQUEEZING_DB`] and flags it in reports.
    pub anc_antisqz_db: Option<f64>,
    pub eta_vis: f64,
    pub eta_det: f64,
    pub eta_hom: f64,
    pub gate_elec_db: f64,
    pub hom_elec_db: f64,
    /// Coherent amplitude `γ⁺`; the SNL mean of `X⁺` is `2γ⁺`.
    pub gamma_plus_wig: f64,
    pub gamma_minus_wig: f64,
    /// Gate threshold on the detected reflected record.
    pub x0_snl: f64,
    pub n_samples: u64,
    /// Size of the separate record used to characterize the input state.
    pub n_input_samples: u64,
    /// Remove the homodyne electronic-noise variance from variance estimates.
    pub subtract_electronic: bool,
    pub bootstrap_resamples: usize,
    pub rng_seed: u64,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            reflectivity: 0.75,
            v_in_plus_snl: 1.13,
            v_in_minus_snl: 1.05,
            anc_sqz_db: -4.5,
            anc_antisqz_db: None,
            eta_vis: 0.96,
            eta_det: 0.92,
            eta_hom: 0.89,
            gate_elec_db: -6.5,
            hom_elec_db: -8.5,
            gamma_plus_wig: 0.18,
            gamma_minus_wig: 0.18,
            x0_snl: 0.01,
            n_samples: 4_000_000,
            n_input_samples: 200_000,
            subtract_electronic: true,
            bootstrap_resamples: 200,
            rng_seed: 7,
        }
    }
}

impl ExperimentParams {
    pub fn validate(&self) -> Result<()> {
        check_reflectivity(self.reflectivity)?;
        if transmissivity(self.reflectivity) <= 0.0 {
            return Err(Error::param(
                "reflectivity",
                "R = 1 leaves nothing to measure",
            ));
        }
        for (name, eta) in [
            ("eta_vis", self.eta_vis),
            ("eta_det", self.eta_det),
            ("eta_hom", self.eta_hom),
        ] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::param(name, format!("{eta} outside (0, 1]")));
            }
        }
        let finite = [
            ("anc_sqz_db", self.anc_sqz_db),
            ("anc_antisqz_db", self.antisqueezing_db()),
            ("gate_elec_db", self.gate_elec_db),
            ("hom_elec_db", self.hom_elec_db),
            ("gamma_plus_wig", self.gamma_plus_wig),
            ("gamma_minus_wig", self.gamma_minus_wig),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if !(self.v_in_plus_snl > 0.0 && self.v_in_minus_snl > 0.0)
            || self.v_in_plus_snl * self.v_in_minus_snl < 1.0 - 1e-9
        {
            return Err(Error::param(
                "v_in_snl",
                "input variances violate the uncertainty relation",
            ));
        }
        if self.anc_sqz_db + self.antisqueezing_db() < -1e-9 {
            return Err(Error::param(
                "anc_antisqz_db",
                "ancilla variances violate the uncertainty relation",
            ));
        }
        if !(self.x0_snl > 0.0) {
            return Err(Error::param(
                "x0_snl",
                format!("{} must be > 0", self.x0_snl),
            ));
        }
        if self.n_samples == 0 || self.n_input_samples < 2 {
            return Err(Error::param(
                "n_samples",
                "need at least one sample and two input samples",
            ));
        }
        Ok(())
    }

    pub fn antisqueezing_db(&self) -> f64 {
        self.anc_antisqz_db.unwrap_or(DEFAULT_ANTISQUEEZING_DB)
    }

    pub fn antisqueezing_assumed(&self) -> bool {
        self.anc_antisqz_db.is_none()
    }

    /// Ancilla variances `(V⁺, V⁻)` after visibility loss.
    pub fn ancilla_variances(&self) -> (f64, f64) {
        let v2 = self.eta_vis * self.eta_vis;
        let mix = |db: f64| v2 * db_to_variance(db) + 1.0 - v2;
        (mix(self.antisqueezing_db()), mix(self.anc_sqz_db))
    }

    fn hom_correction(&self) -> f64 {
        let e = db_to_variance(self.hom_elec_db);
        let sub = if self.subtract_electronic { e } else { 0.0 };
        (1.0 - self.eta_hom + sub) / self.eta_hom
    }

    fn input_mean(&self) -> Vector2<f64> {
        Vector2::new(2.0 * self.gamma_plus_wig, 2.0 * self.gamma_minus_wig)
    }
}

/// One record triple, SNL units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x_t_plus: f64,
    pub x_t_minus: f64,
    pub x_r_plus: f64,
}

#[derive(Debug, Clone, Copy)]
struct Model {
    mean_in: [f64; 2],
    sd_in: [f64; 2],
    sd_anc: [f64; 2],
    t: f64,
    r: f64,
    sqrt_det: f64,
    sd_gate: f64,
    sd_hom: f64,
}

impl Model {
    fn new(p: &ExperimentParams) -> Self {
        let (va_p, va_m) = p.ancilla_variances();
        let e_gate = db_to_variance(p.gate_elec_db);
        let e_hom = db_to_variance(p.hom_elec_db);
        Self {
            mean_in: [2.0 * p.gamma_plus_wig, 2.0 * p.gamma_minus_wig],
            sd_in: [p.v_in_plus_snl.sqrt(), p.v_in_minus_snl.sqrt()],
            sd_anc: [va_p.sqrt(), va_m.sqrt()],
            t: transmissivity(p.reflectivity).sqrt(),
            r: p.reflectivity.sqrt(),
            sqrt_det: p.eta_det.sqrt(),
            sd_gate: (1.0 - p.eta_det + e_gate).sqrt(),
            sd_hom: ((1.0 - p.eta_hom + e_hom) / p.eta_hom).sqrt(),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Sample {
        let mut n = || rng.sample::<f64, _>(StandardNormal);
        let xi = self.mean_in[0] + self.sd_in[0] * n();
        let pi = self.mean_in[1] + self.sd_in[1] * n();
        let xa = self.sd_anc[0] * n();
        let pa = self.sd_anc[1] * n();
        let xt = self.t * xi - self.r * xa;
        let pt = self.t * pi - self.r * pa;
        let xr = self.r * xi + self.t * xa;
        Sample {
            x_t_plus: xt + self.sd_hom * n(),
            x_t_minus: pt + self.sd_hom * n(),
            x_r_plus: self.sqrt_det * xr + self.sd_gate * n(),
        }
    }

    /// Input measured directly by the homodyne detector, efficiency inferred out.
    fn draw_input(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        let mut n = || rng.sample::<f64, _>(StandardNormal);
        let x = self.mean_in[0] + self.sd_in[0] * n() + self.sd_hom * n();
        let p = self.mean_in[1] + self.sd_in[1] * n() + self.sd_hom * n();
        [x, p]
    }
}

fn stream_rng(seed: u64, kind: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((kind << 48) | index);
    rng
}

fn chunks(total: u64) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let count = total.div_ceil(CHUNK);
    (0..count as usize).into_par_iter().map(move |k| {
        let k = k as u64;
        (k, (total - k * CHUNK).min(CHUNK) as usize)
    })
}

fn output_chunk(model: &Model, seed: u64, k: u64, len: usize) -> Vec<Sample> {
    let mut rng = stream_rng(seed, STREAM_OUTPUT, k);
    (0..len).map(|_| model.draw(&mut rng)).collect()
}

/// Full record stream. Chunks come from independent sub-generators, so the
/// result does not depend on the thread count.
pub fn synthesize(params: &ExperimentParams) -> Result<Vec<Sample>> {
    params.validate()?;
    let model = Model::new(params);
    let parts: Vec<Vec<Sample>> = chunks(params.n_samples)
        .map(|(k, len)| output_chunk(&model, params.rng_seed, k, len))
        .collect();
    Ok(parts.concat())
}

/// The first `rows` samples of the [`synthesize`] stream.
pub fn synthesize_prefix(params: &ExperimentParams, rows: u64) -> Result<Vec<Sample>> {
    let p = ExperimentParams {
        n_samples: rows.min(params.n_samples).max(1),
        ..params.clone()
    };
    let mut s = synthesize(&p)?;
    s.truncate(rows as usize);
    Ok(s)
}

/// Separate input-characterization record `(X⁺, X⁻)`.
pub fn characterize_input(params: &ExperimentParams) -> Result<Vec<[f64; 2]>> {
    params.validate()?;
    let model = Model::new(params);
    let parts: Vec<Vec<[f64; 2]>> = chunks(params.n_input_samples)
        .map(|(k, len)| {
            let mut rng = stream_rng(params.rng_seed, STREAM_INPUT, k);
            (0..len).map(|_| model.draw_input(&mut rng)).collect()
        })
        .collect();
    Ok(parts.concat())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub samples: Vec<Sample>,
    pub n_total: usize,
    pub success_prob: f64,
    pub x0_snl: f64,
}

/// Keeps samples with `|x_r| < x0`.
pub fn postselect(samples: &[Sample], x0_snl: f64) -> Result<Selection> {
    if !(x0_snl > 0.0) {
        return Err(Error::param("x0_snl", format!("{x0_snl} must be > 0")));
    }
    let kept: Vec<Sample> = samples
        .iter()
        .copied()
        .filter(|s| s.x_r_plus.abs() < x0_snl)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptySelection {
            x0: x0_snl,
            n_samples: samples.len(),
        });
    }
    Ok(Selection {
        success_prob: kept.len() as f64 / samples.len() as f64,
        n_total: samples.len(),
        samples: kept,
        x0_snl,
    })
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    s: [f64; 2],
    ss: [f64; 2],
}

impl Moments {
    fn push(&mut self, v: [f64; 2]) {
        self.n += 1.0;
        for (i, x) in v.into_iter().enumerate() {
            self.s[i] += x;
            self.ss[i] += x * x;
        }
    }

    fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        for i in 0..2 {
            self.s[i] += o.s[i];
            self.ss[i] += o.ss[i];
        }
    }

    fn of(values: impl Iterator<Item = [f64; 2]>) -> Self {
        let mut m = Self::default();
        values.for_each(|v| m.push(v));
        m
    }

    fn mean(&self) -> Vector2<f64> {
        Vector2::new(self.s[0] / self.n, self.s[1] / self.n)
    }

    /// Unbiased sample variances.
    fn var(&self) -> [f64; 2] {
        let m = self.mean();
        [0, 1].map(|i| (self.ss[i] - self.n * m[i] * m[i]) / (self.n - 1.0))
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    out: GaussianState,
    input: GaussianState,
    fidelity: f64,
    purity_norm: f64,
    gains: GainReport,
}

fn evaluate(out: &Moments, input: &Moments, params: &ExperimentParams) -> Result<Point> {
    let c = params.hom_correction();
    let state = |m: &Moments| {
        let v = m.var();
        GaussianState::from_estimate(m.mean(), v[0] - c, v[1] - c)
    };
    let out = state(out)?;
    let input = state(input)?;
    let target = ideal_target(&input, params.reflectivity)?;
    Ok(Point {
        fidelity: gaussian_fidelity(&out, &target)?,
        purity_norm: purity_norm(&out, &input)?,
        gains: GainReport::new(out.mean(), input.mean(), params.reflectivity)?,
        out,
        input,
    })
}

/// Output statistics of the post-selected ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub mean_out: [f64; 2],
    pub v_out: [f64; 2],
    pub v_out_se: [f64; 2],
    pub mean_in: [f64; 2],
    pub v_in: [f64; 2],
    pub gains: GainReport,
    pub gains_se: [Option<f64>; 2],
    pub fidelity_est: f64,
    pub fidelity_se: f64,
    pub purity_norm: f64,
    pub purity_norm_se: f64,
    pub success_prob: f64,
    pub n_selected: usize,
    pub n_samples: usize,
    pub x0_snl: f64,
    pub antisqueezing_db: f64,
    pub antisqueezing_assumed: bool,
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn estimate_from(
    selected: &[[f64; 2]],
    input: &[[f64; 2]],
    n_samples: usize,
    params: &ExperimentParams,
) -> Result<EnsembleStats> {
    if selected.len() < MIN_SELECTED {
        return Err(Error::TooFewSamples {
            have: selected.len(),
            need: MIN_SELECTED,
        });
    }
    if input.len() < 2 {
        return Err(Error::TooFewSamples {
            have: input.len(),
            need: 2,
        });
    }
    let point = evaluate(
        &Moments::of(selected.iter().copied()),
        &Moments::of(input.iter().copied()),
        params,
    )?;
    let reps: Vec<Point> = (0..params.bootstrap_resamples)
        .into_par_iter()
        .map(|b| {
            let b = b as u64;
            let mut rng = stream_rng(params.rng_seed, STREAM_BOOTSTRAP, b);
            let out = Moments::of(
                (0..selected.len()).map(|_| selected[rng.random_range(0..selected.len())]),
            );
            let inp =
                Moments::of((0..input.len()).map(|_| input[rng.random_range(0..input.len())]));
            evaluate(&out, &inp, params)
        })
        .collect::<Result<_>>()?;
    let se = |f: &dyn Fn(&Point) -> f64| {
        if reps.len() < 2 {
            f64::NAN
        } else {
            std_dev(&reps.iter().map(f).collect::<Vec<_>>())
        }
    };
    let gain_se = |f: &dyn Fn(&Point) -> Option<f64>| {
        let v: Option<Vec<f64>> = reps.iter().map(f).collect();
        v.filter(|v| v.len() >= 2).map(|v| std_dev(&v))
    };
    let (vp, vm) = point.out.variances();
    let (ip, im) = point.input.variances();
    Ok(EnsembleStats {
        mean_out: [point.out.mean()[0], point.out.mean()[1]],
        v_out: [vp, vm],
        v_out_se: [se(&|p| p.out.variances().0), se(&|p| p.out.variances().1)],
        mean_in: [point.input.mean()[0], point.input.mean()[1]],
        v_in: [ip, im],
        gains: point.gains,
        gains_se: [gain_se(&|p| p.gains.g_plus), gain_se(&|p| p.gains.g_minus)],
        fidelity_est: point.fidelity,
        fidelity_se: se(&|p| p.fidelity),
        purity_norm: point.purity_norm,
        purity_norm_se: se(&|p| p.purity_norm),
        success_prob: selected.len() as f64 / n_samples as f64,
        n_selected: selected.len(),
        n_samples,
        x0_snl: params.x0_snl,
        antisqueezing_db: params.antisqueezing_db(),
        antisqueezing_assumed: params.antisqueezing_assumed(),
    })
}

/// Estimates output statistics of a selection against the input record.
pub fn estimate(
    selection: &Selection,
    input: &[[f64; 2]],
    params: &ExperimentParams,
) -> Result<EnsembleStats> {
    let sel: Vec<[f64; 2]> = selection
        .samples
        .iter()
        .map(|s| [s.x_t_plus, s.x_t_minus])
        .collect();
    let mut p = params.clone();
    p.x0_snl = selection.x0_snl;
    estimate_from(&sel, input, selection.n_total, &p)
}

/// Gaussian-engine prediction of the inferred output for the same loss model,
/// averaged over the selection window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub mean_out: [f64; 2],
    pub v_out: [f64; 2],
    pub fidelity: f64,
    pub purity_norm: f64,
    pub gains: GainReport,
    pub success_prob: f64,
    pub gate_mean: f64,
    pub gate_variance: f64,
}

/// Gate-record marginal `(mean, variance)` and the detected two-mode state.
pub fn gate_model(params: &ExperimentParams) -> Result<(TwoModeGaussian, f64, f64)> {
    params.validate()?;
    let input = GaussianState::from_variances(
        params.input_mean(),
        params.v_in_plus_snl,
        params.v_in_minus_snl,
    )?;
    let (va_p, va_m) = params.ancilla_variances();
    let anc = GaussianState::from_variances(Vector2::zeros(), va_p, va_m)?;
    let two = TwoModeGaussian::product(&input, &anc)
        .beam_splitter(params.reflectivity)?
        .loss(1, params.eta_det)?
        .add_noise(2, db_to_variance(params.gate_elec_db))?;
    let gate = two.reflected();
    Ok((two, gate.mean()[0], gate.cov()[(0, 0)]))
}

/// Probability and first two moments of a normal variable restricted to `|x| < x0`.
fn window_moments(mu: f64, var: f64, x0: f64) -> (f64, f64, f64) {
    if x0.is_infinite() {
        return (1.0, mu, var);
    }
    let sd = var.sqrt();
    let std = Normal::standard();
    let a = (-x0 - mu) / sd;
    let b = (x0 - mu) / sd;
    let z = std.cdf(b) - std.cdf(a);
    let (pa, pb) = (std.pdf(a), std.pdf(b));
    let shift = (pa - pb) / z;
    let mean = mu + sd * shift;
    let v = var * (1.0 + (a * pa - b * pb) / z - shift * shift);
    (z, mean, v)
}

pub fn predict(params: &ExperimentParams) -> Result<Prediction> {
    let (two, mu, var) = gate_model(params)?;
    let (prob, m_win, v_win) = window_moments(mu, var, params.x0_snl);
    let cond = two.condition_reflected_x(m_win)?;
    let c = Vector2::new(two.cov()[(0, 2)], two.cov()[(1, 2)]);
    let mut cov = cond.cov() + c * c.transpose() * (v_win / (var * var));
    if !params.subtract_electronic {
        cov += Matrix2::identity() * (db_to_variance(params.hom_elec_db) / params.eta_hom);
    }
    let out = GaussianState::new(cond.mean(), cov)?;
    let input = GaussianState::from_variances(
        params.input_mean(),
        params.v_in_plus_snl,
        params.v_in_minus_snl,
    )?;
    let target = ideal_target(&input, params.reflectivity)?;
    let (vp, vm) = out.variances();
    Ok(Prediction {
        mean_out: [out.mean()[0], out.mean()[1]],
        v_out: [vp, vm],
        fidelity: gaussian_fidelity(&out, &target)?,
        purity_norm: purity_norm(&out, &input)?,
        gains: GainReport::new(out.mean(), input.mean(), params.reflectivity)?,
        success_prob: prob,
        gate_mean: mu,
        gate_variance: var,
    })
}

/// Result of [`emulate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Emulation {
    pub stats: EnsembleStats,
    /// Normalized purity of the whole ensemble, analysed the same way.
    pub unselected_purity_norm: f64,
    pub prediction: Prediction,
}

/// Chunked synthesis, selection and estimation without keeping the full stream.
pub fn emulate(params: &ExperimentParams) -> Result<Emulation> {
    params.validate()?;
    let model = Model::new(params);
    let parts: Vec<(Vec<[f64; 2]>, Moments)> = chunks(params.n_samples)
        .map(|(k, len)| {
            let samples = output_chunk(&model, params.rng_seed, k, len);
            let mut all = Moments::default();
            let mut kept = Vec::new();
            for s in &samples {
                all.push([s.x_t_plus, s.x_t_minus]);
                if s.x_r_plus.abs() < params.x0_snl {
                    kept.push([s.x_t_plus, s.x_t_minus]);
                }
            }
            (kept, all)
        })
        .collect();
    let mut all = Moments::default();
    let mut selected = Vec::new();
    for (kept, m) in &parts {
        all.merge(m);
        selected.extend_from_slice(kept);
    }
    if selected.is_empty() {
        return Err(Error::EmptySelection {
            x0: params.x0_snl,
            n_samples: params.n_samples as usize,
        });
    }
    let input = characterize_input(params)?;
    let stats = estimate_from(&selected, &input, params.n_samples as usize, params)?;
    let unselected = evaluate(&all, &Moments::of(input.iter().copied()), params)?;
    Ok(Emulation {
        stats,
        unselected_purity_norm: unselected.purity_norm,
        prediction: predict(params)?,
    })
}

/// Writes samples with the header `x_t_plus,x_t_minus,x_r_plus`.
pub fn write_samples_csv<W: Write>(samples: &[Sample], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SAMPLE_CSV_HEADER)?;
    for s in samples {
        w.write_record([s.x_t_plus, s.x_t_minus, s.x_r_plus].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
