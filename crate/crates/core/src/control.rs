//! Closed-loop simulation: plant, quantizing observer, Toeplitz encoder,
//! erasure channel, anytime decoder, replaying filter and controller.
//!
//! Inputs enter every state coordinate directly (`B = I`). One step `t`:
//!
//! 1. the controller applies `u_t` computed from its prediction `x̂_{t|t-1}`;
//! 2. the observer measures `y_t = x_t⁽¹⁾ + v_t` and sends the bin index as a
//!    `k`-bit message through the encoder and channel;
//! 3. the decoder absorbs the channel output; the controller replays its
//!    filter over any revised indices, then runs the measurement update with
//!    the newest index and the time update with `u_t`;
//! 4. the plant moves to `x_{t+1} = F x_t + u_t + w_t`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelConfig;
use crate::code::{CodeError, CodeParams, Encoder, ToeplitzCode};
use crate::decoder::{BecDecoder, DecodeError};
use crate::estimation::{
    EllipsoidState, EstimationError, FeedbackMode, FilterSession, Hypercuboid, MeasurementModel,
    PlantModel, QuantizerConfig, SetFilter,
};
use crate::gf2::BitVec;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("invalid config at `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
}

fn invalid(field: &str, message: impl Into<String>) -> ControlError {
    ControlError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Code ensemble parameters. The code seed is derived from the master seed
/// unless given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    #[serde(default = "half")]
    pub p: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    #[default]
    Cuboid,
    Ellipsoid,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Controller {
    /// `u = -F x̂`.
    #[default]
    Deadbeat,
    /// `u = -x̂`.
    Negated,
    /// `u = K x̂` with `K` given row by row.
    Gain { k: Vec<Vec<f64>> },
}

impl Controller {
    pub fn input(&self, plant: &PlantModel, xhat: &DVector<f64>) -> DVector<f64> {
        match self {
            Controller::Deadbeat => -plant.apply(xhat),
            Controller::Negated => -xhat,
            Controller::Gain { k } => {
                let m = xhat.len();
                DVector::from_fn(m, |i, _| k[i].iter().zip(xhat.iter()).map(|(a, b)| a * b).sum())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseModel {
    /// `w` uniform on `[-W/2, W/2]^m`, `v` uniform on `[-V/2, V/2]`.
    Uniform,
    /// Independent `N(0, σ²)` per coordinate, redrawn until inside `[-clip, clip]`.
    TruncatedGaussian { sigma: f64, clip: f64 },
}

fn draw(noise: &NoiseModel, width: f64, rng: &mut ChaCha8Rng) -> f64 {
    match *noise {
        NoiseModel::Uniform => {
            if width == 0.0 {
                0.0
            } else {
                rng.random_range(-width / 2.0..width / 2.0)
            }
        }
        NoiseModel::TruncatedGaussian { sigma, clip } => {
            let normal = Normal::new(0.0, sigma).expect("validated sigma");
            loop {
                let x: f64 = normal.sample(rng);
                if x.abs() <= clip {
                    return x;
                }
            }
        }
    }
}

/// One `(k, δ)` setting of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub bits: u32,
    #[serde(default)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Mean over trials of `sup_t ‖x_t‖∞`.
    #[default]
    MeanSupAbs,
    /// `sup_t` of the trial mean of `‖x_t‖∞`.
    SupMeanAbs,
    LqrCost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub codes: usize,
    #[serde(default)]
    pub metric: Metric,
    /// Settings to compare; empty means the base config only.
    #[serde(default)]
    pub variants: Vec<Variant>,
    /// Thresholds at which the fraction of codes below is reported.
    #[serde(default)]
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub plant: PlantModel,
    pub code: CodeSpec,
    /// Erasure probability of the channel.
    pub epsilon: f64,
    pub quantizer: QuantizerConfig,
    pub mode: FeedbackMode,
    #[serde(default)]
    pub filter: FilterKind,
    pub horizon: usize,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub controller: Controller,
    pub noise: NoiseModel,
    /// Half-width of the initial box around `x_0 = 0`.
    #[serde(default = "one_f")]
    pub initial_radius: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

fn one() -> usize {
    1
}

fn one_f() -> f64 {
    1.0
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self, ControlError> {
        let cfg: SimConfig = serde_json::from_str(text).map_err(|e| {
            invalid(
                &format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        self.plant.validate().map_err(|e| invalid("plant", e.to_string()))?;
        let m = self.plant.dim();
        if self.horizon == 0 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(invalid("epsilon", "must lie in [0, 1]"));
        }
        self.quantizer
            .validate()
            .map_err(|e| invalid("quantizer", e.to_string()))?;
        if self.quantizer.bits as usize != self.code.k {
            return Err(invalid(
                "quantizer.bits",
                format!("must equal code.k = {}", self.code.k),
            ));
        }
        CodeParams::new(self.code.n, self.code.k, self.code.p, 0)
            .map_err(|e| invalid("code", e.to_string()))?;
        if !(self.initial_radius >= 0.0 && self.initial_radius.is_finite()) {
            return Err(invalid("initial_radius", "must be finite and nonnegative"));
        }
        if let NoiseModel::TruncatedGaussian { sigma, clip } = self.noise {
            if !(sigma > 0.0 && clip > 0.0) {
                return Err(invalid("noise", "sigma and clip must be positive"));
            }
            if clip > self.plant.w / 2.0 || clip > self.plant.v / 2.0 {
                return Err(invalid("noise.clip", "must not exceed W/2 and V/2"));
            }
        }
        if let Controller::Gain { k } = &self.controller {
            if k.len() != m || k.iter().any(|row| row.len() != m) {
                return Err(invalid("controller.k", format!("must be {m}×{m}")));
            }
        }
        if let Some(s) = &self.sweep {
            if s.codes == 0 {
                return Err(invalid("sweep.codes", "must be at least 1"));
            }
            for (i, v) in s.variants.iter().enumerate() {
                QuantizerConfig::new(v.bits, v.delta.unwrap_or(self.quantizer.delta))
                    .map_err(|e| invalid(&format!("sweep.variants[{i}]"), e.to_string()))?;
                CodeParams::new(self.code.n, v.bits as usize, self.code.p, 0)
                    .map_err(|e| invalid(&format!("sweep.variants[{i}]"), e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Copy with message size and bin width from `v`.
    pub fn with_variant(&self, v: &Variant) -> Self {
        let mut out = self.clone();
        out.code.k = v.bits as usize;
        out.quantizer.bits = v.bits;
        if let Some(d) = v.delta {
            out.quantizer.delta = d;
        }
        out
    }

    pub fn code_seed(&self, index: usize) -> u64 {
        match (index, self.code.seed) {
            (0, Some(s)) => s,
            _ => rng::derive_seed(self.seed, &format!("code/{index}")),
        }
    }

    pub fn code_params(&self, seed: u64) -> Result<CodeParams, ControlError> {
        Ok(CodeParams::new(self.code.n, self.code.k, self.code.p, seed)?)
    }

    fn measurement_model(&self) -> MeasurementModel {
        MeasurementModel {
            mode: self.mode,
            quantizer: self.quantizer,
            v: self.plant.v,
        }
    }
}

/// Per-step record of one closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub x: Vec<DVector<f64>>,
    pub u: Vec<DVector<f64>>,
    /// Controller prediction `x̂_{t|t-1}`.
    pub xhat: Vec<DVector<f64>>,
    /// Axis extents of the controller's predicted set.
    pub widths: Vec<DVector<f64>>,
    /// Earliest-unresolved decoder delay after step `t`.
    pub d: Vec<usize>,
    pub desync: Vec<bool>,
    /// Steps where the true state left the controller's predicted set.
    pub violations: usize,
}

impl TrajectoryRecord {
    pub fn horizon(&self) -> usize {
        self.x.len()
    }

    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, |x| x.len())
    }

    /// `sup_t ‖x_t‖∞`.
    pub fn sup_abs(&self) -> f64 {
        self.x.iter().map(|x| x.amax()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let m = self.dim();
        let mut out = String::from("t");
        for prefix in ["x", "u", "xhat", "width"] {
            for i in 1..=m {
                let _ = write!(out, ",{prefix}_{i}");
            }
        }
        out.push_str(",d,desync\n");
        for t in 0..self.horizon() {
            let _ = write!(out, "{t}");
            for v in [&self.x[t], &self.u[t], &self.xhat[t], &self.widths[t]] {
                for x in v.iter() {
                    let _ = write!(out, ",{x}");
                }
            }
            let _ = writeln!(out, ",{},{}", self.d[t], u8::from(self.desync[t]));
        }
        out
    }
}

/// `(1/(2T)) Σ_{t<T} (‖x_t‖² + ‖u_t‖²)`.
pub fn lqr_cost(traj: &TrajectoryRecord) -> f64 {
    let t = traj.horizon();
    if t == 0 {
        return 0.0;
    }
    let sum: f64 = traj
        .x
        .iter()
        .zip(&traj.u)
        .map(|(x, u)| x.norm_squared() + u.norm_squared())
        .sum();
    sum / (2.0 * t as f64)
}

fn message_bits(index: u64, k: usize) -> BitVec {
    let mut b = BitVec::zeros(k);
    for i in 0..k {
        b.set(i, (index >> i) & 1 == 1);
    }
    b
}

fn bits_index(bits: &BitVec) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, b)| acc | (u64::from(b) << i))
}

fn initial_box(m: usize, r: f64) -> Hypercuboid {
    Hypercuboid::around(&DVector::zeros(m), r)
}

fn initial_ellipsoid(m: usize, r: f64) -> EllipsoidState {
    // Smallest ball holding the initial box.
    EllipsoidState::ball(DVector::zeros(m), (r * (m as f64).sqrt()).max(1e-9))
}

fn run_with<F: SetFilter>(
    cfg: &SimConfig,
    code: &ToeplitzCode,
    trial: usize,
    initial: F,
) -> Result<TrajectoryRecord, ControlError> {
    let plant = &cfg.plant;
    let m = plant.dim();
    let k = cfg.code.k;
    let model = cfg.measurement_model();
    let channel = ChannelConfig {
        epsilon: cfg.epsilon,
        seed: rng::derive_seed(cfg.seed, &format!("trial/{trial}/channel")),
    };
    let mut noise = rng::stream(rng::derive_seed(cfg.seed, &format!("trial/{trial}/noise")));

    let mut encoder = Encoder::new(code.clone());
    let mut decoder = BecDecoder::new(code.clone());
    let mut ctrl = FilterSession::new(plant.clone(), model, initial.clone());
    let mut observer = FilterSession::new(plant.clone(), model, initial);

    let horizon = cfg.horizon;
    let mut rec = TrajectoryRecord {
        x: Vec::with_capacity(horizon),
        u: Vec::with_capacity(horizon),
        xhat: Vec::with_capacity(horizon),
        widths: Vec::with_capacity(horizon),
        d: Vec::with_capacity(horizon),
        desync: Vec::with_capacity(horizon),
        violations: 0,
    };
    let mut x = DVector::zeros(m);
    for t in 0..horizon {
        let predicted = ctrl.predicted();
        let xhat = predicted.center();
        if !predicted.contains(&x, 1e-9 * (1.0 + x.amax())) {
            rec.violations += 1;
        }
        rec.widths.push(predicted.widths());
        let u = cfg.controller.input(plant, &xhat);

        let v = draw(&cfg.noise, plant.v, &mut noise);
        let y = x[0] + v;
        let index = model.encode(observer.predicted(), y);
        if cfg.mode == FeedbackMode::Feedback {
            observer.step(index, u.clone())?;
        }

        let codeword = encoder.encode_step(&message_bits(index, k))?;
        let resolved = decoder.resolved_before();
        let report = decoder.observe_step(&channel.transmit(&codeword, t as u64 + 1))?;

        let revised: Vec<u64> = (resolved..t)
            .map(|tau| decoder.message_estimate(tau).map(|(b, _)| bits_index(&b)))
            .collect::<Result<_, _>>()?;
        ctrl.sync(resolved, &revised)?;
        let (latest, _) = decoder.message_estimate(t)?;
        let desync = ctrl.step(bits_index(&latest), u.clone())?.desync.is_some();

        let w = DVector::from_fn(m, |_, _| draw(&cfg.noise, plant.w, &mut noise));
        let next = plant.step(&x, &u, &w);
        rec.x.push(std::mem::replace(&mut x, next));
        rec.u.push(u);
        rec.xhat.push(xhat);
        rec.d.push(report.d);
        rec.desync.push(desync);
    }
    Ok(rec)
}

/// One closed-loop trial of `code` under `cfg`.
pub fn run_closed_loop(cfg: &SimConfig, code: &ToeplitzCode, trial: usize) -> Result<TrajectoryRecord, ControlError> {
    let m = cfg.plant.dim();
    match cfg.filter {
        FilterKind::Cuboid => run_with(cfg, code, trial, initial_box(m, cfg.initial_radius)),
        FilterKind::Ellipsoid => run_with(cfg, code, trial, initial_ellipsoid(m, cfg.initial_radius)),
    }
}

/// Aggregates over the trials of one code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub code_seed: u64,
    pub trials: usize,
    pub horizon: usize,
    /// `sup_t` of the trial mean of `‖x_t‖∞`.
    pub sup_mean_abs: f64,
    /// Mean over trials of `sup_t ‖x_t‖∞`.
    pub mean_sup_abs: f64,
    /// Trial mean of the per-trial LQR cost.
    pub lqr_cost: f64,
    /// Fraction of steps flagged as desynchronized.
    pub desync_rate: f64,
    /// Largest decoder delay seen.
    pub max_delay: usize,
    /// Containment failures of the controller's predicted set.
    pub violations: usize,
}

impl MetricsSummary {
    pub fn from_trials(code_seed: u64, trials: &[TrajectoryRecord]) -> Self {
        let count = trials.len();
        let horizon = trials.first().map_or(0, |r| r.horizon());
        let sup_mean_abs = (0..horizon)
            .map(|t| trials.iter().map(|r| r.x[t].amax()).sum::<f64>() / count as f64)
            .fold(0.0, f64::max);
        let mean = |f: &dyn Fn(&TrajectoryRecord) -> f64| trials.iter().map(f).sum::<f64>() / count as f64;
        let desync: usize = trials.iter().map(|r| r.desync.iter().filter(|&&d| d).count()).sum();
        Self {
            code_seed,
            trials: count,
            horizon,
            sup_mean_abs,
            mean_sup_abs: mean(&|r| r.sup_abs()),
            lqr_cost: mean(&lqr_cost),
            desync_rate: desync as f64 / (count * horizon).max(1) as f64,
            max_delay: trials.iter().flat_map(|r| r.d.iter().copied()).max().unwrap_or(0),
            violations: trials.iter().map(|r| r.violations).sum(),
        }
    }

    pub fn metric(&self, which: Metric) -> f64 {
        match which {
            Metric::MeanSupAbs => self.mean_sup_abs,
            Metric::SupMeanAbs => self.sup_mean_abs,
            Metric::LqrCost => self.lqr_cost,
        }
    }
}

/// Samples code `code_index` and runs all trials of `cfg` on it.
pub fn run_trials(cfg: &SimConfig, code_index: usize) -> Result<(MetricsSummary, Vec<TrajectoryRecord>), ControlError> {
    let seed = cfg.code_seed(code_index);
    let mut code = ToeplitzCode::sample(cfg.code_params(seed)?)?;
    code.extend_to(cfg.horizon);
    let runs: Vec<TrajectoryRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|j| run_closed_loop(cfg, &code, j))
        .collect::<Result<_, _>>()?;
    Ok((MetricsSummary::from_trials(seed, &runs), runs))
}

/// Per-code metric values, in code order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metric: Metric,
    pub rows: Vec<(u64, f64)>,
}

impl SweepResult {
    /// Fraction of codes whose metric is strictly below `threshold`.
    pub fn fraction_below(&self, threshold: f64) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|(_, v)| *v < threshold).count() as f64 / self.rows.len() as f64
    }

    /// Empirical CDF as `(value, fraction ≤ value)` at each distinct value.
    pub fn cdf(&self) -> Vec<(f64, f64)> {
        let mut vals: Vec<f64> = self.rows.iter().map(|r| r.1).collect();
        vals.sort_by(f64::total_cmp);
        let n = vals.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, v) in vals.iter().enumerate() {
            let frac = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == *v => last.1 = frac,
                _ => out.push((*v, frac)),
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("code_seed,metric\n");
        for (seed, v) in &self.rows {
            let _ = writeln!(out, "{seed},{v}");
        }
        out
    }

    /// `value,fraction` rows of [`SweepResult::cdf`].
    pub fn cdf_csv(&self) -> String {
        let mut out = String::from("value,fraction\n");
        for (v, f) in self.cdf() {
            let _ = writeln!(out, "{v},{f}");
        }
        out
    }
}

/// Samples `codes` codes and reports `metric` for each. Every code sees the
/// same per-trial noise and erasure streams.
pub fn run_code_sweep(cfg: &SimConfig, codes: usize, metric: Metric) -> Result<SweepResult, ControlError> {
    let rows = (0..codes)
        .into_par_iter()
        .map(|i| run_trials(cfg, i).map(|(s, _)| (s.code_seed, s.metric(metric))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult { metric, rows })
}

/// Bound on `‖x‖∞` for a noiseless channel under dead-beat control:
/// `‖F‖∞ · max_i Δ∞⁽ⁱ⁾ / 2 + W/2`.
pub fn noiseless_state_bound(plant: &PlantModel, steady_widths: &DVector<f64>) -> f64 {
    let f: DMatrix<f64> = plant.f_abs();
    let row_sum = (0..f.nrows()).map(|i| f.row(i).sum()).fold(0.0, f64::max);
    row_sum * steady_widths.amax() / 2.0 + plant.w / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::steady_state_width;

    fn example_one(epsilon: f64) -> SimConfig {
        SimConfig {
            plant: PlantModel::new(vec![-2.0], 60.0, 2.0).unwrap(),
            code: CodeSpec {
                n: 15,
                k: 3,
                p: 0.5,
                seed: None,
            },
            epsilon,
            quantizer: QuantizerConfig::new(3, 16.0).unwrap(),
            mode: FeedbackMode::NoFeedback,
            filter: FilterKind::Cuboid,
            horizon: 100,
            trials: 4,
            controller: Controller::Deadbeat,
            noise: NoiseModel::Uniform,
            initial_radius: 1.0,
            seed: 7,
            sweep: None,
        }
    }

    #[test]
    fn deterministic_trials() {
        let cfg = example_one(0.3);
        let (a, ra) = run_trials(&cfg, 0).unwrap();
        let (b, rb) = run_trials(&cfg, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        assert_eq!(ra[0].to_csv(), rb[0].to_csv());
    }

    #[test]
    fn noiseless_channel_is_bounded() {
        let cfg = example_one(0.0);
        let ss = steady_state_width(&cfg.plant, 16.0, 2.0);
        let bound = noiseless_state_bound(&cfg.plant, &ss.widths);
        let (summary, runs) = run_trials(&cfg, 0).unwrap();
        assert_eq!(summary.violations, 0);
        assert_eq!(summary.desync_rate, 0.0);
        for r in &runs {
            assert!(r.sup_abs() <= bound, "{} > {bound}", r.sup_abs());
            assert!(r.d.iter().all(|&d| d == 0));
        }
    }

    #[test]
    fn erased_channel_diverges() {
        let mut cfg = example_one(1.0);
        cfg.horizon = 60;
        cfg.trials = 1;
        let (_, runs) = run_trials(&cfg, 0).unwrap();
        assert!(runs[0].x.last().unwrap().amax() > 1e9);
    }

    #[test]
    fn lqr_examples() {
        let rec = |x: f64, u: f64, t: usize| TrajectoryRecord {
            x: vec![DVector::from_element(1, x); t],
            u: vec![DVector::from_element(1, u); t],
            xhat: vec![DVector::zeros(1); t],
            widths: vec![DVector::zeros(1); t],
            d: vec![0; t],
            desync: vec![false; t],
            violations: 0,
        };
        assert_eq!(lqr_cost(&rec(0.0, 0.0, 10)), 0.0);
        assert_eq!(lqr_cost(&rec(1.0, 0.0, 100)), 0.5);
    }

    #[test]
    fn single_code_cdf_is_a_step() {
        let mut cfg = example_one(0.0);
        cfg.trials = 1;
        let sweep = run_code_sweep(&cfg, 1, Metric::MeanSupAbs).unwrap();
        assert_eq!(sweep.rows.len(), 1);
        assert_eq!(sweep.cdf(), vec![(sweep.rows[0].1, 1.0)]);
    }

    #[test]
    fn config_validation() {
        let mut cfg = example_one(0.3);
        cfg.horizon = 0;
        assert!(matches!(cfg.validate(), Err(ControlError::Config { field, .. }) if field == "horizon"));
        let mut cfg = example_one(0.3);
        cfg.quantizer.bits = 4;
        assert!(cfg.validate().is_err());
        let json = serde_json::to_string(&example_one(0.3)).unwrap();
        assert_eq!(SimConfig::from_json(&json).unwrap(), example_one(0.3));
    }

    #[test]
    fn message_bit_round_trip() {
        for idx in 0..64 {
            assert_eq!(bits_index(&message_bits(idx, 6)), idx);
        }
    }
}
