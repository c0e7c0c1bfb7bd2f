//! Seeded Monte Carlo sweeps over the sampling rate `n`.
//!
//! Every `(n, trial)` cell draws its randomness from
//! [`derive_seed`]`(master_seed, n, trial)`, so any row can be replayed on its
//! own and results do not depend on thread count or scheduling.
//!
//! Modes and the metrics they emit per trial:
//!
//! | mode               | metrics                                                       |
//! |--------------------|---------------------------------------------------------------|
//! | `distortion_sweep` | `distortion`                                                  |
//! | `bandwidth_curve`  | `success`, `threshold_check`, `stopping_check`, `detected_b`  |
//! | `grid_deviation`   | `grid_deviation`                                              |
//! | `energy_mse`       | `energy_sq_error`                                             |
//! | `riemann_error`    | `riemann_error`, `riemann_bound_ratio`                        |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::bandwidth::{
    detect_bandwidth, threshold_coefficient, BandwidthConfig, DetectionStatus, DEFAULT_B_MAX,
    DEFAULT_SHRINK_EXPONENT,
};
use crate::error::{Error, Result};
use crate::estimator::{energy_estimate, estimate_field, riemann_coefficient, OrdinalDft};
use crate::field::BandlimitedField;
use crate::noise::NoiseSpec;
use crate::rng::{derive_seed, TrialStreams};
use crate::sampling::{acquire, generate_trace, grid_deviation, RenewalConfig, SampleTrace};

/// Sweep means at or below this level are treated as round-off; no slope is
/// fitted through them.
pub const SLOPE_FLOOR: f64 = 1e-24;

/// Means below this fraction of the largest mean in the sweep are also
/// treated as round-off.
pub const SLOPE_RELATIVE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    DistortionSweep,
    BandwidthCurve,
    GridDeviation,
    EnergyMse,
    RiemannError,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::DistortionSweep => "distortion_sweep",
            Mode::BandwidthCurve => "bandwidth_curve",
            Mode::GridDeviation => "grid_deviation",
            Mode::EnergyMse => "energy_mse",
            Mode::RiemannError => "riemann_error",
        }
    }

    pub fn metrics(&self) -> &'static [&'static str] {
        match self {
            Mode::DistortionSweep => &["distortion"],
            Mode::BandwidthCurve => &["success", "threshold_check", "stopping_check", "detected_b"],
            Mode::GridDeviation => &["grid_deviation"],
            Mode::EnergyMse => &["energy_sq_error"],
            Mode::RiemannError => &["riemann_error", "riemann_bound_ratio"],
        }
    }

    /// Metric whose mean is expected to decay with `n`, if any.
    pub fn decay_metric(&self) -> Option<&'static str> {
        match self {
            Mode::DistortionSweep => Some("distortion"),
            Mode::GridDeviation => Some("grid_deviation"),
            Mode::EnergyMse => Some("energy_sq_error"),
            Mode::RiemannError => Some("riemann_error"),
            Mode::BandwidthCurve => None,
        }
    }

    fn default_trials(&self) -> u64 {
        match self {
            Mode::BandwidthCurve => 100,
            _ => 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum FieldSource {
    /// `b = 3` field with `a[0] = 0.2445`, see [`BandlimitedField::benchmark_b3`].
    #[serde(rename = "paper1", alias = "benchmark_b3")]
    BenchmarkB3,
    /// `a[0] = 0.1, a[1] = -0.1, a[12] = 0.1`, see [`BandlimitedField::benchmark_sparse`].
    #[serde(rename = "paper2", alias = "benchmark_sparse")]
    BenchmarkSparse,
    Random {
        b: usize,
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

impl FieldSource {
    pub fn load(&self) -> Result<BandlimitedField> {
        Ok(match self {
            FieldSource::BenchmarkB3 => BandlimitedField::benchmark_b3(),
            FieldSource::BenchmarkSparse => BandlimitedField::benchmark_sparse(),
            FieldSource::Random { b, seed } => BandlimitedField::random(*b, *seed),
            FieldSource::File { path } => BandlimitedField::load(path).map_err(|e| {
                Error::config(format!("cannot load field file {}: {e}", path.display()))
            })?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandwidthSettings {
    pub delta: f64,
    pub b_max: usize,
    pub shrink_exponent: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop_band: Option<f64>,
}

impl Default for BandwidthSettings {
    fn default() -> Self {
        Self {
            delta: 0.1,
            b_max: DEFAULT_B_MAX,
            shrink_exponent: DEFAULT_SHRINK_EXPONENT,
            stop_band: None,
        }
    }
}

impl BandwidthSettings {
    fn config(&self, sigma2: f64, n: u64) -> BandwidthConfig {
        BandwidthConfig {
            delta: self.delta,
            sigma2,
            b_max: self.b_max,
            n,
            shrink_exponent: self.shrink_exponent,
            stop_band: self.stop_band,
        }
    }
}

fn default_renewal() -> RenewalConfig {
    RenewalConfig {
        family: "uniform".into(),
        params: vec![],
        lambda: None,
    }
}

fn default_noise() -> NoiseSpec {
    NoiseSpec::uniform(1.0).expect("valid default noise")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub field: FieldSource,
    #[serde(default = "default_renewal")]
    pub renewal: RenewalConfig,
    #[serde(default = "default_noise")]
    pub noise: NoiseSpec,
    pub n_grid: Vec<u64>,
    /// Defaults to 1000, or 100 for `bandwidth_curve`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default)]
    pub master_seed: u64,
    /// Estimation bandwidth for `distortion_sweep`; defaults to the field's `b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate_b: Option<usize>,
    #[serde(default)]
    pub bandwidth: BandwidthSettings,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, field: FieldSource, n_grid: Vec<u64>) -> Self {
        Self {
            mode,
            field,
            renewal: default_renewal(),
            noise: default_noise(),
            n_grid,
            trials: None,
            master_seed: 0,
            estimate_b: None,
            bandwidth: BandwidthSettings::default(),
        }
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or_else(|| self.mode.default_trials())
    }

    /// Parses a TOML config; syntax and type errors carry line numbers.
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Parses a TOML config after applying dotted-key overrides such as
    /// `("bandwidth.delta", "0.05")`. Override values are read as TOML
    /// literals and fall back to plain strings.
    pub fn from_toml_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let values: Vec<(String, toml::Value)> = overrides
            .iter()
            .map(|(k, raw)| (k.clone(), parse_override(raw)))
            .collect();
        Self::from_toml_with_values(text, &values)
    }

    /// Like [`Self::from_toml_with_overrides`] with already typed values.
    pub fn from_toml_with_values(text: &str, overrides: &[(String, toml::Value)]) -> Result<Self> {
        if overrides.is_empty() {
            return Self::from_toml(text);
        }
        let mut table: toml::Table = text.parse()?;
        for (key, value) in overrides {
            set_dotted(&mut table, key, value.clone())?;
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(format!("after overrides: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::config("n_grid must not be empty"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(format!(
                "n_grid must be strictly increasing, got {:?}",
                self.n_grid
            )));
        }
        if self.trials() == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        for &n in &self.n_grid {
            self.renewal.clone().into_spec(n)?;
            if self.mode == Mode::BandwidthCurve {
                self.bandwidth.config(self.noise.variance(), n).validate()?;
            }
        }
        Ok(())
    }
}

/// Reads a `--set` style value as a TOML literal, or a plain string when it
/// is not one.
pub fn parse_override(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn set_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::config(format!("empty override key {key:?}")))?;
    let mut node = table;
    for part in parts {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(format!("override {key:?}: {part:?} is not a table")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

/// One metric of one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub mode: Mode,
    pub n: u64,
    pub trial: u64,
    pub seed: u64,
    pub metric: &'static str,
    pub value: f64,
    /// Set when the trial could not produce a regular value.
    #[serde(skip)]
    pub fault: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub mode: Mode,
    pub n: u64,
    pub metric: &'static str,
    pub mean: f64,
    pub stderr: f64,
    /// Finite values contributing to the mean.
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub mode: Mode,
    pub rows: Vec<Row>,
    pub summary: Vec<SummaryRow>,
    pub slope: Option<SlopeFit>,
    /// Why no slope was fitted, for decay modes.
    pub slope_note: Option<String>,
}

impl ExperimentResult {
    pub fn summary_for(&self, metric: &str) -> Vec<&SummaryRow> {
        self.summary.iter().filter(|s| s.metric == metric).collect()
    }

    pub fn mean(&self, n: u64, metric: &str) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.n == n && s.metric == metric)
            .map(|s| s.mean)
    }

    pub fn faults(&self) -> usize {
        self.rows.iter().filter(|r| r.fault.is_some()).count()
    }

    /// Header `mode,n,trial,seed,metric,value`.
    pub fn write_rows_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mode", "n", "trial", "seed", "metric", "value"])?;
        for r in &self.rows {
            w.write_record([
                r.mode.name().to_string(),
                r.n.to_string(),
                r.trial.to_string(),
                r.seed.to_string(),
                r.metric.to_string(),
                r.value.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Header `mode,n,mean,stderr,count`, one row per `(n, metric)`, with the
    /// metric name appended as a final column.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mode", "n", "mean", "stderr", "count", "metric"])?;
        for s in &self.summary {
            w.write_record([
                s.mode.name().to_string(),
                s.n.to_string(),
                s.mean.to_string(),
                s.stderr.to_string(),
                s.count.to_string(),
                s.metric.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// `{slope, ci_low, ci_high}`; `null` fields and a `note` when no slope
    /// was fitted.
    pub fn slope_json(&self) -> serde_json::Value {
        match (&self.slope, &self.slope_note) {
            (Some(fit), _) => serde_json::json!({
                "slope": fit.slope,
                "ci_low": fit.ci_low,
                "ci_high": fit.ci_high,
            }),
            (None, note) => serde_json::json!({
                "slope": null,
                "ci_low": null,
                "ci_high": null,
                "note": note,
            }),
        }
    }

    /// Writes `rows.csv`, `summary.csv` and `slope.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        self.write_rows_csv(fs::File::create(dir.join("rows.csv"))?)?;
        self.write_summary_csv(fs::File::create(dir.join("summary.csv"))?)?;
        let mut slope = serde_json::to_string_pretty(&self.slope_json())?;
        slope.push('\n');
        fs::write(dir.join("slope.json"), slope)?;
        Ok(())
    }
}

/// Execution knobs that do not affect results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

/// Config with its field, noise and per-`n` constants resolved.
struct Prepared {
    config: ExperimentConfig,
    truth: BandlimitedField,
    estimate_b: usize,
    sigma2: f64,
    /// `sup |d/dx g(x) e^{-j2πkx}|` for `k = -b..=b` (riemann mode only).
    riemann_constants: Vec<f64>,
}

impl Prepared {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let truth = config.field.load()?;
        if !truth.is_real() {
            return Err(Error::config(
                "experiments need a real (conjugate-symmetric) field",
            ));
        }
        let b = truth.b() as i64;
        let riemann_constants = if config.mode == Mode::RiemannError {
            (-b..=b)
                .map(|k| truth.modulated_derivative_sup(k))
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            estimate_b: config.estimate_b.unwrap_or(truth.b()),
            sigma2: config.noise.variance(),
            truth,
            riemann_constants,
            config: config.clone(),
        })
    }

    fn run_trial(&self, n: u64, trial: u64) -> Vec<Row> {
        let seed = derive_seed(self.config.master_seed, n, trial);
        let mode = self.config.mode;
        let row = |metric: &'static str, value: f64, fault: Option<String>| Row {
            mode,
            n,
            trial,
            seed,
            metric,
            value,
            fault,
        };
        match self.metrics(n, seed) {
            Ok(values) => values
                .into_iter()
                .map(|(metric, value, fault)| row(metric, value, fault))
                .collect(),
            Err(e) => {
                let msg = e.to_string();
                mode.metrics()
                    .iter()
                    .map(|m| row(m, f64::NAN, Some(msg.clone())))
                    .collect()
            }
        }
    }

    fn metrics(&self, n: u64, seed: u64) -> Result<Vec<(&'static str, f64, Option<String>)>> {
        let mut streams = TrialStreams::new(seed);
        let spec = self.config.renewal.clone().into_spec(n)?;
        let trace = generate_trace(&spec, &mut streams.spacing)?;
        let acquired = |trace: SampleTrace, streams: &mut TrialStreams| {
            acquire(trace, &self.truth, &self.config.noise, &mut streams.noise)
        };
        Ok(match self.config.mode {
            Mode::GridDeviation => vec![("grid_deviation", grid_deviation(&trace), None)],
            Mode::DistortionSweep => {
                let trace = acquired(trace, &mut streams)?;
                let estimate = estimate_field(trace.readings(), self.estimate_b)?;
                vec![("distortion", self.truth.distortion(&estimate), None)]
            }
            Mode::EnergyMse => {
                let trace = acquired(trace, &mut streams)?;
                let est = energy_estimate(trace.readings(), self.sigma2)?;
                vec![("energy_sq_error", (est - self.truth.energy()).powi(2), None)]
            }
            Mode::RiemannError => {
                let m = trace.m();
                let b = self.truth.b() as i64;
                let mut worst_err = 0.0f64;
                let mut worst_ratio = 0.0f64;
                for (k, c2) in (-b..=b).zip(&self.riemann_constants) {
                    let err =
                        (riemann_coefficient(&self.truth, m, k)? - self.truth.coeff(k)).norm();
                    worst_err = worst_err.max(err);
                    if *c2 > 0.0 {
                        worst_ratio = worst_ratio.max(m as f64 * err / c2);
                    }
                }
                vec![
                    ("riemann_error", worst_err, None),
                    ("riemann_bound_ratio", worst_ratio, None),
                ]
            }
            Mode::BandwidthCurve => {
                let trace = acquired(trace, &mut streams)?;
                let config = self.config.bandwidth.config(self.sigma2, n);
                let outcome = detect_bandwidth(trace.readings(), &config)?;
                let b = self.truth.b() as i64;

                let dft = OrdinalDft::new(trace.readings())?;
                let threshold_ok = (-b..=b).all(|k| {
                    let kept = threshold_coefficient(dft.coefficient(k), &config);
                    (self.truth.coeff(k).norm() > 0.0) == (kept.norm() > 0.0)
                });
                let stopping_ok = outcome.status == DetectionStatus::Stopped
                    && outcome.detected_b == Some(self.truth.b());
                let success = stopping_ok
                    && (-b..=b).all(|k| {
                        (self.truth.coeff(k).norm() > 0.0) == (outcome.kept(k).norm() > 0.0)
                    });
                let fault = (outcome.status == DetectionStatus::CapReached)
                    .then(|| format!("detection cap b_max = {} reached", config.b_max));
                let detected = outcome.detected_b.map_or(-1.0, |b| b as f64);
                let flag = |ok: bool| if ok { 1.0 } else { 0.0 };
                vec![
                    ("success", flag(success), fault.clone()),
                    ("threshold_check", flag(threshold_ok), fault.clone()),
                    ("stopping_check", flag(stopping_ok), fault.clone()),
                    ("detected_b", detected, fault),
                ]
            }
        })
    }
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentResult> {
    run_with(config, RunOptions::default())
}

pub fn run_with(config: &ExperimentConfig, options: RunOptions) -> Result<ExperimentResult> {
    let prepared = Prepared::new(config)?;
    let trials = config.trials();
    let cells: Vec<(u64, u64)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();

    let compute = || -> Vec<Row> {
        cells
            .par_iter()
            .map(|&(n, t)| prepared.run_trial(n, t))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    let rows = match options.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Fault(format!("thread pool: {e}")))?
            .install(compute),
        None => compute(),
    };

    let summary = summarize(config.mode, &config.n_grid, &rows);
    let (slope, slope_note) = match config.mode.decay_metric() {
        None => (None, None),
        Some(metric) => {
            let points: Vec<(f64, f64)> = summary
                .iter()
                .filter(|s| s.metric == metric)
                .map(|s| (s.n as f64, s.mean))
                .collect();
            let largest = points.iter().map(|(_, m)| m.abs()).fold(0.0, f64::max);
            let floor = SLOPE_FLOOR.max(SLOPE_RELATIVE_FLOOR * largest);
            if let Some((n, mean)) = points.iter().find(|(_, m)| m.abs() <= floor) {
                let note = format!(
                    "slope undefined: mean {metric} {mean:e} at n = {n} is at round-off level"
                );
                (None, Some(note))
            } else {
                match fit_loglog_slope(&points) {
                    Ok(fit) => (Some(fit), None),
                    Err(e) => (None, Some(format!("slope undefined: {e}"))),
                }
            }
        }
    };
    Ok(ExperimentResult {
        mode: config.mode,
        rows,
        summary,
        slope,
        slope_note,
    })
}

/// Recomputes the rows of a single `(n, trial)` cell.
pub fn replay(config: &ExperimentConfig, n: u64, trial: u64) -> Result<Vec<Row>> {
    let prepared = Prepared::new(config)?;
    if !config.n_grid.contains(&n) {
        return Err(Error::config(format!(
            "n = {n} is not in n_grid {:?}",
            config.n_grid
        )));
    }
    if trial >= config.trials() {
        return Err(Error::config(format!(
            "trial {trial} out of range (trials = {})",
            config.trials()
        )));
    }
    Ok(prepared.run_trial(n, trial))
}

fn summarize(mode: Mode, n_grid: &[u64], rows: &[Row]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for &n in n_grid {
        for &metric in mode.metrics() {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n && r.metric == metric && r.value.is_finite())
                .map(|r| r.value)
                .collect();
            let count = values.len();
            let mean = if count == 0 {
                f64::NAN
            } else {
                values.iter().sum::<f64>() / count as f64
            };
            let stderr = if count < 2 {
                f64::NAN
            } else {
                let var =
                    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
                (var / count as f64).sqrt()
            };
            out.push(SummaryRow {
                mode,
                n,
                metric,
                mean,
                stderr,
                count: count as u64,
            });
        }
    }
    out
}

/// Ordinary least squares of `ln(mean)` on `ln(n)` with a 95% Student-t
/// interval on the slope.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::domain(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let bad: Vec<String> = points
        .iter()
        .filter(|(n, m)| !(*m > 0.0 && m.is_finite() && *n > 0.0))
        .map(|(n, _)| n.to_string())
        .collect();
    if !bad.is_empty() {
        return Err(Error::domain(format!(
            "log-log fit needs positive means; offending n: {}",
            bad.join(", ")
        )));
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, m)| m.ln()).collect();
    let k = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / k;
    let y_mean = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("slope fit needs at least two distinct n"));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let dof = k - 2.0;
    let se = (ssr / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975);
    Ok(SlopeFit {
        slope,
        intercept,
        ci_low: slope - t * se,
        ci_high: slope + t * se,
    })
}
