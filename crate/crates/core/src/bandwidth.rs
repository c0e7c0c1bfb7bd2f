//! Bandwidth detection for fields whose nonzero coefficients all exceed a
//! known floor `delta` in magnitude.
//!
//! The detector first estimates the field energy `E_g` from the readings,
//! then walks `B = 0, 1, 2, ...`:
//!
//! 1. estimate `Â[B]` and `Â[-B]`;
//! 2. keep each one only if its magnitude is above `delta - n^(-1/3)`,
//!    otherwise set it to zero;
//! 3. stop at the first `B` where the kept energy `sum |Â[k]|^2` lies within
//!    `delta^2 / 2` of `E_g`.
//!
//! `b_max` bounds the walk; running past it yields [`DetectionStatus::CapReached`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{energy_estimate, OrdinalDft};

pub const DEFAULT_B_MAX: usize = 64;
pub const DEFAULT_SHRINK_EXPONENT: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthConfig {
    /// Floor on the magnitude of every nonzero coefficient.
    pub delta: f64,
    /// Known noise variance.
    pub sigma2: f64,
    pub b_max: usize,
    /// Sampling-rate parameter of the trace.
    pub n: u64,
    /// The keep threshold is `delta - n^(-shrink_exponent)`.
    #[serde(default = "default_shrink_exponent")]
    pub shrink_exponent: f64,
    /// Half-width of the stopping band; `delta^2 / 2` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_band: Option<f64>,
}

fn default_shrink_exponent() -> f64 {
    DEFAULT_SHRINK_EXPONENT
}

impl BandwidthConfig {
    pub fn new(delta: f64, sigma2: f64, n: u64) -> Result<Self> {
        let config = Self {
            delta,
            sigma2,
            b_max: DEFAULT_B_MAX,
            n,
            shrink_exponent: DEFAULT_SHRINK_EXPONENT,
            stop_band: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_b_max(mut self, b_max: usize) -> Self {
        self.b_max = b_max;
        self
    }

    /// `delta - n^(-shrink_exponent)`.
    pub fn threshold(&self) -> f64 {
        self.delta - (self.n as f64).powf(-self.shrink_exponent)
    }

    pub fn stop_band(&self) -> f64 {
        self.stop_band.unwrap_or(self.delta * self.delta / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::config(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return Err(Error::config(format!(
                "noise variance must be >= 0, got {}",
                self.sigma2
            )));
        }
        if self.n == 0 {
            return Err(Error::config("sampling rate n must be positive"));
        }
        if !(self.shrink_exponent.is_finite() && self.shrink_exponent > 0.0) {
            return Err(Error::config("shrink exponent must be positive"));
        }
        if let Some(band) = self.stop_band {
            if !(band.is_finite() && band > 0.0) {
                return Err(Error::config("stop band must be positive"));
            }
        }
        if self.threshold() <= 0.0 {
            let required = self.delta.powf(-1.0 / self.shrink_exponent);
            return Err(Error::config(format!(
                "coefficient threshold delta - n^(-{:.4}) = {:.6} is not positive; \
                 n >= (1/delta)^{} = {} is required (got n = {})",
                self.shrink_exponent,
                self.threshold(),
                1.0 / self.shrink_exponent,
                required.ceil(),
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectionStatus {
    Stopped,
    CapReached,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionOutcome {
    /// `None` when the cap was reached.
    pub detected_b: Option<usize>,
    pub status: DetectionStatus,
    /// Kept coefficients over `-B..=B` at the last examined `B`.
    #[serde(serialize_with = "serialize_pairs")]
    pub kept_coeffs: Vec<Complex64>,
    pub energy_est: f64,
    /// `sum |kept|^2 - E_g` at the last examined `B`.
    pub stop_residual: f64,
}

fn serialize_pairs<S: serde::Serializer>(
    coeffs: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(coeffs.iter().map(|c| [c.re, c.im]))
}

impl DetectionOutcome {
    /// Kept coefficient at `k`, zero outside the examined range.
    pub fn kept(&self, k: i64) -> Complex64 {
        let b = (self.kept_coeffs.len() / 2) as i64;
        if k.abs() > b {
            Complex64::new(0.0, 0.0)
        } else {
            self.kept_coeffs[(k + b) as usize]
        }
    }
}

/// Returns `value` if `|value| > delta - n^(-shrink_exponent)`, else zero.
/// Ties are zeroed.
pub fn threshold_coefficient(value: Complex64, config: &BandwidthConfig) -> Complex64 {
    if value.norm() > config.threshold() {
        value
    } else {
        Complex64::new(0.0, 0.0)
    }
}

pub fn detect_bandwidth(readings: &[f64], config: &BandwidthConfig) -> Result<DetectionOutcome> {
    config.validate()?;
    let dft = OrdinalDft::new(readings)?;
    let energy_est = energy_estimate(readings, config.sigma2)?;
    let band = config.stop_band();

    // Positive and negative halves; assembled into -B..=B on return.
    let mut positive = Vec::with_capacity(config.b_max + 1);
    let mut negative = Vec::with_capacity(config.b_max);
    let mut kept_energy = 0.0;
    let mut residual = 0.0;

    for b in 0..=config.b_max {
        let k = b as i64;
        let plus = threshold_coefficient(dft.coefficient(k), config);
        kept_energy += plus.norm_sqr();
        positive.push(plus);
        if b > 0 {
            let minus = threshold_coefficient(dft.coefficient(-k), config);
            kept_energy += minus.norm_sqr();
            negative.push(minus);
        }
        residual = kept_energy - energy_est;
        if residual.abs() <= band {
            return Ok(DetectionOutcome {
                detected_b: Some(b),
                status: DetectionStatus::Stopped,
                kept_coeffs: assemble(&negative, &positive),
                energy_est,
                stop_residual: residual,
            });
        }
    }
    Ok(DetectionOutcome {
        detected_b: None,
        status: DetectionStatus::CapReached,
        kept_coeffs: assemble(&negative, &positive),
        energy_est,
        stop_residual: residual,
    })
}

fn assemble(negative: &[Complex64], positive: &[Complex64]) -> Vec<Complex64> {
    negative.iter().rev().chain(positive).copied().collect()
}
