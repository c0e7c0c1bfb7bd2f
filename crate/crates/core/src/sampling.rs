//! Renewal-process sample locations on `(0, 1]`.
//!
//! Spacings `X_i` are i.i.d. with `0 < nX <= lambda` and `E[nX] = 1`. The
//! trace keeps every partial sum `S_m = X_1 + ... + X_m <= 1`; the first
//! spacing that would carry the sum past 1 is drawn and dropped.
//!
//! Partial sums are accumulated in units of `1/n` (`T_m = n S_m`) so that
//! the degenerate family lands exactly on `i/n`.

use std::io::Write;

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::BandlimitedField;
use crate::noise::NoiseSpec;

/// Hard cap on spacing draws per trace.
pub const MAX_TRACE_ITERATIONS: u64 = 1_000_000_000;

const MEAN_TOLERANCE: f64 = 1e-12;

/// Law of the normalized spacing `nX`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpacingFamily {
    /// Uniform on `(2 - lambda, lambda]`, `1 < lambda <= 2`.
    Uniform,
    /// Symmetric triangular on `(2 - lambda, lambda]` with mode 1.
    Triangular,
    /// `lambda * Beta(alpha, beta)`; the mean constraint forces
    /// `lambda = (alpha + beta) / alpha`.
    ScaledBeta { alpha: f64, beta: f64 },
    /// `nX = 1`. Only for tests: `lambda = 1`.
    Degenerate,
}

impl SpacingFamily {
    /// Support bound that makes `E[nX] = 1` with the widest support.
    pub fn default_lambda(&self) -> f64 {
        match *self {
            SpacingFamily::Uniform | SpacingFamily::Triangular => 2.0,
            SpacingFamily::ScaledBeta { alpha, beta } => (alpha + beta) / alpha,
            SpacingFamily::Degenerate => 1.0,
        }
    }

    /// Scaled Beta family with support `(0, lambda]`; solves `beta` from the
    /// mean constraint.
    pub fn scaled_beta_for_lambda(alpha: f64, lambda: f64) -> Self {
        SpacingFamily::ScaledBeta {
            alpha,
            beta: alpha * (lambda - 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RenewalConfig", into = "RenewalConfig")]
pub struct RenewalSpec {
    n: u64,
    lambda: f64,
    family: SpacingFamily,
}

impl RenewalSpec {
    /// Spec with the family's default support bound.
    pub fn new(n: u64, family: SpacingFamily) -> Result<Self> {
        Self::with_lambda(n, family, family.default_lambda())
    }

    pub fn with_lambda(n: u64, family: SpacingFamily, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("sampling rate n must be positive"));
        }
        if !lambda.is_finite() {
            return Err(Error::config("support bound lambda must be finite"));
        }
        match family {
            SpacingFamily::Uniform | SpacingFamily::Triangular => {
                if !(lambda > 1.0 && lambda <= 2.0) {
                    return Err(Error::config(format!(
                        "{family:?} spacing has mean 1 only for 1 < lambda <= 2, got {lambda}"
                    )));
                }
            }
            SpacingFamily::ScaledBeta { alpha, beta } => {
                if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
                    return Err(Error::config(format!(
                        "beta parameters must be positive, got ({alpha}, {beta})"
                    )));
                }
                let mean = lambda * alpha / (alpha + beta);
                if (mean - 1.0).abs() > MEAN_TOLERANCE {
                    return Err(Error::config(format!(
                        "scaled Beta({alpha}, {beta}) on (0, {lambda}] has mean {mean}, not 1; \
                         use lambda = {}",
                        (alpha + beta) / alpha
                    )));
                }
            }
            SpacingFamily::Degenerate => {
                if lambda != 1.0 {
                    return Err(Error::config("degenerate spacing requires lambda = 1"));
                }
            }
        }
        Ok(Self { n, lambda, family })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn family(&self) -> SpacingFamily {
        self.family
    }

    /// Same family and support at another sampling rate.
    pub fn at_rate(&self, n: u64) -> Result<Self> {
        Self::with_lambda(n, self.family, self.lambda)
    }

    /// One draw of `nX`, in `(0, lambda]`.
    pub fn draw_normalized<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let lambda = self.lambda;
        match self.family {
            SpacingFamily::Uniform => {
                let u: f64 = rng.random();
                lambda - (2.0 * lambda - 2.0) * u
            }
            SpacingFamily::Triangular => {
                let p = 1.0 - rng.random::<f64>();
                let w = lambda - 1.0;
                if p <= 0.5 {
                    (2.0 - lambda) + w * (2.0 * p).sqrt()
                } else {
                    lambda - w * (2.0 * (1.0 - p)).sqrt()
                }
            }
            SpacingFamily::ScaledBeta { alpha, beta } => {
                let dist = Beta::new(alpha, beta).expect("validated beta parameters");
                loop {
                    let v: f64 = dist.sample(rng);
                    if v > 0.0 {
                        break lambda * v;
                    }
                }
            }
            SpacingFamily::Degenerate => 1.0,
        }
    }

    /// One spacing `X`, in `(0, lambda / n]` with mean `1/n`.
    pub fn draw_spacing<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.draw_normalized(rng) / self.n as f64
    }

    /// Parses `uniform`, `triangular`, `beta:ALPHA[:BETA]` or `degenerate`.
    /// With a single Beta parameter, `lambda` (default 2) fixes `BETA`.
    pub fn parse(n: u64, text: &str, lambda: Option<f64>) -> Result<Self> {
        RenewalConfig::parse(text, lambda)?.into_spec(n)
    }
}

/// Config layout: `{ "family": str, "params": [..], "lambda": optional }`.
///
/// Without an `n` the spec is built at `n = 1`; sweeps rescale it with
/// [`RenewalSpec::at_rate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewalConfig {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl RenewalConfig {
    /// Reads the `family[:param[:param]]` form used on the command line.
    pub fn parse(text: &str, lambda: Option<f64>) -> Result<Self> {
        let mut parts = text.split(':');
        let family = parts.next().unwrap_or_default().to_string();
        let params = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("bad renewal parameter {p:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RenewalConfig {
            family,
            params,
            lambda,
        })
    }

    pub fn into_spec(self, n: u64) -> Result<RenewalSpec> {
        let p = self.params.as_slice();
        let family = match (self.family.to_ascii_lowercase().as_str(), p) {
            ("uniform", []) => SpacingFamily::Uniform,
            ("triangular", []) => SpacingFamily::Triangular,
            ("degenerate", []) => SpacingFamily::Degenerate,
            ("beta" | "scaled_beta", [alpha, beta]) => SpacingFamily::ScaledBeta {
                alpha: *alpha,
                beta: *beta,
            },
            ("beta" | "scaled_beta", [alpha]) => {
                SpacingFamily::scaled_beta_for_lambda(*alpha, self.lambda.unwrap_or(2.0))
            }
            (name, _) => {
                return Err(Error::config(format!(
                    "unknown renewal family {name:?} with {} parameter(s); expected uniform, \
                     triangular, beta:ALPHA[:BETA] or degenerate",
                    p.len()
                )))
            }
        };
        match self.lambda {
            Some(lambda) => RenewalSpec::with_lambda(n, family, lambda),
            None => RenewalSpec::new(n, family),
        }
    }
}

impl TryFrom<RenewalConfig> for RenewalSpec {
    type Error = Error;

    fn try_from(cfg: RenewalConfig) -> Result<Self> {
        cfg.into_spec(1)
    }
}

impl From<RenewalSpec> for RenewalConfig {
    fn from(spec: RenewalSpec) -> Self {
        let (family, params) = match spec.family {
            SpacingFamily::Uniform => ("uniform", vec![]),
            SpacingFamily::Triangular => ("triangular", vec![]),
            SpacingFamily::ScaledBeta { alpha, beta } => ("beta", vec![alpha, beta]),
            SpacingFamily::Degenerate => ("degenerate", vec![]),
        };
        RenewalConfig {
            family: family.into(),
            params,
            lambda: Some(spec.lambda),
        }
    }
}

/// Ordered sample locations `S_1 < ... < S_M` in `(0, 1]` and, once
/// acquired, the readings `y_i = g(S_i) + W(S_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTrace {
    locations: Vec<f64>,
    overshoot: f64,
    readings: Vec<f64>,
}

impl SampleTrace {
    /// Trace from explicit locations, for tests and replay of recorded data.
    pub fn from_locations(locations: Vec<f64>) -> Result<Self> {
        let Some(&last) = locations.last() else {
            return Err(Error::domain("a trace needs at least one location"));
        };
        if locations[0] <= 0.0 || last > 1.0 || locations.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(
                "locations must be strictly increasing in (0, 1]",
            ));
        }
        Ok(Self {
            overshoot: 1.0 - last,
            locations,
            readings: Vec::new(),
        })
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    /// Number of samples `M`.
    pub fn m(&self) -> usize {
        self.locations.len()
    }

    /// `R_M = 1 - S_M`.
    pub fn overshoot(&self) -> f64 {
        self.overshoot
    }

    /// Empty until [`acquire`] has run.
    pub fn readings(&self) -> &[f64] {
        &self.readings
    }

    /// Writes `i,S_i,y_i` rows, `i` starting at 1.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "S_i", "y_i"])?;
        for (i, s) in self.locations.iter().enumerate() {
            let y = self
                .readings
                .get(i)
                .map(|y| y.to_string())
                .unwrap_or_default();
            w.write_record([(i + 1).to_string(), s.to_string(), y])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Draws one trace of the renewal process on `(0, 1]`.
pub fn generate_trace<R: Rng + ?Sized>(spec: &RenewalSpec, rng: &mut R) -> Result<SampleTrace> {
    let n = spec.n as f64;
    let mut locations = Vec::with_capacity(spec.n as usize + 1);
    let mut total = 0.0;
    let mut iterations = 0u64;
    loop {
        iterations += 1;
        if iterations > MAX_TRACE_ITERATIONS {
            return Err(Error::Fault(format!(
                "trace generation exceeded {MAX_TRACE_ITERATIONS} spacing draws"
            )));
        }
        let next = total + spec.draw_normalized(rng);
        if next > n {
            // S_M + X_{M+1} > 1: X_{M+1} is discarded.
            break;
        }
        if next <= total {
            // spacing below the resolution of the running sum
            continue;
        }
        total = next;
        locations.push(total / n);
    }
    if locations.is_empty() {
        return Err(Error::Fault(format!(
            "no sample fell in (0, 1] at n = {}",
            spec.n
        )));
    }
    debug_assert!(total <= n);
    let min_count = (n / spec.lambda).floor() as usize;
    debug_assert!(locations.len() >= min_count);
    Ok(SampleTrace {
        overshoot: 1.0 - total / n,
        locations,
        readings: Vec::new(),
    })
}

/// `(1/M) sum_i (S_i - i/M)^2`, the mean-square distance from the uniform grid.
pub fn grid_deviation(trace: &SampleTrace) -> f64 {
    let m = trace.m() as f64;
    trace
        .locations
        .iter()
        .enumerate()
        .map(|(i, s)| (s - (i + 1) as f64 / m).powi(2))
        .sum::<f64>()
        / m
}

/// Fills `y_i = g(S_i) + W_i` with i.i.d. noise drawn from `rng`.
pub fn acquire<R: Rng + ?Sized>(
    mut trace: SampleTrace,
    field: &BandlimitedField,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<SampleTrace> {
    if !field.is_real() {
        return Err(Error::config(
            "readings require a real (conjugate-symmetric) field",
        ));
    }
    trace.readings = trace
        .locations
        .iter()
        .map(|&s| field.eval_real(s) + noise.draw(rng))
        .collect();
    Ok(trace)
}
