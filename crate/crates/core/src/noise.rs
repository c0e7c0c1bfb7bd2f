//! Zero-mean measurement noise with known moments.
//!
//! Config representation is `{ "family": str, "params": [..] }`:
//!
//! | family       | params         | law                                  |
//! |--------------|----------------|--------------------------------------|
//! | `zero`       | `[]`           | `W = 0`                              |
//! | `uniform`    | `[a]`          | Uniform[-a, a]                       |
//! | `gaussian`   | `[sigma, cut]` | N(0, sigma^2) truncated at `cut` sigmas (`cut` defaults to 6) |
//! | `rademacher` | `[s]`          | `+s` or `-s` with equal probability  |

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GAUSSIAN_CUT: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseFamily {
    Zero,
    UniformSym {
        half_width: f64,
    },
    /// Moments are reported for the untruncated law; at `cut = 6` the
    /// truncation changes them by less than 1e-8 relative.
    GaussianTruncated {
        sigma: f64,
        cut: f64,
    },
    Rademacher {
        scale: f64,
    },
}

/// `(sigma^2, E[W^4], Var(W^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseMoments {
    pub variance: f64,
    pub fourth_moment: f64,
    pub var_of_square: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NoiseConfig", into = "NoiseConfig")]
pub struct NoiseSpec {
    family: NoiseFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl NoiseSpec {
    pub fn new(family: NoiseFamily) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        let valid = match family {
            NoiseFamily::Zero => true,
            NoiseFamily::UniformSym { half_width } => ok(half_width),
            NoiseFamily::GaussianTruncated { sigma, cut } => {
                ok(sigma) && cut.is_finite() && cut > 0.0
            }
            NoiseFamily::Rademacher { scale } => ok(scale),
        };
        if !valid {
            return Err(Error::config(format!(
                "invalid noise parameters {family:?}"
            )));
        }
        Ok(Self { family })
    }

    pub fn zero() -> Self {
        Self {
            family: NoiseFamily::Zero,
        }
    }

    pub fn uniform(half_width: f64) -> Result<Self> {
        Self::new(NoiseFamily::UniformSym { half_width })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(NoiseFamily::GaussianTruncated {
            sigma,
            cut: DEFAULT_GAUSSIAN_CUT,
        })
    }

    pub fn rademacher(scale: f64) -> Result<Self> {
        Self::new(NoiseFamily::Rademacher { scale })
    }

    pub fn family(&self) -> NoiseFamily {
        self.family
    }

    pub fn variance(&self) -> f64 {
        self.moments().variance
    }

    pub fn moments(&self) -> NoiseMoments {
        let (variance, fourth_moment) = match self.family {
            NoiseFamily::Zero => (0.0, 0.0),
            NoiseFamily::UniformSym { half_width: a } => (a * a / 3.0, a.powi(4) / 5.0),
            NoiseFamily::GaussianTruncated { sigma, .. } => (sigma * sigma, 3.0 * sigma.powi(4)),
            NoiseFamily::Rademacher { scale: s } => (s * s, s.powi(4)),
        };
        NoiseMoments {
            variance,
            fourth_moment,
            var_of_square: fourth_moment - variance * variance,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            NoiseFamily::Zero => 0.0,
            NoiseFamily::UniformSym { half_width } => {
                half_width * (2.0 * rng.random::<f64>() - 1.0)
            }
            NoiseFamily::GaussianTruncated { sigma, cut } => loop {
                let z: f64 = rng.sample(StandardNormal);
                if z.abs() <= cut {
                    break sigma * z;
                }
            },
            NoiseFamily::Rademacher { scale } => {
                if rng.random::<bool>() {
                    scale
                } else {
                    -scale
                }
            }
        }
    }

    /// Parses `zero`, `uniform:A`, `gaussian:SIGMA[:CUT]` or `rademacher:S`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.split(':');
        let family = parts.next().unwrap_or_default().to_string();
        let params = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("bad noise parameter {p:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        NoiseConfig { family, params }.try_into()
    }
}

impl TryFrom<NoiseConfig> for NoiseSpec {
    type Error = Error;

    fn try_from(cfg: NoiseConfig) -> Result<Self> {
        let p = cfg.params.as_slice();
        let family = match (cfg.family.to_ascii_lowercase().as_str(), p) {
            ("zero" | "none", []) => NoiseFamily::Zero,
            ("uniform", [a]) => NoiseFamily::UniformSym { half_width: *a },
            ("gaussian", [sigma]) => NoiseFamily::GaussianTruncated {
                sigma: *sigma,
                cut: DEFAULT_GAUSSIAN_CUT,
            },
            ("gaussian", [sigma, cut]) => NoiseFamily::GaussianTruncated { sigma: *sigma, cut: *cut },
            ("rademacher", [s]) => NoiseFamily::Rademacher { scale: *s },
            (name, _) => {
                return Err(Error::config(format!(
                    "unknown noise family {name:?} with {} parameter(s); expected zero, uniform:A, gaussian:SIGMA[:CUT] or rademacher:S",
                    p.len()
                )))
            }
        };
        NoiseSpec::new(family)
    }
}

impl From<NoiseSpec> for NoiseConfig {
    fn from(spec: NoiseSpec) -> Self {
        let (family, params) = match spec.family {
            NoiseFamily::Zero => ("zero", vec![]),
            NoiseFamily::UniformSym { half_width } => ("uniform", vec![half_width]),
            NoiseFamily::GaussianTruncated { sigma, cut } => ("gaussian", vec![sigma, cut]),
            NoiseFamily::Rademacher { scale } => ("rademacher", vec![scale]),
        };
        NoiseConfig {
            family: family.into(),
            params,
        }
    }
}
