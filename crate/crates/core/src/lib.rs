//! Estimation of periodic bandlimited fields from noisy samples taken at
//! unknown locations.
//!
//! A mobile sensor records readings `y_i = g(S_i) + W(S_i)` along `[0, 1]`
//! where the locations `S_i` come from a renewal process whose spacing
//! distribution is unknown. The estimator only uses the order of the
//! readings: the `i`-th reading is treated as if it had been taken at `i/M`.
//!
//! Module map:
//!
//! - [`field`]: bandlimited fields, exact energy and distortion.
//! - [`sampling`]: renewal-process traces and reading acquisition.
//! - [`noise`]: zero-mean measurement noise with analytic moments.
//! - [`estimator`]: location-oblivious Fourier coefficient and energy estimates.
//! - [`bandwidth`]: thresholded bandwidth detection with an energy stopping rule.
//! - [`experiments`]: seeded Monte Carlo sweeps and log-log slope fitting.

pub mod bandwidth;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod field;
pub mod noise;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use field::BandlimitedField;
pub use num_complex::Complex64;
