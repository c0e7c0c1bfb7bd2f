//! Location-oblivious Fourier coefficient estimation.
//!
//! The `i`-th of `M` readings is treated as if it were taken at `i/M`:
//!
//! ```text
//! Â[k] = (1/M) sum_{i=1}^{M} y_i exp(-j 2 pi k i / M)
//! ```
//!
//! Only the readings and their order enter the estimate; sample locations
//! and the spacing law are never used. Each phase `k i / M` is reduced
//! exactly in integers before the complex exponential is taken, and
//! negative `k` are the conjugates of the positive ones, so
//! `Â[-k] = conj(Â[k])` holds bit for bit.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::BandlimitedField;

/// One estimated coefficient together with the trace length it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientEstimate {
    pub k: i64,
    pub value: Complex64,
    pub m_used: usize,
}

/// `exp(-j 2 pi r / m)` for `0 <= r < m`.
fn unit_root(r: u64, m: u64) -> Complex64 {
    let (sin, cos) = (2.0 * PI * r as f64 / m as f64).sin_cos();
    Complex64::new(cos, -sin)
}

/// Twiddle table for one trace length; yields the same values as
/// [`estimate_coefficient`] at one trigonometric evaluation per reading
/// instead of one per reading and harmonic.
pub(crate) struct OrdinalDft<'a> {
    readings: &'a [f64],
    roots: Vec<Complex64>,
}

impl<'a> OrdinalDft<'a> {
    pub(crate) fn new(readings: &'a [f64]) -> Result<Self> {
        check_nonempty(readings)?;
        let m = readings.len() as u64;
        let roots = (0..m).map(|r| unit_root(r, m)).collect();
        Ok(Self { readings, roots })
    }

    pub(crate) fn coefficient(&self, k: i64) -> Complex64 {
        let m = self.readings.len() as u64;
        let step = k.unsigned_abs() % m;
        let mut r = 0u64;
        let mut acc = Complex64::new(0.0, 0.0);
        for &y in self.readings {
            r += step;
            if r >= m {
                r -= m;
            }
            acc += self.roots[r as usize] * y;
        }
        let value = acc / m as f64;
        if k < 0 {
            value.conj()
        } else {
            value
        }
    }
}

fn check_nonempty(readings: &[f64]) -> Result<()> {
    if readings.is_empty() {
        return Err(Error::domain("estimation needs at least one reading"));
    }
    Ok(())
}

/// `Â[k]` from the ordered readings alone.
pub fn estimate_coefficient(readings: &[f64], k: i64) -> Result<Complex64> {
    check_nonempty(readings)?;
    let m = readings.len() as u64;
    let step = k.unsigned_abs() % m;
    let mut r = 0u64;
    let mut acc = Complex64::new(0.0, 0.0);
    for &y in readings {
        r += step;
        if r >= m {
            r -= m;
        }
        acc += unit_root(r, m) * y;
    }
    let value = acc / m as f64;
    Ok(if k < 0 { value.conj() } else { value })
}

/// Field estimate with coefficients `Â[k]`, `k = -b..=b`.
pub fn estimate_field(readings: &[f64], b: usize) -> Result<BandlimitedField> {
    let dft = OrdinalDft::new(readings)?;
    let b = b as i64;
    let coeffs = (-b..=b).map(|k| dft.coefficient(k)).collect();
    BandlimitedField::new(coeffs)
}

/// Per-harmonic estimates for `k = -b..=b`.
pub fn coefficient_report(readings: &[f64], b: usize) -> Result<Vec<CoefficientEstimate>> {
    let dft = OrdinalDft::new(readings)?;
    let b = b as i64;
    Ok((-b..=b)
        .map(|k| CoefficientEstimate {
            k,
            value: dft.coefficient(k),
            m_used: readings.len(),
        })
        .collect())
}

/// `A_R[k] = (1/m) sum_{i=1}^{m} g(i/m) exp(-j 2 pi k i / m)`, the
/// noiseless estimate on the uniform grid.
pub fn riemann_coefficient(field: &BandlimitedField, m: usize, k: i64) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::domain("Riemann sum needs m >= 1"));
    }
    let mf = m as f64;
    let mu = m as u64;
    let step = k.unsigned_abs() % mu;
    let sum: Complex64 = (1..=mu)
        .map(|i| {
            let r = (step * i) % mu;
            let root = unit_root(r, mu);
            let root = if k < 0 { root.conj() } else { root };
            field.eval(i as f64 / mf) * root
        })
        .sum();
    Ok(sum / mf)
}

/// `E_g = (1/M) sum_i y_i^2 - sigma^2`. Not clamped: small traces can give
/// negative values.
pub fn energy_estimate(readings: &[f64], sigma2: f64) -> Result<f64> {
    check_nonempty(readings)?;
    let mean_sq = readings.iter().map(|y| y * y).sum::<f64>() / readings.len() as f64;
    Ok(mean_sq - sigma2)
}
