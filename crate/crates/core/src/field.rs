//! Periodic bandlimited fields on `[0, 1)`.
//!
//! A field is stored as its dense Fourier coefficient vector `a[-b..=b]`:
//!
//! ```text
//! g(x) = sum_{k=-b}^{b} a[k] exp(j 2 pi k x)
//! ```
//!
//! Fields with `a[-k] = conj(a[k])` (and real `a[0]`) are real valued and are
//! flagged as such at construction. All sampling code requires real fields.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::field_rng;

/// Minimum number of grid points used for sup-norm searches.
pub const SUP_GRID_POINTS: usize = 8192;

/// Grid maxima polished by Newton iteration in [`BandlimitedField::sup_norm`].
const REFINED_CANDIDATES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldFile", into = "FieldFile")]
pub struct BandlimitedField {
    coeffs: Vec<Complex64>,
    real: bool,
}

/// On-disk layout: `{ "b": int, "coeffs": [[re, im], ...] }`, ordered `k = -b..=b`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct FieldFile {
    b: usize,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<FieldFile> for BandlimitedField {
    type Error = Error;

    fn try_from(file: FieldFile) -> Result<Self> {
        if file.coeffs.len() != 2 * file.b + 1 {
            return Err(Error::config(format!(
                "field with b = {} needs {} coefficients, found {}",
                file.b,
                2 * file.b + 1,
                file.coeffs.len()
            )));
        }
        Self::new(
            file.coeffs
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<BandlimitedField> for FieldFile {
    fn from(field: BandlimitedField) -> Self {
        FieldFile {
            b: field.b(),
            coeffs: field.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

fn is_conjugate_symmetric(coeffs: &[Complex64]) -> bool {
    let b = coeffs.len() / 2;
    coeffs[b].im == 0.0 && (1..=b).all(|k| coeffs[b - k] == coeffs[b + k].conj())
}

impl BandlimitedField {
    /// Builds a field from coefficients ordered `k = -b..=b`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::config(format!(
                "coefficient vector must have odd length 2b+1, got {}",
                coeffs.len()
            )));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::config("coefficients must be finite"));
        }
        let real = is_conjugate_symmetric(&coeffs);
        Ok(Self { coeffs, real })
    }

    /// Real field from its non-negative half `a[0..=b]`; `a[0]` must be real.
    pub fn from_half_spectrum(half: &[Complex64]) -> Result<Self> {
        let Some(a0) = half.first() else {
            return Err(Error::config("half spectrum needs at least a[0]"));
        };
        if a0.im != 0.0 {
            return Err(Error::config("a[0] of a real field must be real"));
        }
        let coeffs = half
            .iter()
            .skip(1)
            .rev()
            .map(|c| Complex64::new(c.re, if c.im == 0.0 { 0.0 } else { -c.im }))
            .chain(half.iter().copied())
            .collect();
        Self::new(coeffs)
    }

    pub fn zero(b: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * b + 1],
            real: true,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            coeffs: vec![Complex64::new(value, 0.0)],
            real: true,
        }
    }

    /// Three-harmonic benchmark field with `b = 3`, sup |g| < 1.
    pub fn benchmark_b3() -> Self {
        Self::from_half_spectrum(&[
            Complex64::new(0.2445, 0.0),
            Complex64::new(-0.0357, 0.0478),
            Complex64::new(0.0978, 0.0729),
            Complex64::new(-0.1796, -0.0756),
        ])
        .expect("valid benchmark coefficients")
    }

    /// Sparse benchmark field: `a[0] = 0.1`, `a[±1] = -0.1`, `a[±12] = 0.1`.
    pub fn benchmark_sparse() -> Self {
        let mut half = vec![Complex64::new(0.0, 0.0); 13];
        half[0] = Complex64::new(0.1, 0.0);
        half[1] = Complex64::new(-0.1, 0.0);
        half[12] = Complex64::new(0.1, 0.0);
        Self::from_half_spectrum(&half).expect("valid benchmark coefficients")
    }

    /// Random real field of bandwidth `b`, scaled so that sup |g| <= 1.
    ///
    /// `a[0]` and the real and imaginary parts of `a[1..=b]` are i.i.d.
    /// Uniform[-1, 1]; the negative half is the conjugate mirror.
    pub fn random(b: usize, seed: u64) -> Self {
        let mut rng = field_rng(seed);
        let mut half = Vec::with_capacity(b + 1);
        half.push(Complex64::new(rng.random_range(-1.0..=1.0), 0.0));
        for _ in 0..b {
            let re = rng.random_range(-1.0..=1.0);
            let im = rng.random_range(-1.0..=1.0);
            half.push(Complex64::new(re, im));
        }
        let field = Self::from_half_spectrum(&half).expect("finite random coefficients");
        let sup = field.sup_norm();
        field.scaled(1.0 / sup.max(1.0))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            real: self.real,
        }
    }

    /// Bandwidth parameter `b`.
    pub fn b(&self) -> usize {
        self.coeffs.len() / 2
    }

    /// Coefficients ordered `k = -b..=b`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `a[k]`, zero outside `-b..=b`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let b = self.b() as i64;
        if k.abs() > b {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + b) as usize]
        }
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Sum over `k` of `c(k) * a[k] * z^k` with `z = exp(j 2 pi x)`.
    fn weighted_sum(&self, x: f64, weight: impl Fn(f64) -> Complex64) -> Complex64 {
        let b = self.b();
        let z = Complex64::cis(2.0 * PI * x.rem_euclid(1.0));
        let mut acc = self.coeffs[b] * weight(0.0);
        let mut zk = Complex64::new(1.0, 0.0);
        for k in 1..=b {
            zk *= z;
            let kf = k as f64;
            acc +=
                self.coeffs[b + k] * weight(kf) * zk + self.coeffs[b - k] * weight(-kf) * zk.conj();
        }
        acc
    }

    /// `g(x)`; the field is 1-periodic so any finite `x` is accepted.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.weighted_sum(x, |_| Complex64::new(1.0, 0.0))
    }

    /// `g(x)` of a real field.
    ///
    /// Panics if the field is not conjugate symmetric and `Im g(x)` is not
    /// negligible.
    pub fn eval_real(&self, x: f64) -> f64 {
        if !self.real {
            let v = self.eval(x);
            assert!(v.im.abs() < 1e-9, "complex field value {v} at x = {x}");
            return v.re;
        }
        let b = self.b();
        let z = Complex64::cis(2.0 * PI * x.rem_euclid(1.0));
        let mut zk = Complex64::new(1.0, 0.0);
        let mut acc = 0.0;
        for k in 1..=b {
            zk *= z;
            let a = self.coeffs[b + k];
            acc += a.re * zk.re - a.im * zk.im;
        }
        self.coeffs[b].re + 2.0 * acc
    }

    /// `g'(x)`.
    pub fn derivative(&self, x: f64) -> Complex64 {
        self.weighted_sum(x, |k| Complex64::new(0.0, 2.0 * PI * k))
    }

    fn second_derivative(&self, x: f64) -> Complex64 {
        self.weighted_sum(x, |k| Complex64::new(-(2.0 * PI * k).powi(2), 0.0))
    }

    /// `sup_x |g(x)|`.
    ///
    /// Scans a uniform grid of at least [`SUP_GRID_POINTS`] points and then
    /// polishes the largest grid maxima of `|g|^2` with Newton steps confined
    /// to one grid cell. The result is never below the grid maximum.
    pub fn sup_norm(&self) -> f64 {
        let points = SUP_GRID_POINTS.max(32 * self.coeffs.len());
        let h = 1.0 / points as f64;
        let power: Vec<f64> = (0..points)
            .map(|i| self.eval(i as f64 * h).norm_sqr())
            .collect();

        let mut peaks: Vec<usize> = (0..points)
            .filter(|&i| {
                let prev = power[(i + points - 1) % points];
                let next = power[(i + 1) % points];
                power[i] >= prev && power[i] >= next
            })
            .collect();
        peaks.sort_by(|&i, &j| power[j].total_cmp(&power[i]));
        peaks.truncate(REFINED_CANDIDATES);

        let mut best = power.iter().copied().fold(0.0, f64::max);
        for i in peaks {
            let start = i as f64 * h;
            let mut x = start;
            for _ in 0..32 {
                let g = self.eval(x);
                let d1 = self.derivative(x);
                let d2 = self.second_derivative(x);
                let slope = 2.0 * (g.conj() * d1).re;
                let curvature = 2.0 * (d1.norm_sqr() + (g.conj() * d2).re);
                if curvature >= 0.0 || slope == 0.0 {
                    break;
                }
                let step = (-slope / curvature).clamp(-h, h);
                let next = (x + step).clamp(start - h, start + h);
                if next == x {
                    break;
                }
                x = next;
            }
            best = best.max(self.eval(x).norm_sqr());
        }
        best.sqrt()
    }

    /// Bernstein bound `2 pi b sup|g|` on `sup |g'|`.
    pub fn derivative_bound(&self) -> f64 {
        2.0 * PI * self.b() as f64 * self.sup_norm()
    }

    /// `sup_x |d/dx [g(x) exp(-j 2 pi k x)]|`, the constant in the
    /// Riemann-sum error bound `|a[k] - A_R[k]| <= C / M`.
    pub fn modulated_derivative_sup(&self, k: i64) -> f64 {
        // g(x) e^{-j2πkx} has coefficients c[m] = a[m + k]; differentiate termwise.
        let b = self.b() as i64;
        let width = b + k.abs();
        let coeffs = (-width..=width)
            .map(|m| self.coeff(m + k) * Complex64::new(0.0, 2.0 * PI * m as f64))
            .collect();
        Self::new(coeffs).expect("finite coefficients").sup_norm()
    }

    /// `sum_k |a[k]|^2`, equal to the integral of `|g|^2` over one period.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Squared coefficient error against an estimate of any bandwidth;
    /// coefficients missing on either side count as zero.
    pub fn distortion(&self, estimate: &BandlimitedField) -> f64 {
        let width = self.b().max(estimate.b()) as i64;
        (-width..=width)
            .map(|k| (estimate.coeff(k) - self.coeff(k)).norm_sqr())
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Direct complex-exponential summation, independent of the recurrences above.
    fn direct_eval(field: &BandlimitedField, x: f64) -> Complex64 {
        let b = field.b() as i64;
        (-b..=b)
            .map(|k| field.coeff(k) * Complex64::new(0.0, 2.0 * PI * k as f64 * x).exp())
            .sum()
    }

    fn cosine() -> BandlimitedField {
        BandlimitedField::from_half_spectrum(&[Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)])
            .unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(BandlimitedField::constant(0.5).eval_real(0.37), 0.5);
        assert_abs_diff_eq!(cosine().eval_real(0.0), 1.0, epsilon = 1e-15);

        // Frozen from a standalone direct-summation script.
        let field = BandlimitedField::benchmark_b3();
        assert_abs_diff_eq!(
            field.eval_real(0.0),
            0.009_499_999_999_999_953,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            field.eval_real(0.37),
            0.176_527_884_411_667_92,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            field.eval_real(0.8125),
            0.660_004_631_585_777_5,
            epsilon = 1e-14
        );
        for i in 0..100 {
            let x = i as f64 / 100.0;
            assert_abs_diff_eq!(
                field.eval_real(x),
                direct_eval(&field, x).re,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn benchmark_fields_are_real_and_bounded() {
        for field in [
            BandlimitedField::benchmark_b3(),
            BandlimitedField::benchmark_sparse(),
        ] {
            assert!(field.is_real());
            assert!(field.sup_norm() <= 1.0);
        }
        assert_eq!(BandlimitedField::benchmark_sparse().b(), 12);
        assert_abs_diff_eq!(
            BandlimitedField::benchmark_b3().sup_norm(),
            0.919_970_720_661_645,
            epsilon = 1e-9
        );
    }

    #[test]
    fn derivative_bound_examples() {
        assert_eq!(BandlimitedField::constant(0.3).derivative_bound(), 0.0);
        assert_abs_diff_eq!(cosine().derivative_bound(), 2.0 * PI, epsilon = 1e-12);

        let field = BandlimitedField::benchmark_b3();
        let bound = field.derivative_bound();
        assert!(bound <= 6.0 * PI * field.sup_norm() + 1e-12);
        let h = 1.0 / 8192.0;
        let fd_max = (0..8192)
            .map(|i| {
                let x = i as f64 * h;
                ((field.eval_real(x + h) - field.eval_real(x - h)) / (2.0 * h)).abs()
            })
            .fold(0.0, f64::max);
        assert!(fd_max <= bound + 1e-6, "{fd_max} > {bound}");
    }

    #[test]
    fn energy_examples() {
        assert_eq!(BandlimitedField::zero(4).energy(), 0.0);
        assert_abs_diff_eq!(
            BandlimitedField::benchmark_sparse().energy(),
            0.05,
            epsilon = 1e-15
        );
    }

    #[test]
    fn distortion_examples() {
        let truth = BandlimitedField::benchmark_b3();
        assert_eq!(truth.distortion(&truth), 0.0);
        let est = BandlimitedField::constant(0.3);
        assert_abs_diff_eq!(
            BandlimitedField::zero(0).distortion(&est),
            0.09,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            BandlimitedField::zero(5).distortion(&est),
            0.09,
            epsilon = 1e-15
        );

        let mut coeffs = truth.coeffs().to_vec();
        coeffs[2] = Complex64::new(0.0, 0.0);
        coeffs[4] = Complex64::new(0.0, 0.0);
        let est = BandlimitedField::new(coeffs).unwrap();
        assert_abs_diff_eq!(truth.distortion(&est), 0.007_118_66, epsilon = 1e-15);
    }

    #[test]
    fn random_field_examples() {
        let f = BandlimitedField::random(0, 3);
        assert_eq!(f.b(), 0);
        assert!(f.coeff(0).re.abs() <= 1.0 && f.coeff(0).im == 0.0);
        assert_eq!(
            BandlimitedField::random(9, 11),
            BandlimitedField::random(9, 11)
        );
        assert_ne!(
            BandlimitedField::random(9, 11),
            BandlimitedField::random(9, 12)
        );
    }

    #[test]
    fn random_fields_respect_unit_sup_on_a_finer_grid() {
        for (b, seed) in [(1, 1), (3, 2), (8, 3), (16, 4), (32, 5), (64, 6)] {
            let f = BandlimitedField::random(b, seed);
            assert!(f.is_real());
            let points = 1 << 16;
            let grid_max = (0..points)
                .map(|i| f.eval_real(i as f64 / points as f64).abs())
                .fold(0.0, f64::max);
            assert!(grid_max <= 1.0 + 1e-12, "b = {b}: {grid_max}");
        }
    }

    #[test]
    fn modulated_derivative_sup_of_pure_tone() {
        // d/dx[cos(2πx) e^{-j2πx}] = d/dx[(1 + e^{-j4πx}) / 2], magnitude 2π.
        assert_abs_diff_eq!(
            cosine().modulated_derivative_sup(1),
            2.0 * PI,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            cosine().modulated_derivative_sup(0),
            2.0 * PI,
            epsilon = 1e-9
        );
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(BandlimitedField::new(vec![Complex64::new(0.0, 0.0); 2]).is_err());
        assert!(BandlimitedField::new(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(BandlimitedField::from_half_spectrum(&[Complex64::new(0.0, 1.0)]).is_err());
        assert!(BandlimitedField::from_json(r#"{"b": 1, "coeffs": [[0, 0]]}"#).is_err());
        let complex = BandlimitedField::new(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
        ])
        .unwrap();
        assert!(!complex.is_real());
        assert_abs_diff_eq!(complex.eval(0.25).im, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn json_layout() {
        let f = BandlimitedField::benchmark_sparse();
        let v: serde_json::Value = serde_json::from_str(&f.to_json().unwrap()).unwrap();
        assert_eq!(v["b"], 12);
        assert_eq!(v["coeffs"].as_array().unwrap().len(), 25);
        assert_eq!(v["coeffs"][0], serde_json::json!([0.1, 0.0]));
        assert_eq!(v["coeffs"][12], serde_json::json!([0.1, 0.0]));
        assert_eq!(
            BandlimitedField::from_json(&f.to_json().unwrap()).unwrap(),
            f
        );
    }

    fn trapezoid_energy(field: &BandlimitedField) -> f64 {
        let points = 1 << 16;
        (0..points)
            .map(|i| field.eval_real(i as f64 / points as f64).powi(2))
            .sum::<f64>()
            / points as f64
    }

    #[test]
    fn parseval_over_many_random_fields() {
        for seed in 0..1000u64 {
            let f = BandlimitedField::random((seed % 13) as usize, seed);
            let diff = (f.energy() - trapezoid_energy(&f)).abs();
            assert!(diff < 1e-8, "seed {seed}: {diff}");
        }
    }

    proptest! {
        #[test]
        fn real_fields_have_negligible_imaginary_part(b in 0usize..20, seed in any::<u64>(), x in 0.0f64..1.0) {
            let f = BandlimitedField::random(b, seed);
            prop_assert!(f.eval(x).im.abs() < 1e-9);
            prop_assert!((f.eval(x).re - f.eval_real(x)).abs() < 1e-12);
        }

        #[test]
        fn eval_is_one_periodic(b in 0usize..20, seed in any::<u64>(), x in 1.0f64..2.0) {
            let f = BandlimitedField::random(b, seed);
            prop_assert!((f.eval_real(x) - f.eval_real(x - 1.0)).abs() < 1e-12);
        }

        #[test]
        fn self_distortion_is_zero(b in 0usize..20, seed in any::<u64>()) {
            let f = BandlimitedField::random(b, seed);
            prop_assert_eq!(f.distortion(&f.clone()), 0.0);
        }

        #[test]
        fn bernstein_bound_holds(b in 0usize..12, seed in any::<u64>()) {
            let f = BandlimitedField::random(b, seed);
            let h = 1.0 / 8192.0;
            let bound = f.derivative_bound();
            for i in 0..8192 {
                let x = i as f64 * h;
                let fd = ((f.eval_real(x + h) - f.eval_real(x - h)) / (2.0 * h)).abs();
                prop_assert!(fd <= bound + 1e-6);
            }
        }
    }
}
