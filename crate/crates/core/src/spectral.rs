//! Truncated Fourier series on `[0, 1)` and the Sobolev norms built from them.
//!
//! `‖f‖_s² = |f̂_0|² + Σ_{m≠0} |m|^{2s} |f̂_m|²` and
//! `⟨f, g⟩ = Σ_m conj(f̂_m) ĝ_m`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("oversample factor {0} is below 2; the reported band would alias")]
    InsufficientResolution(usize),
    #[error("coefficients of a real function must satisfy f̂_-m = conj(f̂_m); mode {0} violates it")]
    NotRealValued(i64),
}

/// Coefficients `f̂_m` for `-K ≤ m ≤ K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierVector {
    band: usize,
    coeffs: Vec<Complex64>,
}

impl FourierVector {
    pub fn zeros(band: usize) -> Self {
        Self { band, coeffs: vec![Complex64::new(0.0, 0.0); 2 * band + 1] }
    }

    /// Builds the vector from a coefficient map `m -> f̂_m`.
    pub fn from_fn(band: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let b = band as i64;
        Self { band, coeffs: (-b..=b).map(f).collect() }
    }

    /// A single Fourier mode `value · e^{2πi m x}`.
    pub fn mode(band: usize, m: i64, value: Complex64) -> Self {
        let mut v = Self::zeros(band);
        v.set(m, value);
        v
    }

    /// Coefficients ordered from `m = -K` to `m = K`.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "coefficient array must have odd length 2K+1");
        Self { band: coeffs.len() / 2, coeffs }
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Mode indices paired with their coefficients.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let b = self.band as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - b, *c))
    }

    /// `f̂_m`; zero outside the stored band.
    pub fn get(&self, m: i64) -> Complex64 {
        if m.unsigned_abs() as usize > self.band {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(m + self.band as i64) as usize]
        }
    }

    pub fn set(&mut self, m: i64, value: Complex64) {
        assert!(m.unsigned_abs() as usize <= self.band, "mode {m} outside band {}", self.band);
        self.coeffs[(m + self.band as i64) as usize] = value;
    }

    /// Same coefficients on a different band (zero padded or truncated).
    pub fn with_band(&self, band: usize) -> Self {
        Self::from_fn(band, |m| self.get(m))
    }

    /// Checks `f̂_{-m} = conj(f̂_m)` to the given relative tolerance.
    pub fn check_real_valued(&self, tol: f64) -> Result<(), SpectralError> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for m in 0..=self.band as i64 {
            if (self.get(-m) - self.get(m).conj()).norm() > tol * scale {
                return Err(SpectralError::NotRealValued(m));
            }
        }
        Ok(())
    }

    /// `Σ f̂_m e^{2πi m x}`.
    pub fn synthesize(&self, x: f64) -> Complex64 {
        let b = self.band as i64;
        let step = Complex64::from_polar(1.0, TAU * x);
        let mut phase = Complex64::from_polar(1.0, -TAU * x * b as f64);
        let mut sum = Complex64::new(0.0, 0.0);
        for c in &self.coeffs {
            sum += c * phase;
            phase *= step;
        }
        sum
    }

    pub fn sub(&self, other: &Self) -> Self {
        let band = self.band.max(other.band);
        Self::from_fn(band, |m| self.get(m) - other.get(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let band = self.band.max(other.band);
        Self::from_fn(band, |m| self.get(m) + other.get(m))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { band: self.band, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// Multiplies each mode by `symbol(m)`.
    pub fn map_modes(&self, symbol: impl Fn(i64) -> Complex64) -> Self {
        Self::from_fn(self.band, |m| symbol(m) * self.get(m))
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        sobolev_norm(self, s)
    }
}

/// Sobolev weight `[m]^{2s}` with `[0] = 1`.
#[inline]
pub fn sobolev_weight(m: i64, s: f64) -> f64 {
    if m == 0 {
        1.0
    } else {
        (m.unsigned_abs() as f64).powf(2.0 * s)
    }
}

/// Trapezoidal-rule Fourier coefficients from `Q ≥ oversample·(2K+1)`
/// equispaced samples.
pub fn fourier_coefficients(
    f: impl Fn(f64) -> Complex64,
    band: usize,
    oversample: usize,
) -> Result<FourierVector, SpectralError> {
    if oversample < 2 {
        return Err(SpectralError::InsufficientResolution(oversample));
    }
    let q = oversample * (2 * band + 1);
    let mut samples: Vec<Complex64> = (0..q).map(|j| f(j as f64 / q as f64)).collect();
    let fft = FftPlanner::new().plan_fft_forward(q);
    fft.process(&mut samples);
    let inv = 1.0 / q as f64;
    Ok(FourierVector::from_fn(band, |m| samples[m.rem_euclid(q as i64) as usize] * inv))
}

/// `(|f̂_0|² + Σ_{m≠0} |m|^{2s} |f̂_m|²)^{1/2}` over the stored band.
pub fn sobolev_norm(f: &FourierVector, s: f64) -> f64 {
    f.iter().map(|(m, c)| sobolev_weight(m, s) * c.norm_sqr()).sum::<f64>().sqrt()
}

/// Share of the squared norm carried by the outer tenth of the band; a
/// cheap indicator of whether the band resolves the norm.
pub fn sobolev_tail_fraction(f: &FourierVector, s: f64) -> f64 {
    let cut = (f.band() as f64 * 0.9).floor() as u64;
    let (mut tail, mut total) = (0.0, 0.0);
    for (m, c) in f.iter() {
        let w = sobolev_weight(m, s) * c.norm_sqr();
        total += w;
        if m.unsigned_abs() > cut {
            tail += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

/// `conj(f̂_0) ĝ_0 + Σ_{m≠0} conj(f̂_m) ĝ_m` over the common band.
pub fn duality_pairing(f: &FourierVector, g: &FourierVector) -> Complex64 {
    let b = f.band().min(g.band()) as i64;
    (-b..=b).map(|m| f.get(m).conj() * g.get(m)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coefficients_of_simple_functions() {
        let f = fourier_coefficients(|x| Complex64::from_polar(1.0, TAU * x), 4, 2).unwrap();
        for (m, v) in f.iter() {
            let expected = if m == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) };
            assert!((v - expected).norm() < 1e-14, "mode {m}: {v}");
        }
        let one = fourier_coefficients(|_| c(1.0, 0.0), 2, 2).unwrap();
        assert!((one.get(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(one.iter().filter(|(m, _)| *m != 0).all(|(_, v)| v.norm() < 1e-15));
        assert_eq!(
            fourier_coefficients(|_| c(1.0, 0.0), 2, 1),
            Err(SpectralError::InsufficientResolution(1))
        );
    }

    #[test]
    fn hat_function_against_sinc_squared() {
        // hat of half-width h = 1/4 centred at 0 (periodized)
        let h = 0.25;
        let hat = |x: f64| {
            let d = x.min(1.0 - x);
            c((1.0 - d / h).max(0.0), 0.0)
        };
        let f = fourier_coefficients(hat, 8, 64).unwrap();
        let m = 4.0;
        let arg = std::f64::consts::PI * m * h;
        let closed = h * (arg.sin() / arg).powi(2);
        assert!((f.get(4).re - closed).abs() < 1e-10);
        // m = 4 falls on a zero of sinc² for h = 1/4
        assert!(closed.abs() < 1e-16);
        // off the zeros the kinks limit the trapezoid rule to second order
        let m = 3.0;
        let arg = std::f64::consts::PI * m * h;
        assert!((f.get(3).re - h * (arg.sin() / arg).powi(2)).abs() < 1e-5);
    }

    #[test]
    fn norm_examples() {
        assert_relative_eq!(sobolev_norm(&FourierVector::mode(3, 0, c(3.0, 0.0)), -2.5), 3.0);
        assert_relative_eq!(sobolev_norm(&FourierVector::mode(3, 2, c(1.0, 0.0)), -1.0), 0.5);
        assert_relative_eq!(sobolev_norm(&FourierVector::mode(3, 1, c(1.0, 0.0)), 2.0), 1.0);
    }

    #[test]
    fn pairing_examples() {
        let e1 = FourierVector::mode(2, 1, c(1.0, 0.0));
        let e2 = FourierVector::mode(2, 2, c(1.0, 0.0));
        assert_eq!(duality_pairing(&e1, &e1), c(1.0, 0.0));
        assert_eq!(duality_pairing(&e1, &e2), c(0.0, 0.0));
        let fi = FourierVector::mode(2, 1, c(0.0, 1.0));
        assert_eq!(duality_pairing(&fi, &e1), c(0.0, -1.0));
    }

    #[test]
    fn real_valued_flag() {
        let ok = FourierVector::from_fn(3, |m| c(1.0 / (1.0 + m.abs() as f64), m as f64 * 0.1));
        assert!(ok.check_real_valued(1e-14).is_ok());
        let bad = FourierVector::mode(3, 2, c(1.0, 0.0));
        assert_eq!(bad.check_real_valued(1e-14), Err(SpectralError::NotRealValued(2)));
    }

    fn arb_vector() -> impl Strategy<Value = FourierVector> {
        (1usize..12).prop_flat_map(|band| {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * band + 1)
                .prop_map(|v| FourierVector::from_coeffs(v.into_iter().map(|(a, b)| c(a, b)).collect()))
        })
    }

    proptest! {
        #[test]
        fn parseval(f in arb_vector()) {
            let lhs = sobolev_norm(&f, 0.0).powi(2);
            let rhs = duality_pairing(&f, &f);
            prop_assert!((lhs - rhs.re).abs() <= 1e-13 * lhs.max(1.0));
            prop_assert!(rhs.im.abs() <= 1e-14);
        }

        #[test]
        fn analysis_inverts_synthesis(f in arb_vector()) {
            let g = fourier_coefficients(|x| f.synthesize(x), f.band(), 2).unwrap();
            for (m, v) in g.iter() {
                prop_assert!((v - f.get(m)).norm() < 1e-12);
            }
        }

        #[test]
        fn norm_nondecreasing_in_order(f in arb_vector(), s in -4.0f64..3.0, ds in 0.0f64..2.0) {
            prop_assert!(sobolev_norm(&f, s) <= sobolev_norm(&f, s + ds) * (1.0 + 1e-14));
        }
    }
}
