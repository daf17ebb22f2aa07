//! Periodic spline trial spaces, the ψ_μ basis and H^s projections.
//!
//! Basis function `n` (0-based) is the B-spline of degree `d` on the knots
//! `τ_n, …, τ_{n+d+1}`, where `τ_j = x_{j mod N} + ⌊j / N⌋` extends the mesh
//! periodically. The B-splines form a partition of unity.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::GaussLegendre;
use crate::special::hurwitz_zeta;
use crate::spectral::{sobolev_weight, FourierVector};

/// Largest supported spline degree.
pub const MAX_DEGREE: usize = 7;

const UNIFORM_TOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mode {mu} is outside Λ_N = (-{half}, {half}]", half = *.n as f64 / 2.0)]
    IndexOutOfLambda { mu: i64, n: usize },
    #[error("coefficient vector has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

/// Nonzero B-spline values on one mesh cell.
#[derive(Debug, Clone, Copy)]
pub struct CellValues {
    /// Index of the first nonzero basis function (mod N).
    pub first: usize,
    pub values: [f64; MAX_DEGREE + 1],
}

/// Periodic splines of degree `d` on `N` knots in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineSpace {
    degree: usize,
    knots: Vec<f64>,
    uniform: bool,
}

impl SplineSpace {
    /// Uniform mesh `x_n = n / N`.
    pub fn uniform(degree: usize, n: usize) -> Result<Self, BasisError> {
        Self::new(degree, (0..n).map(|i| i as f64 / n as f64).collect())
    }

    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self, BasisError> {
        let n = knots.len();
        if degree > MAX_DEGREE {
            return Err(BasisError::InvalidMesh(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        if n < degree + 1 || n < 2 {
            return Err(BasisError::InvalidMesh(format!(
                "{n} knots cannot carry periodic splines of degree {degree}"
            )));
        }
        if knots.iter().any(|x| !(0.0..1.0).contains(x)) {
            return Err(BasisError::InvalidMesh("knots must lie in [0, 1)".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(BasisError::InvalidMesh("knots must be strictly increasing".into()));
        }
        let h = 1.0 / n as f64;
        let uniform = (0..n).all(|i| (knots[i] - knots[0] - i as f64 * h).abs() < UNIFORM_TOL);
        Ok(Self { degree, knots, uniform })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.knots.len()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Extended knot `τ_j`.
    #[inline]
    pub fn knot(&self, j: i64) -> f64 {
        let n = self.dim() as i64;
        self.knots[j.rem_euclid(n) as usize] + j.div_euclid(n) as f64
    }

    /// Periodic gaps `x_{i+1} - x_i`.
    pub fn gaps(&self) -> Vec<f64> {
        (0..self.dim() as i64).map(|i| self.knot(i + 1) - self.knot(i)).collect()
    }

    /// Largest knot gap `h`.
    pub fn max_spacing(&self) -> f64 {
        self.gaps().into_iter().fold(0.0, f64::max)
    }

    /// Quasiuniformity ratio `max gap / min gap`.
    pub fn rho(&self) -> f64 {
        let g = self.gaps();
        g.iter().cloned().fold(0.0, f64::max) / g.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Cell `i` and the representative of `t` in `[τ_i, τ_{i+1})`.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.dim();
        let mut t = t.rem_euclid(1.0);
        if t < self.knots[0] {
            t += 1.0;
            return (n - 1, t);
        }
        let i = if self.uniform {
            (((t - self.knots[0]) * n as f64).floor() as usize).min(n - 1)
        } else {
            self.knots.partition_point(|&x| x <= t) - 1
        };
        (i, t)
    }

    /// Values of the `d + 1` B-splines that are nonzero on cell `i` at `t`,
    /// where `t` lies in `[τ_i, τ_{i+1}]` (Cox–de Boor).
    pub fn cell_values(&self, i: usize, t: f64) -> CellValues {
        let d = self.degree;
        let i = i as i64;
        let mut vals = [0.0; MAX_DEGREE + 1];
        let mut left = [0.0; MAX_DEGREE + 1];
        let mut right = [0.0; MAX_DEGREE + 1];
        vals[0] = 1.0;
        for j in 1..=d {
            left[j] = t - self.knot(i + 1 - j as i64);
            right[j] = self.knot(i + j as i64) - t;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = vals[r] / (right[r + 1] + left[j - r]);
                vals[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            vals[j] = saved;
        }
        let n = self.dim() as i64;
        CellValues { first: (i - d as i64).rem_euclid(n) as usize, values: vals }
    }

    /// Value of basis function `n` at `t`.
    pub fn eval_bspline(&self, n: usize, t: f64) -> f64 {
        let (i, tr) = self.locate(t);
        let cv = self.cell_values(i, tr);
        let dim = self.dim();
        (0..=self.degree)
            .find(|&r| (cv.first + r) % dim == n)
            .map(|r| cv.values[r])
            .unwrap_or(0.0)
    }

    /// `Σ a_n φ_n(t)`.
    pub fn synthesize(&self, coeffs: &[Complex64], t: f64) -> Complex64 {
        let (i, tr) = self.locate(t);
        let cv = self.cell_values(i, tr);
        let dim = self.dim();
        (0..=self.degree).map(|r| coeffs[(cv.first + r) % dim] * cv.values[r]).sum()
    }

    /// `∫ φ_n = (τ_{n+d+1} - τ_n) / (d + 1)`.
    pub fn integral(&self, n: usize) -> f64 {
        let n = n as i64;
        (self.knot(n + self.degree as i64 + 1) - self.knot(n)) / (self.degree as f64 + 1.0)
    }

    /// Gauss nodes on every cell with the nonzero basis values there:
    /// `(t, weight, values)`. Exact for polynomials of degree `2q - 1 - d`
    /// times a spline.
    pub fn cell_quadrature(&self, q: usize) -> Vec<(f64, f64, CellValues)> {
        let rule = GaussLegendre::new(q);
        let mut out = Vec::with_capacity(self.dim() * q);
        for i in 0..self.dim() {
            let (a, b) = (self.knot(i as i64), self.knot(i as i64 + 1));
            for (t, w) in rule.mapped(a, b) {
                out.push((t, w, self.cell_values(i, t)));
            }
        }
        out
    }

    /// Fourier transform of the uniform cardinal B-spline starting at 0,
    /// `B̂(k) = (1/N) ((1 - e^{-2πik/N}) / (2πik/N))^{d+1}`.
    fn cardinal_hat(&self, k: i64) -> Complex64 {
        let n = self.dim() as f64;
        if k == 0 {
            return Complex64::new(1.0 / n, 0.0);
        }
        let theta = TAU * k as f64 / n;
        // (1 - e^{-iθ}) / (iθ) = e^{-iθ/2} sinc(θ/2)
        let half = 0.5 * theta;
        let factor = Complex64::from_polar(half.sin() / half, -half);
        factor.powu(self.degree as u32 + 1) / n
    }

    /// Fourier coefficients of `Σ a_n φ_n` for `|k| ≤ band`.
    pub fn spline_fourier(&self, coeffs: &[Complex64], band: usize) -> Result<FourierVector, BasisError> {
        let n = self.dim();
        if coeffs.len() != n {
            return Err(BasisError::LengthMismatch { got: coeffs.len(), expected: n });
        }
        if self.uniform {
            // f̂_k = B̂(k) e^{-2πik x_0} Σ_n a_n e^{-2πikn/N}
            let mut dft = coeffs.to_vec();
            FftPlanner::new().plan_fft_forward(n).process(&mut dft);
            let x0 = self.knots[0];
            return Ok(FourierVector::from_fn(band, |k| {
                self.cardinal_hat(k) * Complex64::from_polar(1.0, -TAU * k as f64 * x0) * dft[k.rem_euclid(n as i64) as usize]
            }));
        }
        let q = self.degree + 8 + (2.0 * band as f64 * self.max_spacing()).ceil() as usize;
        let mut out = FourierVector::zeros(band);
        let mut acc = vec![Complex64::new(0.0, 0.0); 2 * band + 1];
        for (t, w, cv) in self.cell_quadrature(q) {
            let val: Complex64 =
                (0..=self.degree).map(|r| coeffs[(cv.first + r) % n] * cv.values[r]).sum::<Complex64>() * w;
            let step = Complex64::from_polar(1.0, -TAU * t);
            let mut phase = Complex64::from_polar(1.0, TAU * t * band as f64);
            for a in acc.iter_mut() {
                *a += val * phase;
                phase *= step;
            }
        }
        for (i, a) in acc.into_iter().enumerate() {
            out.set(i as i64 - band as i64, a);
        }
        Ok(out)
    }

    /// Fourier coefficients of a single basis function.
    pub fn basis_fourier(&self, n: usize, band: usize) -> FourierVector {
        let mut e = vec![Complex64::new(0.0, 0.0); self.dim()];
        e[n] = Complex64::new(1.0, 0.0);
        self.spline_fourier(&e, band).expect("length matches")
    }

    /// Spline coefficients of ψ_μ on a uniform mesh:
    /// `ψ_μ = c Σ_n e^{2πiμn/N} φ_n` with `c = 1 / (N B̂(μ) e^{-2πiμx_0})`.
    pub fn psi_coefficients(&self, mu: i64) -> Result<Vec<Complex64>, BasisError> {
        let n = self.dim();
        check_lambda(mu, n)?;
        if !self.uniform {
            return Err(BasisError::InvalidMesh("ψ_μ is defined on uniform meshes".into()));
        }
        let c = 1.0
            / (self.cardinal_hat(mu) * Complex64::from_polar(1.0, -TAU * mu as f64 * self.knots[0]) * n as f64);
        Ok((0..n).map(|j| c * Complex64::from_polar(1.0, TAU * (mu * j as i64) as f64 / n as f64)).collect())
    }
}

fn check_lambda(mu: i64, n: usize) -> Result<(), BasisError> {
    let two_mu = 2 * mu;
    if two_mu > -(n as i64) && two_mu <= n as i64 {
        Ok(())
    } else {
        Err(BasisError::IndexOutOfLambda { mu, n })
    }
}

/// The index set `Λ_N = {μ : -N/2 < μ ≤ N/2}` in increasing order.
pub fn lambda(n: usize) -> Vec<i64> {
    let n = n as i64;
    ((-(n - 1) / 2)..=(n / 2)).collect()
}

/// Truncated series representation of the ψ_μ basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiBasisSpec {
    pub n: usize,
    pub degree: usize,
    /// Aliasing blocks kept on each side of μ.
    pub blocks: usize,
}

impl PsiBasisSpec {
    pub fn new(n: usize, degree: usize) -> Self {
        Self { n, degree, blocks: 64 }
    }

    pub fn lambda(&self) -> Vec<i64> {
        lambda(self.n)
    }

    /// Bound on the dropped terms `Σ_{|q| > L} |μ / (μ + qN)|^{d+1}`.
    pub fn tail_bound(&self, mu: i64) -> f64 {
        if mu == 0 {
            return 0.0;
        }
        let y = (mu as f64 / self.n as f64).abs();
        let p = self.degree as f64 + 1.0;
        // |q + y| ≥ |q| - 1/2 on both sides
        2.0 * y.powf(p) * hurwitz_zeta(p, self.blocks as f64 + 0.5)
    }

    /// `ψ_μ(x) ≈ Σ_{|q| ≤ L} (μ / (μ + qN))^{d+1} e^{2πi(μ + qN)x}` and its
    /// tail bound.
    pub fn eval_psi(&self, mu: i64, x: f64) -> Result<(Complex64, f64), BasisError> {
        check_lambda(mu, self.n)?;
        if mu == 0 {
            return Ok((Complex64::new(1.0, 0.0), 0.0));
        }
        let l = self.blocks as i64;
        let n = self.n as i64;
        let mut sum = Complex64::new(0.0, 0.0);
        // smallest terms first
        for q in (0..=l).rev() {
            for k in if q == 0 { vec![mu] } else { vec![mu + q * n, mu - q * n] } {
                let c = (mu as f64 / k as f64).powi(self.degree as i32 + 1);
                sum += Complex64::from_polar(c, TAU * (k as f64) * x);
            }
        }
        Ok((sum, self.tail_bound(mu)))
    }
}

/// Result of an H^s projection.
#[derive(Debug, Clone)]
pub struct Projection {
    pub coefficients: Vec<Complex64>,
    pub condition: f64,
    /// Set when the condition estimate exceeds the configured bound.
    pub ill_conditioned: bool,
}

/// Minimizer of `‖target - v‖_{H^s}` over the spline space, measured on the
/// band of `target`, computed by a weighted least-squares solve in Fourier
/// space.
pub fn hs_projection(target: &FourierVector, space: &SplineSpace, s: f64, cond_bound: f64) -> Projection {
    let band = target.band();
    let n = space.dim();
    let rows = 2 * band + 1;
    let mut a = DMatrix::<Complex64>::zeros(rows, n);
    for j in 0..n {
        let phi = space.basis_fourier(j, band);
        for (r, (m, c)) in phi.iter().enumerate() {
            a[(r, j)] = c * sobolev_weight(m, s).sqrt();
        }
    }
    let rhs = DVector::from_iterator(rows, target.iter().map(|(m, c)| c * sobolev_weight(m, s).sqrt()));
    let ls = crate::solver::weighted_qr_solve(a, rhs);
    Projection {
        condition: ls.condition,
        ill_conditioned: ls.condition > cond_bound,
        coefficients: ls.x,
    }
}
