//! Closed-form references.
//!
//! For the model operator `Vg = ĝ_0 + Σ_{m≠0} |m|^{2α} ĝ_m e_m`, splines of
//! degree `d` on the uniform mesh and the refined grid `(l + j/J)/N`, the
//! least-squares system decouples over the classes `μ ∈ Λ_N`. With
//! `y = μ/N`, `p = d + 1 − 2α` and
//!
//! `Ω(ξ, y) = |y|^p Σ_{l≠0} |l + y|^{-p} e^{2πilξ}`,
//!
//! the solution in the ψ basis is `a_μ = û_μ − (E/D) û_μ + R_N(μ)` and
//! `a_0 = û_0 + Z_N`. Lattice sums over residue classes are evaluated with the
//! Hurwitz zeta function, so no truncation is involved.
//!
//! Also here: the low-frequency projection, the aliasing error of the
//! equispaced rule, eigen-expansions on the circle and a manufactured exterior
//! solution.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::lambda;
use crate::geometry::{BoundaryCurve, Point};
use crate::operators::{circle_symbol, model_symbol, OperatorKind, OperatorSpec, Side};
use crate::special::{bessel_j, bessel_j_prime, hankel1, hankel1_0, hankel1_prime, hurwitz_zeta};
use crate::spectral::{sobolev_weight, FourierVector};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("consistency requires d > 2α (d = {degree}, 2α = {two_alpha})")]
    Inconsistent { degree: usize, two_alpha: f64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("eigenvalue of mode {m} is {magnitude:e}, below the floor {floor:e}")]
    NearResonantMode { m: i64, magnitude: f64, floor: f64 },
    #[error("source point ({x}, {y}) is not inside the curve")]
    SourceOutside { x: f64, y: f64 },
}

/// Model problem on the refined grid with `J` points per mesh cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelProblem {
    pub degree: usize,
    pub two_alpha: f64,
    pub n: usize,
    pub j: usize,
    /// Fourier coefficients of the exact density.
    pub u_true: FourierVector,
}

impl ModelProblem {
    pub fn new(degree: usize, two_alpha: f64, n: usize, j: usize, u_true: FourierVector) -> Result<Self, OracleError> {
        if !(degree as f64 > two_alpha) {
            return Err(OracleError::Inconsistent { degree, two_alpha });
        }
        if n < 2 || j < 1 {
            return Err(OracleError::InvalidProblem(format!("need N ≥ 2 and J ≥ 1, got N = {n}, J = {j}")));
        }
        Ok(Self { degree, two_alpha, n, j, u_true })
    }

    pub fn m(&self) -> usize {
        self.n * self.j
    }
}

fn exponent(d: usize, two_alpha: f64) -> f64 {
    d as f64 + 1.0 - two_alpha
}

/// Truncated lattice sum with a bound on the dropped terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSum {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// `Ω(ξ, y)` summed over `0 < |l| ≤ L`, with `Σ_{|l|>L} |y|^p |l+y|^{-p}`
/// bounded by `2|y|^p (L − 1/2)^{1−p} / (p − 1)`.
pub fn omega(xi: f64, y: f64, degree: usize, two_alpha: f64, l_max: usize) -> OmegaSum {
    let p = exponent(degree, two_alpha);
    if y == 0.0 {
        return OmegaSum { value: Complex64::new(0.0, 0.0), tail_bound: 0.0 };
    }
    let scale = y.abs().powf(p);
    let mut value = Complex64::new(0.0, 0.0);
    for l in (1..=l_max as i64).rev() {
        for q in [l, -l] {
            let w = (q as f64 + y).abs().powf(-p);
            value += Complex64::from_polar(w, TAU * q as f64 * xi);
        }
    }
    let tail_bound = 2.0 * scale * (l_max as f64 - 0.5).powf(1.0 - p) / (p - 1.0);
    OmegaSum { value: value * scale, tail_bound }
}

/// Sums `P_r = Σ_{q ≥ 1, q ≡ r (J)} (q + y)^{-p}` and
/// `N_r = Σ_{q ≤ -1, q ≡ r (J)} |q + y|^{-p}` for each residue `r`.
fn residue_sums(y: f64, p: f64, jj: usize) -> (Vec<f64>, Vec<f64>) {
    let jf = jj as f64;
    let scale = jf.powf(-p);
    let mut pos = Vec::with_capacity(jj);
    let mut neg = Vec::with_capacity(jj);
    for r in 0..jj {
        let shift = if r == 0 { 1.0 } else { 0.0 };
        pos.push(scale * hurwitz_zeta(p, (r as f64 + y) / jf + shift));
        let rn = (jj - r) % jj;
        let shift = if rn == 0 { 1.0 } else { 0.0 };
        neg.push(scale * hurwitz_zeta(p, (rn as f64 - y) / jf + shift));
    }
    (pos, neg)
}

/// `Ω(j/J, y)` for `j = 0..J`, exact. With `signed`, the terms carry
/// `sign(y) sign(l + y)`, which is what the ψ-basis coefficients
/// `(y/(l + y))^{d+1}` produce for even `d`.
pub fn omega_on_grid(y: f64, jj: usize, degree: usize, two_alpha: f64, signed: bool) -> Vec<Complex64> {
    if y == 0.0 {
        return vec![Complex64::new(0.0, 0.0); jj];
    }
    let p = exponent(degree, two_alpha);
    let (pos, neg) = residue_sums(y, p, jj);
    let scale = y.abs().powf(p);
    let comb: Vec<f64> = pos
        .iter()
        .zip(&neg)
        .map(|(a, b)| if signed { y.signum() * (a - b) } else { a + b })
        .collect();
    (0..jj)
        .map(|j| {
            let mut s = Complex64::new(0.0, 0.0);
            for (r, c) in comb.iter().enumerate() {
                s += Complex64::from_polar(*c, TAU * ((r * j) % jj) as f64 / jj as f64);
            }
            s * scale
        })
        .collect()
}

/// `S_0(y) = |y|^p Σ_{l≠0} |lJ + y|^{-p}`.
pub fn aligned_sum(y: f64, jj: usize, degree: usize, two_alpha: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let p = exponent(degree, two_alpha);
    let jf = jj as f64;
    y.abs().powf(p) * jf.powf(-p) * (hurwitz_zeta(p, 1.0 + y / jf) + hurwitz_zeta(p, 1.0 - y / jf))
}

fn mean_sq(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>() / values.len() as f64
}

/// `D(y) = 1 + (1/J) Σ_j |Ω(ξ_j, y)|² + 2 S_0(y)`.
pub fn stability_d(y: f64, jj: usize, degree: usize, two_alpha: f64) -> f64 {
    let om = omega_on_grid(y, jj, degree, two_alpha, false);
    1.0 + mean_sq(&om) + 2.0 * aligned_sum(y, jj, degree, two_alpha)
}

/// `E(y) = S_0(y) + (1/J) Σ_j |Ω(ξ_j, y)|²`.
pub fn error_e(y: f64, jj: usize, degree: usize, two_alpha: f64) -> f64 {
    let om = omega_on_grid(y, jj, degree, two_alpha, false);
    aligned_sum(y, jj, degree, two_alpha) + mean_sq(&om)
}

/// Error of one ψ-coefficient, split into its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorCoefficient {
    pub mu: i64,
    /// `a_μ − û_μ`, from the per-class normal equation.
    pub error: Complex64,
    /// `−(E/D) û_μ`; zero for `μ = 0`.
    pub leading: Complex64,
    /// `R_N(μ)`, or `Z_N` for `μ = 0`.
    pub remainder: Complex64,
    pub d: f64,
    pub e: f64,
}

/// Exact error in the ψ basis for every `μ ∈ Λ_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactError {
    pub n: usize,
    pub degree: usize,
    pub two_alpha: f64,
    pub coeffs: Vec<ErrorCoefficient>,
}

impl ExactError {
    pub fn get(&self, mu: i64) -> Option<&ErrorCoefficient> {
        self.coeffs.iter().find(|c| c.mu == mu)
    }

    /// `‖Σ_μ (a_μ − û_μ) ψ_μ‖_{H^s}`, assembled mode by mode:
    /// `Σ_μ [μ]^{2s} |a_μ − û_μ|² (1 + Σ_{l≠0} [μ/(μ+lN)]^{2(d+1)−2s})`.
    pub fn psi_norm(&self, s: f64) -> f64 {
        let n = self.n as f64;
        let e = 2.0 * (self.degree as f64 + 1.0) - 2.0 * s;
        self.coeffs
            .iter()
            .map(|c| {
                let factor = if c.mu == 0 {
                    1.0
                } else {
                    let y = (c.mu as f64 / n).abs();
                    1.0 + y.powf(e) * (hurwitz_zeta(e, 1.0 + y) + hurwitz_zeta(e, 1.0 - y))
                };
                sobolev_weight(c.mu, s) * c.error.norm_sqr() * factor
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `‖u_N − ũ‖_{H^s}` with `u_N = Σ_μ (û_μ + error_μ) ψ_μ`; modes beyond
    /// the band of `ũ` are summed in closed form.
    pub fn full_norm(&self, u_true: &FourierVector, s: f64) -> f64 {
        let n = self.n as i64;
        let d1 = self.degree as i32 + 1;
        let band = u_true.band() as i64;
        let mut total = 0.0;
        for c in &self.coeffs {
            let a = u_true.get(c.mu) + c.error;
            let mu = c.mu;
            // q with |μ + qN| ≤ band
            let q_lo = (-band - mu).div_euclid(n) + 1;
            let q_hi = (band - mu).div_euclid(n);
            for q in q_lo - 1..=q_hi {
                let k = mu + q * n;
                if k.abs() > band {
                    continue;
                }
                let psi = if mu == 0 {
                    if k == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (mu as f64 / k as f64).powi(d1)
                };
                total += sobolev_weight(k, s) * (a * psi - u_true.get(k)).norm_sqr();
            }
            if mu != 0 {
                // Σ_{|μ+qN| > band} |k|^{2s} (μ/k)^{2(d+1)} |a|²
                let e = 2.0 * d1 as f64 - 2.0 * s;
                let nf = n as f64;
                let mut q_pos = q_hi + 1;
                while mu + q_pos * n <= band {
                    q_pos += 1;
                }
                // smallest m ≥ 1 with |μ - mN| > band
                let mut q_neg = (1 - q_lo).max(1);
                while (mu - q_neg * n).abs() <= band {
                    q_neg += 1;
                }
                let y = mu as f64 / nf;
                let tail = nf.powf(-e) * (hurwitz_zeta(e, y + q_pos as f64) + hurwitz_zeta(e, q_neg as f64 - y));
                total += (mu as f64).abs().powf(2.0 * d1 as f64) * tail * a.norm_sqr();
            }
        }
        total.sqrt()
    }
}

/// Per-class solution on the grid `ξ_j = j/J`, by two routes: the class
/// normal equation and the `D`, `E`, `R_N` decomposition.
pub fn exact_error_coeffs(problem: &ModelProblem) -> ExactError {
    let n = problem.n as i64;
    let jj = problem.j;
    let d = problem.degree;
    let ta = problem.two_alpha;
    let signed = d % 2 == 0;
    let u = &problem.u_true;
    let band = u.band() as i64;
    let m = (problem.n * jj) as i64;
    let mut coeffs = Vec::new();
    for mu in lambda(problem.n) {
        if mu == 0 {
            // a_0 = Σ_{J | q} σ(qN) û_{qN}
            let mut z = Complex64::new(0.0, 0.0);
            let mut k = m;
            while k <= band {
                z += model_symbol(k, ta) * (u.get(k) + u.get(-k));
                k += m;
            }
            coeffs.push(ErrorCoefficient {
                mu,
                error: z,
                leading: Complex64::new(0.0, 0.0),
                remainder: z,
                d: 1.0,
                e: 0.0,
            });
            continue;
        }
        let y = mu as f64 / n as f64;
        let sigma_mu = model_symbol(mu, ta);
        let om = omega_on_grid(y, jj, d, ta, signed);
        // aliased data: H(ξ) = Σ_{q≠0} ρ_q û_{μ+qN} e^{2πiqξ}, ρ_q = σ(μ+qN)/σ(μ)
        let mut aliased = Vec::new();
        let q_max = (band + mu.abs()) / n + 1;
        for q in -q_max..=q_max {
            let k = mu + q * n;
            if q == 0 || k.abs() > band {
                continue;
            }
            let v = u.get(k);
            if v != Complex64::new(0.0, 0.0) {
                aliased.push((q, model_symbol(k, ta) / sigma_mu * v));
            }
        }
        let uh = u.get(mu);
        // route 1: class normal equation
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for (j, w) in om.iter().enumerate() {
            let g = Complex64::new(1.0, 0.0) + w;
            let xi = j as f64 / jj as f64;
            let mut h = uh;
            for (q, v) in &aliased {
                h += v * Complex64::from_polar(1.0, TAU * *q as f64 * xi);
            }
            num += g.conj() * h;
            den += g.norm_sqr();
        }
        let error = num / den - uh;
        // route 2: decomposition
        let s0: f64 = if signed {
            // signed aligned sum: Σ_{l≠0} c_{lJ}
            om.iter().map(|w| w.re).sum::<f64>() / jj as f64
        } else {
            aligned_sum(y, jj, d, ta)
        };
        let msq = mean_sq(&om);
        let dd = 1.0 + 2.0 * s0 + msq;
        let ee = s0 + msq;
        let mut rem = Complex64::new(0.0, 0.0);
        let jl = jj as i64;
        for (q, v) in &aliased {
            // δ_{J|q} + Σ_{l ≡ q (J), l ≠ 0} c_l
            let mut w = if q % jl == 0 { 1.0 } else { 0.0 };
            w += residue_weight(*q, y, jj, d, ta, signed);
            rem += v * w;
        }
        rem /= dd;
        coeffs.push(ErrorCoefficient { mu, error, leading: -(ee / dd) * uh, remainder: rem, d: dd, e: ee });
    }
    ExactError { n: problem.n, degree: d, two_alpha: ta, coeffs }
}

/// `Σ_{l ≡ q (J), l ≠ 0} c_l` with `c_l = |y|^p |l + y|^{-p}` (signed for
/// even `d`).
fn residue_weight(q: i64, y: f64, jj: usize, degree: usize, two_alpha: f64, signed: bool) -> f64 {
    let p = exponent(degree, two_alpha);
    let jf = jj as f64;
    let r = q.rem_euclid(jj as i64) as usize;
    let scale = y.abs().powf(p) * jf.powf(-p);
    let shift = if r == 0 { 1.0 } else { 0.0 };
    let pos = hurwitz_zeta(p, (r as f64 + y) / jf + shift);
    let rn = (jj - r) % jj;
    let shift = if rn == 0 { 1.0 } else { 0.0 };
    let neg = hurwitz_zeta(p, (rn as f64 - y) / jf + shift);
    scale * if signed { y.signum() * (pos - neg) } else { pos + neg }
}

/// Limit `J → ∞`: the continuous Bubnov–Galerkin solution. Here
/// `D = 1 + Σ_{q≠0} c_q²`, `E = Σ_{q≠0} c_q²` and
/// `R_N = D^{-1} Σ_{q≠0} c_q ρ_q û_{μ+qN}`; `a_0 = û_0`.
pub fn exact_error_coeffs_continuous(degree: usize, two_alpha: f64, n: usize, u_true: &FourierVector) -> ExactError {
    let p = exponent(degree, two_alpha);
    let nn = n as i64;
    let band = u_true.band() as i64;
    let mut coeffs = Vec::new();
    for mu in lambda(n) {
        if mu == 0 {
            let zero = Complex64::new(0.0, 0.0);
            coeffs.push(ErrorCoefficient { mu, error: zero, leading: zero, remainder: zero, d: 1.0, e: 0.0 });
            continue;
        }
        let y = mu as f64 / n as f64;
        let e2 = 2.0 * p;
        let ee = y.abs().powf(e2) * (hurwitz_zeta(e2, 1.0 + y) + hurwitz_zeta(e2, 1.0 - y));
        let dd = 1.0 + ee;
        let sigma_mu = model_symbol(mu, two_alpha);
        let mut rem = Complex64::new(0.0, 0.0);
        let q_max = (band + mu.abs()) / nn + 1;
        for q in -q_max..=q_max {
            let k = mu + q * nn;
            if q == 0 || k.abs() > band {
                continue;
            }
            let r = y / (q as f64 + y);
            let c = r.powi(degree as i32 + 1) * r.abs().powf(-two_alpha);
            rem += c * model_symbol(k, two_alpha) / sigma_mu * u_true.get(k);
        }
        rem /= dd;
        let uh = u_true.get(mu);
        let leading = -(ee / dd) * uh;
        coeffs.push(ErrorCoefficient { mu, error: leading + rem, leading, remainder: rem, d: dd, e: ee });
    }
    ExactError { n, degree, two_alpha, coeffs }
}

/// `P_N f = Σ_{μ ∈ Λ_N} f̂_μ ψ_μ`, returned as `(μ, f̂_μ)`.
pub fn low_freq_projection(f: &FourierVector, n: usize) -> Vec<(i64, Complex64)> {
    lambda(n).into_iter().map(|mu| (mu, f.get(mu))).collect()
}

/// Fourier coefficients of `P_N f` up to `band`.
pub fn low_freq_projection_fourier(f: &FourierVector, n: usize, degree: usize, band: usize) -> FourierVector {
    let nn = n as i64;
    FourierVector::from_fn(band, |k| {
        let mu = {
            let r = k.rem_euclid(nn);
            if 2 * r > nn {
                r - nn
            } else {
                r
            }
        };
        if mu == 0 {
            return if k == 0 { f.get(0) } else { Complex64::new(0.0, 0.0) };
        }
        f.get(mu) * (mu as f64 / k as f64).powi(degree as i32 + 1)
    })
}

/// `∫f − (1/M) Σ_i f(i/M) = −Σ_{j≠0} f̂_{jM}`.
pub fn aliasing_error(f: &FourierVector, m: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let band = f.band() as i64;
    let mut k = m as i64;
    while k <= band {
        sum += f.get(k) + f.get(-k);
        k += m as i64;
    }
    -sum
}

/// Density `û_m = f̂_m / λ_m` on a circle of the given radius.
pub fn circle_reference(
    spec: &OperatorSpec,
    radius: f64,
    data: &FourierVector,
    floor: f64,
) -> Result<FourierVector, OracleError> {
    let mut out = FourierVector::zeros(data.band());
    for (m, f) in data.iter() {
        if f == Complex64::new(0.0, 0.0) {
            continue;
        }
        let lam = circle_symbol(spec, m, radius);
        if lam.norm() < floor {
            return Err(OracleError::NearResonantMode { m, magnitude: lam.norm(), floor });
        }
        out.set(m, f / lam);
    }
    Ok(out)
}

/// Coefficients of `e^{ik(x cos θ + y sin θ)}` on the circle
/// `R(cos 2πt, sin 2πt)`: `i^m J_m(kR) e^{-imθ}`.
pub fn plane_wave_coefficients(k: f64, radius: f64, theta: f64, band: usize) -> FourierVector {
    FourierVector::from_fn(band, |m| {
        let im = I.powi(m.rem_euclid(4) as i32);
        im * bessel_j(m, k * radius) * Complex64::from_polar(1.0, -(m as f64) * theta)
    })
}

/// Field of a layer potential with density `Σ û_m e^{2πimt}` on a circle
/// centred at the origin, via the addition theorem. Exterior points for the
/// single layer and exterior double layer; interior points for the single
/// layer and interior double layer.
pub fn circle_field(spec: &OperatorSpec, radius: f64, density: &FourierVector, x: &Point) -> Complex64 {
    let k = spec.wavenumber;
    let r = x.norm();
    let phi = x.y.atan2(x.x);
    let (rin, rout) = if r < radius { (r, radius) } else { (radius, r) };
    let mut sum = Complex64::new(0.0, 0.0);
    for (m, u) in density.iter() {
        if u == Complex64::new(0.0, 0.0) {
            continue;
        }
        let term = match (spec.kind, spec.side) {
            (OperatorKind::HelmholtzDoubleLayerPlusHalfIdentity, Side::Exterior) => {
                hankel1(m, k * r).map(|h| k * bessel_j_prime(m, k * radius) * h)
            }
            (OperatorKind::HelmholtzDoubleLayerPlusHalfIdentity, Side::Interior) => {
                hankel1_prime(m, k * radius).map(|h| -k * h * bessel_j(m, k * r))
            }
            _ => hankel1(m, k * rout).map(|h| bessel_j(m, k * rin) * h),
        };
        // overflow only where the product underflows anyway
        if let Some(t) = term {
            if t.is_finite() {
                sum += u * t * Complex64::from_polar(1.0, m as f64 * phi);
            }
        }
    }
    0.5 * I * PI * radius * sum
}

/// Exterior field radiated by a point source inside the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution {
    pub wavenumber: f64,
    pub source: Point,
}

impl ManufacturedSolution {
    /// `G(z(t), source)`.
    pub fn data(&self, curve: &BoundaryCurve, t: f64) -> Complex64 {
        self.field(&curve.parametrize(t))
    }

    /// `G(x, source) = (i/4) H_0(k|x − source|)`.
    pub fn field(&self, x: &Point) -> Complex64 {
        0.25 * I * hankel1_0(self.wavenumber * (x - self.source).norm())
    }
}

pub fn manufactured_exterior_solution(
    curve: &BoundaryCurve,
    wavenumber: f64,
    source: Point,
) -> Result<ManufacturedSolution, OracleError> {
    if !curve.contains(&source) || curve.distance_to(&source) < 1e-8 {
        return Err(OracleError::SourceOutside { x: source.x, y: source.y });
    }
    Ok(ManufacturedSolution { wavenumber, source })
}
