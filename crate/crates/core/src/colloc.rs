//! Collocation grids on `[0, 1)` with their periodic trapezoid weights
//! `w_m = (x_{m+1} - x_{m-1}) / 2`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{duality_pairing, sobolev_norm, FourierVector};

/// Random points closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollocError {
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("sample arrays of length {f} and {g} do not match a grid of {m} points")]
    LengthMismatch { f: usize, g: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridKind {
    /// `x_m = shift + m / M`.
    Equispaced { m: usize, shift: f64 },
    /// `x = (l + j / J) / N`, `l < N`, `1 ≤ j ≤ J`.
    Refined { n: usize, j: usize },
    /// `x_m = δ / N + m / M`.
    Offset { n: usize, m: usize, delta: f64 },
    /// `M` uniform draws from a ChaCha8 stream seeded with `seed`.
    Random { m: usize, seed: u64 },
    /// Caller supplied points.
    Custom { points: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollocationGrid {
    kind: GridKind,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl CollocationGrid {
    pub fn kind(&self) -> &GridKind {
        &self.kind
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest periodic gap `d(Δ_M)`.
    pub fn max_spacing(&self) -> f64 {
        max_spacing(&self.points)
    }

    /// `Σ_m w_m conj(f_m) g_m`.
    pub fn inner_product(&self, f: &[Complex64], g: &[Complex64]) -> Result<Complex64, CollocError> {
        discrete_inner_product(f, g, self)
    }
}

/// Builds a grid; at least `min_points` must survive deduplication.
pub fn make_grid(kind: GridKind, min_points: usize) -> Result<CollocationGrid, CollocError> {
    let raw: Vec<f64> = match &kind {
        GridKind::Equispaced { m, shift } => (0..*m).map(|i| shift + i as f64 / *m as f64).collect(),
        GridKind::Refined { n, j } => (0..*n)
            .flat_map(|l| (1..=*j).map(move |jj| (l as f64 + jj as f64 / *j as f64) / *n as f64))
            .collect(),
        GridKind::Offset { n, m, delta } => {
            (1..=*m).map(|i| delta / *n as f64 + i as f64 / *m as f64).collect()
        }
        GridKind::Random { m, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..*m).map(|_| rng.gen::<f64>()).collect()
        }
        GridKind::Custom { points } => points.clone(),
    };
    if raw.iter().any(|x| !x.is_finite()) {
        return Err(CollocError::DegenerateGrid("non-finite point".into()));
    }
    let mut points: Vec<f64> = raw.into_iter().map(|x| x.rem_euclid(1.0)).map(|x| if x >= 1.0 { 0.0 } else { x }).collect();
    points.sort_by(f64::total_cmp);
    let mut dedup: Vec<f64> = Vec::with_capacity(points.len());
    for x in points {
        if dedup.last().map_or(true, |&l| x - l > DEDUP_TOL) {
            dedup.push(x);
        }
    }
    // periodic wrap
    while dedup.len() > 1 && dedup[0] + 1.0 - dedup[dedup.len() - 1] <= DEDUP_TOL {
        dedup.pop();
    }
    if dedup.len() < min_points.max(1) {
        return Err(CollocError::DegenerateGrid(format!(
            "{} distinct points, at least {} required",
            dedup.len(),
            min_points.max(1)
        )));
    }
    let weights = trapezoid_weights(&dedup);
    Ok(CollocationGrid { kind, points: dedup, weights })
}

/// `w_m = (x_{m+1} - x_{m-1}) / 2` with periodic wraparound.
pub fn trapezoid_weights(points: &[f64]) -> Vec<f64> {
    let m = points.len();
    if m == 1 {
        return vec![1.0];
    }
    (0..m)
        .map(|i| {
            let next = if i + 1 == m { points[0] + 1.0 } else { points[i + 1] };
            let prev = if i == 0 { points[m - 1] - 1.0 } else { points[i - 1] };
            0.5 * (next - prev)
        })
        .collect()
}

/// Largest periodic gap of a sorted point set.
pub fn max_spacing(points: &[f64]) -> f64 {
    let m = points.len();
    if m == 0 {
        return 1.0;
    }
    let wrap = points[0] + 1.0 - points[m - 1];
    points.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max)
}

/// `⟨f, g⟩_M = Σ_m w_m conj(f(x_m)) g(x_m)`.
pub fn discrete_inner_product(
    f: &[Complex64],
    g: &[Complex64],
    grid: &CollocationGrid,
) -> Result<Complex64, CollocError> {
    if f.len() != grid.len() || g.len() != grid.len() {
        return Err(CollocError::LengthMismatch { f: f.len(), g: g.len(), m: grid.len() });
    }
    Ok(f.iter().zip(g).zip(&grid.weights).map(|((a, b), w)| a.conj() * b * *w).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureReport {
    /// Empirical lower bound on `E_{r,s}(Δ_M)`.
    pub e_rs: f64,
    /// Probe indices `(f, g)` attaining it.
    pub worst_pair: (usize, usize),
}

/// Largest ratio `|⟨g,f⟩ - ⟨g,f⟩_M| / (‖f‖_r ‖g‖_s + ‖f‖_s ‖g‖_r)` over all
/// ordered probe pairs.
pub fn quadrature_error_report(grid: &CollocationGrid, probes: &[FourierVector], r: f64, s: f64) -> QuadratureReport {
    let samples: Vec<Vec<Complex64>> =
        probes.iter().map(|p| grid.points.iter().map(|&x| p.synthesize(x)).collect()).collect();
    let norms: Vec<(f64, f64)> = probes.iter().map(|p| (sobolev_norm(p, r), sobolev_norm(p, s))).collect();
    let mut best = QuadratureReport { e_rs: 0.0, worst_pair: (0, 0) };
    for (i, f) in probes.iter().enumerate() {
        for (j, g) in probes.iter().enumerate() {
            let exact = duality_pairing(g, f);
            let discrete = discrete_inner_product(&samples[j], &samples[i], grid).expect("aligned samples");
            let denom = norms[i].0 * norms[j].1 + norms[i].1 * norms[j].0;
            if denom > 0.0 {
                let ratio = (exact - discrete).norm() / denom;
                if ratio > best.e_rs {
                    best = QuadratureReport { e_rs: ratio, worst_pair: (i, j) };
                }
            }
        }
    }
    best
}
