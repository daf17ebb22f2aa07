//! Boundary integral operators: the Helmholtz single layer `S`, the double
//! layer formulation `½I + D`, and the pseudo-differential model operator
//! `Vg = ĝ_0 + Σ_{m≠0} |m|^{2α} ĝ_m e_m`.
//!
//! Matrix rows `(Vφ_n)(z(s))` are integrated cell by cell. Cells near the
//! target are split at the target and at corners and graded towards the
//! target; the innermost panels use a product rule for the logarithmic part
//! of the kernel.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::{CellValues, SplineSpace};
use crate::geometry::{BoundaryCurve, GeometryError, Point};
use crate::quadrature::{graded_panels, periodic_interval_distance, GaussLegendre};
use crate::special::{bessel_products, hankel1_0, hankel1_1};
use crate::spectral::{sobolev_weight, FourierVector};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Grading floor for kernels without a logarithmic part.
const SMOOTH_MIN_PANEL: f64 = 1e-6;

/// Below this distance the double-layer kernel uses the cancellation-free chord.
const NEAR_CHORD: f64 = 1e-2;
/// Targets closer than this to a piece end do not split the piece.
const SPLIT_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,
    #[error("quadrature did not reach tolerance {tol:e} (last change {change:e})")]
    QuadratureNotConverged { tol: f64, change: f64 },
    #[error("point is {distance} from the boundary, below the standoff {standoff}")]
    PointTooCloseToBoundary { distance: f64, standoff: f64 },
    #[error("invalid operator: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    HelmholtzSingleLayer,
    HelmholtzDoubleLayerPlusHalfIdentity,
    PseudoDifferential,
}

/// Which side of the curve the field lives on. For the double layer this
/// fixes the normal: outward for exterior problems, inward for interior
/// ones, so that `½I + D` is the boundary trace in both cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    #[default]
    Exterior,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    #[serde(default)]
    pub wavenumber: f64,
    pub two_alpha: f64,
    #[serde(default)]
    pub side: Side,
}

impl OperatorSpec {
    pub fn single_layer(k: f64) -> Self {
        Self { kind: OperatorKind::HelmholtzSingleLayer, wavenumber: k, two_alpha: -1.0, side: Side::Exterior }
    }

    pub fn double_layer(k: f64, side: Side) -> Self {
        Self { kind: OperatorKind::HelmholtzDoubleLayerPlusHalfIdentity, wavenumber: k, two_alpha: 0.0, side }
    }

    pub fn pseudo_differential(two_alpha: f64) -> Self {
        Self { kind: OperatorKind::PseudoDifferential, wavenumber: 0.0, two_alpha, side: Side::Exterior }
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        match self.kind {
            OperatorKind::HelmholtzSingleLayer | OperatorKind::HelmholtzDoubleLayerPlusHalfIdentity => {
                let expected = if self.kind == OperatorKind::HelmholtzSingleLayer { -1.0 } else { 0.0 };
                if self.two_alpha != expected {
                    return Err(OperatorError::InvalidSpec(format!(
                        "order {} does not match {:?} (expected {expected})",
                        self.two_alpha, self.kind
                    )));
                }
                if !(self.wavenumber > 0.0 && self.wavenumber.is_finite()) {
                    return Err(OperatorError::InvalidSpec(format!("wavenumber {} must be positive", self.wavenumber)));
                }
            }
            OperatorKind::PseudoDifferential => {
                if !self.two_alpha.is_finite() {
                    return Err(OperatorError::InvalidSpec("order must be finite".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_helmholtz(&self) -> bool {
        self.kind != OperatorKind::PseudoDifferential
    }

    /// Normal used by the double-layer kernel at parameter `t`.
    pub fn kernel_normal(&self, curve: &BoundaryCurve, t: f64) -> Result<Point, GeometryError> {
        let n = curve.normal(t)?;
        Ok(if self.side == Side::Interior { -n } else { n })
    }
}

/// Symbol `[m]^{2α}` of the model operator.
#[inline]
pub fn model_symbol(m: i64, two_alpha: f64) -> f64 {
    sobolev_weight(m, 0.5 * two_alpha)
}

/// Applies the model operator in Fourier space.
pub fn apply_pseudodiff(f: &FourierVector, two_alpha: f64) -> FourierVector {
    f.map_modes(|m| Complex64::new(model_symbol(m, two_alpha), 0.0))
}

/// `G(x, y) = (i/4) H_0(k|x - y|)` for the single layer and
/// `∂G/∂n_y = (ik/4) H_1(k|x - y|) (x - y)·n_y / |x - y|` for the double layer.
pub fn greens_kernel(spec: &OperatorSpec, x: &Point, y: &Point, n_y: &Point) -> Result<Complex64, OperatorError> {
    let diff = x - y;
    let r = diff.norm();
    if r == 0.0 {
        return Err(OperatorError::CoincidentPoints);
    }
    let k = spec.wavenumber;
    match spec.kind {
        OperatorKind::HelmholtzSingleLayer => Ok(0.25 * I * hankel1_0(k * r)),
        OperatorKind::HelmholtzDoubleLayerPlusHalfIdentity => {
            Ok(0.25 * I * k * hankel1_1(k * r) * diff.dot(n_y) / r)
        }
        OperatorKind::PseudoDifferential => {
            Err(OperatorError::InvalidSpec("the model operator has no Green's function".into()))
        }
    }
}

/// Eigenvalue of the operator on the mode `e^{2πimt}` of a circle of radius
/// `radius` parametrized by `t`.
///
/// Single layer `(iπR/2) J_m(kR) H_m(kR)`; double layer plus half identity
/// `(iπkR/2) J_m'(kR) H_m(kR)` (outward normal) or
/// `-(iπkR/2) J_m(kR) H_m'(kR)` (inward normal).
pub fn circle_symbol(spec: &OperatorSpec, m: i64, radius: f64) -> Complex64 {
    let kr = spec.wavenumber * radius;
    if spec.kind == OperatorKind::PseudoDifferential {
        return Complex64::new(model_symbol(m, spec.two_alpha), 0.0);
    }
    let p = bessel_products(m, kr);
    match (spec.kind, spec.side) {
        (OperatorKind::HelmholtzSingleLayer, _) => 0.5 * I * PI * radius * p.jh(),
        (_, Side::Exterior) => 0.5 * I * PI * kr * p.jph(),
        (_, Side::Interior) => -0.5 * I * PI * kr * p.jhp(),
    }
}

/// Gauss order and grading depth for matrix rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub gauss_order: usize,
    /// Panels adjacent to the target stop splitting at this parameter length.
    pub min_panel: f64,
    /// Fourier band, as a multiple of `N`, for model operators without a
    /// kernel representation.
    pub band_factor: usize,
    /// Longest parameter interval integrated by a single Gauss rule.
    pub max_panel: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { gauss_order: 12, min_panel: 1e-9, band_factor: 8, max_panel: 1.0 / 48.0 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    t: f64,
    w: f64,
    z: Point,
    normal: Point,
    speed: f64,
    basis: CellValues,
}

/// How a row is computed for a given operator.
#[derive(Debug, Clone)]
enum RowMethod {
    /// Kernel integration, plus a multiple of the identity and, for the
    /// model operator of order -1, the mean `∫φ_n`.
    Kernel { half_identity: bool, add_mean: bool },
    Identity,
    /// `Σ_{|k| ≤ K} [k]^{2α} φ̂_{n,k} e^{2πiks}`.
    Fourier(Vec<FourierVector>),
}

/// Computes rows `(Vφ_n(z(s)))_n` for one operator, curve and space.
#[derive(Debug, Clone)]
pub struct RowAssembler<'a> {
    spec: OperatorSpec,
    curve: &'a BoundaryCurve,
    space: &'a SplineSpace,
    cfg: QuadratureConfig,
    rule: GaussLegendre,
    method: RowMethod,
    /// Per cell: sub-intervals split at corners.
    cells: Vec<Vec<(f64, f64)>>,
    /// Precomputed nodes per cell for targets far from it.
    far: Vec<Vec<Node>>,
}

impl<'a> RowAssembler<'a> {
    pub fn new(
        spec: OperatorSpec,
        curve: &'a BoundaryCurve,
        space: &'a SplineSpace,
        cfg: QuadratureConfig,
    ) -> Result<Self, OperatorError> {
        spec.validate()?;
        let method = match spec.kind {
            OperatorKind::HelmholtzSingleLayer => RowMethod::Kernel { half_identity: false, add_mean: false },
            OperatorKind::HelmholtzDoubleLayerPlusHalfIdentity => {
                RowMethod::Kernel { half_identity: true, add_mean: false }
            }
            OperatorKind::PseudoDifferential if spec.two_alpha == 0.0 => RowMethod::Identity,
            OperatorKind::PseudoDifferential if spec.two_alpha == -1.0 => {
                RowMethod::Kernel { half_identity: false, add_mean: true }
            }
            OperatorKind::PseudoDifferential => {
                let band = cfg.band_factor * space.dim();
                RowMethod::Fourier((0..space.dim()).map(|n| space.basis_fourier(n, band)).collect())
            }
        };
        let corners = if spec.is_helmholtz() { curve.corners() } else { Vec::new() };
        let n = space.dim();
        let mut cells = Vec::with_capacity(n);
        for i in 0..n as i64 {
            let (a, b) = (space.knot(i), space.knot(i + 1));
            let mut breaks = vec![a];
            for &c in &corners {
                for shift in [-1.0, 0.0, 1.0] {
                    let cc = c + shift;
                    if cc > a + 1e-14 && cc < b - 1e-14 {
                        breaks.push(cc);
                    }
                }
            }
            breaks.push(b);
            breaks.sort_by(f64::total_cmp);
            let mut pieces = Vec::new();
            for w in breaks.windows(2) {
                let parts = ((w[1] - w[0]) / cfg.max_panel).ceil().max(1.0) as usize;
                let h = (w[1] - w[0]) / parts as f64;
                for p in 0..parts {
                    let end = if p + 1 == parts { w[1] } else { w[0] + (p + 1) as f64 * h };
                    pieces.push((w[0] + p as f64 * h, end));
                }
            }
            cells.push(pieces);
        }
        let rule = GaussLegendre::new(cfg.gauss_order);
        let mut this = Self { spec, curve, space, cfg, rule, method, cells, far: Vec::new() };
        if matches!(this.method, RowMethod::Kernel { .. }) {
            let mut far = Vec::with_capacity(n);
            for i in 0..n {
                let mut nodes = Vec::new();
                for &(a, b) in &this.cells[i] {
                    for (t, w) in this.rule.mapped(a, b) {
                        nodes.push(this.node(i, t, w)?);
                    }
                }
                far.push(nodes);
            }
            this.far = far;
        }
        Ok(this)
    }

    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    pub fn space(&self) -> &SplineSpace {
        self.space
    }

    fn node(&self, cell: usize, t: f64, w: f64) -> Result<Node, OperatorError> {
        let basis = self.space.cell_values(cell, t);
        if !self.spec.is_helmholtz() {
            return Ok(Node { t, w, z: Point::zeros(), normal: Point::zeros(), speed: 1.0, basis });
        }
        Ok(Node {
            t,
            w,
            z: self.curve.parametrize(t),
            normal: self.spec.kernel_normal(self.curve, t)?,
            speed: self.curve.speed(t)?,
            basis,
        })
    }

    /// Kernel in the parameter variable, including the speed factor.
    #[inline]
    fn kernel(&self, s: f64, x: &Point, node: &Node) -> Complex64 {
        let k = self.spec.wavenumber;
        match self.spec.kind {
            OperatorKind::HelmholtzSingleLayer => {
                let r = (x - node.z).norm();
                0.25 * I * hankel1_0(k * r) * node.speed
            }
            OperatorKind::HelmholtzDoubleLayerPlusHalfIdentity => {
                let mut diff = x - node.z;
                if diff.norm() < NEAR_CHORD {
                    diff = self.curve.chord(s, node.t);
                }
                let r = diff.norm();
                0.25 * I * k * hankel1_1(k * r) * (diff.dot(&node.normal) / r) * node.speed
            }
            OperatorKind::PseudoDifferential => {
                // Σ_{m≠0} |m|^{-1} e^{2πim(s-t)} = -2 log|2 sin π(s - t)|
                Complex64::new(-2.0 * (2.0 * (PI * (s - node.t)).sin()).abs().ln(), 0.0)
            }
        }
    }

    /// Coefficient `A` of `log|t - s|` in the kernel near the diagonal.
    #[inline]
    fn log_strength(&self, node: &Node) -> f64 {
        match self.spec.kind {
            OperatorKind::HelmholtzSingleLayer => -node.speed / TAU,
            OperatorKind::HelmholtzDoubleLayerPlusHalfIdentity => 0.0,
            OperatorKind::PseudoDifferential => -2.0,
        }
    }

    #[inline]
    fn scatter(row: &mut [Complex64], basis: &CellValues, degree: usize, value: Complex64) {
        let n = row.len();
        for r in 0..=degree {
            row[(basis.first + r) % n] += value * basis.values[r];
        }
    }

    /// Row `(Vφ_n)(z(s))` for all `n`.
    pub fn row(&self, s: f64) -> Result<Vec<Complex64>, OperatorError> {
        let n = self.space.dim();
        let d = self.space.degree();
        let s = s.rem_euclid(1.0);
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        let (half_identity, add_mean) = match &self.method {
            RowMethod::Identity => {
                let (i, t) = self.space.locate(s);
                Self::scatter(&mut row, &self.space.cell_values(i, t), d, Complex64::new(1.0, 0.0));
                return Ok(row);
            }
            RowMethod::Fourier(hats) => {
                for (j, hat) in hats.iter().enumerate() {
                    row[j] = hat
                        .iter()
                        .map(|(k, c)| c * model_symbol(k, self.spec.two_alpha) * Complex64::from_polar(1.0, TAU * k as f64 * s))
                        .sum();
                }
                return Ok(row);
            }
            RowMethod::Kernel { half_identity, add_mean } => (*half_identity, *add_mean),
        };
        let x = if self.spec.is_helmholtz() { self.curve.parametrize(s) } else { Point::zeros() };
        for i in 0..n {
            let (a, b) = (self.space.knot(i as i64), self.space.knot(i as i64 + 1));
            if periodic_interval_distance(s, a, b) >= b - a {
                for node in &self.far[i] {
                    Self::scatter(&mut row, &node.basis, d, self.kernel(s, &x, node) * node.w);
                }
                continue;
            }
            for &(a, b) in &self.cells[i] {
                self.near_interval(&mut row, i, a, b, s, &x)?;
            }
        }
        if half_identity {
            let (i, t) = self.space.locate(s);
            Self::scatter(&mut row, &self.space.cell_values(i, t), d, Complex64::new(0.5, 0.0));
        }
        if add_mean {
            for (j, v) in row.iter_mut().enumerate() {
                *v += self.space.integral(j);
            }
        }
        Ok(row)
    }

    fn near_interval(
        &self,
        row: &mut [Complex64],
        cell: usize,
        a: f64,
        b: f64,
        s: f64,
        x: &Point,
    ) -> Result<(), OperatorError> {
        let d = self.space.degree();
        // representative of s in [a, a + 1)
        let s_rep = s - (s - a).div_euclid(1.0);
        let mut pieces = vec![(a, b)];
        // a target within rounding of an end is treated as that end
        if s_rep > a + SPLIT_TOL && s_rep < b - SPLIT_TOL {
            pieces = vec![(a, s_rep), (s_rep, b)];
        }
        // Without a log term the kernel is bounded; stopping the grading early
        // avoids the cancellation in (x - y)·n at tiny |x - y|.
        let log_free = self.spec.kind == OperatorKind::HelmholtzDoubleLayerPlusHalfIdentity;
        let min_panel = if log_free { self.cfg.min_panel.max(SMOOTH_MIN_PANEL) } else { self.cfg.min_panel };
        for (pa, pb) in pieces {
            let (mut regular, mut inner) = graded_panels(pa, pb, Some(s), min_panel);
            if log_free {
                regular.append(&mut inner);
            }
            for p in regular {
                for (t, w) in self.rule.mapped(p.a, p.b) {
                    let node = self.node(cell, t, w)?;
                    Self::scatter(row, &node.basis, d, self.kernel(s, x, &node) * w);
                }
            }
            for p in inner {
                let mid = 0.5 * (p.a + p.b);
                // nearest representative of the target
                let target = s + (mid - s).round();
                let node = self.node(cell, mid, p.len())?;
                let strength = self.log_strength(&node);
                let value = if strength == 0.0 {
                    self.kernel(s, x, &node) * p.len()
                } else {
                    let f = |u: f64| if u == 0.0 { 0.0 } else { u * (u.abs().ln() - 1.0) };
                    let log_part = strength * (f(p.b - target) - f(p.a - target));
                    let dist = (mid - target).abs();
                    let smooth = if dist > 0.0 {
                        self.kernel(s, x, &node) - strength * dist.ln()
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    log_part + smooth * p.len()
                };
                Self::scatter(row, &node.basis, d, value);
            }
        }
        Ok(())
    }
}

/// `(V Σ a_n φ_n)(z(s))`, verified by comparing against a rule of higher
/// order with finer grading. Fails when the two disagree by more than `tol`
/// relative to `Σ |row_n a_n|` after three refinements.
pub fn boundary_apply(
    spec: &OperatorSpec,
    curve: &BoundaryCurve,
    space: &SplineSpace,
    coeffs: &[Complex64],
    s: f64,
    tol: f64,
) -> Result<Complex64, OperatorError> {
    let apply = |cfg: QuadratureConfig| -> Result<(Complex64, f64), OperatorError> {
        let row = RowAssembler::new(*spec, curve, space, cfg)?.row(s)?;
        let scale = row.iter().zip(coeffs).map(|(r, c)| (r * c).norm()).sum::<f64>();
        Ok((row.iter().zip(coeffs).map(|(r, c)| r * c).sum(), scale))
    };
    let mut cfg = QuadratureConfig::default();
    let (mut value, _) = apply(cfg)?;
    let mut change = f64::INFINITY;
    for _ in 0..3 {
        cfg.gauss_order += 8;
        cfg.min_panel *= 1e-2;
        let (refined, scale) = apply(cfg)?;
        change = (refined - value).norm();
        value = refined;
        if change <= tol * scale.max(f64::MIN_POSITIVE) {
            return Ok(value);
        }
    }
    Err(OperatorError::QuadratureNotConverged { tol, change })
}

/// Evaluates layer potentials `∫ K(x, z(t)) u(t) |z'(t)| dt` off the curve.
#[derive(Debug, Clone)]
pub struct FieldEvaluator<'a> {
    spec: OperatorSpec,
    curve: &'a BoundaryCurve,
    space: &'a SplineSpace,
    rule: GaussLegendre,
    /// Minimum distance from the curve.
    pub standoff: f64,
}

impl<'a> FieldEvaluator<'a> {
    pub fn new(spec: OperatorSpec, curve: &'a BoundaryCurve, space: &'a SplineSpace) -> Result<Self, OperatorError> {
        spec.validate()?;
        if !spec.is_helmholtz() {
            return Err(OperatorError::InvalidSpec("field evaluation needs a Helmholtz operator".into()));
        }
        Ok(Self { spec, curve, space, rule: GaussLegendre::new(16), standoff: 0.1 })
    }

    pub fn with_standoff(mut self, standoff: f64) -> Self {
        self.standoff = standoff;
        self
    }

    /// Linear functional `a ↦ field(x)` as a row over the basis.
    pub fn row(&self, x: &Point) -> Result<Vec<Complex64>, OperatorError> {
        let distance = self.curve.distance_to(x);
        if distance < self.standoff {
            return Err(OperatorError::PointTooCloseToBoundary { distance, standoff: self.standoff });
        }
        let n = self.space.dim();
        let d = self.space.degree();
        let corners = self.curve.corners();
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let (a, b) = (self.space.knot(i as i64), self.space.knot(i as i64 + 1));
            let mut breaks = vec![a, b];
            for &c in &corners {
                for shift in [-1.0, 0.0, 1.0] {
                    if c + shift > a + 1e-14 && c + shift < b - 1e-14 {
                        breaks.push(c + shift);
                    }
                }
            }
            breaks.sort_by(f64::total_cmp);
            let mut stack: Vec<(f64, f64, u32)> = breaks.windows(2).map(|w| (w[0], w[1], 0)).collect();
            while let Some((pa, pb, depth)) = stack.pop() {
                let mid = 0.5 * (pa + pb);
                let arc = self.curve.speed(mid)? * (pb - pa);
                if arc > (x - self.curve.parametrize(mid)).norm() && depth < 40 {
                    stack.push((pa, mid, depth + 1));
                    stack.push((mid, pb, depth + 1));
                    continue;
                }
                for (t, w) in self.rule.mapped(pa, pb) {
                    let y = self.curve.parametrize(t);
                    let normal = self.spec.kernel_normal(self.curve, t)?;
                    let kv = greens_kernel(&self.spec, x, &y, &normal)? * self.curve.speed(t)? * w;
                    RowAssembler::scatter(&mut row, &self.space.cell_values(i, t), d, kv);
                }
            }
        }
        Ok(row)
    }

    pub fn eval(&self, coeffs: &[Complex64], x: &Point) -> Result<Complex64, OperatorError> {
        Ok(self.row(x)?.iter().zip(coeffs).map(|(r, c)| r * c).sum())
    }
}

/// Field of a density given by spline coefficients.
pub fn field_eval(
    spec: &OperatorSpec,
    curve: &BoundaryCurve,
    space: &SplineSpace,
    coeffs: &[Complex64],
    x: &Point,
) -> Result<Complex64, OperatorError> {
    FieldEvaluator::new(*spec, curve, space)?.eval(coeffs, x)
}
