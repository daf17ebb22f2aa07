//! Parametrized closed boundary curves on the periodic parameter domain `[0, 1)`.
//!
//! Every curve is traversed counterclockwise, so the outward normal is the
//! tangent rotated clockwise.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point (or vector) in the plane.
pub type Point = Vector2<f64>;

/// Parameters closer than this to a polygon corner count as hitting it.
const CORNER_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("parameter {0} coincides with a corner; the derivative is undefined there")]
    CornerParameter(f64),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Smooth,
    PiecewiseLinear,
}

/// Samples of a user supplied curve at the equispaced parameters `q / len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedCurve {
    pub points: Vec<[f64; 2]>,
    pub derivatives: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    Circle { radius: f64 },
    /// `z(t) = (-sin 2πt - cos 4πt, cos 2πt)`.
    Kite,
    RegularPolygon { sides: usize, circumradius: f64 },
    /// Interpolated by cubic Hermite segments between the samples.
    Custom(TabulatedCurve),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    kind: CurveKind,
    smoothness: Smoothness,
}

impl BoundaryCurve {
    pub fn circle(radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidCurve(format!("radius {radius} must be positive")));
        }
        Ok(Self { kind: CurveKind::Circle { radius }, smoothness: Smoothness::Smooth })
    }

    pub fn kite() -> Self {
        Self { kind: CurveKind::Kite, smoothness: Smoothness::Smooth }
    }

    /// Regular polygon with its first vertex on the positive x-axis.
    pub fn regular_polygon(sides: usize, circumradius: f64) -> Result<Self, GeometryError> {
        if sides < 3 {
            return Err(GeometryError::InvalidCurve(format!("a polygon needs 3 sides, got {sides}")));
        }
        if !(circumradius > 0.0 && circumradius.is_finite()) {
            return Err(GeometryError::InvalidCurve(format!(
                "circumradius {circumradius} must be positive"
            )));
        }
        Ok(Self {
            kind: CurveKind::RegularPolygon { sides, circumradius },
            smoothness: Smoothness::PiecewiseLinear,
        })
    }

    /// Regular pentagon with side length `2 sin(2π/5)`.
    pub fn reference_pentagon() -> Self {
        let circumradius = (2.0 * PI / 5.0).sin() / (PI / 5.0).sin();
        Self::regular_polygon(5, circumradius).expect("valid pentagon")
    }

    pub fn custom(table: TabulatedCurve) -> Result<Self, GeometryError> {
        if table.points.len() < 4 || table.points.len() != table.derivatives.len() {
            return Err(GeometryError::InvalidCurve(
                "custom curves need at least 4 samples with matching derivatives".into(),
            ));
        }
        if table.derivatives.iter().any(|d| d[0].hypot(d[1]) <= 0.0) {
            return Err(GeometryError::InvalidCurve("tabulated speed must be positive".into()));
        }
        Ok(Self { kind: CurveKind::Custom(table), smoothness: Smoothness::Smooth })
    }

    /// Tabulates a smooth parametrization, e.g. to feed [`BoundaryCurve::custom`].
    pub fn tabulate(
        samples: usize,
        z: impl Fn(f64) -> [f64; 2],
        dz: impl Fn(f64) -> [f64; 2],
    ) -> TabulatedCurve {
        let ts = (0..samples).map(|q| q as f64 / samples as f64);
        TabulatedCurve {
            points: ts.clone().map(&z).collect(),
            derivatives: ts.map(&dz).collect(),
        }
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn is_smooth(&self) -> bool {
        self.smoothness == Smoothness::Smooth
    }

    /// Parameters at which the derivative jumps, sorted in `[0, 1)`.
    pub fn corners(&self) -> Vec<f64> {
        match self.kind {
            CurveKind::RegularPolygon { sides, .. } => {
                (0..sides).map(|j| j as f64 / sides as f64).collect()
            }
            _ => Vec::new(),
        }
    }

    /// `z(t)`; `t` is reduced modulo 1 first.
    pub fn parametrize(&self, t: f64) -> Point {
        let t = wrap(t);
        match &self.kind {
            CurveKind::Circle { radius } => {
                let a = TAU * t;
                Point::new(radius * a.cos(), radius * a.sin())
            }
            CurveKind::Kite => {
                let a = TAU * t;
                Point::new(-a.sin() - (2.0 * a).cos(), a.cos())
            }
            CurveKind::RegularPolygon { sides, circumradius } => {
                let n = *sides as f64;
                let s = t * n;
                let j = (s.floor() as usize).min(sides - 1);
                let frac = s - j as f64;
                let a = polygon_vertex(j, *sides, *circumradius);
                let b = polygon_vertex(j + 1, *sides, *circumradius);
                a + (b - a) * frac
            }
            CurveKind::Custom(table) => hermite(table, t).0,
        }
    }

    /// `z(s) - z(t)`, formed without cancellation when the points are close.
    pub fn chord(&self, s: f64, t: f64) -> Point {
        match &self.kind {
            CurveKind::Circle { radius } => {
                let (a, b) = (TAU * s, TAU * t);
                let half = (0.5 * (a - b)).sin();
                let mid = 0.5 * (a + b);
                Point::new(-2.0 * radius * mid.sin() * half, 2.0 * radius * mid.cos() * half)
            }
            CurveKind::Kite => {
                let (a, b) = (TAU * s, TAU * t);
                let half = (0.5 * (a - b)).sin();
                let mid = 0.5 * (a + b);
                // sin a - sin b, cos 2a - cos 2b, cos a - cos b
                let dsin = 2.0 * mid.cos() * half;
                let dcos2 = -2.0 * (a + b).sin() * (a - b).sin();
                let dcos = -2.0 * mid.sin() * half;
                Point::new(-dsin - dcos2, dcos)
            }
            CurveKind::RegularPolygon { sides, circumradius } => {
                let n = *sides as f64;
                let (ws, wt) = (wrap(s) * n, wrap(t) * n);
                let (js, jt) = ((ws.floor() as usize).min(sides - 1), (wt.floor() as usize).min(sides - 1));
                if js == jt {
                    let edge = polygon_vertex(js + 1, *sides, *circumradius) - polygon_vertex(js, *sides, *circumradius);
                    edge * (ws - wt)
                } else {
                    self.parametrize(s) - self.parametrize(t)
                }
            }
            CurveKind::Custom(_) => self.parametrize(s) - self.parametrize(t),
        }
    }

    /// `z'(t)`, with respect to the parameter.
    pub fn derivative(&self, t: f64) -> Result<Point, GeometryError> {
        let t = wrap(t);
        Ok(match &self.kind {
            CurveKind::Circle { radius } => {
                let a = TAU * t;
                Point::new(-radius * TAU * a.sin(), radius * TAU * a.cos())
            }
            CurveKind::Kite => {
                let a = TAU * t;
                Point::new(-TAU * a.cos() + 2.0 * TAU * (2.0 * a).sin(), -TAU * a.sin())
            }
            CurveKind::RegularPolygon { sides, circumradius } => {
                let n = *sides as f64;
                let s = t * n;
                let nearest = s.round();
                if (s - nearest).abs() < CORNER_TOL * n {
                    return Err(GeometryError::CornerParameter(t));
                }
                let j = (s.floor() as usize).min(sides - 1);
                (polygon_vertex(j + 1, *sides, *circumradius)
                    - polygon_vertex(j, *sides, *circumradius))
                    * n
            }
            CurveKind::Custom(table) => hermite(table, t).1,
        })
    }

    /// `|z'(t)|`: arclength per unit parameter.
    pub fn speed(&self, t: f64) -> Result<f64, GeometryError> {
        self.derivative(t).map(|d| d.norm())
    }

    /// Unit outward normal at `t`.
    pub fn normal(&self, t: f64) -> Result<Point, GeometryError> {
        let d = self.derivative(t)?;
        Ok(Point::new(d.y, -d.x) / d.norm())
    }

    /// Total arclength.
    pub fn perimeter(&self) -> f64 {
        match &self.kind {
            CurveKind::Circle { radius } => TAU * radius,
            CurveKind::RegularPolygon { sides, circumradius } => {
                *sides as f64 * 2.0 * circumradius * (PI / *sides as f64).sin()
            }
            _ => {
                let rule = crate::quadrature::GaussLegendre::new(16);
                let panels = 256;
                (0..panels)
                    .map(|p| {
                        let (a, b) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
                        rule.integrate(a, b, |t| self.speed(t).unwrap_or(0.0))
                    })
                    .sum()
            }
        }
    }

    /// Euclidean distance from `p` to the curve.
    pub fn distance_to(&self, p: &Point) -> f64 {
        if let CurveKind::RegularPolygon { sides, circumradius } = self.kind {
            return (0..sides)
                .map(|j| {
                    let a = polygon_vertex(j, sides, circumradius);
                    let b = polygon_vertex(j + 1, sides, circumradius);
                    segment_distance(p, &a, &b)
                })
                .fold(f64::INFINITY, f64::min);
        }
        let samples = 2048;
        let dist2 = |t: f64| (self.parametrize(t) - p).norm_squared();
        let (best, _) = (0..samples)
            .map(|q| q as f64 / samples as f64)
            .map(|t| (t, dist2(t)))
            .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        // golden-section refinement on the bracketing interval
        let (mut lo, mut hi) = (best - 1.0 / samples as f64, best + 1.0 / samples as f64);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if dist2(m1) < dist2(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        dist2(0.5 * (lo + hi)).sqrt()
    }

    /// Winding-number test for points strictly inside the curve.
    pub fn contains(&self, p: &Point) -> bool {
        let samples = match self.kind {
            CurveKind::RegularPolygon { sides, .. } => sides,
            _ => 4096,
        };
        let pts: Vec<Point> =
            (0..samples).map(|q| self.parametrize(q as f64 / samples as f64)).collect();
        let mut winding = 0.0;
        for (i, a) in pts.iter().enumerate() {
            let b = &pts[(i + 1) % samples];
            let (u, v) = (a - p, b - p);
            winding += (u.x * v.y - u.y * v.x).atan2(u.dot(&v));
        }
        (winding / TAU).round() as i64 != 0
    }
}

fn wrap(t: f64) -> f64 {
    let w = t - t.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

fn polygon_vertex(j: usize, sides: usize, radius: f64) -> Point {
    let a = TAU * (j % sides) as f64 / sides as f64;
    Point::new(radius * a.cos(), radius * a.sin())
}

fn segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let s = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (a + ab * s - p).norm()
}

fn hermite(table: &TabulatedCurve, t: f64) -> (Point, Point) {
    let n = table.points.len();
    let s = t * n as f64;
    let i = (s.floor() as usize).min(n - 1);
    let u = s - i as f64;
    let h = 1.0 / n as f64;
    let p0 = Point::from(table.points[i]);
    let p1 = Point::from(table.points[(i + 1) % n]);
    let m0 = Point::from(table.derivatives[i]) * h;
    let m1 = Point::from(table.derivatives[(i + 1) % n]) * h;
    let (u2, u3) = (u * u, u * u * u);
    let value = p0 * (2.0 * u3 - 3.0 * u2 + 1.0)
        + m0 * (u3 - 2.0 * u2 + u)
        + p1 * (-2.0 * u3 + 3.0 * u2)
        + m1 * (u3 - u2);
    let slope = p0 * (6.0 * u2 - 6.0 * u)
        + m0 * (3.0 * u2 - 4.0 * u + 1.0)
        + p1 * (-6.0 * u2 + 6.0 * u)
        + m1 * (3.0 * u2 - 2.0 * u);
    (value, slope / h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chords_match_differences() {
        let curves = [BoundaryCurve::circle(1.3).unwrap(), BoundaryCurve::kite(), BoundaryCurve::reference_pentagon()];
        for curve in &curves {
            for (s, t) in [(0.1, 0.7), (0.93, 0.12), (0.3, 0.3 + 1e-9), (0.05, 1.04)] {
                let exact = curve.parametrize(s) - curve.parametrize(t);
                assert!((curve.chord(s, t) - exact).norm() < 1e-14, "{:?} {s} {t}", curve.kind());
            }
        }
        // close points on the kite: the chord is nearly tangent, so its normal
        // component is O(h²) and must keep relative accuracy
        let kite = BoundaryCurve::kite();
        let t = 0.31;
        let h = 1e-7;
        let n = kite.normal(t).unwrap();
        let along = kite.chord(t + h, t).dot(&n);
        let coarse = kite.chord(t + 1e-3, t).dot(&n) / 1e-6;
        assert!((along / (h * h) - coarse).abs() < 1e-2 * coarse.abs());
    }

    #[test]
    fn catalog_points() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        assert_relative_eq!(c.parametrize(0.0), Point::new(1.0, 0.0), epsilon = 1e-15);
        let k = BoundaryCurve::kite();
        assert_relative_eq!(k.parametrize(0.0), Point::new(-1.0, 1.0), epsilon = 1e-15);
        let p = BoundaryCurve::reference_pentagon();
        let r = (2.0 * PI / 5.0).sin() / (PI / 5.0).sin();
        assert_relative_eq!(p.parametrize(0.0), Point::new(r, 0.0), epsilon = 1e-15);
        let side = (p.parametrize(0.2) - p.parametrize(0.0)).norm();
        assert_relative_eq!(side, 2.0 * (2.0 * PI / 5.0).sin(), epsilon = 1e-14);
    }

    #[test]
    fn speeds() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        assert_relative_eq!(c.speed(0.37).unwrap(), TAU, epsilon = 1e-14);
        let k = BoundaryCurve::kite();
        assert_relative_eq!(k.derivative(0.0).unwrap(), Point::new(-TAU, 0.0), epsilon = 1e-14);
        assert_relative_eq!(k.speed(0.0).unwrap(), TAU, epsilon = 1e-14);
        let p = BoundaryCurve::reference_pentagon();
        let perimeter = 5.0 * 2.0 * (2.0 * PI / 5.0).sin();
        assert_relative_eq!(p.speed(0.13).unwrap(), perimeter, epsilon = 1e-12);
        assert_relative_eq!(p.perimeter(), perimeter, epsilon = 1e-12);
        assert_eq!(p.speed(0.4), Err(GeometryError::CornerParameter(0.4)));
    }

    #[test]
    fn polygon_arclength_integral() {
        let p = BoundaryCurve::reference_pentagon();
        let rule = crate::quadrature::GaussLegendre::new(4);
        let corners = p.corners();
        let total: f64 = (0..corners.len())
            .map(|j| {
                let b = corners.get(j + 1).copied().unwrap_or(1.0);
                rule.integrate(corners[j], b, |t| p.speed(t).unwrap())
            })
            .sum();
        assert_relative_eq!(total, 10.0 * (2.0 * PI / 5.0).sin(), epsilon = 1e-12);
    }

    #[test]
    fn closure_and_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let curves = [
            BoundaryCurve::circle(1.3).unwrap(),
            BoundaryCurve::kite(),
            BoundaryCurve::reference_pentagon(),
        ];
        for c in &curves {
            for eps in [1e-4, 1e-8, 1e-12] {
                let gap = (c.parametrize(1.0 - eps) - c.parametrize(eps)).norm();
                assert!(gap < 50.0 * eps, "gap {gap} at eps {eps}");
            }
        }
        for c in curves.iter().filter(|c| c.is_smooth()) {
            for _ in 0..100 {
                let t: f64 = rng.gen();
                let dt = 1e-5;
                let fd = (c.parametrize(t + dt) - c.parametrize(t - dt)) / (2.0 * dt);
                let exact = c.derivative(t).unwrap();
                assert!((fd - exact).norm() < 1e-6 * exact.norm().max(1.0));
            }
        }
    }

    #[test]
    fn custom_curve_matches_circle() {
        let table = BoundaryCurve::tabulate(
            256,
            |t| [(TAU * t).cos(), (TAU * t).sin()],
            |t| [-TAU * (TAU * t).sin(), TAU * (TAU * t).cos()],
        );
        let c = BoundaryCurve::custom(table).unwrap();
        for t in [0.01, 0.3, 0.77] {
            let exact = Point::new((TAU * t).cos(), (TAU * t).sin());
            assert!((c.parametrize(t) - exact).norm() < 1e-8);
            assert!((c.speed(t).unwrap() - TAU).abs() < 1e-4);
        }
    }

    #[test]
    fn normals_point_outward() {
        let c = BoundaryCurve::circle(2.0).unwrap();
        let n = c.normal(0.25).unwrap();
        assert_relative_eq!(n, Point::new(0.0, 1.0), epsilon = 1e-15);
        let k = BoundaryCurve::kite();
        for t in [0.0, 0.2, 0.5, 0.9] {
            let outside = k.parametrize(t) + k.normal(t).unwrap() * 1e-3;
            let inside = k.parametrize(t) - k.normal(t).unwrap() * 1e-3;
            assert!(!k.contains(&outside));
            assert!(k.contains(&inside));
        }
    }

    #[test]
    fn distances() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        assert_relative_eq!(c.distance_to(&Point::new(0.3, 0.0)), 0.7, epsilon = 1e-10);
        let p = BoundaryCurve::regular_polygon(4, 2f64.sqrt()).unwrap();
        assert_relative_eq!(p.distance_to(&Point::new(0.0, 0.0)), 1.0, epsilon = 1e-14);
        assert!(p.contains(&Point::new(0.2, 0.1)));
        assert!(!p.contains(&Point::new(1.2, 0.4)));
    }
}
