//! Gauss–Legendre rules and the graded panel scheme used for weakly singular
//! integrands on the periodic parameter domain.

use std::f64::consts::PI;

/// `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(t, w)| w * f(t)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A quadrature panel `[a, b]` in unwrapped parameter coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
}

impl Panel {
    pub fn len(&self) -> f64 {
        self.b - self.a
    }
}

/// Subdivides `[a, b]` until every panel is at least its own length away from
/// `target` (periodic distance). Panels touching `target` stop at `min_len`
/// and are returned separately so the caller can integrate them with a
/// product rule for the logarithmic singularity.
///
/// Returns `(regular, innermost)`.
pub fn graded_panels(a: f64, b: f64, target: Option<f64>, min_len: f64) -> (Vec<Panel>, Vec<Panel>) {
    let mut regular = Vec::new();
    let mut inner = Vec::new();
    let Some(x) = target else {
        regular.push(Panel { a, b });
        return (regular, inner);
    };
    let mut stack = vec![Panel { a, b }];
    while let Some(p) = stack.pop() {
        let d = periodic_interval_distance(x, p.a, p.b);
        if d >= p.len() {
            regular.push(p);
        } else if p.len() <= min_len {
            inner.push(p);
        } else {
            let m = 0.5 * (p.a + p.b);
            stack.push(Panel { a: p.a, b: m });
            stack.push(Panel { a: m, b: p.b });
        }
    }
    regular.sort_by(|p, q| p.a.total_cmp(&q.a));
    inner.sort_by(|p, q| p.a.total_cmp(&q.a));
    (regular, inner)
}

/// Distance on the unit circle between `x` and the interval `[a, b]`.
pub fn periodic_interval_distance(x: f64, a: f64, b: f64) -> f64 {
    let shift = |v: f64| v - (v - a).div_euclid(1.0);
    // representative of x in [a, a + 1)
    let xr = shift(x);
    if xr <= b {
        0.0
    } else {
        (xr - b).min(a + 1.0 - xr)
    }
}

/// Periodic distance between two parameters.
pub fn periodic_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}
