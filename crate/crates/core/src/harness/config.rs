//! TOML experiment configuration.

use serde::{Deserialize, Serialize};

use crate::geometry::{BoundaryCurve, Point};
use crate::operators::{OperatorKind, OperatorSpec, Side};

use super::HarnessError;

/// Boundary curve of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometryConfig {
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    Kite,
    /// Regular pentagon with side length `2 sin(2π/5)`.
    Pentagon,
    Polygon {
        sides: usize,
        circumradius: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl GeometryConfig {
    pub fn build(&self) -> Result<BoundaryCurve, HarnessError> {
        let curve = match self {
            Self::Circle { radius } => BoundaryCurve::circle(*radius),
            Self::Kite => Ok(BoundaryCurve::kite()),
            Self::Pentagon => Ok(BoundaryCurve::reference_pentagon()),
            Self::Polygon { sides, circumradius } => BoundaryCurve::regular_polygon(*sides, *circumradius),
        };
        curve.map_err(|e| HarnessError::InvalidConfig(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    pub kind: OperatorKind,
    #[serde(default)]
    pub wavenumber: f64,
    /// Only read for the pseudo-differential model.
    #[serde(default)]
    pub two_alpha: Option<f64>,
    #[serde(default)]
    pub side: Side,
}

impl OperatorConfig {
    pub fn spec(&self) -> OperatorSpec {
        match self.kind {
            OperatorKind::HelmholtzSingleLayer => {
                OperatorSpec { side: self.side, ..OperatorSpec::single_layer(self.wavenumber) }
            }
            OperatorKind::HelmholtzDoubleLayerPlusHalfIdentity => OperatorSpec::double_layer(self.wavenumber, self.side),
            OperatorKind::PseudoDifferential => OperatorSpec::pseudo_differential(self.two_alpha.unwrap_or(-1.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisConfig {
    pub degree: usize,
    /// Mesh sizes, ascending.
    pub n: Vec<usize>,
}

/// Boundary data and the matching exact solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataConfig {
    /// `e^{ik(x cos θ + y sin θ)}`; the field inside the curve is the same
    /// plane wave.
    PlaneWave {
        #[serde(default)]
        theta: f64,
    },
    /// `G(x, source)` for a source inside the curve; the exterior field is
    /// the same point source.
    InteriorSource { point: [f64; 2] },
    /// Plane wave on a circle with the eigen-expansion density as reference.
    CircleBessel {
        #[serde(default)]
        theta: f64,
    },
}

/// Number of collocation points as a function of `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum GridRule {
    /// `M = value`.
    Fixed { value: usize },
    /// `M = J N`.
    Linear { value: usize },
    /// `M = ⌈N^β⌉`.
    Power { value: f64 },
    /// `M = N ⌈N^γ⌉` or `N ⌊N^γ⌋`.
    NPower {
        value: f64,
        #[serde(default)]
        rounding: Rounding,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    #[default]
    Ceil,
    Floor,
}

impl GridRule {
    pub fn points(&self, n: usize) -> usize {
        let nf = n as f64;
        match *self {
            Self::Fixed { value } => value,
            Self::Linear { value } => value * n,
            // guard against N^β landing a rounding error above an integer
            Self::Power { value } => (nf.powf(value) - 1e-9).ceil() as usize,
            Self::NPower { value, rounding } => {
                let p = nf.powf(value);
                n * match rounding {
                    Rounding::Ceil => (p - 1e-9).ceil() as usize,
                    Rounding::Floor => (p + 1e-9).floor() as usize,
                }
            }
        }
    }
}

/// Where the `M` points go.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Placement {
    /// `m / M`, the refinement of the mesh when `N | M`.
    Equispaced,
    /// `δ / N + m / M`.
    Offset { delta: f64 },
    /// Uniform random draws, one run per seed.
    Random { seeds: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(flatten)]
    pub rule: GridRule,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodConfig {
    LeastSquares,
    Modified,
    SquareCollocation,
    Galerkin,
    BubnovGalerkin,
    HsProjection { s: f64 },
}

impl MethodConfig {
    pub fn tag(&self) -> String {
        match self {
            Self::LeastSquares => "least_squares".into(),
            Self::Modified => "modified".into(),
            Self::SquareCollocation => "square_collocation".into(),
            Self::Galerkin => "galerkin".into(),
            Self::BubnovGalerkin => "bubnov_galerkin".into(),
            Self::HsProjection { s } => format!("hs_projection({s})"),
        }
    }

    pub fn needs_grid(&self) -> bool {
        matches!(self, Self::LeastSquares | Self::Modified | Self::SquareCollocation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseConfig {
    /// Written to the `method` column; defaults to the method tag.
    #[serde(default)]
    pub label: Option<String>,
    pub method: MethodConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
}

impl CaseConfig {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.method.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricConfig {
    /// `‖u_N − ũ‖_{H^s}` from Fourier coefficients.
    Sobolev { s: f64 },
    /// `|φ_N(x) − φ(x)|`.
    FieldPoint { point: [f64; 2] },
    /// `‖V u_N − f‖_{L²}` on an offset check grid of `check_factor · N`
    /// points; usable when no reference density exists.
    Residual {
        #[serde(default = "default_check_factor")]
        check_factor: usize,
    },
}

fn default_check_factor() -> usize {
    16
}

impl MetricConfig {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Sobolev { .. } => "sobolev",
            Self::FieldPoint { .. } => "field_point",
            Self::Residual { .. } => "residual",
        }
    }

    pub fn parameter(&self) -> String {
        match self {
            Self::Sobolev { s } => format!("{s}"),
            Self::FieldPoint { point } => format!("{};{}", point[0], point[1]),
            Self::Residual { check_factor } => format!("{check_factor}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub json: Option<String>,
    /// Sobolev errors use the band `band_factor · N`.
    #[serde(default = "default_band_factor")]
    pub band_factor: usize,
    /// Write measured wall times; off keeps the CSV byte-stable.
    #[serde(default)]
    pub record_timing: bool,
}

fn default_band_factor() -> usize {
    8
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { csv: None, json: None, band_factor: default_band_factor(), record_timing: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub geometry: GeometryConfig,
    pub operator: OperatorConfig,
    pub basis: BasisConfig,
    pub data: DataConfig,
    pub cases: Vec<CaseConfig>,
    pub metrics: Vec<MetricConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Field points must keep at least this distance from the curve.
pub const FIELD_STANDOFF: f64 = 0.1;

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidConfig(msg));
        if self.basis.n.is_empty() {
            return bad("basis.n is empty".into());
        }
        if self.basis.n.windows(2).any(|w| w[0] >= w[1]) {
            return bad("basis.n must be strictly ascending".into());
        }
        let spec = self.operator.spec();
        spec.validate().map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        if self.cases.is_empty() || self.metrics.is_empty() {
            return bad("at least one case and one metric are required".into());
        }
        let curve = self.geometry.build()?;
        let is_circle = matches!(self.geometry, GeometryConfig::Circle { .. });
        if spec.kind == OperatorKind::PseudoDifferential {
            return bad("studies run Helmholtz operators; use the oracle for the model problem".into());
        }
        if let DataConfig::CircleBessel { .. } = self.data {
            if !is_circle {
                return bad("circle_bessel data needs a circle".into());
            }
        }
        if let DataConfig::InteriorSource { point } = self.data {
            let p = Point::new(point[0], point[1]);
            if !curve.contains(&p) || curve.distance_to(&p) < FIELD_STANDOFF {
                return bad(format!("source ({}, {}) must lie inside the curve", point[0], point[1]));
            }
        }
        for case in &self.cases {
            match (&case.method, &case.grid) {
                (m, None) if m.needs_grid() => return bad(format!("case {} needs a grid", case.label())),
                (_, Some(g)) => {
                    if let GridRule::Power { value } | GridRule::NPower { value, .. } = g.rule {
                        if !(value >= 0.0) || (matches!(g.rule, GridRule::Power { .. }) && value < 1.0) {
                            return bad(format!("case {}: exponent {value} below 1", case.label()));
                        }
                    }
                    if let Placement::Random { seeds } = &g.placement {
                        if seeds.is_empty() {
                            return bad(format!("case {}: random placement needs seeds", case.label()));
                        }
                    }
                }
                _ => {}
            }
            if let MethodConfig::HsProjection { .. } = case.method {
                if !matches!(self.data, DataConfig::CircleBessel { .. }) {
                    return bad("hs_projection needs a reference density (circle_bessel data)".into());
                }
            }
        }
        for metric in &self.metrics {
            match metric {
                MetricConfig::Sobolev { .. } if !matches!(self.data, DataConfig::CircleBessel { .. }) => {
                    return bad("Sobolev metrics need a reference density (circle_bessel data)".into());
                }
                MetricConfig::FieldPoint { point } => {
                    let p = Point::new(point[0], point[1]);
                    if curve.distance_to(&p) < FIELD_STANDOFF {
                        return bad(format!("field point ({}, {}) is closer than {FIELD_STANDOFF} to the curve", point[0], point[1]));
                    }
                    let inside = curve.contains(&p);
                    match self.data {
                        DataConfig::PlaneWave { .. } if !inside => {
                            return bad("plane-wave data only has an exact field inside the curve".into());
                        }
                        DataConfig::InteriorSource { .. } if inside => {
                            return bad("interior-source data only has an exact field outside the curve".into());
                        }
                        _ => {}
                    }
                }
                MetricConfig::Residual { check_factor } if *check_factor == 0 => {
                    return bad("residual check_factor must be positive".into());
                }
                _ => {}
            }
        }
        if self.output.band_factor == 0 {
            return bad("band_factor must be positive".into());
        }
        Ok(())
    }
}
