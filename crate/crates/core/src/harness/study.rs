//! Convergence studies over `N`.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{hs_projection, SplineSpace};
use crate::colloc::{make_grid, trapezoid_weights, CollocationGrid, GridKind};
use crate::geometry::{BoundaryCurve, Point};
use crate::operators::{field_eval, OperatorSpec, QuadratureConfig};
use crate::oracle::{circle_field, circle_reference, plane_wave_coefficients};
use crate::par::Execution;
use crate::solver::{
    assemble_on, solve_bubnov_galerkin, solve_galerkin, solve_least_squares, solve_modified, solve_square,
    ContinuousQuadrature, Method,
};
use crate::special::hankel1_0;
use crate::spectral::FourierVector;

use super::config::{CaseConfig, DataConfig, ExperimentConfig, GeometryConfig, MethodConfig, MetricConfig, Placement};
use super::serde_nan;
use super::HarnessError;

/// Metric tag of the spacing diagnostic `d(Δ_M)³ M N³`.
pub const SPACING_METRIC: &str = "spacing_diagnostic";

/// Condition bound passed to the H^s projection.
const PROJECTION_COND_BOUND: f64 = 1e14;

/// Modes of the reference density beyond `kR` kept in addition to the error band.
const REFERENCE_MARGIN: usize = 64;

/// One row of a study. Failed cases carry `NaN` errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub method: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub metric: String,
    pub s_or_point: String,
    #[serde(with = "serde_nan")]
    pub error: f64,
    #[serde(with = "serde_nan")]
    pub cond: f64,
    pub seed: Option<u64>,
    pub wall_ms: u64,
}

/// Boundary data, exact field and (when known) exact density.
pub struct Problem {
    pub spec: OperatorSpec,
    pub curve: BoundaryCurve,
    data: DataConfig,
    reference: Option<(f64, FourierVector)>,
}

impl Problem {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        let spec = cfg.operator.spec();
        let curve = cfg.geometry.build()?;
        let reference = match (&cfg.data, &cfg.geometry) {
            (DataConfig::CircleBessel { theta }, GeometryConfig::Circle { radius }) => {
                let n_max = *cfg.basis.n.last().expect("validated");
                let band = cfg.output.band_factor * n_max + (spec.wavenumber * radius) as usize + REFERENCE_MARGIN;
                let data = plane_wave_coefficients(spec.wavenumber, *radius, *theta, band);
                let density = circle_reference(&spec, *radius, &data, 1e-10)
                    .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
                Some((*radius, density))
            }
            _ => None,
        };
        Ok(Self { spec, curve, data: cfg.data.clone(), reference })
    }

    pub fn boundary_data(&self, t: f64) -> Complex64 {
        let z = self.curve.parametrize(t);
        match &self.data {
            DataConfig::PlaneWave { theta } | DataConfig::CircleBessel { theta } => plane_wave(self.spec.wavenumber, *theta, &z),
            DataConfig::InteriorSource { point } => point_source(self.spec.wavenumber, &Point::new(point[0], point[1]), &z),
        }
    }

    pub fn exact_field(&self, x: &Point) -> Complex64 {
        match (&self.data, &self.reference) {
            (_, Some((radius, density))) => circle_field(&self.spec, *radius, density, x),
            (DataConfig::PlaneWave { theta }, _) | (DataConfig::CircleBessel { theta }, _) => {
                plane_wave(self.spec.wavenumber, *theta, x)
            }
            (DataConfig::InteriorSource { point }, _) => point_source(self.spec.wavenumber, &Point::new(point[0], point[1]), x),
        }
    }

    pub fn reference_density(&self) -> Option<&FourierVector> {
        self.reference.as_ref().map(|(_, d)| d)
    }
}

fn plane_wave(k: f64, theta: f64, x: &Point) -> Complex64 {
    Complex64::from_polar(1.0, k * (x.x * theta.cos() + x.y * theta.sin()))
}

fn point_source(k: f64, source: &Point, x: &Point) -> Complex64 {
    0.25 * Complex64::new(0.0, 1.0) * hankel1_0(k * (x - source).norm())
}

/// A single (N, case, seed) unit of work.
#[derive(Debug, Clone)]
struct Job<'a> {
    n: usize,
    case: &'a CaseConfig,
    seed: Option<u64>,
}

/// Discrete solution for one job.
pub struct CaseSolution {
    pub space: SplineSpace,
    pub coefficients: Vec<Complex64>,
    pub condition: f64,
    pub m: usize,
    pub grid: Option<CollocationGrid>,
}

/// Builds the grid of a case at mesh size `n`.
pub fn case_grid(case: &CaseConfig, n: usize, seed: Option<u64>) -> Result<Option<CollocationGrid>, HarnessError> {
    let Some(g) = &case.grid else { return Ok(None) };
    let m = g.rule.points(n);
    let kind = match &g.placement {
        Placement::Equispaced => GridKind::Equispaced { m, shift: 0.0 },
        Placement::Offset { delta } => GridKind::Offset { n, m, delta: *delta },
        Placement::Random { .. } => GridKind::Random { m, seed: seed.unwrap_or(0) },
    };
    make_grid(kind, n).map(Some).map_err(|e| HarnessError::Case(e.to_string()))
}

/// Solves one case at mesh size `n`.
pub fn solve_case(
    problem: &Problem,
    cfg: &ExperimentConfig,
    case: &CaseConfig,
    n: usize,
    seed: Option<u64>,
    exec: Execution,
) -> Result<CaseSolution, HarnessError> {
    let space = SplineSpace::uniform(cfg.basis.degree, n).map_err(|e| HarnessError::Case(e.to_string()))?;
    let data = |t: f64| problem.boundary_data(t);
    let grid = case_grid(case, n, seed)?;
    let case_err = |e: crate::solver::SolverError| HarnessError::Case(e.to_string());
    let (coefficients, condition, m) = match &case.method {
        MethodConfig::LeastSquares | MethodConfig::Modified | MethodConfig::SquareCollocation => {
            let grid = grid.as_ref().expect("validated");
            let method = match case.method {
                MethodConfig::LeastSquares => Method::LeastSquares,
                MethodConfig::Modified => Method::Modified,
                _ => Method::SquareCollocation,
            };
            let sys = assemble_on(
                &problem.spec,
                &problem.curve,
                &space,
                grid.points(),
                grid.weights(),
                data,
                method,
                QuadratureConfig::default(),
                exec,
            )
            .map_err(case_err)?;
            let sol = match method {
                Method::LeastSquares => solve_least_squares(&sys),
                Method::Modified => solve_modified(&sys),
                Method::SquareCollocation => solve_square(&sys),
            }
            .map_err(case_err)?;
            (sol.coefficients, sol.condition, grid.len())
        }
        MethodConfig::Galerkin | MethodConfig::BubnovGalerkin => {
            let quad = ContinuousQuadrature::default();
            let sol = if case.method == MethodConfig::Galerkin {
                solve_galerkin(&problem.spec, &problem.curve, &space, data, quad, exec)
            } else {
                solve_bubnov_galerkin(&problem.spec, &problem.curve, &space, data, quad, exec)
            }
            .map_err(case_err)?;
            (sol.coefficients, sol.condition, 0)
        }
        MethodConfig::HsProjection { s } => {
            let target = problem.reference_density().expect("validated");
            let band = cfg.output.band_factor * n;
            let proj = hs_projection(&target.with_band(band), &space, *s, PROJECTION_COND_BOUND);
            (proj.coefficients, proj.condition, 0)
        }
    };
    Ok(CaseSolution { space, coefficients, condition, m, grid })
}

/// Value of one metric for a solved case.
pub fn evaluate_metric(
    problem: &Problem,
    cfg: &ExperimentConfig,
    sol: &CaseSolution,
    metric: &MetricConfig,
    exec: Execution,
) -> Result<f64, HarnessError> {
    let n = sol.space.dim();
    match metric {
        MetricConfig::Sobolev { s } => {
            let reference = problem.reference_density().ok_or_else(|| HarnessError::Case("no reference density".into()))?;
            let band = cfg.output.band_factor * n;
            let approx = sol.space.spline_fourier(&sol.coefficients, band).map_err(|e| HarnessError::Case(e.to_string()))?;
            Ok(approx.sub(&reference.with_band(band)).sobolev_norm(*s))
        }
        MetricConfig::FieldPoint { point } => {
            let x = Point::new(point[0], point[1]);
            let value = field_eval(&problem.spec, &problem.curve, &sol.space, &sol.coefficients, &x)
                .map_err(|e| HarnessError::Case(e.to_string()))?;
            Ok((value - problem.exact_field(&x)).norm())
        }
        MetricConfig::Residual { check_factor } => {
            let m = check_factor * n;
            // offset from both the mesh and the usual collocation grids
            let shift = 0.5 * (5f64.sqrt() - 1.0) / m as f64;
            let points: Vec<f64> = (0..m).map(|i| shift + i as f64 / m as f64).collect();
            let weights = trapezoid_weights(&points);
            let sys = assemble_on(
                &problem.spec,
                &problem.curve,
                &sol.space,
                &points,
                &weights,
                |t| problem.boundary_data(t),
                Method::LeastSquares,
                QuadratureConfig::default(),
                exec,
            )
            .map_err(|e| HarnessError::Case(e.to_string()))?;
            Ok(sys.residual(&sol.coefficients))
        }
    }
}

/// `d(Δ_M)³ M N³`.
pub fn spacing_diagnostic(grid: &CollocationGrid, n: usize) -> f64 {
    grid.max_spacing().powi(3) * grid.len() as f64 * (n as f64).powi(3)
}

/// Runs every (N, case, seed) combination and returns records in config
/// order: N outer, then case, then seed, then metric.
pub fn run_study(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<ConvergenceRecord>, HarnessError> {
    cfg.validate()?;
    let problem = Problem::new(cfg)?;
    let mut jobs = Vec::new();
    for &n in &cfg.basis.n {
        for case in &cfg.cases {
            match case.grid.as_ref().map(|g| &g.placement) {
                Some(Placement::Random { seeds }) => {
                    for &seed in seeds {
                        jobs.push(Job { n, case, seed: Some(seed) });
                    }
                }
                _ => jobs.push(Job { n, case, seed: None }),
            }
        }
    }
    let blocks = exec.map(&jobs, |job| run_job(&problem, cfg, job, exec));
    Ok(blocks.into_iter().flatten().collect())
}

fn run_job(problem: &Problem, cfg: &ExperimentConfig, job: &Job, exec: Execution) -> Vec<ConvergenceRecord> {
    let start = Instant::now();
    let label = job.case.label();
    let expected_m = job.case.grid.as_ref().map_or(0, |g| g.rule.points(job.n));
    let outcome = solve_case(problem, cfg, job.case, job.n, job.seed, exec);
    let mut records = Vec::with_capacity(cfg.metrics.len() + 1);
    let (m, cond) = match &outcome {
        Ok(sol) => (sol.m, sol.condition),
        Err(_) => (expected_m, f64::NAN),
    };
    for metric in &cfg.metrics {
        let error = match &outcome {
            Ok(sol) => evaluate_metric(problem, cfg, sol, metric, exec).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        };
        records.push(ConvergenceRecord {
            method: label.clone(),
            n: job.n,
            m,
            metric: metric.tag().into(),
            s_or_point: metric.parameter(),
            error,
            cond,
            seed: job.seed,
            wall_ms: 0,
        });
    }
    if let Some(Placement::Random { .. }) = job.case.grid.as_ref().map(|g| &g.placement) {
        let value = case_grid(job.case, job.n, job.seed).ok().flatten().map_or(f64::NAN, |g| spacing_diagnostic(&g, job.n));
        records.push(ConvergenceRecord {
            method: label,
            n: job.n,
            m,
            metric: SPACING_METRIC.into(),
            s_or_point: String::new(),
            error: value,
            cond,
            seed: job.seed,
            wall_ms: 0,
        });
    }
    if cfg.output.record_timing {
        let ms = start.elapsed().as_millis() as u64;
        for r in &mut records {
            r.wall_ms = ms;
        }
    }
    records
}

/// Field of a solved case at `x` next to the exact value.
pub fn field_values(
    problem: &Problem,
    sol: &CaseSolution,
    x: &Point,
) -> Result<(Complex64, Complex64), HarnessError> {
    let value = field_eval(&problem.spec, &problem.curve, &sol.space, &sol.coefficients, x)
        .map_err(|e| HarnessError::Case(e.to_string()))?;
    Ok((value, problem.exact_field(x)))
}
