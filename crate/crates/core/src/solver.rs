//! Assembly and solution of collocation systems `G a ≈ f`.
//!
//! `G_{mn} = (Vφ_n)(x_m)`, `B_{mn} = φ_n(x_m)`, `W = diag(w_m)`. Least squares
//! minimizes `‖W^{1/2}(G a − f)‖`; the modified method solves
//! `(B^H W G) a = B^H W f`. Galerkin and Bubnov–Galerkin replace the discrete
//! sums by a composite Gauss rule per mesh cell, graded towards the knots.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::SplineSpace;
use crate::colloc::CollocationGrid;
use crate::geometry::BoundaryCurve;
use crate::operators::{OperatorError, OperatorSpec, QuadratureConfig, RowAssembler};
use crate::par::Execution;
use crate::quadrature::GaussLegendre;

/// Condition estimates above this raise a warning.
pub const CONDITION_WARNING: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("weighted matrix has numerical rank {rank} < {n}")]
    RankDeficient { rank: usize, n: usize },
    #[error("system matrix is numerically singular")]
    SingularSystem,
    #[error("inconsistent dimensions: {0}")]
    DimensionMismatch(String),
    #[error("weights must be positive and finite")]
    InvalidWeights,
    #[error("the modified method needs the basis matrix B")]
    MissingBasisMatrix,
    #[error("row {row}: {source}")]
    Quadrature { row: usize, source: OperatorError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LeastSquares,
    Modified,
    SquareCollocation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SolverWarning {
    IllConditioned { condition: f64 },
}

/// Output of [`weighted_qr_solve`].
#[derive(Debug, Clone)]
pub struct LsResult {
    pub x: Vec<Complex64>,
    /// `σ_max / σ_min` of the (already weighted) matrix.
    pub condition: f64,
    pub rank: usize,
    pub residual: f64,
}

/// Least-squares solution of `A x ≈ rhs` via Householder QR of `A`.
/// Rank and condition come from the singular values of `R`.
pub fn weighted_qr_solve(a: DMatrix<Complex64>, rhs: DVector<Complex64>) -> LsResult {
    let (m, n) = a.shape();
    let a_copy = a.clone();
    let qr = a.qr();
    let mut qtb = rhs.clone();
    qr.q_tr_mul(&mut qtb);
    let r = qr.r();
    let r = r.rows(0, n.min(m)).into_owned();
    let sv = r.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let tol = smax * (m.max(n) as f64) * f64::EPSILON;
    let rank = sv.iter().filter(|&&s| s > tol).count();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let x = if m >= n {
        r.solve_upper_triangular(&qtb.rows(0, n).into_owned())
            .unwrap_or_else(|| DVector::from_element(n, Complex64::new(f64::NAN, 0.0)))
    } else {
        DVector::from_element(n, Complex64::new(f64::NAN, 0.0))
    };
    let residual = (&a_copy * &x - rhs).norm();
    LsResult { x: x.iter().copied().collect(), condition, rank, residual }
}

/// `G`, optionally `B`, weights and samples of the right-hand side.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub g: DMatrix<Complex64>,
    pub b: Option<DMatrix<Complex64>>,
    pub weights: Vec<f64>,
    pub rhs: Vec<Complex64>,
    pub method: Method,
}

impl DiscreteSystem {
    pub fn new(
        g: DMatrix<Complex64>,
        b: Option<DMatrix<Complex64>>,
        weights: Vec<f64>,
        rhs: Vec<Complex64>,
        method: Method,
    ) -> Result<Self, SolverError> {
        let (m, n) = g.shape();
        if weights.len() != m || rhs.len() != m {
            return Err(SolverError::DimensionMismatch(format!(
                "G is {m}x{n}, {} weights, {} samples",
                weights.len(),
                rhs.len()
            )));
        }
        if let Some(b) = &b {
            if b.shape() != (m, n) {
                return Err(SolverError::DimensionMismatch(format!("B is {:?}, G is {m}x{n}", b.shape())));
            }
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(SolverError::InvalidWeights);
        }
        if method == Method::SquareCollocation && m != n {
            return Err(SolverError::DimensionMismatch(format!("square collocation needs M = N, got {m}x{n}")));
        }
        if method == Method::Modified && b.is_none() {
            return Err(SolverError::MissingBasisMatrix);
        }
        Ok(Self { g, b, weights, rhs, method })
    }

    pub fn rows(&self) -> usize {
        self.g.nrows()
    }

    pub fn cols(&self) -> usize {
        self.g.ncols()
    }

    /// `‖W^{1/2}(G a − f)‖`.
    pub fn residual(&self, a: &[Complex64]) -> f64 {
        let x = DVector::from_column_slice(a);
        let r = &self.g * x;
        r.iter()
            .zip(&self.rhs)
            .zip(&self.weights)
            .map(|((gi, fi), w)| w * (gi - fi).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn weighted(&self) -> (DMatrix<Complex64>, DVector<Complex64>) {
        let mut a = self.g.clone();
        let mut f = DVector::from_column_slice(&self.rhs);
        for (i, w) in self.weights.iter().enumerate() {
            let sw = w.sqrt();
            a.row_mut(i).scale_mut(sw);
            f[i] *= sw;
        }
        (a, f)
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub coefficients: Vec<Complex64>,
    pub condition: f64,
    /// `‖W^{1/2}(G a − f)‖`.
    pub residual: f64,
    pub warnings: Vec<SolverWarning>,
}

fn warnings_for(condition: f64) -> Vec<SolverWarning> {
    if condition > CONDITION_WARNING {
        vec![SolverWarning::IllConditioned { condition }]
    } else {
        Vec::new()
    }
}

/// Builds the system on a collocation grid.
pub fn assemble<F>(
    spec: &OperatorSpec,
    curve: &BoundaryCurve,
    space: &SplineSpace,
    grid: &CollocationGrid,
    data: F,
    method: Method,
    exec: Execution,
) -> Result<DiscreteSystem, SolverError>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    assemble_on(spec, curve, space, grid.points(), grid.weights(), data, method, QuadratureConfig::default(), exec)
}

/// Builds the system on arbitrary points with given weights. `B` is filled
/// for every method so the same system can be re-solved another way.
#[allow(clippy::too_many_arguments)]
pub fn assemble_on<F>(
    spec: &OperatorSpec,
    curve: &BoundaryCurve,
    space: &SplineSpace,
    points: &[f64],
    weights: &[f64],
    data: F,
    method: Method,
    cfg: QuadratureConfig,
    exec: Execution,
) -> Result<DiscreteSystem, SolverError>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let assembler = RowAssembler::new(*spec, curve, space, cfg).map_err(|e| SolverError::Quadrature { row: 0, source: e })?;
    let rows = exec.map_range(points.len(), |i| {
        assembler.row(points[i]).map_err(|e| SolverError::Quadrature { row: i, source: e })
    });
    let (m, n) = (points.len(), space.dim());
    let mut g = DMatrix::<Complex64>::zeros(m, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row?.into_iter().enumerate() {
            g[(i, j)] = v;
        }
    }
    let b = basis_matrix(space, points);
    let rhs = exec.map(points, |&x| data(x));
    DiscreteSystem::new(g, Some(b), weights.to_vec(), rhs, method)
}

/// `B_{mn} = φ_n(x_m)`.
pub fn basis_matrix(space: &SplineSpace, points: &[f64]) -> DMatrix<Complex64> {
    let n = space.dim();
    let d = space.degree();
    let mut b = DMatrix::<Complex64>::zeros(points.len(), n);
    for (i, &x) in points.iter().enumerate() {
        let (cell, t) = space.locate(x);
        let cv = space.cell_values(cell, t);
        for r in 0..=d {
            b[(i, (cv.first + r) % n)] += Complex64::new(cv.values[r], 0.0);
        }
    }
    b
}

/// Dispatches on the system's method tag.
pub fn solve(sys: &DiscreteSystem) -> Result<Solution, SolverError> {
    match sys.method {
        Method::LeastSquares => solve_least_squares(sys),
        Method::Modified => solve_modified(sys),
        Method::SquareCollocation => solve_square(sys),
    }
}

pub fn solve_least_squares(sys: &DiscreteSystem) -> Result<Solution, SolverError> {
    let n = sys.cols();
    let (a, f) = sys.weighted();
    let ls = weighted_qr_solve(a, f);
    if ls.rank < n {
        return Err(SolverError::RankDeficient { rank: ls.rank, n });
    }
    Ok(Solution {
        residual: sys.residual(&ls.x),
        warnings: warnings_for(ls.condition),
        condition: ls.condition,
        coefficients: ls.x,
    })
}

fn square_solve(a: DMatrix<Complex64>, rhs: DVector<Complex64>) -> Result<(Vec<Complex64>, f64), SolverError> {
    let sv = a.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > smax * f64::EPSILON * a.nrows() as f64) {
        return Err(SolverError::SingularSystem);
    }
    let x = a.lu().solve(&rhs).ok_or(SolverError::SingularSystem)?;
    Ok((x.iter().copied().collect(), smax / smin))
}

/// `G a = f` for `M = N`.
pub fn solve_square(sys: &DiscreteSystem) -> Result<Solution, SolverError> {
    if sys.rows() != sys.cols() {
        return Err(SolverError::DimensionMismatch(format!("{}x{} is not square", sys.rows(), sys.cols())));
    }
    let (x, condition) = square_solve(sys.g.clone(), DVector::from_column_slice(&sys.rhs))?;
    Ok(Solution { residual: sys.residual(&x), warnings: warnings_for(condition), condition, coefficients: x })
}

/// `(B^H W G) a = B^H W f`.
pub fn solve_modified(sys: &DiscreteSystem) -> Result<Solution, SolverError> {
    let b = sys.b.as_ref().ok_or(SolverError::MissingBasisMatrix)?;
    let mut bw = b.adjoint();
    for (j, w) in sys.weights.iter().enumerate() {
        bw.column_mut(j).scale_mut(*w);
    }
    let a = &bw * &sys.g;
    let rhs = &bw * DVector::from_column_slice(&sys.rhs);
    let (x, condition) = square_solve(a, rhs)?;
    Ok(Solution { residual: sys.residual(&x), warnings: warnings_for(condition), condition, coefficients: x })
}

/// Composite Gauss rule for the continuous inner products: each mesh cell
/// (split at corners) is divided into panels halving towards both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousQuadrature {
    pub gauss_order: usize,
    /// Number of halvings towards each end of a cell.
    pub levels: usize,
}

impl Default for ContinuousQuadrature {
    fn default() -> Self {
        Self { gauss_order: 8, levels: 6 }
    }
}

impl ContinuousQuadrature {
    /// Nodes and weights on `[0, 1)`.
    pub fn nodes(&self, space: &SplineSpace, corners: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let rule = GaussLegendre::new(self.gauss_order);
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        for i in 0..space.dim() as i64 {
            let (a, b) = (space.knot(i), space.knot(i + 1));
            let mut breaks = vec![a, b];
            for &c in corners {
                for shift in [-1.0, 0.0, 1.0] {
                    let cc = c + shift;
                    if cc > a + 1e-14 && cc < b - 1e-14 {
                        breaks.push(cc);
                    }
                }
            }
            breaks.sort_by(f64::total_cmp);
            for w in breaks.windows(2) {
                for (pa, pb) in self.graded(w[0], w[1]) {
                    for (t, wt) in rule.mapped(pa, pb) {
                        pts.push(t.rem_euclid(1.0));
                        wts.push(wt);
                    }
                }
            }
        }
        (pts, wts)
    }

    fn graded(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mid = 0.5 * (a + b);
        let mut out = Vec::new();
        let mut h = 0.5 * (b - a);
        let (mut left, mut right) = (mid, mid);
        for _ in 0..self.levels {
            h *= 0.5;
            out.push((left - h, left));
            out.push((right, right + h));
            left -= h;
            right += h;
        }
        out.push((a, left));
        out.push((right, b));
        out
    }
}

fn continuous_system<F>(
    spec: &OperatorSpec,
    curve: &BoundaryCurve,
    space: &SplineSpace,
    data: F,
    method: Method,
    quad: ContinuousQuadrature,
    exec: Execution,
) -> Result<DiscreteSystem, SolverError>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let corners = if spec.is_helmholtz() { curve.corners() } else { Vec::new() };
    let (pts, wts) = quad.nodes(space, &corners);
    assemble_on(spec, curve, space, &pts, &wts, data, method, QuadratureConfig::default(), exec)
}

/// `⟨φ_i, V u⟩ = ⟨φ_i, f⟩` for all `i`.
pub fn solve_galerkin<F>(
    spec: &OperatorSpec,
    curve: &BoundaryCurve,
    space: &SplineSpace,
    data: F,
    quad: ContinuousQuadrature,
    exec: Execution,
) -> Result<Solution, SolverError>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    solve_modified(&continuous_system(spec, curve, space, data, Method::Modified, quad, exec)?)
}

/// `⟨Vφ_i, V u⟩ = ⟨Vφ_i, f⟩` for all `i`.
pub fn solve_bubnov_galerkin<F>(
    spec: &OperatorSpec,
    curve: &BoundaryCurve,
    space: &SplineSpace,
    data: F,
    quad: ContinuousQuadrature,
    exec: Execution,
) -> Result<Solution, SolverError>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    solve_least_squares(&continuous_system(spec, curve, space, data, Method::LeastSquares, quad, exec)?)
}

/// Explicit normal equations `(G^H W G) a = G^H W f`; kept as a reference.
pub fn solve_normal_equations(sys: &DiscreteSystem) -> Result<Vec<Complex64>, SolverError> {
    let mut gw = sys.g.adjoint();
    for (j, w) in sys.weights.iter().enumerate() {
        gw.column_mut(j).scale_mut(*w);
    }
    let a = &gw * &sys.g;
    let rhs = &gw * DVector::from_column_slice(&sys.rhs);
    a.lu().solve(&rhs).map(|x| x.iter().copied().collect()).ok_or(SolverError::SingularSystem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colloc::{make_grid, GridKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_system(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DiscreteSystem {
        let g = DMatrix::from_fn(m, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let w = (0..m).map(|_| rng.gen_range(0.1..2.0)).collect();
        let f = (0..m).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        DiscreteSystem::new(g, None, w, f, Method::LeastSquares).unwrap()
    }

    #[test]
    fn qr_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let sys = random_system(&mut rng, 30, 8);
            let sol = solve_least_squares(&sys).unwrap();
            assert!(sol.condition < 1e6);
            let ne = solve_normal_equations(&sys).unwrap();
            let scale = ne.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in sol.coefficients.iter().zip(&ne) {
                assert!((a - b).norm() < 1e-8 * scale);
            }
        }
    }

    #[test]
    fn least_squares_is_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let sys = random_system(&mut rng, 25, 6);
            let sol = solve_least_squares(&sys).unwrap();
            let base = sol.residual;
            for j in 0..6 {
                for delta in [c(1e-6, 0.0), c(-1e-6, 0.0), c(0.0, 1e-6), c(0.0, -1e-6)] {
                    let mut a = sol.coefficients.clone();
                    a[j] += delta;
                    assert!(sys.residual(&a) >= base - 1e-15 * base.max(1.0));
                }
            }
        }
    }

    #[test]
    fn consistent_systems_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [10, 20, 50] {
            let mut sys = random_system(&mut rng, m, 7);
            let truth: Vec<_> = (0..7).map(|i| c(i as f64, 1.0 - i as f64)).collect();
            let f = &sys.g * DVector::from_column_slice(&truth);
            sys.rhs = f.iter().copied().collect();
            let sol = solve_least_squares(&sys).unwrap();
            for (a, b) in sol.coefficients.iter().zip(&truth) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn square_case_interpolates() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = DMatrix::from_fn(9, 9, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let f: Vec<_> = (0..9).map(|i| c(i as f64, 0.5)).collect();
        let sys = DiscreteSystem::new(g.clone(), None, vec![1.0; 9], f.clone(), Method::SquareCollocation).unwrap();
        let sol = solve_square(&sys).unwrap();
        let ls = solve_least_squares(&sys).unwrap();
        let fnorm = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let r = g * DVector::from_column_slice(&sol.coefficients);
        for (ri, fi) in r.iter().zip(&f) {
            assert!((ri - fi).norm() <= 1e-10 * fnorm);
        }
        assert!(ls.residual <= 1e-12 * fnorm * 3.0);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let g = DMatrix::from_fn(6, 3, |i, j| if j == 2 { c((i * i) as f64, 0.0) } else { c((i * (j + 1)) as f64, 0.0) });
        let sys = DiscreteSystem::new(g, None, vec![1.0; 6], vec![c(1.0, 0.0); 6], Method::LeastSquares).unwrap();
        assert!(matches!(solve_least_squares(&sys), Err(SolverError::RankDeficient { rank: 2, n: 3 })));
    }

    #[test]
    fn invalid_systems_are_rejected() {
        let g = DMatrix::zeros(4, 2);
        assert_eq!(
            DiscreteSystem::new(g.clone(), None, vec![1.0, 0.0, 1.0, 1.0], vec![c(0.0, 0.0); 4], Method::LeastSquares).unwrap_err(),
            SolverError::InvalidWeights
        );
        assert!(DiscreteSystem::new(g.clone(), None, vec![1.0; 4], vec![c(0.0, 0.0); 4], Method::SquareCollocation).is_err());
        assert_eq!(
            DiscreteSystem::new(g, None, vec![1.0; 4], vec![c(0.0, 0.0); 4], Method::Modified).unwrap_err(),
            SolverError::MissingBasisMatrix
        );
    }

    #[test]
    fn identity_operator_assembly() {
        let curve = BoundaryCurve::circle(1.0).unwrap();
        let space = SplineSpace::uniform(1, 8).unwrap();
        let spec = OperatorSpec::pseudo_differential(0.0);
        let grid = make_grid(GridKind::Refined { n: 8, j: 3 }, 8).unwrap();
        let f = |x: f64| c((std::f64::consts::TAU * x).cos(), 0.0);
        let sys = assemble(&spec, &curve, &space, &grid, f, Method::LeastSquares, Execution::Sequential).unwrap();
        assert_eq!(sys.rows(), 24);
        assert!((&sys.g - sys.b.as_ref().unwrap()).norm() < 1e-15);
        let ls = solve_least_squares(&sys).unwrap();
        let md = solve_modified(&sys).unwrap();
        for (a, b) in ls.coefficients.iter().zip(&md.coefficients) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn square_collocation_on_the_circle() {
        let curve = BoundaryCurve::circle(1.0).unwrap();
        let space = SplineSpace::uniform(1, 8).unwrap();
        let spec = OperatorSpec::single_layer(4.2);
        let f = |x: f64| c(x.sin(), 0.0);
        // hats collocated at their peaks: stable
        let knots = make_grid(GridKind::Equispaced { m: 8, shift: 0.0 }, 8).unwrap();
        let sys = assemble(&spec, &curve, &space, &knots, f, Method::SquareCollocation, Execution::Sequential).unwrap();
        assert_eq!(sys.g.shape(), (8, 8));
        assert!(solve_square(&sys).unwrap().condition < 1e3);
        // at cell midpoints the alternating mode is annihilated
        let mids = make_grid(GridKind::Equispaced { m: 8, shift: 1.0 / 16.0 }, 8).unwrap();
        let sys = assemble(&spec, &curve, &space, &mids, f, Method::SquareCollocation, Execution::Sequential).unwrap();
        let alt = DVector::from_fn(8, |i, _| c(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
        assert!((&sys.g * alt).norm() < 1e-12);
        assert_eq!(solve_square(&sys).unwrap_err(), SolverError::SingularSystem);
    }

    #[test]
    fn galerkin_identity_is_l2_projection() {
        let curve = BoundaryCurve::circle(1.0).unwrap();
        let space = SplineSpace::uniform(1, 8).unwrap();
        let spec = OperatorSpec::pseudo_differential(0.0);
        let f = |x: f64| c((std::f64::consts::TAU * x).sin().powi(3) + x * (1.0 - x), 0.0);
        let quad = ContinuousQuadrature::default();
        let gal = solve_galerkin(&spec, &curve, &space, f, quad, Execution::Sequential).unwrap();
        let bg = solve_bubnov_galerkin(&spec, &curve, &space, f, quad, Execution::Sequential).unwrap();
        // L² projection: mass matrix against exact cell integrals
        let mass = DMatrix::from_fn(8, 8, |i, j| {
            let d = (i as i64 - j as i64).rem_euclid(8);
            let h = 1.0 / 8.0;
            c(
                match d {
                    0 => 2.0 * h / 3.0,
                    1 | 7 => h / 6.0,
                    _ => 0.0,
                },
                0.0,
            )
        });
        let rule = GaussLegendre::new(20);
        let load = DVector::from_fn(8, |n, _| {
            let mut s = c(0.0, 0.0);
            for cell in 0..8i64 {
                let (a, b) = (space.knot(cell), space.knot(cell + 1));
                for (t, w) in rule.mapped(a, b) {
                    s += f(t) * space.eval_bspline(n, t) * w;
                }
            }
            s
        });
        let proj = mass.lu().solve(&load).unwrap();
        for j in 0..8 {
            assert!((gal.coefficients[j] - proj[j]).norm() < 1e-12, "{j}");
            assert!((bg.coefficients[j] - proj[j]).norm() < 1e-12, "{j}");
        }
    }

    #[test]
    fn graded_nodes_integrate_polynomials_per_cell() {
        let space = SplineSpace::uniform(2, 5).unwrap();
        let (p, w) = ContinuousQuadrature::default().nodes(&space, &[0.33]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let s: f64 = p.iter().zip(&w).map(|(x, w)| x.powi(5) * w).sum();
        assert!((s - 1.0 / 6.0).abs() < 1e-14);
    }
}
