use nalgebra::DMatrix;
use oversample::basis::{lambda, SplineSpace};
use oversample::colloc::{make_grid, GridKind};
use oversample::geometry::BoundaryCurve;
use oversample::operators::{model_symbol, OperatorSpec};
use oversample::oracle::{exact_error_coeffs, exact_error_coeffs_continuous, ExactError, ModelProblem};
use oversample::par::Execution;
use oversample::solver::{
    assemble, solve_least_squares, solve_normal_equations, solve_square, DiscreteSystem, Method,
};
use oversample::spectral::FourierVector;
use oversample::Complex64;

const BAND: usize = 4096;

fn density(decay: i32) -> FourierVector {
    FourierVector::from_fn(BAND, |m| {
        let mf = m as f64;
        Complex64::from_polar((1.0 + mf.abs()).powi(-decay), 0.7 * mf - 0.05 * mf * mf)
    })
}

/// Solves the model problem on the refined grid and returns `a − û` in the ψ basis.
fn solver_errors(degree: usize, two_alpha: f64, n: usize, j: usize, u: &FourierVector) -> Vec<(i64, Complex64)> {
    let f = u.map_modes(|m| Complex64::new(model_symbol(m, two_alpha), 0.0));
    let spec = OperatorSpec::pseudo_differential(two_alpha);
    let curve = BoundaryCurve::circle(1.0).unwrap();
    let space = SplineSpace::uniform(degree, n).unwrap();
    let grid = make_grid(GridKind::Refined { n, j }, n).unwrap();
    let sys = assemble(&spec, &curve, &space, &grid, |x| f.synthesize(x), Method::LeastSquares, Execution::Sequential)
        .unwrap();
    let sol = solve_least_squares(&sys).unwrap();
    let hat = space.spline_fourier(&sol.coefficients, n).unwrap();
    lambda(n).into_iter().map(|mu| (mu, hat.get(mu) - u.get(mu))).collect()
}

fn assert_matches(errs: &[(i64, Complex64)], exact: &ExactError, tol: f64) {
    let scale = exact.coeffs.iter().map(|c| c.error.norm()).fold(0.0, f64::max);
    for &(mu, e) in errs {
        let predicted = exact.get(mu).unwrap().error;
        let dev = (e - predicted).norm() / predicted.norm().max(scale);
        assert!(dev < tol, "μ = {mu}: solver {e}, oracle {predicted}, deviation {dev:e}");
    }
}

#[test]
fn least_squares_matches_oracle_across_degrees() {
    let u = density(4);
    for degree in [1usize, 2, 3] {
        for two_alpha in [-1.0, 0.0] {
            // even degree with J = 1 and even N loses the μ = N/2 mode
            let cases: &[(usize, usize)] = if degree % 2 == 0 { &[(6, 2), (8, 3), (9, 1)] } else { &[(6, 1), (8, 3), (9, 2)] };
            for &(n, j) in cases {
                let errs = solver_errors(degree, two_alpha, n, j, &u);
                let exact = exact_error_coeffs(&ModelProblem::new(degree, two_alpha, n, j, u.clone()).unwrap());
                assert_matches(&errs, &exact, 1e-7);
            }
        }
    }
}

#[test]
fn psi_basis_solve_agrees_with_spline_basis_solve() {
    let u = density(3);
    let (n, j) = (8, 2);
    let f = u.map_modes(|m| Complex64::new(model_symbol(m, -1.0), 0.0));
    let spec = OperatorSpec::pseudo_differential(-1.0);
    let curve = BoundaryCurve::circle(1.0).unwrap();
    let space = SplineSpace::uniform(1, n).unwrap();
    let grid = make_grid(GridKind::Refined { n, j }, n).unwrap();
    let sys = assemble(&spec, &curve, &space, &grid, |x| f.synthesize(x), Method::LeastSquares, Execution::Sequential)
        .unwrap();
    let mus = lambda(n);
    let psi = DMatrix::from_fn(n, n, |r, c| space.psi_coefficients(mus[c]).unwrap()[r]);
    let psi_sys = DiscreteSystem::new(&sys.g * &psi, None, sys.weights.clone(), sys.rhs.clone(), Method::LeastSquares).unwrap();
    let a_psi = solve_least_squares(&psi_sys).unwrap().coefficients;
    let hat = space.spline_fourier(&solve_least_squares(&sys).unwrap().coefficients, n).unwrap();
    for (k, mu) in mus.iter().enumerate() {
        assert!((a_psi[k] - hat.get(*mu)).norm() < 1e-12);
    }
}

#[test]
fn refined_grids_approach_the_continuous_limit() {
    let u = density(4);
    let n = 8;
    let limit = exact_error_coeffs_continuous(1, -1.0, n, &u);
    let mut previous = f64::INFINITY;
    for j in [1usize, 2, 4, 8] {
        let errs = solver_errors(1, -1.0, n, j, &u);
        let gap = errs.iter().map(|(mu, e)| (e - limit.get(*mu).unwrap().error).norm()).fold(0.0, f64::max);
        assert!(gap < previous, "J = {j}: {gap:e}");
        previous = gap;
    }
    assert!(previous < 1e-4);
}

#[test]
fn oversampling_reduces_the_weak_norm_error() {
    let u = density(4);
    let n = 16;
    let errs: Vec<f64> = [1usize, 4, 16]
        .iter()
        .map(|&j| exact_error_coeffs(&ModelProblem::new(1, -1.0, n, j, u.clone()).unwrap()).full_norm(&u, -4.0))
        .collect();
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
}

#[test]
fn square_and_normal_equation_solves_agree_with_qr() {
    let u = density(4);
    let f = u.map_modes(|m| Complex64::new(model_symbol(m, -1.0), 0.0));
    let spec = OperatorSpec::pseudo_differential(-1.0);
    let curve = BoundaryCurve::circle(1.0).unwrap();
    let space = SplineSpace::uniform(1, 10).unwrap();
    let data = |x: f64| f.synthesize(x);
    let nodal = make_grid(GridKind::Equispaced { m: 10, shift: 0.0 }, 10).unwrap();
    let sys = assemble(&spec, &curve, &space, &nodal, data, Method::SquareCollocation, Execution::Sequential).unwrap();
    let square = solve_square(&sys).unwrap().coefficients;
    let ls = solve_least_squares(&sys).unwrap().coefficients;
    assert!(square.iter().zip(&ls).all(|(a, b)| (a - b).norm() < 1e-11));

    let fine = make_grid(GridKind::Random { m: 57, seed: 2 }, 10).unwrap();
    let sys = assemble(&spec, &curve, &space, &fine, data, Method::LeastSquares, Execution::Sequential).unwrap();
    let qr = solve_least_squares(&sys).unwrap().coefficients;
    let normal = solve_normal_equations(&sys).unwrap();
    assert!(qr.iter().zip(&normal).all(|(a, b)| (a - b).norm() < 1e-9));
}

#[test]
fn parallel_assembly_is_bitwise_sequential() {
    let spec = OperatorSpec::single_layer(3.0);
    let curve = BoundaryCurve::kite();
    let space = SplineSpace::uniform(2, 12).unwrap();
    let grid = make_grid(GridKind::Offset { n: 12, m: 40, delta: 0.3 }, 12).unwrap();
    let data = |t: f64| Complex64::from_polar(1.0, t);
    let a = assemble(&spec, &curve, &space, &grid, data, Method::LeastSquares, Execution::Sequential).unwrap();
    let b = assemble(&spec, &curve, &space, &grid, data, Method::LeastSquares, Execution::Parallel).unwrap();
    assert_eq!(a.g, b.g);
    assert_eq!(a.rhs, b.rhs);
}
