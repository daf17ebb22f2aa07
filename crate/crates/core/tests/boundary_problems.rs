use std::f64::consts::TAU;

use oversample::basis::SplineSpace;
use oversample::colloc::{make_grid, GridKind};
use oversample::geometry::{BoundaryCurve, Point};
use oversample::operators::{field_eval, OperatorSpec, Side};
use oversample::oracle::{circle_field, circle_reference, manufactured_exterior_solution, plane_wave_coefficients};
use oversample::par::Execution;
use oversample::solver::{assemble, solve_least_squares, Method};
use oversample::Complex64;

fn solve(
    spec: &OperatorSpec,
    curve: &BoundaryCurve,
    degree: usize,
    n: usize,
    grid: GridKind,
    data: impl Fn(f64) -> Complex64 + Sync,
) -> (SplineSpace, Vec<Complex64>) {
    let space = SplineSpace::uniform(degree, n).unwrap();
    let grid = make_grid(grid, n).unwrap();
    let sys = assemble(spec, curve, &space, &grid, data, Method::LeastSquares, Execution::Parallel).unwrap();
    let sol = solve_least_squares(&sys).unwrap();
    (space, sol.coefficients)
}

#[test]
fn circle_single_layer_matches_the_series_solution() {
    let k = 4.2;
    let spec = OperatorSpec::single_layer(k);
    let curve = BoundaryCurve::circle(1.0).unwrap();
    let reference = circle_reference(&spec, 1.0, &plane_wave_coefficients(k, 1.0, 0.0, 80), 1e-12).unwrap();
    let data = |t: f64| Complex64::from_polar(1.0, k * (TAU * t).cos());
    let x = Point::new(2.0, 0.0);
    let exact = circle_field(&spec, 1.0, &reference, &x);
    let mut previous = f64::INFINITY;
    for n in [16usize, 32] {
        let (space, a) = solve(&spec, &curve, 1, n, GridKind::Equispaced { m: 4 * n, shift: 0.0 }, data);
        let err = (field_eval(&spec, &curve, &space, &a, &x).unwrap() - exact).norm();
        assert!(err < previous / 8.0, "N = {n}: {err:e}");
        previous = err;
    }
    assert!(previous < 1e-4);
}

#[test]
fn kite_double_layer_reproduces_an_interior_plane_wave() {
    let k = 5.0;
    let spec = OperatorSpec::double_layer(k, Side::Interior);
    let curve = BoundaryCurve::kite();
    let data = |t: f64| {
        let z = curve.parametrize(t);
        Complex64::from_polar(1.0, k * z.x)
    };
    let x = Point::new(0.1, 0.2);
    let n = 64;
    let (space, a) = solve(&spec, &curve, 2, n, GridKind::Offset { n, m: 3 * n, delta: 0.5 }, data);
    let err = (field_eval(&spec, &curve, &space, &a, &x).unwrap() - Complex64::from_polar(1.0, k * x.x)).norm();
    assert!(err < 1e-3, "{err:e}");
}

#[test]
fn pentagon_recovers_a_point_source_field() {
    let k = 10.0;
    let spec = OperatorSpec::single_layer(k);
    let curve = BoundaryCurve::reference_pentagon();
    let exact = manufactured_exterior_solution(&curve, k, Point::new(0.1, 0.2)).unwrap();
    let x = Point::new(3.0, 0.5);
    let n = 64;
    let m = (n as f64).powf(1.5).ceil() as usize;
    let (space, a) = solve(&spec, &curve, 1, n, GridKind::Offset { n, m, delta: 0.25 }, |t| exact.data(&curve, t));
    let err = (field_eval(&spec, &curve, &space, &a, &x).unwrap() - exact.field(&x)).norm();
    assert!(err < 1e-3, "{err:e}");
}

#[test]
fn pentagon_geometry() {
    let curve = BoundaryCurve::reference_pentagon();
    let side = 2.0 * (2.0 * std::f64::consts::PI / 5.0).sin();
    assert!((curve.perimeter() - 5.0 * side).abs() < 1e-12);
    assert_eq!(curve.corners().len(), 5);
    assert!(curve.contains(&Point::new(0.1, 0.2)));
    assert!(!curve.contains(&Point::new(3.0, 0.5)));
    let first = curve.parametrize(0.0);
    assert!(first.y.abs() < 1e-14 && first.x > 0.0);
}
