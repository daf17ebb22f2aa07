use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oversample::basis::SplineSpace;
use oversample::colloc::{make_grid, GridKind};
use oversample::geometry::BoundaryCurve;
use oversample::operators::{OperatorSpec, Side};
use oversample::par::Execution;
use oversample::solver::{assemble, Method};
use oversample::Complex64;

fn assembly(c: &mut Criterion) {
    let curve = BoundaryCurve::kite();
    let spec = OperatorSpec::double_layer(5.0, Side::Interior);
    let mut group = c.benchmark_group("kite_double_layer_assembly");
    group.sample_size(10);
    for n in [16usize, 32] {
        let space = SplineSpace::uniform(1, n).unwrap();
        let grid = make_grid(GridKind::Offset { n, m: 4 * n, delta: 0.5 }, n).unwrap();
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| {
                    assemble(&spec, &curve, &space, &grid, |t| Complex64::from_polar(1.0, t), Method::LeastSquares, exec)
                        .unwrap()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, assembly);
criterion_main!(benches);
