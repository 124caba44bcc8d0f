use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use mdpc::{forward_derivative_line, make_coefficients, md_forward_derivative};
use mdpc_bench::{rotation_stepper, sample_square};

fn line_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("line_sweep");
    for &n in &[256usize, 1024] {
        let u: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).sin())
            .collect();
        group.throughput(Throughput::Elements(n as u64));
        for order in [4u32, 6] {
            let coeffs = make_coefficients(order).unwrap();
            group.bench_with_input(
                BenchmarkId::new(format!("order{order}"), n),
                &u,
                |b, u| b.iter(|| forward_derivative_line(u, 1.0, &coeffs).unwrap()),
            );
        }
    }
    group.finish();
}

fn field_derivative(c: &mut Criterion) {
    let mut group = c.benchmark_group("field_derivative");
    let (grid, field) = sample_square(128).unwrap();
    group.throughput(Throughput::Elements(grid.total_points() as u64));
    let coeffs = make_coefficients(4).unwrap();
    for beta in [0.0f64, 0.24] {
        group.bench_with_input(
            BenchmarkId::new("order4", format!("beta{beta}")),
            &field,
            |b, f| b.iter(|| md_forward_derivative(f, 0, &coeffs, beta).unwrap()),
        );
    }
    group.finish();
}

fn full_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("full_step");
    for (label, beta) in [("pc4", 0.0f64), ("mpc4", 0.24)] {
        let mut stepper = rotation_stepper(96, 4, beta).unwrap();
        group.throughput(Throughput::Elements((96 * 96) as u64));
        group.bench_function(label, |b| b.iter(|| stepper.step().unwrap()));
    }
    group.finish();
}

criterion_group!(benches, line_sweep, field_derivative, full_step);
criterion_main!(benches);
