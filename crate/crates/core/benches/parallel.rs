//! Sequential vs. parallel throughput of the numerical kernels.
//!
//! Both execution modes produce bit-identical results (asserted in the
//! unit tests); this suite measures what the `parallel` feature buys on
//! the kernels that dominate an evolution run.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gqmech_core::exec::ExecMode;
use gqmech_core::grid::{apply_operator, expectation, gaussian_packet, norm_sq, GridSpec};
use gqmech_core::parse::poly_parse;
use gqmech_core::poisson::PhaseFunction;
use gqmech_core::quantize::quantize_quadratic;
use gqmech_core::evolve::CrankNicolson;

fn modes() -> Vec<(&'static str, ExecMode)> {
    vec![
        ("sequential", ExecMode::Sequential),
        ("parallel", ExecMode::Parallel),
    ]
}

fn packet_2d(n: usize, mode: ExecMode) -> gqmech_core::grid::GridState {
    let spec = GridSpec::new(vec![-10.0, -10.0], vec![10.0, 10.0], vec![n, n]).unwrap();
    gaussian_packet(&spec, &[1.0, -1.0], &[2.0, 0.5], &[0.9, 0.9], 0.0, mode).unwrap()
}

fn bench_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("norm_sq_2d_512");
    let rho = packet_2d(512, ExecMode::Sequential);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| norm_sq(&rho, mode))
        });
    }
    group.finish();
}

fn bench_apply_operator(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_hamiltonian_2d_512");
    let h = quantize_quadratic(
        &PhaseFunction::on_vq(
            poly_parse("0.5*p1^2 + 0.5*p2^2 + 0.5*q1^2 + 0.5*q2^2", 2).unwrap(),
        )
        .unwrap(),
    )
    .unwrap();
    let rho = packet_2d(512, ExecMode::Sequential);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| apply_operator(&h, &rho, mode).unwrap())
        });
    }
    group.finish();
}

fn bench_expectation(c: &mut Criterion) {
    let mut group = c.benchmark_group("expectation_2d_512");
    let q = quantize_quadratic(
        &PhaseFunction::on_vq(poly_parse("q1", 2).unwrap()).unwrap(),
    )
    .unwrap();
    let rho = packet_2d(512, ExecMode::Sequential);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| expectation(&q, &rho, mode).unwrap())
        });
    }
    group.finish();
}

fn bench_cn_step_1d(c: &mut Criterion) {
    let mut group = c.benchmark_group("cn_step_1d_8192");
    let h = PhaseFunction::on_vq(poly_parse("0.5*p1^2 + 0.5*q1^2", 1).unwrap()).unwrap();
    let spec = GridSpec::new(vec![-20.0], vec![20.0], vec![8192]).unwrap();
    let rho = gaussian_packet(&spec, &[1.0], &[0.0], &[1.0], 0.0, ExecMode::Sequential).unwrap();
    for (name, mode) in modes() {
        let cn = CrankNicolson::new(&h, 1e-3, mode).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, _| {
            b.iter(|| cn.step(&rho).unwrap())
        });
    }
    group.finish();
}

fn bench_cn_step_2d(c: &mut Criterion) {
    let mut group = c.benchmark_group("cn_step_2d_192");
    group.sample_size(10);
    let h = PhaseFunction::on_vq(
        poly_parse("0.5*p1^2 + 0.5*p2^2 + 0.5*q1^2 + 0.5*q2^2", 2).unwrap(),
    )
    .unwrap();
    let spec = GridSpec::new(vec![-8.0, -8.0], vec![8.0, 8.0], vec![192, 192]).unwrap();
    let rho =
        gaussian_packet(&spec, &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0], 0.0, ExecMode::Sequential)
            .unwrap();
    for (name, mode) in modes() {
        let cn = CrankNicolson::new(&h, 1e-3, mode).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, _| {
            b.iter(|| cn.step(&rho).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_norm,
    bench_apply_operator,
    bench_expectation,
    bench_cn_step_1d,
    bench_cn_step_2d
);
criterion_main!(benches);
