use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use prolate_core::disk::{DiskBasis, ScaledDiskBasis};
use prolate_core::forward::{synthesize_born, ContrastConfig, ContrastField, ShapeSpec};
use prolate_core::geometry::{build_polar_quadrature, Geometry};
use prolate_core::numerics::bessel_j_all;
use prolate_core::symset::compute_symset_basis;
use std::f64::consts::PI;

fn bessel(c: &mut Criterion) {
    c.bench_function("bessel_j_all m=60 x=40", |b| b.iter(|| bessel_j_all(60, black_box(40.0))));
}

fn disk_basis(c: &mut Criterion) {
    let mut group = c.benchmark_group("disk_basis");
    group.sample_size(20);
    for bandwidth in [5.0, 20.0] {
        group.bench_with_input(BenchmarkId::from_parameter(bandwidth), &bandwidth, |b, &bw| {
            b.iter(|| DiskBasis::compute(bw, 16, 16).unwrap())
        });
    }
    group.finish();
}

fn nystrom(c: &mut Criterion) {
    let mut group = c.benchmark_group("symset_nystrom");
    group.sample_size(10);
    let g = Geometry::limited_aperture(3.0 * PI / 4.0).unwrap();
    for res in [60, 100] {
        let rule = build_polar_quadrature(&g, res).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(rule.len()), &rule, |b, rule| {
            b.iter(|| compute_symset_basis(5.0, &g, rule, 40).unwrap())
        });
    }
    group.finish();
}

fn synthesize(c: &mut Criterion) {
    let basis = ScaledDiskBasis::with_resolution(DiskBasis::compute(5.0, 6, 4).unwrap(), 1.0, 120).unwrap();
    let cfg = ContrastConfig {
        shapes: vec![ShapeSpec::Disk { center: [0.3, 0.0], radius: 0.8, value: 1.0 }],
        grid: None,
    };
    let field = ContrastField::from_config_with_resolution(&cfg, 200).unwrap();
    let mut group = c.benchmark_group("synthesize_born");
    group.sample_size(10);
    group.bench_function("disk indicator", |b| b.iter(|| synthesize_born(&field, basis.kernel_scale(), &basis.quad).unwrap()));
    group.finish();
}

criterion_group!(benches, bessel, disk_basis, nystrom, synthesize);
criterion_main!(benches);
