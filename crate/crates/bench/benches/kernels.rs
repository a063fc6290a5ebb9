use std::hint::black_box;

use bimodal_bench::{dissipative, primed, protocol};
use bimodal_core::numkit::{matrix_exponential, propagate_density, propagator, Superoperator};
use bimodal_core::{ProtocolName, C64};
use criterion::{BenchmarkId, Criterion, criterion_group, criterion_main};

fn expm(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm");
    for n in [2, 3, 4] {
        let spec = primed(n);
        let h = spec.hamiltonian().unwrap();
        let dim = h.nrows();
        group.bench_with_input(BenchmarkId::new("pade13", dim), &h, |b, h| {
            b.iter(|| matrix_exponential(black_box(&(h * C64::new(0.0, -3.0)))).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("propagator", dim), &h, |b, h| {
            b.iter(|| propagator(black_box(h), 3.0).unwrap())
        });
    }
    group.finish();
}

fn lindblad(c: &mut Criterion) {
    let mut group = c.benchmark_group("lindblad");
    for name in [ProtocolName::BellModes, ProtocolName::Ghz3, ProtocolName::Cluster4] {
        let spec = protocol(name);
        let (l, rho) = dissipative(&spec, 0.1).unwrap();
        group.bench_with_input(BenchmarkId::new("apply", name.as_str()), &rho, |b, rho| {
            b.iter(|| l.apply(black_box(rho)))
        });
        group.bench_with_input(BenchmarkId::new("propagate", name.as_str()), &rho, |b, rho| {
            b.iter(|| propagate_density(&l, black_box(rho), spec.ideal_time).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, expm, lindblad);
criterion_main!(benches);
