use std::hint::black_box;

use bimodal_bench::protocol;
use bimodal_core::imperfections::{JitterConfig, JitterModel};
use bimodal_core::nonlocality::sasa_expectation;
use bimodal_core::opensys::{dissipative_run, DecayRates};
use bimodal_core::ProtocolName;
use criterion::{BenchmarkId, Criterion, criterion_group, criterion_main};

fn dissipative(c: &mut Criterion) {
    let mut group = c.benchmark_group("dissipative_run");
    group.sample_size(10);
    for name in [ProtocolName::BellModes, ProtocolName::Ghz3] {
        let spec = protocol(name);
        let rates = match spec.layout().unwrap().has_modes() {
            true => DecayRates::new(0.1, 0.1, 0.1).unwrap(),
            false => DecayRates::qubit_only(0.1).unwrap(),
        };
        group.bench_function(BenchmarkId::from_parameter(name.as_str()), |b| {
            b.iter(|| dissipative_run(black_box(&spec), &rates).unwrap())
        });
    }
    group.finish();
}

fn jitter(c: &mut Criterion) {
    let mut group = c.benchmark_group("jitter_monte_carlo");
    group.sample_size(10);
    let cfg = JitterConfig {
        sigma_fraction: 0.05,
        reps: 100,
        ..JitterConfig::default()
    };
    for gamma in [0.0, 0.3] {
        let spec = protocol(ProtocolName::Cluster4);
        let model = JitterModel::new(&spec, gamma).unwrap();
        group.bench_function(BenchmarkId::new("cluster4_sasa_100_reps", gamma), |b| {
            b.iter(|| model.monte_carlo(&cfg, |rho| sasa_expectation(rho).unwrap()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dissipative, jitter);
criterion_main!(benches);
