//! Sequential against rayon execution of independent repetitions. Without the `parallel`
//! feature only the sequential variants are measured.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qpde::ansatz::{AnsatzSpec, Family};
use qpde::exec::{derive_seed, map_sequential};
use qpde::noise::{NoiseModel, NoisyDistributions};
use qpde::optimize::{minimize, Method, OptimizerConfig, VariationalEnergy};
use qpde::problems::{build_hamiltonian, Hamiltonian, Problem};

const REPS: usize = 16;

fn adam_run(h: &Hamiltonian, rep: usize) -> f64 {
    let spec = AnsatzSpec::new(Family::Zgr, 3, true);
    let seed = derive_seed(7, &[rep as u64]);
    let mut cfg = OptimizerConfig::for_method(Method::Adam);
    cfg.max_iterations = 100;
    let mut obj = VariationalEnergy::new(spec, h, 1024, derive_seed(seed, &[1])).unwrap();
    let theta0 = cfg.initial_point(spec.parameter_count(), derive_seed(seed, &[0]));
    minimize(&mut obj, &theta0, &cfg, derive_seed(seed, &[2]))
        .unwrap()
        .energy_opt
}

fn noisy_distribution(rep: usize) -> f64 {
    let spec = AnsatzSpec::new(Family::Ry { depth: 1 }, 4, true);
    let theta: Vec<f64> = (0..spec.parameter_count())
        .map(|k| 0.1 * (k + rep) as f64)
        .collect();
    let circuit = spec.build(&theta).unwrap();
    let dist = NoisyDistributions::compute(&circuit, &NoiseModel::santiago_like()).unwrap();
    dist.position[0]
}

fn bench_repetitions(c: &mut Criterion) {
    let h = build_hamiltonian(&Problem::harmonic_oscillator(), 3).unwrap();
    let mut group = c.benchmark_group("adam_sampled_runs");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("sequential", REPS), |b| {
        b.iter(|| map_sequential(REPS, |r| adam_run(&h, r)))
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("parallel", REPS), |b| {
        b.iter(|| qpde::exec::map_parallel(REPS, |r| adam_run(&h, r)))
    });
    group.finish();

    let mut group = c.benchmark_group("density_matrix_circuits");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("sequential", REPS), |b| {
        b.iter(|| map_sequential(REPS, noisy_distribution))
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("parallel", REPS), |b| {
        b.iter(|| qpde::exec::map_parallel(REPS, noisy_distribution))
    });
    group.finish();
}

criterion_group!(benches, bench_repetitions);
criterion_main!(benches);
