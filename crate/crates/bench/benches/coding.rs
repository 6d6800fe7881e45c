use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use infospec_core::coding::{
    exhaustive_code_oracle, feinstein_bound, random_code_ensemble_error, EnsembleMode, EnsembleOptions,
};
use infospec_core::models::{ChannelModel, InputCoupling, JointModel, SourceModel};
use infospec_core::spectra::{exact_joint_law, ExactOptions};

fn model() -> JointModel {
    JointModel::new(
        SourceModel::iid(vec![0.6, 0.3, 0.1]).unwrap(),
        InputCoupling::independent(vec![0.5, 0.5]).unwrap(),
        ChannelModel::bsc(0.1).unwrap(),
    )
}

fn ensemble(c: &mut Criterion) {
    let mut g = c.benchmark_group("ensemble");
    let m = model();
    for n in [1, 2] {
        let law = m.resolve(n).unwrap();
        // Enumeration over 4^9 codebooks at n = 2 exceeds the default cap.
        let modes: &[(&str, EnsembleMode)] = if n == 1 {
            &[("enumeration", EnsembleMode::ExactEnumeration), ("factorized", EnsembleMode::ExactFactorized)]
        } else {
            &[("factorized", EnsembleMode::ExactFactorized)]
        };
        for &(name, mode) in modes {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| random_code_ensemble_error(&law, 0.3, mode, &EnsembleOptions::default()).unwrap())
            });
        }
    }
    let law = m.resolve(4).unwrap();
    g.sample_size(10);
    g.bench_function("monte_carlo_n4_1e3", |b| {
        b.iter(|| {
            random_code_ensemble_error(
                &law,
                0.3,
                EnsembleMode::MonteCarlo { budget: 1000, seed: 3 },
                &EnsembleOptions::default(),
            )
            .unwrap()
        })
    });
    g.finish();
}

fn bounds(c: &mut Criterion) {
    let law = model().resolve(8).unwrap();
    let joint = exact_joint_law(&law, &ExactOptions::default()).unwrap();
    c.bench_function("feinstein_n8", |b| b.iter(|| feinstein_bound(&joint, 0.2)));
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("bern_bsc_n2", |b| {
        b.iter(|| {
            exhaustive_code_oracle(
                &SourceModel::bernoulli(0.3).unwrap(),
                &ChannelModel::bsc(0.1).unwrap(),
                2,
                &[0.1, 0.3],
                1e6,
                1e-10,
                None,
            )
            .unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, ensemble, bounds);
criterion_main!(benches);
