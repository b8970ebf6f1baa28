use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use herding::eval::{run_class_pipeline, PipelineSchedule};
use herding::synthetic::{prototype_dataset, stripe_dataset, StripePattern};
use herding::{ChainConfig, Execution, Herder, RbmModel, Variant};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn herding_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("herding_step");
    for &(n_visible, n_hidden, n_cases) in &[(16, 8, 64), (144, 50, 700)] {
        let model = RbmModel::new(n_visible, n_hidden).unwrap();
        let data = prototype_dataset(n_cases, n_visible, 4, 0.1, 7).unwrap();
        for (name, exec) in MODES {
            let herder = Herder::new(&model, data.cases(), ChainConfig::new(Variant::Safe).with_execution(exec)).unwrap();
            let mut state = herder.init(None).unwrap();
            group.bench_with_input(
                BenchmarkId::new(name, format!("{n_visible}x{n_hidden}/N={n_cases}")),
                &(),
                |b, _| b.iter(|| herder.step(black_box(&mut state))),
            );
        }
    }
    group.finish();
}

fn class_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("class_pipeline");
    group.sample_size(10);
    let model = RbmModel::new(144, 20).unwrap();
    let train = stripe_dataset(StripePattern::Rows, 100, 12, 0.1, 1).unwrap();
    let eval = stripe_dataset(StripePattern::Columns, 300, 12, 0.1, 2).unwrap();
    let schedule = PipelineSchedule::new(20, 10).unwrap();
    for (name, exec) in MODES {
        let chain = ChainConfig::new(Variant::Safe)
            .with_frozen(model.hidden_bias_range())
            .with_execution(exec);
        group.bench_function(name, |b| {
            b.iter(|| run_class_pipeline(&model, train.cases(), eval.cases(), chain.clone(), schedule).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, herding_step, class_pipeline);
criterion_main!(benches);
