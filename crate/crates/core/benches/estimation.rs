use criterion::{criterion_group, criterion_main, Criterion};
use plwb_core::sim::StopRule;
use plwb_core::smc::{run_batch, QueryKind};

fn load_vending() -> plwb_core::Model {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../models/vending_price10.plm"
    ))
    .unwrap();
    plwb_core::parse_model(&text, "vending_price10.plm").unwrap()
}

fn bench_batches(c: &mut Criterion) {
    let model = load_vending();
    let query = &model.analyses[0];
    let QueryKind::When(cond) = &query.kind else {
        panic!("expected a when query");
    };
    let rule = StopRule::Until { cond, cap: 10_000 };

    let mut group = c.benchmark_group("batch_200_sims");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| run_batch(&model, &rule, 0, 200, 42, 1).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| run_batch(&model, &rule, 0, 200, 42, num_threads()).unwrap())
    });
    group.finish();
}

#[cfg(feature = "parallel")]
fn num_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(4)
}

criterion_group!(benches, bench_batches);
criterion_main!(benches);
