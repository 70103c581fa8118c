use criterion::{black_box, criterion_group, criterion_main, Criterion};

use kripke_core::enumerate::{compute_tables, EngineCtx, FormulaPool, TableMode};
use kripke_core::krank::{a_n, enumerate_models, kripke_rank, SearchBudget};
use kripke_core::testkit::{random_model, GenParams};
use kripke_core::Signature;

fn countermodel_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("krank");
    group.sample_size(10);
    for n in [1usize, 2] {
        let f = a_n(n);
        let inst = f.clone().or(f.clone().neg());
        group.bench_function(format!("a_{n}-instance/budget-5"), |b| {
            b.iter(|| kripke_rank(black_box(&inst), SearchBudget { max_nodes: 5 }).unwrap())
        });
    }
    group.bench_function("enumerate-2-atoms-4-nodes", |b| {
        b.iter(|| enumerate_models(&["p".into(), "q".into()], black_box(4)).len())
    });
    group.finish();
}

fn bulk_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("bulk-tables");
    group.sample_size(20);
    let sig = Signature::propositional(["p", "q"]).unwrap();
    let pool = FormulaPool::build(&sig, 7, 0, 0);
    let m = random_model(&GenParams { seed: 5, ..GenParams::default() });
    group.bench_function("prop-size-7-forcing", |b| {
        b.iter(|| {
            let ctx = EngineCtx::full(&m, vec![]);
            compute_tables(black_box(&pool), &ctx, TableMode::Force, None).len()
        })
    });
    group.finish();
}

criterion_group!(benches, countermodel_search, bulk_tables);
criterion_main!(benches);
