use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lineup_core::catalog::{Catalog, PersonRecord};
use lineup_core::fairness::{simulate_members, MockDescription};
use lineup_core::recommenders::{build_cb_index, top_k_with, DescriptorMatrix};
use lineup_core::{Execution, SimilarityIndex};
use rand::seq::IndexedRandom;
use rand::Rng;

const PERSONS: usize = 5000;
const DIM: usize = 2622;

fn catalog(rng: &mut impl Rng) -> Catalog {
    let vocab: Vec<String> = (0..441).map(|i| format!("f{i}")).collect();
    let nats = ["Czech", "Vietnamese", "Ukrainian", "Slovak", "Romanian"];
    Catalog::from_records((0..PERSONS).map(|i| {
        let n = rng.random_range(1..8);
        PersonRecord::new(
            format!("P{i:05}"),
            Some(nats.choose(rng).unwrap().to_string()),
            Some(rng.random_range(15..80)),
            vocab.choose_multiple(rng, n).cloned(),
            "",
        )
        .unwrap()
    }))
    .unwrap()
}

fn descriptors(catalog: &Catalog, rng: &mut impl Rng) -> DescriptorMatrix {
    let rows = catalog
        .ids()
        .map(|id| {
            (
                id.to_string(),
                (0..DIM).map(|_| rng.random::<f32>()).collect(),
            )
        })
        .collect::<Vec<_>>();
    DescriptorMatrix::from_rows(DIM, rows, Some(catalog))
        .unwrap()
        .0
}

fn modes() -> Vec<Execution> {
    if Execution::parallel_available() {
        vec![Execution::Sequential, Execution::Parallel]
    } else {
        vec![Execution::Sequential]
    }
}

fn bench_top_k(c: &mut Criterion) {
    let mut rng = lineup_core::rng::seeded(1);
    let catalog = catalog(&mut rng);
    let cb = build_cb_index(&catalog);
    let visual = descriptors(&catalog, &mut rng);
    let suspect = "P02500";

    let mut group = c.benchmark_group("top_k");
    group.sample_size(20);
    for exec in modes() {
        for (name, index) in [("cb", &cb as &dyn SimilarityIndex), ("visual", &visual)] {
            group.bench_with_input(
                BenchmarkId::new(name, format!("{exec:?}")),
                &exec,
                |b, &exec| b.iter(|| top_k_with(index, black_box(suspect), 20, exec).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_fairness(c: &mut Criterion) {
    let mut rng = lineup_core::rng::seeded(2);
    let catalog = catalog(&mut rng);
    let members: Vec<&PersonRecord> = catalog.persons().take(6).collect();
    let desc = MockDescription::new(members[0].tokens().into_iter().take(3)).unwrap();

    let mut group = c.benchmark_group("fairness_100k_witnesses");
    for exec in modes() {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| {
                b.iter(|| {
                    simulate_members(&members[0].person_id, &members, &desc, 100_000, 7, exec)
                        .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_top_k, bench_fairness);
criterion_main!(benches);
