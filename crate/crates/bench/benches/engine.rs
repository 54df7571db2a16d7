use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::Rng;
use std::hint::black_box;

use microsim_bench::synthetic_state;
use microsim_core::dcm::{project_dcm, CohortLedger, DcmRates};
use microsim_core::engine::{run_year, EngineOptions};
use microsim_core::genesis::{gen_synthetic_base, initialise};
use microsim_core::rng::{rng_stream, StreamTag};
use microsim_core::PersonId;

fn year(c: &mut Criterion) {
    let state = synthetic_state(3, 20_000, 60);
    let opts = EngineOptions {
        audit: false,
        ..Default::default()
    };
    c.bench_function("run_year_20k", |b| {
        b.iter_batched(
            || state.clone(),
            |mut s| run_year(&mut s, &opts).expect("year runs"),
            BatchSize::LargeInput,
        )
    });
}

fn genesis(c: &mut Criterion) {
    let state = synthetic_state(3, 20_000, 60);
    let base = gen_synthetic_base(3, &state.geography, 20_000);
    c.bench_function("genesis_20k", |b| {
        b.iter_batched(
            || base.clone(),
            |mut p| initialise(&mut p, &state.geography, &state.rates, 3).expect("genesis"),
            BatchSize::LargeInput,
        )
    });
}

fn dcm(c: &mut Criterion) {
    let s = synthetic_state(3, 20_000, 60);
    let rates = DcmRates::matched(&s.rates, &s.population, &s.geography, &s.scenario, s.migration_scale);
    let base = CohortLedger::from_population(&s.population, s.year);
    c.bench_function("dcm_35_years", |b| b.iter(|| project_dcm(black_box(&base), &rates, 35)));
}

fn streams(c: &mut Criterion) {
    c.bench_function("rng_stream_key_and_draw", |b| {
        let mut id = 0u64;
        b.iter(|| {
            id += 1;
            rng_stream(7, PersonId(id), 2030, StreamTag::Mortality).random::<f64>()
        })
    });
}

criterion_group!(benches, year, genesis, dcm, streams);
criterion_main!(benches);
