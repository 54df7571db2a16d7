mod common;

use std::fs;

use microsim_core::engine::{self, checkpoint, read_checkpoint_header, restore, run, run_year, EngineOptions, SimState, MODULE_ORDER};
use microsim_core::genesis::{gen_synthetic_base, initialise};
use microsim_core::rates::{gen_synthetic_geography, gen_synthetic_rates, IntlScenario};
use microsim_core::{validate, Error, MAX_AGE};

use common::{still_rates, synthetic_state};

fn opts() -> EngineOptions {
    EngineOptions {
        log_events: true,
        ..EngineOptions::default()
    }
}

fn still_state(seed: u64, size: usize) -> SimState {
    let geo = gen_synthetic_geography(seed, 20, size as u64);
    let rates = still_rates(gen_synthetic_rates(seed, &geo));
    let mut pop = gen_synthetic_base(seed, &geo, size);
    initialise(&mut pop, &geo, &rates, seed).unwrap();
    let mut scenario = rates.scenario.clone();
    scenario.master_seed = seed;
    scenario.migration_scale = Some(0.0);
    SimState::new(pop, geo, rates, scenario).unwrap()
}

#[test]
fn zero_years_leaves_state_untouched() {
    let mut state = synthetic_state(3, 2_000, 10);
    let before = state.clone();
    let out = run(&mut state, 0, &opts(), true).unwrap();
    assert!(out.reports.is_empty() && out.snapshots.is_empty());
    assert_eq!(state, before);
}

#[test]
fn null_dynamics_only_age_people() {
    let mut state = still_state(5, 3_000);
    let before = state.population.clone();
    let (report, _) = run_year(&mut state, &opts()).unwrap();
    assert_eq!(report.counts.deaths + report.counts.births, 0);
    assert_eq!(report.counts.intl_immigrants + report.counts.intl_emigrants, 0);
    assert_eq!(report.counts.internal_moves + report.counts.marriages + report.counts.separations, 0);
    assert_eq!(state.population.len(), before.len());
    for p in before.iter() {
        let q = state.population.get(p.id).expect("nobody leaves");
        assert_eq!(q.age, (p.age + 1).min(MAX_AGE));
        assert_eq!(q.ed_id, p.ed_id);
        assert_eq!(q.marital_status, p.marital_status);
        assert_eq!(q.spouse, p.spouse);
        assert_eq!(q.children, p.children);
    }
}

#[test]
fn modules_run_in_declared_order() {
    let mut state = synthetic_state(8, 2_000, 10);
    let (report, _) = run_year(&mut state, &opts()).unwrap();
    assert_eq!(report.modules, MODULE_ORDER.to_vec());
    assert_eq!(report.modules.last().map(String::as_str), Some("employment"));
    assert_eq!(report.year, 2023);
    assert_eq!(state.year, 2023);
}

#[test]
fn every_year_balances_and_validates() {
    let mut state = synthetic_state(13, 5_000, 20);
    let out = run(&mut state, 10, &opts(), true).unwrap();
    for r in &out.reports {
        assert!(r.accounting_ok);
        assert_eq!(r.expected_after(), r.population_after as i64);
    }
    for (year, pop) in &out.snapshots {
        assert!(validate(pop, &state.geography).is_empty(), "violations in {year}");
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let base = synthetic_state(21, 4_000, 12);
    let mut serial = base.clone();
    let mut parallel = base;
    let a = run(&mut serial, 4, &opts(), false).unwrap();
    let b = run(
        &mut parallel,
        4,
        &EngineOptions {
            workers: 4,
            ..opts()
        },
        false,
    )
    .unwrap();
    assert_eq!(a.log, b.log);
    assert_eq!(a.reports, b.reports);
    assert_eq!(serial.population, parallel.population);
}

#[test]
fn same_seed_same_run_other_seed_differs() {
    let mut x = synthetic_state(34, 3_000, 10);
    let mut y = synthetic_state(34, 3_000, 10);
    let mut z = synthetic_state(34, 3_000, 10);
    z.master_seed = 35;
    let a = run(&mut x, 3, &opts(), false).unwrap();
    let b = run(&mut y, 3, &opts(), false).unwrap();
    let c = run(&mut z, 3, &opts(), false).unwrap();
    assert_eq!(a.log, b.log);
    assert_ne!(a.log.events, c.log.events);
}

#[test]
fn checkpoint_resume_matches_straight_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.ckpt");
    let mut straight = synthetic_state(55, 3_000, 10);
    let mut split = straight.clone();

    let full = run(&mut straight, 6, &opts(), false).unwrap();
    let first = run(&mut split, 3, &opts(), false).unwrap();
    checkpoint(&split, &path).unwrap();
    let mut resumed = restore(&path).unwrap();
    assert_eq!(resumed, split);
    let rest = run(&mut resumed, 3, &opts(), false).unwrap();

    assert_eq!(resumed.population, straight.population);
    let mut joined = first.log;
    joined.append(rest.log);
    assert_eq!(joined, full.log);
}

#[test]
fn checkpoint_header_describes_the_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.ckpt");
    let mut state = synthetic_state(56, 1_500, 6);
    state.scenario.intl_scenario = IntlScenario::M3;
    run_year(&mut state, &opts()).unwrap();
    checkpoint(&state, &path).unwrap();
    let header = read_checkpoint_header(&path).unwrap();
    assert_eq!(header.scenario, IntlScenario::M3);
    assert_eq!(header.year, 2023);
    assert_eq!(header.master_seed, 56);
    assert_eq!(header.format_version, engine::FORMAT_VERSION);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(engine::CHECKPOINT_MAGIC));
}

#[test]
fn damaged_checkpoints_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.ckpt");
    let state = synthetic_state(57, 1_000, 5);
    checkpoint(&state, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();

    let truncated = dir.path().join("truncated.ckpt");
    fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert!(matches!(restore(&truncated), Err(Error::Checkpoint(_))));

    let tampered = dir.path().join("tampered.ckpt");
    fs::write(&tampered, text.replacen("\"age\":", "\"age\":1", 1)).unwrap();
    assert!(matches!(restore(&tampered), Err(Error::Checkpoint(_))));

    let foreign = dir.path().join("foreign.ckpt");
    fs::write(&foreign, "year,sex\n").unwrap();
    assert!(matches!(restore(&foreign), Err(Error::Checkpoint(_))));

    assert!(matches!(restore(&dir.path().join("absent.ckpt")), Err(Error::MissingFile(_))));
}

#[test]
fn failed_year_rolls_back() {
    let mut state = synthetic_state(61, 2_000, 10);
    state.rates.internal_flows.remove(&state.scenario.internal_flow_year);
    let before = state.clone();
    let err = run_year(&mut state, &opts()).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
    assert_eq!(state, before);
}

#[test]
fn running_past_the_horizon_fails() {
    let mut state = synthetic_state(62, 1_000, 5);
    state.scenario.horizon_years = 2;
    assert!(run(&mut state, 3, &opts(), false).is_err());
    assert_eq!(state.year, 2022);
    run(&mut state, 2, &opts(), false).unwrap();
    assert!(matches!(run_year(&mut state, &opts()), Err(Error::Config(_))));
}
