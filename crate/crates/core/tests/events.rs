mod common;

use std::collections::BTreeMap;

use microsim_core::codes::AGE_COUNT;
use microsim_core::events::{
    age_population, apply_fertility_with, apply_flows, apply_marriages, apply_mortality_with, apply_separations_at, emigrate,
    immigrate, EventKind, EventLog,
};
use microsim_core::population::{CountyId, EdId, Population, RegionId, Spouse};
use microsim_core::rates::{CountyFlow, InternalFlowTable, MarriageRateUnit, RegionShares};
use microsim_core::{validate, MaritalStatus, PersonId, Sex};

use common::{adult, adults, ctx, geography, marry, quiet_log, state_for};

fn two_regions() -> microsim_core::population::Geography {
    geography(&[(1, 1, 1), (2, 1, 1), (3, 2, 1), (4, 3, 2), (5, 3, 2)])
}

fn couples(pop: &mut Population, first: u64, n: u64, age: u8, ed: u32) {
    adults(pop, first, 2 * n, age, ed);
    for i in 0..n {
        marry(pop, first + 2 * i, first + 2 * i + 1);
    }
}

#[test]
fn certain_death_empties_the_population() {
    let mut pop = Population::new();
    couples(&mut pop, 1, 25, 50, 1);
    let state = state_for(pop, two_regions(), 1);
    let mut pop = state.population.clone();
    let deaths = apply_mortality_with(&mut pop, &[[1.0; AGE_COUNT]; 2], &ctx(&state, 2023), &mut quiet_log());
    assert_eq!(deaths, 50);
    assert!(pop.is_empty());
    assert!(validate(&pop, &state.geography).is_empty());
}

#[test]
fn zero_mortality_kills_nobody() {
    let mut pop = Population::new();
    adults(&mut pop, 1, 500, 90, 2);
    let state = state_for(pop, two_regions(), 2);
    let mut pop = state.population.clone();
    assert_eq!(apply_mortality_with(&mut pop, &[[0.0; AGE_COUNT]; 2], &ctx(&state, 2023), &mut quiet_log()), 0);
    assert_eq!(pop, state.population);
}

#[test]
fn flat_mortality_gives_binomial_deaths() {
    let mut pop = Population::new();
    adults(&mut pop, 1, 100_000, 60, 3);
    let state = state_for(pop, two_regions(), 3);
    let mut pop = state.population.clone();
    let deaths = apply_mortality_with(&mut pop, &[[0.01; AGE_COUNT]; 2], &ctx(&state, 2023), &mut quiet_log());
    assert!((900..=1100).contains(&deaths), "{deaths}");
    assert_eq!(pop.len() as u64, 100_000 - deaths);
}

#[test]
fn widowed_spouse_survives_partner() {
    let mut pop = Population::new();
    couples(&mut pop, 1, 1, 70, 1);
    let state = state_for(pop, two_regions(), 4);
    let mut pop = state.population.clone();
    let mut q = [[0.0; AGE_COUNT]; 2];
    q[Sex::Male.index()] = [1.0; AGE_COUNT];
    apply_mortality_with(&mut pop, &q, &ctx(&state, 2023), &mut quiet_log());
    let widow = pop.get(PersonId(1)).unwrap();
    assert_eq!(widow.marital_status, MaritalStatus::Widowed);
    assert_eq!(widow.spouse, None);
}

#[test]
fn ageing_clamps_at_the_top() {
    let mut pop = Population::new();
    pop.insert(adult(1, 40, Sex::Female, 1)).unwrap();
    pop.insert(adult(2, 105, Sex::Male, 1)).unwrap();
    age_population(&mut pop);
    assert_eq!(pop.get(PersonId(1)).unwrap().age, 41);
    assert_eq!(pop.get(PersonId(2)).unwrap().age, 105);
    assert_eq!(pop.len(), 2);
}

fn county_count(pop: &Population, geo: &microsim_core::population::Geography, c: u32) -> usize {
    geo.county_eds(CountyId(c)).iter().map(|&e| pop.ed_count(e)).sum()
}

#[test]
fn zero_flows_move_nobody() {
    let mut pop = Population::new();
    adults(&mut pop, 1, 300, 30, 1);
    let state = state_for(pop, two_regions(), 5);
    let mut pop = state.population.clone();
    let flows = InternalFlowTable::new(
        2022,
        vec![CountyFlow {
            origin: CountyId(1),
            dest: CountyId(2),
            count: 0,
        }],
    )
    .unwrap();
    assert_eq!(apply_flows(&mut pop, &ctx(&state, 2023), &flows, &mut quiet_log()), 0);
    assert_eq!(pop, state.population);
}

#[test]
fn county_flow_conserves_totals() {
    let mut pop = Population::new();
    adults(&mut pop, 1, 100, 30, 1);
    adults(&mut pop, 101, 100, 30, 2);
    adults(&mut pop, 201, 50, 30, 3);
    let state = state_for(pop, two_regions(), 6);
    let geo = &state.geography;
    let mut pop = state.population.clone();
    let flows = InternalFlowTable::new(
        2022,
        vec![
            CountyFlow {
                origin: CountyId(1),
                dest: CountyId(2),
                count: 5,
            },
            CountyFlow {
                origin: CountyId(1),
                dest: CountyId(1),
                count: 7,
            },
        ],
    )
    .unwrap();
    let mut log = EventLog::new(true);
    let moves = apply_flows(&mut pop, &ctx(&state, 2023), &flows, &mut log);
    assert_eq!(moves, 12);
    assert_eq!(pop.len(), 250);
    assert_eq!(county_count(&pop, geo, 1), 195);
    assert_eq!(county_count(&pop, geo, 2), 55);
    for e in log.events.iter().filter(|e| e.detail == "intra") {
        assert_ne!(e.ed_from, e.ed_to);
    }
    assert!(validate(&pop, geo).is_empty());
}

#[test]
fn emigration_of_nobody_changes_nothing() {
    let mut pop = Population::new();
    adults(&mut pop, 1, 100, 30, 1);
    let state = state_for(pop, two_regions(), 7);
    let mut pop = state.population.clone();
    assert_eq!(emigrate(&mut pop, &ctx(&state, 2023), 0, &mut quiet_log()), 0);
    assert_eq!(pop, state.population);
}

#[test]
fn emigrant_leaves_an_outsider_spouse() {
    let mut pop = Population::new();
    couples(&mut pop, 1, 1, 30, 1);
    let state = state_for(pop, two_regions(), 8);
    let mut pop = state.population.clone();
    assert_eq!(emigrate(&mut pop, &ctx(&state, 2023), 1, &mut quiet_log()), 1);
    let stayer = pop.iter().next().unwrap();
    assert_eq!(stayer.marital_status, MaritalStatus::Married);
    assert_eq!(stayer.spouse, Some(Spouse::Outsider));
    assert!(validate(&pop, &state.geography).is_empty());
}

#[test]
fn emigrants_follow_regional_shares() {
    let mut pop = Population::new();
    adults(&mut pop, 1, 1_000, 30, 1);
    adults(&mut pop, 1_001, 1_000, 30, 4);
    let mut state = state_for(pop, two_regions(), 9);
    state.rates.region_emigrant_shares =
        Some(RegionShares::new(BTreeMap::from([(RegionId(1), 0.25), (RegionId(2), 0.75)])).unwrap());
    let mut pop = state.population.clone();
    let mut log = EventLog::new(true);
    emigrate(&mut pop, &ctx(&state, 2023), 100, &mut log);
    let from = |r: u32| {
        log.events
            .iter()
            .filter(|e| state.geography.region_of(e.ed_from.unwrap()) == Some(RegionId(r)))
            .count()
    };
    assert_eq!((from(1), from(2)), (25, 75));
}

#[test]
fn immigrants_arrive_with_outsider_spouses_in_open_eds() {
    let mut pop = Population::new();
    couples(&mut pop, 1, 400, 32, 1);
    let mut geo = two_regions();
    let mut eds = geo.eds().to_vec();
    for e in &mut eds {
        e.intl_immigrant_weight = if e.ed_id == EdId(5) { 0.0 } else { 0.25 };
    }
    geo = microsim_core::population::Geography::new(eds).unwrap();
    let state = state_for(pop, geo, 10);
    let mut pop = state.population.clone();
    assert_eq!(immigrate(&mut pop, &ctx(&state, 2023), 0, &mut quiet_log()), 0);
    assert_eq!(immigrate(&mut pop, &ctx(&state, 2023), 300, &mut quiet_log()), 300);
    let arrivals: Vec<_> = pop.iter().filter(|p| p.immigrated_year == Some(2023)).collect();
    assert_eq!(arrivals.len(), 300);
    assert!(arrivals.iter().all(|p| p.ed_id != EdId(5)));
    for p in arrivals.iter().filter(|p| p.marital_status == MaritalStatus::Married) {
        assert_eq!(p.spouse, Some(Spouse::Outsider));
    }
    assert!(arrivals.iter().any(|p| p.marital_status == MaritalStatus::Married));
    assert!(validate(&pop, &state.geography).is_empty());
}

#[test]
fn no_women_no_births() {
    let mut pop = Population::new();
    for i in 0..200 {
        pop.insert(adult(i + 1, 30, Sex::Male, 1)).unwrap();
        pop.insert(adult(i + 1_001, 30, Sex::Female, 4)).unwrap();
    }
    let state = state_for(pop, two_regions(), 11);
    let mut pop = state.population.clone();
    let out = apply_fertility_with(&mut pop, &ctx(&state, 2023), 4.0, &mut quiet_log());
    assert!(out.births > 0);
    for id in out.newborns {
        let region = state.geography.region_of(pop.get(id).unwrap().ed_id);
        assert_eq!(region, Some(RegionId(2)));
    }
}

#[test]
fn newborns_are_listed_by_both_parents() {
    let mut pop = Population::new();
    couples(&mut pop, 1, 300, 30, 2);
    let state = state_for(pop, two_regions(), 12);
    let mut pop = state.population.clone();
    let out = apply_fertility_with(&mut pop, &ctx(&state, 2023), 3.0, &mut quiet_log());
    assert!(out.births > 10);
    for id in &out.newborns {
        let child = pop.get(*id).unwrap();
        assert_eq!(child.age, 0);
        assert!(child.lifetime_education_target.is_some());
        let mother = pop.get(child.mother_id.unwrap()).unwrap();
        let father = pop.get(child.father_id.unwrap()).unwrap();
        assert_eq!(mother.sex, Sex::Female);
        assert!(mother.children.contains(id) && father.children.contains(id));
        assert_eq!(child.ed_id, mother.ed_id);
    }
    assert!(validate(&pop, &state.geography).is_empty());
}

#[test]
fn births_average_their_poisson_mean() {
    let mut pop = Population::new();
    couples(&mut pop, 1, 100, 31, 1);
    let state = state_for(pop, two_regions(), 13);
    let rate = state.rates.fertility.rate(RegionId(1), 3, true);
    let factor = 2.0;
    let lambda = rate * factor * 100.0;
    let reps = 10_000;
    let total: u64 = (0..reps)
        .map(|k| {
            let mut pop = state.population.clone();
            apply_fertility_with(&mut pop, &ctx(&state, 2023 + k), factor, &mut quiet_log()).births
        })
        .sum();
    let mean = total as f64 / f64::from(reps);
    assert!((mean / lambda - 1.0).abs() < 0.01, "mean {mean} vs {lambda}");
}

#[test]
fn zero_separation_rate_separates_nobody() {
    let mut pop = Population::new();
    couples(&mut pop, 1, 100, 40, 1);
    let state = state_for(pop, two_regions(), 14);
    let mut pop = state.population.clone();
    assert_eq!(apply_separations_at(&mut pop, &ctx(&state, 2023), 0.0, &mut quiet_log()), 0);
    assert_eq!(pop, state.population);
}

#[test]
fn separation_count_follows_the_rate() {
    let mut pop = Population::new();
    couples(&mut pop, 1, 400_000, 40, 1);
    let state = state_for(pop, two_regions(), 15);
    let mut pop = state.population.clone();
    let separated = apply_separations_at(&mut pop, &ctx(&state, 2023), 0.005, &mut quiet_log());
    assert_eq!(separated, 4_000);
    let seps: Vec<_> = pop.iter().filter(|p| p.marital_status == MaritalStatus::Separated).collect();
    assert_eq!(seps.len(), 4_000);
    assert!(seps.iter().all(|p| p.spouse.is_none()));
}

#[test]
fn marriage_target_follows_rate_and_unit() {
    let mut pop = Population::new();
    adults(&mut pop, 1, 10_000, 30, 1);
    let mut state = state_for(pop, two_regions(), 16);
    let mut pop = state.population.clone();
    let out = apply_marriages(&mut pop, &ctx(&state, 2023), &mut quiet_log());
    assert_eq!((out.target, out.couples), (40, 40));
    assert!(validate(&pop, &state.geography).is_empty());

    state.rates.nuptiality.marriage_rate_unit = MarriageRateUnit::Persons;
    let mut pop = state.population.clone();
    let out = apply_marriages(&mut pop, &ctx(&state, 2023), &mut quiet_log());
    assert_eq!(out.couples, 20);
}

#[test]
fn widowed_candidates_can_remarry() {
    let mut pop = Population::new();
    for i in 0..200 {
        let mut w = adult(2 * i + 1, 40, Sex::Female, 1);
        w.marital_status = MaritalStatus::Widowed;
        pop.insert(w).unwrap();
        pop.insert(adult(2 * i + 2, 40, Sex::Male, 1)).unwrap();
    }
    let mut state = state_for(pop, two_regions(), 17);
    state.rates.nuptiality.marriage_rate = 0.1;
    state.rates.nuptiality.same_sex_share = 0.0;
    let mut pop = state.population.clone();
    let out = apply_marriages(&mut pop, &ctx(&state, 2023), &mut quiet_log());
    assert_eq!(out.couples, 40);
    let remarried = pop
        .iter()
        .filter(|p| p.sex == Sex::Female && p.marital_status == MaritalStatus::Married)
        .count();
    assert_eq!(remarried, 40);
}

#[test]
fn exhausted_candidates_are_noted() {
    let mut pop = Population::new();
    for i in 0..5 {
        pop.insert(adult(i + 1, 30, Sex::Male, 1)).unwrap();
    }
    adults(&mut pop, 100, 2_000, 10, 1);
    let mut state = state_for(pop, two_regions(), 18);
    state.rates.nuptiality.same_sex_share = 0.0;
    let mut pop = state.population.clone();
    let mut log = quiet_log();
    let out = apply_marriages(&mut pop, &ctx(&state, 2023), &mut log);
    assert_eq!(out.couples, 0);
    assert!(out.target > 0);
    assert!(log.notes.iter().any(|n| n.contains("exhausted")));
}

#[test]
fn marriage_events_name_the_partner() {
    let mut pop = Population::new();
    adults(&mut pop, 1, 5_000, 28, 4);
    let state = state_for(pop, two_regions(), 19);
    let mut pop = state.population.clone();
    let mut log = EventLog::new(true);
    apply_marriages(&mut pop, &ctx(&state, 2023), &mut log);
    let marriages: Vec<_> = log.events.iter().filter(|e| e.event == EventKind::Marriage).collect();
    assert_eq!(marriages.len(), 40);
    for e in marriages {
        let partner = PersonId(e.detail.parse().unwrap());
        assert_eq!(pop.get(e.person_id).unwrap().resident_spouse(), Some(partner));
    }
}
