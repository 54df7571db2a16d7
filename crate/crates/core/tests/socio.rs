mod common;

use microsim_core::codes::{EconStatus, EducationLevel};
use microsim_core::events::EventLog;
use microsim_core::population::{Individual, Population};
use microsim_core::socio::{apply_dropouts, apply_employment, apply_graduations, enrol_adult_learners, enrol_primary};
use microsim_core::{validate, PersonId, Sex};

use common::{adult, ctx, geography, quiet_log, state_for};

use EducationLevel::*;

fn geo() -> microsim_core::population::Geography {
    geography(&[(1, 1, 1), (2, 2, 2)])
}

fn student(id: u64, age: u8, attained: EducationLevel, course: EducationLevel, grad: i32) -> Individual {
    let mut p = adult(id, age, if id % 2 == 0 { Sex::Female } else { Sex::Male }, 1);
    p.education_attained = attained;
    p.enrol(course, grad);
    p
}

fn population(people: impl IntoIterator<Item = Individual>) -> Population {
    let mut pop = Population::new();
    for p in people {
        pop.insert(p).unwrap();
    }
    pop
}

#[test]
fn primary_pupils_never_drop_out() {
    let pop = population((1..=500).map(|i| student(i, 8, NotApplicable, Primary, 2026)));
    let state = state_for(pop, geo(), 1);
    let mut pop = state.population.clone();
    assert_eq!(apply_dropouts(&mut pop, &ctx(&state, 2023), &mut quiet_log()), 0);
    assert_eq!(pop, state.population);
}

#[test]
fn upper_secondary_dropouts_round_the_rate() {
    let pop = population((1..=1000).map(|i| student(i, 16, LowerSecondary, UpperSecondary, 2024)));
    let state = state_for(pop, geo(), 2);
    let mut pop = state.population.clone();
    let mut log = EventLog::new(true);
    let n = apply_dropouts(&mut pop, &ctx(&state, 2022), &mut log);
    assert_eq!(n, 25);
    assert_eq!(log.education.len(), 25);
    let left = pop.iter().filter(|p| p.prospective_education != Some(UpperSecondary)).count();
    assert_eq!(left, 25);
}

#[test]
fn dropout_at_target_does_not_reenter() {
    let pop = population((1..=1000).map(|i| {
        let mut p = student(i, 22, HigherCert, Degree, 2025);
        p.lifetime_education_target = Some(HigherCert);
        p
    }));
    let mut state = state_for(pop, geo(), 3);
    state.rates.education.set_dropout(Degree, 1.0);
    state.rates.education.set_dropout_outcomes(Degree, [0.1, 0.9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let mut pop = state.population.clone();
    let mut log = EventLog::new(true);
    assert_eq!(apply_dropouts(&mut pop, &ctx(&state, 2023), &mut log), 1000);
    assert!(pop.iter().all(|p| !p.is_student()));
    assert!(log.education.iter().all(|r| r.to_level.is_none()));
}

#[test]
fn dropouts_below_target_may_reenrol() {
    let pop = population((1..=1000).map(|i| {
        let mut p = student(i, 22, HigherCert, Degree, 2025);
        p.lifetime_education_target = Some(Doctorate);
        p
    }));
    let mut state = state_for(pop, geo(), 4);
    state.rates.education.set_dropout(Degree, 1.0);
    state.rates.education.set_dropout_outcomes(Degree, [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let mut pop = state.population.clone();
    apply_dropouts(&mut pop, &ctx(&state, 2023), &mut quiet_log());
    for p in pop.iter() {
        assert!(p.is_student());
        assert!(matches!(p.prospective_education, Some(Degree | Postgraduate)));
    }
}

#[test]
fn priority_group_drops_out_first() {
    let pop = population((1..=100).map(|i| {
        let mut p = student(i, 22, UpperSecondary, Degree, 2025);
        p.lifetime_education_target = Some(if i <= 10 { Doctorate } else { UpperSecondary });
        p
    }));
    let mut state = state_for(pop, geo(), 5);
    state.rates.education.set_dropout(Degree, 0.1);
    let mut pop = state.population.clone();
    let mut log = EventLog::new(true);
    assert_eq!(apply_dropouts(&mut pop, &ctx(&state, 2023), &mut log), 10);
    let mut ids: Vec<u64> = log.education.iter().map(|r| r.person_id.0).collect();
    ids.sort_unstable();
    assert_eq!(ids, (1..=10).collect::<Vec<_>>());
}

#[test]
fn lower_secondary_graduates_move_on() {
    let pop = population((1..=50).map(|i| student(i, 15, Primary, LowerSecondary, 2023)));
    let state = state_for(pop, geo(), 6);
    let mut pop = state.population.clone();
    assert_eq!(apply_graduations(&mut pop, &ctx(&state, 2023), &mut quiet_log()), 50);
    let us = state.rates.education.duration(UpperSecondary) as i32;
    for p in pop.iter() {
        assert_eq!(p.education_attained, LowerSecondary);
        assert_eq!(p.prospective_education, Some(UpperSecondary));
        assert_eq!(p.graduation_year, Some(2023 + us));
    }
}

#[test]
fn graduates_at_target_stop_studying() {
    let pop = population((1..=1000).map(|i| {
        let mut p = student(i, 23, UpperSecondary, Degree, 2023);
        p.lifetime_education_target = Some(Degree);
        p
    }));
    let state = state_for(pop, geo(), 7);
    let mut pop = state.population.clone();
    apply_graduations(&mut pop, &ctx(&state, 2023), &mut quiet_log());
    for p in pop.iter() {
        assert_eq!(p.education_attained, Degree);
        assert!(!p.is_student());
        assert_eq!(p.prospective_education, None);
    }
}

#[test]
fn students_not_yet_due_keep_studying() {
    let pop = population((1..=20).map(|i| student(i, 20, UpperSecondary, Degree, 2025)));
    let state = state_for(pop, geo(), 8);
    let mut pop = state.population.clone();
    assert_eq!(apply_graduations(&mut pop, &ctx(&state, 2023), &mut quiet_log()), 0);
    assert_eq!(pop, state.population);
}

#[test]
fn school_entry_and_late_arrivals_enrol() {
    let mut pop = Population::new();
    for (id, age) in [(1, 3), (2, 4), (3, 5), (4, 12)] {
        pop.insert(Individual::new(PersonId(id), age, Sex::Female, microsim_core::EdId(1))).unwrap();
    }
    let state = state_for(pop, geo(), 9);
    let mut pop = state.population.clone();
    assert_eq!(enrol_primary(&mut pop, &ctx(&state, 2023), &mut quiet_log()), 3);
    let p = |id| pop.get(PersonId(id)).unwrap();
    assert!(!p(1).is_student());
    assert_eq!(p(2).prospective_education, Some(Primary));
    assert_eq!(p(3).prospective_education, Some(Primary));
    assert_eq!(p(4).prospective_education, Some(LowerSecondary));
    assert_eq!(p(4).education_attained, Primary);
}

#[test]
fn young_adult_share_is_topped_up() {
    let mut people: Vec<Individual> = (1..=500).map(|i| student(i, 20, UpperSecondary, Degree, 2025)).collect();
    people.extend((501..=1000).map(|i| adult(i, 21, if i % 2 == 0 { Sex::Female } else { Sex::Male }, 1)));
    let state = state_for(population(people), geo(), 10);
    let mut pop = state.population.clone();
    let added = enrol_adult_learners(&mut pop, &ctx(&state, 2023), &mut quiet_log());
    assert_eq!(added, 110);
    assert_eq!(pop.iter().filter(|p| p.is_student()).count(), 610);
    assert!(validate(&pop, &state.geography).is_empty());
}

#[test]
fn learners_below_target_are_enrolled_first() {
    let people = (1..=200).map(|i| {
        let mut p = adult(i, 20, Sex::Female, 1);
        if i <= 100 {
            p.lifetime_education_target = Some(Degree);
        }
        p
    });
    let state = state_for(population(people), geo(), 11);
    let mut pop = state.population.clone();
    assert_eq!(enrol_adult_learners(&mut pop, &ctx(&state, 2023), &mut quiet_log()), 122);
    assert!((1..=100).all(|i| pop.get(PersonId(i)).unwrap().is_student()));
}

#[test]
fn employment_skips_students_and_children() {
    let mut people = vec![student(1, 20, UpperSecondary, Degree, 2025)];
    people.push(Individual::new(PersonId(2), 12, Sex::Male, microsim_core::EdId(1)));
    people.extend((3..=200).map(|i| adult(i, 40, Sex::Female, 2)));
    let state = state_for(population(people), geo(), 12);
    let mut pop = state.population.clone();
    assert_eq!(apply_employment(&mut pop, &ctx(&state, 2023), &mut quiet_log()), 198);
    assert_eq!(pop.get(PersonId(1)).unwrap().econ_status, EconStatus::Student);
    assert_eq!(pop.get(PersonId(2)).unwrap().econ_status, EconStatus::NotApplicable);
    assert!(pop.iter().skip(2).all(|p| EconStatus::LABOUR.contains(&p.econ_status)));
}

#[test]
fn employment_ignores_current_status() {
    let people: Vec<Individual> = (1..=500).map(|i| adult(i, 35, Sex::Male, 1)).collect();
    let state = state_for(population(people), geo(), 13);
    let mut working = state.population.clone();
    let mut unemployed = state.population.clone();
    for p in unemployed.iter_mut() {
        p.econ_status = EconStatus::Unemployed;
    }
    apply_employment(&mut working, &ctx(&state, 2023), &mut quiet_log());
    apply_employment(&mut unemployed, &ctx(&state, 2023), &mut quiet_log());
    assert_eq!(working, unemployed);
}
