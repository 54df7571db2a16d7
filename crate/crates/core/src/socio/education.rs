use std::collections::BTreeMap;

use rand::Rng;

use super::NON_STUDENT_CHILD;
use crate::codes::{AgeBands, EconStatus, EducationLevel, LABOUR_MARKET_AGE, SCHOOL_ENTRY_AGE};
use crate::events::{EducationEvent, EventLog, YearContext};
use crate::genesis::school_stage;
use crate::population::{Individual, PersonId, Population, RegionId};
use crate::rates::{DropoutPriority, EducationRates, OutcomeRow};
use crate::rng::{group_stream, rng_stream, StreamTag};
use crate::sampling::{weighted_index, CellPool};

/// Education sub-step counts for one year.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EducationCounts {
    pub dropouts: u64,
    pub graduates: u64,
    pub primary_enrolments: u64,
    pub adult_enrolments: u64,
}

/// Whether `p` may continue in education: not if a lifetime target exists
/// and has been reached.
fn may_continue(p: &Individual) -> bool {
    p.lifetime_education_target
        .is_none_or(|t| t.is_above(p.education_attained))
}

/// Next course for someone who has attained `attained`, if any is open.
fn next_course<R: Rng + ?Sized>(rates: &EducationRates, attained: EducationLevel, rng: &mut R) -> Option<EducationLevel> {
    weighted_index(rates.enrolment_row(attained), rng).map(|i| EducationLevel::RANKED[i])
}

/// Samples the next status from an outcome row; `S` is dropped when
/// continuing is not allowed. Returns `None` for a row with no usable mass.
fn next_status<R: Rng + ?Sized>(row: Option<&OutcomeRow>, allow_study: bool, rng: &mut R) -> Option<EconStatus> {
    let mut w = *row?;
    if !allow_study {
        w[EconStatus::Student.index()] = 0.0;
    }
    w[EconStatus::NotApplicable.index()] = 0.0;
    weighted_index(&w, rng).map(|i| EconStatus::ALL[i])
}

/// Applies a leaving or continuing outcome. Children under the labour-market
/// age who leave get status `NA` until the employment step takes them up.
fn settle<R: Rng + ?Sized>(
    p: &mut Individual,
    status: Option<EconStatus>,
    rates: &EducationRates,
    year: i32,
    rng: &mut R,
) -> (EconStatus, Option<EducationLevel>) {
    if status == Some(EconStatus::Student) {
        if let Some(course) = next_course(rates, p.education_attained, rng) {
            p.enrol(course, year + rates.duration(course) as i32);
            return (EconStatus::Student, Some(course));
        }
    }
    let s = match status {
        _ if p.age <= LABOUR_MARKET_AGE => NON_STUDENT_CHILD,
        Some(s) if s != EconStatus::Student => s,
        _ => EconStatus::Other,
    };
    p.leave_education(s);
    (s, None)
}

/// Annual dropouts per course: `round(rate × enrolled)` students leave,
/// chosen first from the priority group set by the dropout priority rule.
pub fn apply_dropouts(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> u64 {
    let rates = &ctx.rates.education;
    let mut by_course: BTreeMap<usize, Vec<PersonId>> = BTreeMap::new();
    for p in pop.iter().filter(|p| p.is_student()) {
        if let Some(r) = p.prospective_education.and_then(EducationLevel::rank) {
            by_course.entry(r).or_default().push(p.id);
        }
    }
    let mut total = 0;
    for (rank, ids) in by_course {
        let course = EducationLevel::RANKED[rank];
        let rate = rates.dropout_rate(course, ctx.year, ctx.scenario.start_year);
        let target = (rate * ids.len() as f64).round() as usize;
        if target == 0 {
            continue;
        }
        let (mut first, mut rest): (Vec<PersonId>, Vec<PersonId>) = ids.into_iter().partition(|id| {
            let p = pop.get(*id).expect("student");
            p.lifetime_education_target.is_some_and(|t| match rates.dropout_priority {
                DropoutPriority::Above => t.is_above(course),
                DropoutPriority::Below => !t.is_above(course),
            })
        });
        let mut rng = group_stream(ctx.seed, rank as u64, ctx.year, StreamTag::Dropout);
        let mut chosen = Vec::with_capacity(target);
        for group in [&mut first, &mut rest] {
            while chosen.len() < target && !group.is_empty() {
                let i = rng.random_range(0..group.len());
                chosen.push(group.swap_remove(i));
            }
        }
        chosen.sort_unstable();
        for id in chosen {
            let p = pop.get_mut(id).expect("student");
            let mut orng = rng_stream(ctx.seed, id, ctx.year, StreamTag::DropoutOutcome);
            let status = next_status(rates.dropout_outcomes(course), may_continue(p), &mut orng);
            let from = p.education_attained;
            let (s, to) = settle(p, status, rates, ctx.year, &mut orng);
            log.education(ctx.year, id, EducationEvent::Dropout, from, to, s);
            total += 1;
        }
    }
    total
}

/// Students due this year graduate. Primary and lower-secondary graduates
/// move straight on to the next school stage; others draw their next step.
pub fn apply_graduations(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> u64 {
    let rates = &ctx.rates.education;
    let due: Vec<PersonId> = pop
        .iter()
        .filter(|p| p.is_student() && p.graduation_year.is_some_and(|y| y <= ctx.year))
        .map(|p| p.id)
        .collect();
    let (seed, year) = (ctx.seed, ctx.year);
    for &id in &due {
        let p = pop.get_mut(id).expect("student");
        let course = p.prospective_education.expect("student has a course");
        p.education_attained = course;
        let mut rng = rng_stream(seed, id, year, StreamTag::Graduation);
        let (status, to) = match course {
            EducationLevel::Primary | EducationLevel::LowerSecondary => {
                let next = if course == EducationLevel::Primary {
                    EducationLevel::LowerSecondary
                } else {
                    EducationLevel::UpperSecondary
                };
                p.enrol(next, year + rates.duration(next) as i32);
                (EconStatus::Student, Some(next))
            }
            _ => {
                let status = next_status(rates.graduate_outcomes(course), may_continue(p), &mut rng);
                settle(p, status, rates, year, &mut rng)
            }
        };
        log.education(year, id, EducationEvent::Graduate, course, to, status);
    }
    due.len() as u64
}

/// Children reaching school age start primary; older children without any
/// attainment (typically recent arrivals) join the stage their age implies.
pub fn enrol_primary(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> u64 {
    let rates = &ctx.rates.education;
    let mut n = 0;
    for p in pop.iter_mut() {
        if p.is_student() || p.age < SCHOOL_ENTRY_AGE || !p.education_attained.is_na() {
            continue;
        }
        let (course, attained, years_left) = school_stage(p.age, |l| rates.duration(l));
        p.education_attained = attained;
        p.enrol(course, ctx.year + years_left as i32);
        log.education(ctx.year, p.id, EducationEvent::Enrol, attained, Some(course), EconStatus::Student);
        n += 1;
    }
    n
}

fn learner_bands(age: u8) -> Option<usize> {
    AgeBands::LEARNER.index(age)
}

/// Tops up student numbers per region: 18–24 to the configured share of the
/// age band, 25–69 to the region's adult-student rate. Candidates below
/// their lifetime target go first; within each group people are drawn by the
/// adult-learner (sex, age) weights.
pub fn enrol_adult_learners(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> u64 {
    let rates = &ctx.rates.education;
    let bands = AgeBands::LEARNER.len();
    // [region] -> (young count, young students, older count, older students)
    let mut counts: BTreeMap<RegionId, [usize; 4]> = ctx.geo.regions().map(|r| (r, [0; 4])).collect();
    // [region][young?] -> [priority pool, other pool]
    let mut pools: BTreeMap<(RegionId, bool), [CellPool; 2]> = BTreeMap::new();
    for p in pop.iter() {
        let Some(band) = learner_bands(p.age) else { continue };
        let region = ctx.geo.region_of(p.ed_id).expect("ED in geography");
        let young = band == 0;
        let c = counts.get_mut(&region).expect("known region");
        let k = if young { 0 } else { 2 };
        c[k] += 1;
        if p.is_student() {
            c[k + 1] += 1;
        } else if rates.can_enrol(p.education_attained) {
            let priority = p.lifetime_education_target.is_some_and(|t| t.is_above(p.education_attained));
            let cell = p.sex.index() * bands + band;
            pools
                .entry((region, young))
                .or_insert_with(|| [CellPool::new(2 * bands), CellPool::new(2 * bands)])[usize::from(!priority)]
                .push(cell, p.id);
        }
    }
    let mut enrolled = 0;
    for (ri, (region, c)) in counts.iter().enumerate() {
        for young in [true, false] {
            let (total, students, share) = if young {
                (c[0], c[1], rates.adult_student_share_18_24)
            } else {
                (c[2], c[3], rates.adult_student_rate(*region))
            };
            let target = (share * total as f64 - 1e-9).ceil().max(0.0) as usize;
            let need = target.saturating_sub(students);
            if need == 0 {
                continue;
            }
            let Some(pair) = pools.get_mut(&(*region, young)) else {
                log.note(ctx.year, format!("region {region}: no adult learner candidates"));
                continue;
            };
            let mut rng = group_stream(ctx.seed, ri as u64 * 2 + u64::from(young), ctx.year, StreamTag::AdultLearners);
            let mut chosen = Vec::with_capacity(need);
            for pool in pair.iter_mut() {
                while chosen.len() < need {
                    match pool.take_weighted(&rates.adult_learner_age_sex, &mut rng) {
                        Some((_, id)) => chosen.push(id),
                        None => break,
                    }
                }
            }
            if chosen.len() < need {
                log.note(
                    ctx.year,
                    format!(
                        "region {region}: adult learner top-up short by {} ({})",
                        need - chosen.len(),
                        if young { "18-24" } else { "25-69" }
                    ),
                );
            }
            chosen.sort_unstable();
            for id in chosen {
                let p = pop.get_mut(id).expect("candidate");
                let from = p.education_attained;
                let course = next_course(rates, from, &mut rng).expect("candidate can enrol");
                p.enrol(course, ctx.year + rates.duration(course) as i32);
                log.education(ctx.year, id, EducationEvent::AdultEnrol, from, Some(course), EconStatus::Student);
                enrolled += 1;
            }
        }
    }
    enrolled
}
