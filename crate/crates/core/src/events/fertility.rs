use std::collections::BTreeMap;

use rand::Rng;

use super::{EducationEvent, EventKind, EventLog, YearContext};
use crate::codes::{AgeBands, EconStatus, MaritalStatus, Sex};
use crate::population::{Individual, PersonId, Population, RegionId};
use crate::rates::{tfr_factor, FIRST_MARITAL_GROUP};
use crate::rng::{group_stream, rng_stream, StreamTag};
use crate::sampling::poisson;
use crate::socio::{assign_lifetime_target, LevelShares};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FertilityOutcome {
    pub births: u64,
    pub newborns: Vec<PersonId>,
}

/// Births by (region, age group, marital band): a Poisson count around
/// `rate × tfr factor × eligible women`, mothers drawn with replacement.
pub fn apply_fertility(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> FertilityOutcome {
    let factor = tfr_factor(&ctx.scenario.tfr_schedule, ctx.scenario.start_year, ctx.year);
    apply_fertility_with(pop, ctx, factor, log)
}

pub fn apply_fertility_with(pop: &mut Population, ctx: &YearContext, factor: f64, log: &mut EventLog) -> FertilityOutcome {
    let mut brackets: BTreeMap<(RegionId, usize, bool), Vec<PersonId>> = BTreeMap::new();
    for p in pop.iter().filter(|p| p.sex == Sex::Female) {
        let Some(group) = AgeBands::FERTILITY.index(p.age) else { continue };
        let married = group >= FIRST_MARITAL_GROUP && p.marital_status == MaritalStatus::Married;
        let region = ctx.geo.region_of(p.ed_id).expect("ED in geography");
        brackets.entry((region, group, married)).or_default().push(p.id);
    }
    let shares = LevelShares::from_population(pop);
    let edu = &ctx.rates.education;
    let mut out = FertilityOutcome::default();
    for ((region, group, married), mothers) in &brackets {
        let rate = ctx.rates.fertility.rate(*region, *group, *married);
        let expected = rate * factor * mothers.len() as f64;
        let key = u64::from(region.0) * 64 + (*group as u64) * 2 + u64::from(*married);
        let mut rng = group_stream(ctx.seed, key, ctx.year, StreamTag::Fertility);
        let n = poisson(expected, &mut rng);
        for _ in 0..n {
            let mother_id = mothers[rng.random_range(0..mothers.len())];
            let sex = if rng.random::<bool>() { Sex::Female } else { Sex::Male };
            let mother = pop.get(mother_id).expect("mother is resident");
            let father = mother.resident_spouse().and_then(|f| pop.get(f));
            let mut child = Individual::new(PersonId(0), 0, sex, mother.ed_id);
            child.mother_id = Some(mother_id);
            child.father_id = father.map(|f| f.id);
            child.recent_immigrant_child =
                mother.immigrated_year.is_some() || father.is_some_and(|f| f.immigrated_year.is_some());
            let parent_levels: Vec<_> = [Some(mother), father].into_iter().flatten().map(|p| p.education_attained).collect();
            let ed = child.ed_id;
            let id = pop.add(child);
            pop.register_child(id);
            let mut trng = rng_stream(ctx.seed, id, ctx.year, StreamTag::LifetimeTarget);
            let (target, uniform) = assign_lifetime_target(&parent_levels, &shares, edu, &mut trng);
            if uniform {
                log.note(ctx.year, format!("no adults hold a level in the target band of {id}; drew uniformly"));
            }
            pop.get_mut(id).expect("just added").lifetime_education_target = Some(target);
            log.event(ctx.year, EventKind::Birth, id, None, Some(ed), mother_id.to_string());
            log.education(ctx.year, id, EducationEvent::Target, crate::codes::EducationLevel::NotApplicable, Some(target), EconStatus::NotApplicable);
            out.newborns.push(id);
        }
        out.births += n;
    }
    out
}
