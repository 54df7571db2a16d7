use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{EventKind, EventLog, YearContext};
use crate::codes::{AgeBands, MaritalStatus};
use crate::genesis::{match_partner, MatchParams, Profile};
use crate::population::{PersonId, Population, RegionId, Spouse};
use crate::rng::{group_stream, StreamTag};
use crate::sampling::{largest_remainder, CellPool};

/// Splits married people at the configured separation rate. Resident
/// couples count two people and are both separated; people married to an
/// outsider count one. Returns the number of people separated.
pub fn apply_separations(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> u64 {
    apply_separations_at(pop, ctx, ctx.separation_rate, log)
}

pub fn apply_separations_at(pop: &mut Population, ctx: &YearContext, rate: f64, log: &mut EventLog) -> u64 {
    let mut married = 0usize;
    let mut units: Vec<(PersonId, Option<PersonId>)> = Vec::new();
    for p in pop.iter().filter(|p| p.marital_status == MaritalStatus::Married) {
        married += 1;
        match p.spouse {
            Some(Spouse::Resident(s)) if p.id < s => units.push((p.id, Some(s))),
            Some(Spouse::Outsider) => units.push((p.id, None)),
            _ => {}
        }
    }
    let target = (rate * married as f64).round() as u64;
    if target == 0 {
        return 0;
    }
    let mut rng = group_stream(ctx.seed, 0, ctx.year, StreamTag::Separation);
    let mut separated = 0u64;
    let mut remaining = units.len();
    while separated < target && remaining > 0 {
        let i = rng.random_range(0..remaining);
        units.swap(i, remaining - 1);
        remaining -= 1;
        let (a, b) = units[remaining];
        for id in [Some(a), b].into_iter().flatten() {
            let p = pop.get_mut(id).expect("married person is resident");
            p.marital_status = MaritalStatus::Separated;
            p.spouse = None;
            let ed = p.ed_id;
            log.event(ctx.year, EventKind::Separation, id, Some(ed), Some(ed), "");
            separated += 1;
        }
    }
    separated
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MarriageOutcome {
    pub couples: u64,
    pub same_sex: u64,
    pub target: u64,
}

fn draw(pool: &mut CellPool, weights: &[f64], n: u64, rng: &mut impl Rng) -> Vec<PersonId> {
    let mut out: Vec<PersonId> = (0..n).map_while(|_| pool.take_weighted(weights, rng).map(|(_, id)| id)).collect();
    out.sort_unstable();
    out
}

fn pair_up(
    pop: &mut Population,
    focals: &[PersonId],
    partners: &mut Vec<Profile>,
    params: &MatchParams,
    rng: &mut impl Rng,
    year: i32,
    log: &mut EventLog,
) -> u64 {
    let mut formed = 0;
    for &f in focals {
        if pop.get(f).expect("candidate").spouse.is_some() {
            continue;
        }
        partners.retain(|c| c.id != f && pop.get(c.id).expect("candidate").spouse.is_none());
        let focal = Profile::from(pop.get(f).expect("candidate"));
        let Some(partner) = match_partner(&focal, partners, params, rng) else { break };
        partners.retain(|c| c.id != partner);
        pop.link_spouses(f, partner);
        for (a, b) in [(f, partner), (partner, f)] {
            let ed = pop.get(a).expect("resident").ed_id;
            log.event(year, EventKind::Marriage, a, Some(ed), Some(ed), b.to_string());
        }
        formed += 1;
    }
    formed
}

/// Forms the year's marriages region by region. Candidates are unmarried
/// people of marriageable age drawn by the bride, groom and same-sex age
/// weights; each focal candidate picks a partner with [`match_partner`].
pub fn apply_marriages(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> MarriageOutcome {
    let n = &ctx.rates.nuptiality;
    let params = MatchParams {
        lambda: n.lambda,
        concentration: n.concentration,
        pool_size: n.pool_size,
    };
    let groups = AgeBands::FIVE_YEAR.len();
    let mut pools: BTreeMap<RegionId, [CellPool; 2]> = ctx
        .geo
        .regions()
        .map(|r| (r, [CellPool::new(groups), CellPool::new(groups)]))
        .collect();
    let mut region_pop: BTreeMap<RegionId, f64> = pools.keys().map(|r| (*r, 0.0)).collect();
    for p in pop.iter() {
        let region = ctx.geo.region_of(p.ed_id).expect("ED in geography");
        *region_pop.get_mut(&region).expect("known region") += 1.0;
        if p.marital_status != MaritalStatus::Married && p.age >= n.min_age {
            pools.get_mut(&region).expect("known region")[p.sex.index()].push(p.age_group(), p.id);
        }
    }
    let target = n.target_couples(pop.len());
    let weights: Vec<f64> = region_pop.values().copied().collect();
    let per_region = largest_remainder(target, &weights);
    let ages = &n.candidate_ages;
    let mut out = MarriageOutcome {
        target,
        ..Default::default()
    };
    for (ri, ((region, [female, male]), &t)) in pools.iter_mut().zip(&per_region).enumerate() {
        if t == 0 {
            continue;
        }
        let mut rng = group_stream(ctx.seed, ri as u64, ctx.year, StreamTag::Marriage);
        let same = if n.same_sex_share > 0.0 {
            Binomial::new(t, n.same_sex_share).expect("share in [0,1]").sample(&mut rng)
        } else {
            0
        };
        let male_same = (0..same).filter(|_| rng.random::<bool>()).count() as u64;
        let female_same = same - male_same;
        let opposite = t - same;

        let brides = draw(female, &ages.bride, opposite, &mut rng);
        let grooms = draw(male, &ages.groom, brides.len() as u64, &mut rng);
        let mut groom_profiles: Vec<Profile> = grooms.iter().map(|&g| Profile::from(pop.get(g).expect("candidate"))).collect();
        let formed = pair_up(pop, &brides, &mut groom_profiles, &params, &mut rng, ctx.year, log);
        out.couples += formed;

        let mut same_formed = 0;
        for (pool, w, k) in [(&mut *male, &ages.same_sex_male, male_same), (&mut *female, &ages.same_sex_female, female_same)] {
            if k == 0 {
                continue;
            }
            let people = draw(pool, w, 2 * k, &mut rng);
            let mut profiles: Vec<Profile> = people.iter().map(|&g| Profile::from(pop.get(g).expect("candidate"))).collect();
            same_formed += pair_up(pop, &people, &mut profiles, &params, &mut rng, ctx.year, log);
        }
        out.couples += same_formed;
        out.same_sex += same_formed;
        if formed + same_formed < t {
            log.note(
                ctx.year,
                format!("region {region}: formed {} of {t} marriages; candidates exhausted", formed + same_formed),
            );
        }
    }
    out
}
