use std::collections::BTreeMap;

use rand::Rng;

use super::{EventKind, EventLog, YearContext};
use crate::codes::{AgeBands, MaritalStatus, Sex};
use crate::error::Result;
use crate::population::{age_sex_cell, Individual, PersonId, Population, RegionId, Spouse, SpouseFate, AGE_SEX_CELLS};
use crate::rates::migration_targets;
use crate::rng::{group_stream, StreamTag};
use crate::sampling::{largest_remainder, CellPool, Categorical};

pub fn apply_international_emigration(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> Result<u64> {
    let t = migration_targets(ctx.scenario, ctx.year)?;
    let total = (t.emigrants * ctx.migration_scale).round().max(0.0) as u64;
    Ok(emigrate(pop, ctx, total, log))
}

pub fn apply_international_immigration(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> Result<u64> {
    let t = migration_targets(ctx.scenario, ctx.year)?;
    let total = (t.immigrants * ctx.migration_scale).round().max(0.0) as u64;
    Ok(immigrate(pop, ctx, total, log))
}

/// Splits `total` over cells by `weights`, capped by `available`; counts a
/// full cell cannot take are re-spread over cells with room. Returns the
/// allocation and whether any re-spreading happened.
fn capped_allocation(total: u64, weights: &[f64], available: &[usize]) -> (Vec<u64>, bool) {
    let mut alloc = largest_remainder(total, weights);
    let mut moved = false;
    loop {
        let mut excess = 0;
        for (a, &cap) in alloc.iter_mut().zip(available) {
            if *a > cap as u64 {
                excess += *a - cap as u64;
                *a = cap as u64;
            }
        }
        if excess == 0 {
            return (alloc, moved);
        }
        moved = true;
        let room: Vec<f64> = weights
            .iter()
            .zip(alloc.iter().zip(available))
            .map(|(&w, (&a, &cap))| if (a as usize) < cap { w } else { 0.0 })
            .collect();
        if room.iter().all(|&w| w <= 0.0) {
            // Fall back to spreading by headroom when weights are exhausted.
            let head: Vec<f64> = alloc.iter().zip(available).map(|(&a, &c)| (c as u64 - a) as f64).collect();
            if head.iter().all(|&h| h <= 0.0) {
                return (alloc, moved);
            }
            for (a, extra) in alloc.iter_mut().zip(largest_remainder(excess, &head)) {
                *a += extra;
            }
        } else {
            for (a, extra) in alloc.iter_mut().zip(largest_remainder(excess, &room)) {
                *a += extra;
            }
        }
    }
}

/// Removes `total` emigrants: split over regions by the emigrant shares, then
/// over (sex, age group) brackets by the emigrant profile. A resident spouse
/// left behind stays married to an outsider.
pub fn emigrate(pop: &mut Population, ctx: &YearContext, total: u64, log: &mut EventLog) -> u64 {
    let mut pools: BTreeMap<RegionId, CellPool> =
        ctx.geo.regions().map(|r| (r, CellPool::new(AGE_SEX_CELLS))).collect();
    for p in pop.iter() {
        let region = ctx.geo.region_of(p.ed_id).expect("ED in geography");
        pools.get_mut(&region).expect("known region").push(p.age_sex_cell(), p.id);
    }
    let region_pop: BTreeMap<RegionId, usize> = pools.iter().map(|(r, p)| (*r, p.len())).collect();
    let shares = ctx.rates.emigrant_shares(&region_pop);
    let weights: Vec<f64> = pools.keys().map(|r| shares.get(r).copied().unwrap_or(0.0)).collect();
    let available: Vec<usize> = region_pop.values().copied().collect();
    let (per_region, spread) = capped_allocation(total, &weights, &available);
    if spread {
        log.note(ctx.year, "emigrant regional quota exceeded a region's population; reallocated");
    }
    let profile = ctx.rates.profiles.intl_out.weights();

    let mut leaving: Vec<PersonId> = Vec::new();
    for (ri, ((region, pool), &n)) in pools.iter_mut().zip(&per_region).enumerate() {
        if n == 0 {
            continue;
        }
        let mut rng = group_stream(ctx.seed, ri as u64, ctx.year, StreamTag::Emigration);
        let sizes: Vec<usize> = (0..AGE_SEX_CELLS).map(|c| pool.cell_len(c)).collect();
        let (brackets, spread) = capped_allocation(n, profile, &sizes);
        if spread {
            log.note(ctx.year, format!("region {region}: emigrant brackets short of people; reallocated"));
        }
        for (cell, &k) in brackets.iter().enumerate() {
            for _ in 0..k {
                leaving.extend(pool.take_from(cell, &mut rng));
            }
        }
    }
    leaving.sort_unstable();
    for &id in &leaving {
        let ed = pop.get(id).map(|p| p.ed_id);
        pop.remove(id, SpouseFate::LeftBehind);
        log.event(ctx.year, EventKind::Emigration, id, ed, None, "");
    }
    leaving.len() as u64
}

/// Cells of the same sex ordered by distance from `cell`'s age group, then
/// the other sex.
fn fallback_cells(cell: usize) -> impl Iterator<Item = usize> {
    let groups = AgeBands::FIVE_YEAR.len();
    let sex = cell / groups;
    let g = cell % groups;
    let by_distance = move |s: usize| {
        (1..groups).flat_map(move |d| {
            [g.checked_sub(d), Some(g + d)]
                .into_iter()
                .flatten()
                .filter(move |&x| x < groups)
                .map(move |x| s * groups + x)
        })
    };
    by_distance(sex).chain(std::iter::once((1 - sex) * groups + g)).chain(by_distance(1 - sex))
}

/// Adds `total` immigrants. Brackets follow the immigrant profile with single
/// ages uniform within the group; marital, education and economic status
/// come from a random resident donor of the same bracket; destinations are
/// drawn by the EDs' immigrant weights.
pub fn immigrate(pop: &mut Population, ctx: &YearContext, total: u64, log: &mut EventLog) -> u64 {
    if total == 0 {
        return 0;
    }
    let mut donors: Vec<Vec<PersonId>> = vec![Vec::new(); AGE_SEX_CELLS];
    for p in pop.iter() {
        donors[p.age_sex_cell()].push(p.id);
    }
    let weights: Vec<f64> = ctx.geo.eds().iter().map(|e| e.intl_immigrant_weight).collect();
    let Some(dest) = Categorical::new(&weights) else {
        log.note(ctx.year, "no ED accepts immigrants; none added");
        return 0;
    };
    let counts = largest_remainder(total, ctx.rates.profiles.intl_in.weights());
    let mut rng = group_stream(ctx.seed, 0, ctx.year, StreamTag::Immigration);
    let groups = AgeBands::FIVE_YEAR.len();
    let mut added = 0;
    for (cell, &n) in counts.iter().enumerate() {
        let sex = if cell < groups { Sex::Female } else { Sex::Male };
        debug_assert_eq!(age_sex_cell(sex, cell % groups), cell);
        let ages = AgeBands::FIVE_YEAR.range(cell % groups);
        let donor_cell = std::iter::once(cell)
            .chain(fallback_cells(cell))
            .find(|&c| !donors[c].is_empty());
        if donor_cell != Some(cell) && n > 0 {
            log.note(ctx.year, format!("no immigrant donor in bracket {cell}; using {donor_cell:?}"));
        }
        for _ in 0..n {
            let age = rng.random_range(ages.clone());
            let ed = ctx.geo.eds()[dest.sample(&mut rng)].ed_id;
            let mut person = Individual::new(PersonId(0), age, sex, ed);
            if let Some(c) = donor_cell {
                let d = donors[c][rng.random_range(0..donors[c].len())];
                let donor = pop.get(d).expect("donor is resident");
                person.marital_status = donor.marital_status;
                person.education_attained = donor.education_attained;
                person.econ_status = donor.econ_status;
                person.prospective_education = donor.prospective_education;
                person.graduation_year = donor.graduation_year;
                if person.marital_status == MaritalStatus::Married {
                    person.spouse = Some(Spouse::Outsider);
                }
            }
            person.immigrated_year = Some(ctx.year);
            let id = pop.add(person);
            log.event(ctx.year, EventKind::Immigration, id, None, Some(ed), "");
            added += 1;
        }
    }
    added
}
