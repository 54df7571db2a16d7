use rand::Rng;

use super::{EventKind, EventLog, YearContext};
use crate::codes::{AGE_COUNT, MAX_AGE};
use crate::error::Result;
use crate::population::{PersonId, Population, SpouseFate};
use crate::rng::{rng_stream, StreamTag};

/// Each person dies with their `(age, sex, year)` probability. The dead are
/// removed with every reference to them; resident spouses become widowed.
pub fn apply_mortality(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> Result<u64> {
    let q = ctx.rates.mortality.year_table(ctx.year)?;
    Ok(apply_mortality_with(pop, &q, ctx, log))
}

/// Mortality with an explicit `[sex][age]` probability table.
pub fn apply_mortality_with(
    pop: &mut Population,
    q: &[[f64; AGE_COUNT]; 2],
    ctx: &YearContext,
    log: &mut EventLog,
) -> u64 {
    let people: Vec<(PersonId, f64)> = pop.iter().map(|p| (p.id, q[p.sex.index()][p.age as usize])).collect();
    let ids: Vec<PersonId> = people.iter().map(|(id, _)| *id).collect();
    let seed = ctx.seed;
    let year = ctx.year;
    let dies = ctx.map_people(&ids, |id| rng_stream(seed, id, year, StreamTag::Mortality).random::<f64>());
    let mut deaths = 0;
    for ((id, q), u) in people.into_iter().zip(dies) {
        if u < q {
            let ed = pop.get(id).map(|p| p.ed_id);
            pop.remove(id, SpouseFate::Widowed);
            log.event(year, EventKind::Death, id, ed, None, "");
            deaths += 1;
        }
    }
    deaths
}

/// Everyone gets a year older; 105 is the ceiling.
pub fn age_population(pop: &mut Population) {
    for p in pop.iter_mut() {
        p.age = (p.age + 1).min(MAX_AGE);
    }
}
