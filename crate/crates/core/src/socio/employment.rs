use crate::codes::{EconStatus, LABOUR_MARKET_AGE};
use crate::events::{EventLog, YearContext};
use crate::population::{PersonId, Population};
use crate::rng::{rng_stream, StreamTag};
use crate::sampling::weighted_index;

/// Redraws the labour-market status of everyone above the labour-market age
/// who is not in education. Rows missing for a person's own age band borrow
/// the nearest band; with no row at all the person becomes `OTH`.
pub fn apply_employment(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> u64 {
    let table = &ctx.rates.econ;
    let ids: Vec<PersonId> = pop
        .iter()
        .filter(|p| p.age > LABOUR_MARKET_AGE && !p.is_student())
        .map(|p| p.id)
        .collect();
    let (seed, year) = (ctx.seed, ctx.year);
    let draws: Vec<(EconStatus, bool, bool)> = ctx.map_people(&ids, |id| {
        let p = pop.get(id).expect("listed person");
        match table.row(p.age, p.sex, p.education_attained) {
            Some((row, fallback)) => {
                let mut rng = rng_stream(seed, id, year, StreamTag::Employment);
                let i = weighted_index(row, &mut rng).expect("normalised row");
                (EconStatus::LABOUR[i], fallback, false)
            }
            None => (EconStatus::Other, false, true),
        }
    });
    let (mut fallbacks, mut missing) = (0u64, 0u64);
    for (&id, &(status, fallback, none)) in ids.iter().zip(&draws) {
        pop.get_mut(id).expect("listed person").econ_status = status;
        fallbacks += u64::from(fallback);
        missing += u64::from(none);
    }
    if fallbacks > 0 {
        log.note(year, format!("employment: {fallbacks} draws used a neighbouring age band"));
    }
    if missing > 0 {
        log.note(year, format!("employment: {missing} people had no transition row and were set to OTH"));
    }
    ids.len() as u64
}
