use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use super::{EventKind, EventLog, YearContext};
use crate::error::Result;
use crate::population::{CountyId, EdId, Population, AGE_SEX_CELLS};
use crate::rates::{InternalFlowTable, MigrationContext};
use crate::rng::{group_stream, StreamTag};
use crate::sampling::{weighted_index, CellPool};

/// Moves people between and within counties according to the configured
/// census-year flow table. Returns the number of moves; totals are unchanged.
pub fn apply_internal_migration(pop: &mut Population, ctx: &YearContext, log: &mut EventLog) -> Result<u64> {
    let flows = ctx.rates.flows(ctx.scenario.internal_flow_year)?;
    Ok(apply_flows(pop, ctx, flows, log))
}

/// As [`apply_internal_migration`] with an explicit flow table.
pub fn apply_flows(pop: &mut Population, ctx: &YearContext, flows: &InternalFlowTable, log: &mut EventLog) -> u64 {
    let geo = ctx.geo;
    // Pools are built before anyone moves so arrivals cannot move again.
    let mut pools: BTreeMap<CountyId, Vec<(EdId, CellPool)>> = BTreeMap::new();
    for f in flows.flows().iter().filter(|f| f.count > 0) {
        pools.entry(f.origin).or_insert_with(|| {
            geo.county_eds(f.origin)
                .iter()
                .map(|&ed| {
                    let mut pool = CellPool::new(AGE_SEX_CELLS);
                    for id in pop.residents(ed) {
                        pool.push(pop.get(id).expect("indexed resident").age_sex_cell(), id);
                    }
                    (ed, pool)
                })
                .collect()
        });
    }

    let mut arrivals: HashMap<(EdId, bool), u32> = HashMap::new();
    let mut moves = 0;
    for (k, f) in flows.flows().iter().enumerate() {
        if f.count == 0 {
            continue;
        }
        let intra = f.is_intra();
        let context = if intra { MigrationContext::Intra } else { MigrationContext::Inter };
        let profile = ctx.rates.profiles.get(context).weights();
        let mut rng = group_stream(ctx.seed, k as u64, ctx.year, StreamTag::InternalMigration);
        let origin = pools.get_mut(&f.origin).expect("pool built for every origin");
        let dest_eds = geo.county_eds(f.dest);
        if dest_eds.is_empty() {
            log.note(ctx.year, format!("county {} has no EDs; flow from {} dropped", f.dest, f.origin));
            continue;
        }
        let mut done = 0;
        for _ in 0..f.count {
            let sizes: Vec<f64> = origin.iter().map(|(_, p)| p.len() as f64).collect();
            let Some(e) = weighted_index(&sizes, &mut rng) else { break };
            let from_ed = origin[e].0;
            let Some((_, id)) = origin[e].1.take_weighted(profile, &mut rng) else { break };

            let options: Vec<EdId> = dest_eds
                .iter()
                .copied()
                .filter(|&d| !(intra && d == from_ed && dest_eds.len() > 1))
                .collect();
            let capacity = |d: EdId| {
                let ed = geo.ed(d).expect("known ED");
                if intra { ed.intra_county_capacity } else { ed.inter_county_capacity }
            };
            let open: Vec<EdId> = options
                .iter()
                .copied()
                .filter(|&d| arrivals.get(&(d, intra)).copied().unwrap_or(0) < capacity(d))
                .collect();
            let to_ed = if !open.is_empty() {
                open[rng.random_range(0..open.len())]
            } else {
                let w: Vec<f64> = options.iter().map(|&d| f64::from(capacity(d))).collect();
                match weighted_index(&w, &mut rng) {
                    Some(i) => options[i],
                    None => options[rng.random_range(0..options.len())],
                }
            };
            *arrivals.entry((to_ed, intra)).or_default() += 1;
            pop.move_to_ed(id, to_ed);
            log.event(ctx.year, EventKind::Move, id, Some(from_ed), Some(to_ed), context.name());
            done += 1;
        }
        if done < f.count {
            log.note(
                ctx.year,
                format!("flow {} -> {} clipped from {} to {} movers", f.origin, f.dest, f.count, done),
            );
        }
        moves += done;
    }
    moves
}
