#![allow(dead_code)]

use microsim_core::codes::{EconStatus, EducationLevel, MaritalStatus, Sex};
use microsim_core::engine::SimState;
use microsim_core::events::{EventLog, YearContext};
use microsim_core::genesis::{gen_synthetic_base, initialise};
use microsim_core::population::{CountyId, EdId, EdRecord, Geography, Individual, PersonId, Population, RegionId};
use microsim_core::rates::{gen_synthetic_geography, gen_synthetic_rates, MortalityTable, RateTables};
use microsim_core::MAX_AGE;

pub fn synthetic_state(seed: u64, size: usize, eds: usize) -> SimState {
    let geo = gen_synthetic_geography(seed, eds, size as u64);
    let rates = gen_synthetic_rates(seed, &geo);
    let mut pop = gen_synthetic_base(seed, &geo, size);
    initialise(&mut pop, &geo, &rates, seed).expect("synthetic inputs initialise");
    let mut scenario = rates.scenario.clone();
    scenario.master_seed = seed;
    SimState::new(pop, geo, rates, scenario).expect("synthetic inputs are consistent")
}

/// `(ed, county, region)` triples; equal immigrant weights, roomy capacities.
pub fn geography(eds: &[(u32, u32, u32)]) -> Geography {
    let w = 1.0 / eds.len() as f64;
    Geography::new(
        eds.iter()
            .map(|&(e, c, r)| EdRecord {
                ed_id: EdId(e),
                county_id: CountyId(c),
                region_id: RegionId(r),
                base_population: 100,
                intra_county_capacity: 1_000_000,
                inter_county_capacity: 1_000_000,
                intl_immigrant_weight: w,
            })
            .collect(),
    )
    .expect("valid test geography")
}

/// A legal non-student adult: single, upper secondary, working.
pub fn adult(id: u64, age: u8, sex: Sex, ed: u32) -> Individual {
    let mut p = Individual::new(PersonId(id), age, sex, EdId(ed));
    p.education_attained = EducationLevel::UpperSecondary;
    p.econ_status = if age > 15 { EconStatus::Working } else { EconStatus::NotApplicable };
    p
}

pub fn marry(pop: &mut Population, a: u64, b: u64) {
    pop.link_spouses(PersonId(a), PersonId(b));
}

pub fn ctx<'a>(state: &'a SimState, year: i32) -> YearContext<'a> {
    YearContext {
        year,
        seed: state.master_seed,
        geo: &state.geography,
        rates: &state.rates,
        scenario: &state.scenario,
        migration_scale: state.migration_scale,
        separation_rate: state.separation_rate,
        parallel: false,
    }
}

pub fn quiet_log() -> EventLog {
    EventLog::new(false)
}

/// The same mortality for every age and sex, before improvement.
pub fn flat_mortality(q: f64) -> MortalityTable {
    MortalityTable::new([[q; MAX_AGE as usize + 1]; 2]).expect("valid rates")
}

/// Rates with every demographic flow switched off.
pub fn still_rates(mut rates: RateTables) -> RateTables {
    rates.mortality = flat_mortality(0.0);
    rates.fertility = rates.fertility.scaled(0.0);
    for t in rates.internal_flows.values_mut() {
        *t = t.zeroed();
    }
    rates.nuptiality.marriage_rate = 0.0;
    rates.nuptiality.separation_rate = Some(0.0);
    rates
}

pub fn count_status(pop: &Population, s: MaritalStatus) -> usize {
    pop.iter().filter(|p| p.marital_status == s).count()
}

/// Wraps a hand-built population with synthetic rates for `geo`.
pub fn state_for(pop: Population, geo: Geography, seed: u64) -> SimState {
    let rates = gen_synthetic_rates(seed, &geo);
    let mut scenario = rates.scenario.clone();
    scenario.master_seed = seed;
    SimState::new(pop, geo, rates, scenario).expect("consistent test state")
}

/// `n` single working adults of alternating sex, ids from `first`.
pub fn adults(pop: &mut Population, first: u64, n: u64, age: u8, ed: u32) {
    for i in 0..n {
        let sex = if i % 2 == 0 { Sex::Female } else { Sex::Male };
        pop.insert(adult(first + i, age, sex, ed)).expect("fresh id");
    }
}

/// Chi-square goodness-of-fit p-value of `observed` counts against the
/// probabilities `expected`. Cells expecting fewer than five draws are pooled.
pub fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    assert_eq!(observed.len(), expected.len());
    let n: u64 = observed.iter().sum();
    let total_p: f64 = expected.iter().sum();
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut pooled_o, mut pooled_e) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        let e = n as f64 * p / total_p;
        if e == 0.0 {
            assert_eq!(o, 0, "draw in a cell with zero probability");
        } else if e < 5.0 {
            pooled_o += o as f64;
            pooled_e += e;
        } else {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_e > 0.0 {
        stat += (pooled_o - pooled_e).powi(2) / pooled_e;
        cells += 1;
    }
    assert!(cells >= 2, "too few cells for a chi-square test");
    1.0 - ChiSquared::new((cells - 1) as f64).expect("positive dof").cdf(stat)
}
