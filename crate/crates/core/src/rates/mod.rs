//! Exogenous rate tables and scenario schedules.

pub mod econ;
pub mod education;
pub mod fertility;
mod load;
pub mod migration;
pub mod mortality;
pub mod nuptiality;
pub mod scenario;
pub mod synth;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use econ::{EconRecord, EconRow, EconTransitionTable, ECON_BANDS};
pub use education::{
    learner_cell, BroadBand, DropoutPriority, EducationRates, EducationRatesFile, OutcomeRow, SecondaryDropout,
    ADULT_LEARNER_CELLS,
};
pub use fertility::{FertilityRow, FertilityTable, MaritalBand, BASE_TFR, FERTILITY_GROUPS, FIRST_MARITAL_GROUP};
pub use load::{load_geography, load_rates, write_geography, write_rates};
pub use migration::{
    check_distribution, AgeSexDist, CountyFlow, InternalFlowTable, MigrationContext, MigrationProfiles,
    RegionShares, PROBABILITY_TOLERANCE,
};
pub use mortality::{improvement_rate, improvement_scale, MortalityTable, MORTALITY_BASE_YEAR};
pub use nuptiality::{CandidateAges, MarriageRateUnit, NuptialityConfig};
pub use scenario::{
    migration_targets, tfr, tfr_factor, IntlScenario, MigrationTargets, ScenarioConfig, TfrSchedule,
    GROSS_DERIVED_UNTIL,
};
pub use synth::{gen_synthetic_geography, gen_synthetic_rates};

use crate::error::{Error, Result};
use crate::population::{Geography, RegionId};

/// Every table the engine reads. Immutable once loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTables {
    pub mortality: MortalityTable,
    pub fertility: FertilityTable,
    /// County flows keyed by census year.
    pub internal_flows: BTreeMap<i32, InternalFlowTable>,
    pub profiles: MigrationProfiles,
    /// Emigrant origin shares; `None` means proportional to population.
    pub region_emigrant_shares: Option<RegionShares>,
    pub education: EducationRates,
    pub econ: EconTransitionTable,
    pub nuptiality: NuptialityConfig,
    pub scenario: ScenarioConfig,
}

impl RateTables {
    pub fn flows(&self, year: i32) -> Result<&InternalFlowTable> {
        self.internal_flows
            .get(&year)
            .ok_or_else(|| Error::Config(format!("no internal flow table for {year}")))
    }

    /// Cross-checks the tables against a geography.
    pub fn check_against(&self, geo: &Geography) -> Result<()> {
        for r in geo.regions() {
            if !self.fertility.has_region(r) {
                return Err(Error::Config(format!("fertility table lacks region {r}")));
            }
        }
        let counties: Vec<_> = geo.counties().map(|(c, _)| c).collect();
        for table in self.internal_flows.values() {
            for f in table.flows() {
                if !counties.contains(&f.origin) || !counties.contains(&f.dest) {
                    return Err(Error::Config(format!(
                        "{} flows mention an unknown county ({} -> {})",
                        table.year, f.origin, f.dest
                    )));
                }
            }
        }
        if let Some(shares) = &self.region_emigrant_shares {
            if let Some(r) = shares.0.keys().find(|r| !geo.regions().any(|g| g == **r)) {
                return Err(Error::Config(format!("emigrant shares mention unknown region {r}")));
            }
        }
        self.scenario.check()?;
        self.nuptiality.check()
    }

    /// Emigrant origin share per region, given current regional populations.
    pub fn emigrant_shares(&self, region_pop: &BTreeMap<RegionId, usize>) -> BTreeMap<RegionId, f64> {
        match &self.region_emigrant_shares {
            Some(s) => region_pop.keys().map(|r| (*r, s.get(*r))).collect(),
            None => {
                let total: usize = region_pop.values().sum();
                region_pop
                    .iter()
                    .map(|(r, n)| (*r, if total == 0 { 0.0 } else { *n as f64 / total as f64 }))
                    .collect()
            }
        }
    }
}
