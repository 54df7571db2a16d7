//! Turning a base population into a simulation-ready one.

mod base;
mod education;
mod marriage;
pub mod matching;

pub use base::{cohort_education_weights, gen_synthetic_base};
pub use education::{init_education, school_stage, EducationInit};
pub use marriage::{init_marriages, MarriageInit, MarriageInitConfig};
pub use matching::{dissimilarity, match_partner, shortlist, MatchCandidate, MatchParams, Profile};

use crate::error::{Error, Result};
use crate::population::{validate, Geography, Population};
use crate::rates::RateTables;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct GenesisReport {
    pub education: EducationInit,
    pub marriages: MarriageInit,
}

impl MarriageInitConfig {
    pub fn from_rates(rates: &RateTables) -> Self {
        let n = &rates.nuptiality;
        MarriageInitConfig {
            params: MatchParams {
                lambda: n.lambda,
                concentration: n.concentration,
                pool_size: n.pool_size,
            },
            same_sex_share: n.same_sex_share,
        }
    }
}

/// Imputes education, links spouses and checks the result. Education runs
/// first so partner matching sees every adult's attainment.
pub fn initialise(pop: &mut Population, geo: &Geography, rates: &RateTables, seed: u64) -> Result<GenesisReport> {
    let start = rates.scenario.start_year;
    for p in pop.iter() {
        if !geo.contains(p.ed_id) {
            return Err(Error::Domain(format!("person {} lives in unknown ED {}", p.id, p.ed_id)));
        }
    }
    let education = init_education(pop, rates, start, seed);
    let marriages = init_marriages(pop, geo, &MarriageInitConfig::from_rates(rates), seed, start);
    let violations = validate(pop, geo);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    Ok(GenesisReport { education, marriages })
}
