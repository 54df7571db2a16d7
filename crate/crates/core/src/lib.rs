//! Discrete-time dynamic microsimulation of an ED-level population.

pub mod codes;
pub mod dcm;
pub mod engine;
pub mod error;
pub mod events;
pub mod genesis;
pub mod metrics;
pub mod population;
pub mod rates;
pub mod rng;
pub mod sampling;
pub mod socio;

pub use codes::{education_ordinal, AgeBands, EconStatus, EducationLevel, MaritalStatus, Sex, MAX_AGE};
pub use error::{Error, Result};
pub use population::{
    validate, CountyId, EdId, EdRecord, Geography, Individual, PersonId, Population, RegionId, Spouse, Violation,
};
pub use rates::{RateTables, ScenarioConfig};
