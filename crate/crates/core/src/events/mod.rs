//! Annual demographic events: mortality and ageing, internal and
//! international migration, fertility, separations and marriages.

mod fertility;
mod international;
mod internal;
mod mortality;
mod nuptiality;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fertility::{apply_fertility, apply_fertility_with, FertilityOutcome};
pub use internal::{apply_flows, apply_internal_migration};
pub use international::{apply_international_emigration, apply_international_immigration, emigrate, immigrate};
pub use mortality::{age_population, apply_mortality, apply_mortality_with};
pub use nuptiality::{apply_marriages, apply_separations, apply_separations_at, MarriageOutcome};

use crate::codes::{EconStatus, EducationLevel};
use crate::population::{EdId, Geography, PersonId};
use crate::rates::{RateTables, ScenarioConfig};

/// Everything an event module reads besides the population.
#[derive(Debug, Clone, Copy)]
pub struct YearContext<'a> {
    pub year: i32,
    pub seed: u64,
    pub geo: &'a Geography,
    pub rates: &'a RateTables,
    pub scenario: &'a ScenarioConfig,
    /// Multiplier from national migration counts to this population.
    pub migration_scale: f64,
    pub separation_rate: f64,
    /// Generate per-person draws on the rayon pool.
    pub parallel: bool,
}

impl YearContext<'_> {
    /// Per-person results in the order of `ids`, computed in parallel when
    /// enabled. Each closure call must only use its own keyed stream.
    pub fn map_people<T, F>(&self, ids: &[PersonId], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(PersonId) -> T + Sync + Send,
    {
        if self.parallel {
            ids.par_iter().map(|&id| f(id)).collect()
        } else {
            ids.iter().map(|&id| f(id)).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Death,
    Birth,
    Move,
    Emigration,
    Immigration,
    Marriage,
    Separation,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Death => "death",
            EventKind::Birth => "birth",
            EventKind::Move => "move",
            EventKind::Emigration => "emigration",
            EventKind::Immigration => "immigration",
            EventKind::Marriage => "marriage",
            EventKind::Separation => "separation",
        })
    }
}

/// One row of the demographic event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub year: i32,
    pub event: EventKind,
    pub person_id: PersonId,
    pub ed_from: Option<EdId>,
    pub ed_to: Option<EdId>,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EducationEvent {
    Target,
    Dropout,
    Graduate,
    Enrol,
    AdultEnrol,
}

impl fmt::Display for EducationEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EducationEvent::Target => "target",
            EducationEvent::Dropout => "dropout",
            EducationEvent::Graduate => "graduate",
            EducationEvent::Enrol => "enrol",
            EducationEvent::AdultEnrol => "adult_enrol",
        })
    }
}

/// One row of the education transition log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EducationRecord {
    pub year: i32,
    pub person_id: PersonId,
    pub event: EducationEvent,
    pub from_level: EducationLevel,
    pub to_level: Option<EducationLevel>,
    pub next_status: EconStatus,
}

/// Event and education logs plus free-text notes (shortfalls, fallbacks).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub enabled: bool,
    pub events: Vec<EventRecord>,
    pub education: Vec<EducationRecord>,
    pub notes: Vec<String>,
}

impl EventLog {
    pub fn new(enabled: bool) -> Self {
        EventLog {
            enabled,
            ..Default::default()
        }
    }

    pub fn event(&mut self, year: i32, event: EventKind, person_id: PersonId, ed_from: Option<EdId>, ed_to: Option<EdId>, detail: impl Into<String>) {
        if self.enabled {
            self.events.push(EventRecord {
                year,
                event,
                person_id,
                ed_from,
                ed_to,
                detail: detail.into(),
            });
        }
    }

    pub fn education(
        &mut self,
        year: i32,
        person_id: PersonId,
        event: EducationEvent,
        from_level: EducationLevel,
        to_level: Option<EducationLevel>,
        next_status: EconStatus,
    ) {
        if self.enabled {
            self.education.push(EducationRecord {
                year,
                person_id,
                event,
                from_level,
                to_level,
                next_status,
            });
        }
    }

    /// Notes are always kept and mirrored to the logger.
    pub fn note(&mut self, year: i32, message: impl Into<String>) {
        let m = format!("{year}: {}", message.into());
        log::warn!("{m}");
        self.notes.push(m);
    }

    pub fn append(&mut self, other: EventLog) {
        self.events.extend(other.events);
        self.education.extend(other.education);
        self.notes.extend(other.notes);
    }
}

/// Counts of demographic events in one simulated year.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearEventCounts {
    pub deaths: u64,
    pub births: u64,
    pub internal_moves: u64,
    pub intl_immigrants: u64,
    pub intl_emigrants: u64,
    pub marriages: u64,
    pub separations: u64,
}
