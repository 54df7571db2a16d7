//! Annual pipeline, run loop and checkpoints.

mod checkpoint;

use serde::{Deserialize, Serialize};

pub use checkpoint::{checkpoint, read_checkpoint_header, restore, CheckpointHeader, CHECKPOINT_MAGIC, FORMAT_VERSION};

use crate::codes::MaritalStatus;
use crate::error::{Error, Result};
use crate::events::{self, EventLog, YearContext, YearEventCounts};
use crate::population::{validate, validate_transition, Geography, Population};
use crate::rates::{RateTables, ScenarioConfig};
use crate::socio::{self, EducationCounts};

/// Modules in execution order. Employment must stay last.
pub const MODULE_ORDER: [&str; 13] = [
    "mortality",
    "ageing",
    "internal_migration",
    "international_emigration",
    "international_immigration",
    "fertility",
    "separations",
    "marriages",
    "education_dropouts",
    "education_graduations",
    "education_primary_enrolment",
    "education_adult_learners",
    "employment",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    /// Rayon workers for per-person draws; 1 runs everything inline.
    pub workers: usize,
    /// Keep per-event records (notes are always kept).
    pub log_events: bool,
    /// Run `validate` and the transition audit after every year.
    pub audit: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            workers: 1,
            log_events: false,
            audit: true,
        }
    }
}

/// What one simulated year did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearReport {
    pub year: i32,
    pub population_before: u64,
    pub population_after: u64,
    pub counts: YearEventCounts,
    pub same_sex_marriages: u64,
    pub marriage_target: u64,
    pub education: EducationCounts,
    pub employment_draws: u64,
    /// `before − deaths + births + immigrants − emigrants == after`.
    pub accounting_ok: bool,
    pub modules: Vec<String>,
}

impl YearReport {
    pub fn expected_after(&self) -> i64 {
        let c = &self.counts;
        self.population_before as i64 - c.deaths as i64 + c.births as i64 + c.intl_immigrants as i64
            - c.intl_emigrants as i64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    /// Last completed year; the next call to [`run_year`] simulates `year + 1`.
    pub year: i32,
    pub master_seed: u64,
    pub population: Population,
    pub geography: Geography,
    pub rates: RateTables,
    pub scenario: ScenarioConfig,
    pub migration_scale: f64,
    pub separation_rate: f64,
    pub reports: Vec<YearReport>,
}

impl SimState {
    /// Wraps an initialised population at the scenario start year. The
    /// migration scale and separation rate are fixed here from the base.
    pub fn new(population: Population, geography: Geography, rates: RateTables, scenario: ScenarioConfig) -> Result<Self> {
        scenario.check()?;
        rates.check_against(&geography)?;
        let migration_scale = scenario.migration_scale_for(population.len());
        let married = population
            .iter()
            .filter(|p| p.marital_status == MaritalStatus::Married)
            .count();
        let separation_rate = rates.nuptiality.derive_separation_rate(married, migration_scale);
        Ok(SimState {
            year: scenario.start_year,
            master_seed: scenario.master_seed,
            population,
            geography,
            rates,
            scenario,
            migration_scale,
            separation_rate,
            reports: Vec::new(),
        })
    }

    pub fn years_remaining(&self) -> u32 {
        (self.scenario.end_year() - self.year).max(0) as u32
    }
}

fn step(state: &mut SimState, year: i32, opts: &EngineOptions, log: &mut EventLog) -> Result<YearReport> {
    let SimState {
        population: pop,
        geography,
        rates,
        scenario,
        ..
    } = state;
    let ctx = YearContext {
        year,
        seed: state.master_seed,
        geo: geography,
        rates,
        scenario,
        migration_scale: state.migration_scale,
        separation_rate: state.separation_rate,
        parallel: opts.workers > 1,
    };
    let before = pop.len() as u64;
    let mut counts = YearEventCounts::default();
    let mut modules = Vec::with_capacity(MODULE_ORDER.len());
    let mut done = |m: &str| modules.push(m.to_string());

    counts.deaths = events::apply_mortality(pop, &ctx, log)?;
    done(MODULE_ORDER[0]);
    events::age_population(pop);
    done(MODULE_ORDER[1]);
    let size_before_moves = pop.len();
    counts.internal_moves = events::apply_internal_migration(pop, &ctx, log)?;
    if pop.len() != size_before_moves {
        return Err(Error::Domain(format!("{year}: internal migration changed the population size")));
    }
    done(MODULE_ORDER[2]);
    counts.intl_emigrants = events::apply_international_emigration(pop, &ctx, log)?;
    done(MODULE_ORDER[3]);
    counts.intl_immigrants = events::apply_international_immigration(pop, &ctx, log)?;
    done(MODULE_ORDER[4]);
    counts.births = events::apply_fertility(pop, &ctx, log).births;
    done(MODULE_ORDER[5]);
    counts.separations = events::apply_separations(pop, &ctx, log);
    done(MODULE_ORDER[6]);
    let marriages = events::apply_marriages(pop, &ctx, log);
    counts.marriages = marriages.couples;
    done(MODULE_ORDER[7]);
    let mut education = EducationCounts::default();
    education.dropouts = socio::apply_dropouts(pop, &ctx, log);
    done(MODULE_ORDER[8]);
    education.graduates = socio::apply_graduations(pop, &ctx, log);
    done(MODULE_ORDER[9]);
    education.primary_enrolments = socio::enrol_primary(pop, &ctx, log);
    done(MODULE_ORDER[10]);
    education.adult_enrolments = socio::enrol_adult_learners(pop, &ctx, log);
    done(MODULE_ORDER[11]);
    let employment_draws = socio::apply_employment(pop, &ctx, log);
    done(MODULE_ORDER[12]);

    let mut report = YearReport {
        year,
        population_before: before,
        population_after: pop.len() as u64,
        counts,
        same_sex_marriages: marriages.same_sex,
        marriage_target: marriages.target,
        education,
        employment_draws,
        accounting_ok: false,
        modules,
    };
    report.accounting_ok = report.expected_after() == report.population_after as i64;
    if !report.accounting_ok {
        return Err(Error::Domain(format!(
            "{year}: accounting identity failed: expected {}, found {}",
            report.expected_after(),
            report.population_after
        )));
    }
    Ok(report)
}

/// Simulates the next year. On any failure the state is left exactly as it
/// was before the call.
pub fn run_year(state: &mut SimState, opts: &EngineOptions) -> Result<(YearReport, EventLog)> {
    let year = state.year + 1;
    if year > state.scenario.end_year() {
        return Err(Error::Config(format!("year {year} is past the configured horizon")));
    }
    let snapshot = state.population.clone();
    let mut log = EventLog::new(opts.log_events);
    let outcome = if opts.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| step(state, year, opts, &mut log))
    } else {
        step(state, year, opts, &mut log)
    };
    let checked = outcome.and_then(|report| {
        if opts.audit {
            let mut bad = validate(&state.population, &state.geography);
            bad.extend(validate_transition(&snapshot, &state.population));
            if !bad.is_empty() {
                return Err(Error::Invalid(bad));
            }
        }
        Ok(report)
    });
    match checked {
        Ok(report) => {
            state.year = year;
            state.reports.push(report.clone());
            Ok((report, log))
        }
        Err(e) => {
            state.population = snapshot;
            Err(e)
        }
    }
}

/// Per-year output handed to [`run_with`]'s observer.
pub struct YearOutput<'a> {
    pub state: &'a SimState,
    pub report: &'a YearReport,
    pub log: &'a EventLog,
}

/// Runs `years` years, calling `observe` after each one.
pub fn run_with<F>(state: &mut SimState, years: u32, opts: &EngineOptions, mut observe: F) -> Result<()>
where
    F: FnMut(YearOutput<'_>) -> Result<()>,
{
    if years > state.years_remaining() {
        return Err(Error::Config(format!(
            "{years} years requested but only {} remain before the horizon",
            state.years_remaining()
        )));
    }
    for _ in 0..years {
        let (report, log) = run_year(state, opts)?;
        observe(YearOutput {
            state,
            report: &report,
            log: &log,
        })?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct SimulationResult {
    pub reports: Vec<YearReport>,
    pub log: EventLog,
    /// `(year, population)` after each year, when requested.
    pub snapshots: Vec<(i32, Population)>,
}

pub fn run(state: &mut SimState, years: u32, opts: &EngineOptions, snapshots: bool) -> Result<SimulationResult> {
    let mut out = SimulationResult {
        log: EventLog::new(opts.log_events),
        ..Default::default()
    };
    run_with(state, years, opts, |y| {
        out.reports.push(y.report.clone());
        out.log.append(y.log.clone());
        if snapshots {
            out.snapshots.push((y.state.year, y.state.population.clone()));
        }
        Ok(())
    })?;
    Ok(out)
}
