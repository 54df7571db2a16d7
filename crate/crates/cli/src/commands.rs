use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::info;
use microsim_core::dcm::{self, CohortLedger, DcmRates};
use microsim_core::engine::{self, EngineOptions, SimState};
use microsim_core::genesis::{gen_synthetic_base, initialise};
use microsim_core::metrics::metrics_bundle;
use microsim_core::population::{is_initialised_header, read_population, write_population};
use microsim_core::rates::{
    gen_synthetic_geography, gen_synthetic_rates, load_geography, load_rates, write_geography, write_rates, IntlScenario,
    ScenarioConfig,
};
use microsim_core::{Geography, Population, RateTables};
use serde::{Deserialize, Serialize};

use crate::output::{csv_writer_headed, read_json, write_json, write_metrics, write_summary, write_validation};
use crate::{Cli, Command, Global, Snapshots};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] microsim_core::Error),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Csv(PathBuf, csv::Error),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Json(PathBuf, serde_json::Error),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn csv(path: &Path, e: csv::Error) -> Self {
        CliError::Csv(path.into(), e)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(path.into(), e)
    }

    /// Every failure past argument parsing is a data error.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Written by `run` and `dcm` so `validate` can check both describe the
/// same scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub scenario: IntlScenario,
    pub internal_flow_year: i32,
    pub master_seed: u64,
    pub start_year: i32,
    pub end_year: i32,
}

impl RunMeta {
    fn new(s: &ScenarioConfig, start_year: i32, end_year: i32) -> Self {
        RunMeta {
            scenario: s.intl_scenario,
            internal_flow_year: s.internal_flow_year,
            master_seed: s.master_seed,
            start_year,
            end_year,
        }
    }
}

pub const RUN_META: &str = "run_meta.json";
pub const DCM_META: &str = "dcm_meta.json";
pub const MICRO_PROJECTION: &str = "micro_projection.csv";
pub const DCM_PROJECTION: &str = "dcm_projection.csv";
pub const BASE_POPULATION: &str = "base_population.csv";
pub const INITIALISED_POPULATION: &str = "initialised_population.csv";
pub const START_POPULATION: &str = "start_population.csv";
pub const FINAL_POPULATION: &str = "final_population.csv";

fn rates_dir(g: &Global) -> PathBuf {
    g.rates.clone().unwrap_or_else(|| g.out.join("rates"))
}

fn mkdir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// `--base`, else the initialised population in `--out`, else the raw base.
fn population_path(g: &Global) -> PathBuf {
    if let Some(p) = &g.base {
        return p.clone();
    }
    let init = g.out.join(INITIALISED_POPULATION);
    if init.exists() {
        init
    } else {
        g.out.join(BASE_POPULATION)
    }
}

fn is_initialised(path: &Path) -> Result<bool> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => microsim_core::Error::MissingFile(path.into()).into(),
        _ => CliError::io(path, e),
    })?;
    Ok(is_initialised_header(text.lines().next().unwrap_or_default()))
}

/// Scenario from the rates directory with command-line overrides applied.
fn scenario(g: &Global, rates: &RateTables) -> Result<ScenarioConfig> {
    let mut s = rates.scenario.clone();
    if let Some(sc) = g.scenario {
        s.intl_scenario = sc.into();
    }
    if let Some(y) = &g.internal {
        s.internal_flow_year = y.parse().expect("clap restricts the value");
    }
    if let Some(seed) = g.seed {
        s.master_seed = seed;
    }
    if !rates.internal_flows.contains_key(&s.internal_flow_year) {
        return Err(microsim_core::Error::MissingFile(format!("internal_flows_{}.csv", s.internal_flow_year).into()).into());
    }
    s.check()?;
    Ok(s)
}

fn years(g: &Global, available: u32) -> Result<u32> {
    match g.years {
        Some(y) if y > available => Err(microsim_core::Error::Config(format!(
            "{y} years requested but the horizon allows {available}"
        ))
        .into()),
        Some(y) => Ok(y),
        None => Ok(available),
    }
}

fn load_inputs(g: &Global) -> Result<(Geography, RateTables)> {
    let dir = rates_dir(g);
    let geo = load_geography(&dir)?;
    let mut rates = load_rates(&dir)?;
    rates.check_against(&geo)?;
    rates.scenario = scenario(g, &rates)?;
    Ok((geo, rates))
}

/// Reads a population, running genesis on it if it is a raw base file.
fn load_population(g: &Global, geo: &Geography, rates: &RateTables) -> Result<Population> {
    let path = population_path(g);
    let initialised = is_initialised(&path)?;
    let mut pop = read_population(&path)?;
    if !initialised {
        info!("{} is a raw base population; running genesis", path.display());
        initialise(&mut pop, geo, rates, rates.scenario.master_seed)?;
    }
    Ok(pop)
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::GenSynth { size, eds } => gen_synth(g, *size, *eds),
        Command::Init => init(g),
        Command::Run {
            no_event_log,
            checkpoint,
            resume,
        } => run(g, !no_event_log, checkpoint.as_deref(), resume.as_deref()),
        Command::Dcm => project(g),
        Command::Validate => validate(g),
        Command::Report => report(g),
    }
}

fn gen_synth(g: &Global, size: usize, eds: usize) -> Result<()> {
    let seed = g.seed.unwrap_or(0);
    let geo = gen_synthetic_geography(seed, eds, size as u64);
    let mut rates = gen_synthetic_rates(seed, &geo);
    rates.scenario = scenario(g, &rates)?;
    let dir = rates_dir(g);
    write_geography(&dir, &geo)?;
    write_rates(&dir, &rates)?;
    let base = g.base.clone().unwrap_or_else(|| g.out.join(BASE_POPULATION));
    if let Some(parent) = base.parent() {
        mkdir(parent)?;
    }
    write_population(&gen_synthetic_base(seed, &geo, size), &base)?;
    println!("wrote {} and {}", dir.display(), base.display());
    Ok(())
}

fn init(g: &Global) -> Result<()> {
    let (geo, rates) = load_inputs(g)?;
    let path = g.base.clone().unwrap_or_else(|| g.out.join(BASE_POPULATION));
    let mut pop = read_population(&path)?;
    let report = initialise(&mut pop, &geo, &rates, rates.scenario.master_seed)?;
    mkdir(&g.out)?;
    write_population(&pop, &g.out.join(INITIALISED_POPULATION))?;
    write_json(&g.out.join("genesis_report.json"), &report)?;
    println!(
        "initialised {} people: {} couples, {} outsider spouses",
        pop.len(),
        report.marriages.couples(),
        report.marriages.outsiders
    );
    Ok(())
}

fn run(g: &Global, log_events: bool, checkpoint: Option<&Path>, resume: Option<&Path>) -> Result<()> {
    let mut state = match resume {
        Some(path) => engine::restore(path)?,
        None => {
            let (geo, rates) = load_inputs(g)?;
            let pop = load_population(g, &geo, &rates)?;
            let scenario = rates.scenario.clone();
            SimState::new(pop, geo, rates, scenario)?
        }
    };
    let years = years(g, state.years_remaining())?;
    let opts = EngineOptions {
        workers: g.workers.max(1),
        log_events,
        audit: true,
    };
    let out = &g.out;
    mkdir(out)?;
    let start_year = state.year;
    write_population(&state.population, &out.join(START_POPULATION))?;

    let events_path = out.join("events.csv");
    let edu_path = out.join("education_events.csv");
    let mut events = csv_writer_headed(&events_path, &["year", "event", "person_id", "ed_from", "ed_to", "detail"])?;
    let mut edu = csv_writer_headed(
        &edu_path,
        &["year", "person_id", "event", "from_level", "to_level", "next_status"],
    )?;
    let log_path = out.join("run_log.txt");
    let mut run_log = fs::File::create(&log_path).map_err(|e| CliError::io(&log_path, e))?;
    let mut ledgers = vec![CohortLedger::from_population(&state.population, start_year)];
    let mut reports = Vec::new();

    engine::run_with(&mut state, years, &opts, |y| {
        let io = |e: std::io::Error| microsim_core::Error::Domain(format!("{}: {e}", log_path.display()));
        writeln!(run_log, "{}: {}", y.report.year, y.report.modules.join(" > ")).map_err(io)?;
        for n in &y.log.notes {
            writeln!(run_log, "note {n}").map_err(io)?;
        }
        let csv_err = |e: csv::Error| microsim_core::Error::Domain(format!("event log: {e}"));
        for r in &y.log.events {
            events.serialize(r).map_err(csv_err)?;
        }
        for r in &y.log.education {
            edu.serialize(r).map_err(csv_err)?;
        }
        ledgers.push(CohortLedger::from_population(&y.state.population, y.state.year));
        if g.snapshots == Snapshots::Yearly {
            write_population(&y.state.population, &out.join(format!("population_{}.csv", y.state.year)))?;
        }
        reports.push(y.report.clone());
        Ok(())
    })?;
    events.flush().map_err(|e| CliError::io(&events_path, e))?;
    edu.flush().map_err(|e| CliError::io(&edu_path, e))?;
    if !log_events {
        fs::remove_file(&events_path).map_err(|e| CliError::io(&events_path, e))?;
        fs::remove_file(&edu_path).map_err(|e| CliError::io(&edu_path, e))?;
    }

    write_population(&state.population, &out.join(FINAL_POPULATION))?;
    write_summary(&out.join("summary.csv"), &reports)?;
    dcm::write_ledgers(&out.join(MICRO_PROJECTION), &ledgers)?;
    write_json(&out.join(RUN_META), &RunMeta::new(&state.scenario, start_year, state.year))?;
    if let Some(path) = checkpoint {
        engine::checkpoint(&state, path)?;
    }
    println!(
        "simulated {start_year}..{}: population {} -> {}",
        state.year,
        ledgers[0].total(),
        state.population.len()
    );
    Ok(())
}

fn project(g: &Global) -> Result<()> {
    let (geo, rates) = load_inputs(g)?;
    let pop = load_population(g, &geo, &rates)?;
    let s = rates.scenario.clone();
    let years = years(g, s.horizon_years)?;
    let scale = s.migration_scale_for(pop.len());
    let dr = DcmRates::matched(&rates, &pop, &geo, &s, scale);
    let ledgers = dcm::project_dcm(&CohortLedger::from_population(&pop, s.start_year), &dr, years)?;
    mkdir(&g.out)?;
    dcm::write_ledgers(&g.out.join(DCM_PROJECTION), &ledgers)?;
    write_json(&g.out.join(DCM_META), &RunMeta::new(&s, s.start_year, s.start_year + years as i32))?;
    let last = ledgers.last().expect("base year present");
    println!("projected {}..{}: total {:.0}", s.start_year, last.year, last.total());
    Ok(())
}

fn validate(g: &Global) -> Result<()> {
    let micro_meta: RunMeta = read_json(&g.out.join(RUN_META))?;
    let dcm_meta: RunMeta = read_json(&g.out.join(DCM_META))?;
    let micro = dcm::read_ledgers(&g.out.join(MICRO_PROJECTION))?;
    let macro_ = dcm::read_ledgers(&g.out.join(DCM_PROJECTION))?;
    let report = dcm::compare(micro_meta.scenario, &micro, dcm_meta.scenario, &macro_)?;
    write_validation(&g.out.join("validation_report.csv"), &report)?;
    let table = dcm::comparison_table(&report);
    let path = g.out.join("table2_style.txt");
    fs::write(&path, &table).map_err(|e| CliError::io(&path, e))?;
    print!("{table}");
    Ok(())
}

fn report(g: &Global) -> Result<()> {
    let geo = load_geography(&rates_dir(g))?;
    let meta: RunMeta = read_json(&g.out.join(RUN_META))?;
    let start = read_population(&g.out.join(START_POPULATION))?;
    let end = read_population(&g.out.join(FINAL_POPULATION))?;
    let m = metrics_bundle(&start, &end, &geo)?;
    write_metrics(&g.out, &m, meta.start_year, meta.end_year)?;
    write_json(&g.out.join("metrics.json"), &m)?;
    println!(
        "YDR {:.2}, ODR {:.2}, third-level share {:.3}, unemployment {} of labour force",
        m.ydr,
        m.odr,
        m.education_shares.third_level(),
        m.unemployment.rate_lf.map_or("NA".into(), |r| format!("{:.3}", r))
    );
    Ok(())
}
