//! `microsim`: synthetic inputs, genesis, simulation, cohort-component
//! baseline, validation and metrics from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use microsim_core::rates::IntlScenario;

#[derive(Debug, Parser)]
#[command(name = "microsim", version, about = "Dynamic spatial population microsimulation")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    #[value(name = "M1")]
    M1,
    #[value(name = "M2")]
    M2,
    #[value(name = "M3")]
    M3,
}

impl From<ScenarioArg> for IntlScenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::M1 => IntlScenario::M1,
            ScenarioArg::M2 => IntlScenario::M2,
            ScenarioArg::M3 => IntlScenario::M3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Snapshots {
    None,
    Yearly,
}

#[derive(Debug, Args)]
pub struct Global {
    /// International migration scenario [default: from scenario.json]
    #[arg(long, global = true, value_enum)]
    pub scenario: Option<ScenarioArg>,
    /// Census year of the internal flow table [default: from scenario.json]
    #[arg(long, global = true, value_parser = ["2016", "2022"])]
    pub internal: Option<String>,
    /// Master seed [default: from scenario.json]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Years to simulate or project [default: the configured horizon]
    #[arg(long, global = true)]
    pub years: Option<u32>,
    /// Rates directory [default: <out>/rates]
    #[arg(long, global = true)]
    pub rates: Option<PathBuf>,
    /// Population file [default depends on the command]
    #[arg(long, global = true)]
    pub base: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "none")]
    pub snapshots: Snapshots,
    /// Worker threads for per-person draws
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic geography, rate tables and base population
    GenSynth {
        #[arg(long, default_value_t = 100_000)]
        size: usize,
        #[arg(long, default_value_t = 200)]
        eds: usize,
    },
    /// Impute education and form initial marriages
    Init,
    /// Run the microsimulation
    Run {
        /// Skip per-event logs
        #[arg(long)]
        no_event_log: bool,
        /// Write a checkpoint here when the run ends
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue from a checkpoint instead of the base population
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Cohort-component projection from the same inputs
    Dcm,
    /// Compare the microsimulation against the projection
    Validate,
    /// Compute result metrics for the start and end populations
    Report,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
