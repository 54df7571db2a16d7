use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// International migration assumption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntlScenario {
    M1,
    M2,
    M3,
}

impl IntlScenario {
    /// `(year, net)` anchors; linear in between, flat after the last.
    fn net_anchors(self) -> &'static [(i32, f64)] {
        match self {
            IntlScenario::M1 => &[(2022, 75_000.0), (2027, 45_000.0)],
            IntlScenario::M2 => &[(2022, 75_000.0), (2032, 30_000.0)],
            IntlScenario::M3 => &[(2022, 75_000.0), (2027, 25_000.0), (2032, 10_000.0)],
        }
    }

    /// Fixed `(immigrants, emigrants)` once gross flows are pinned.
    pub fn gross_after_2032(self) -> (f64, f64) {
        match self {
            IntlScenario::M1 => (95_000.0, 50_000.0),
            IntlScenario::M2 => (85_000.0, 50_000.0),
            IntlScenario::M3 => (70_000.0, 60_000.0),
        }
    }
}

impl fmt::Display for IntlScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntlScenario::M1 => "M1",
            IntlScenario::M2 => "M2",
            IntlScenario::M3 => "M3",
        })
    }
}

impl FromStr for IntlScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "M1" => Ok(IntlScenario::M1),
            "M2" => Ok(IntlScenario::M2),
            "M3" => Ok(IntlScenario::M3),
            other => Err(Error::Config(format!("unknown migration scenario {other:?}"))),
        }
    }
}

/// Last year in which gross international flows are derived from the net
/// schedule; from the following year the fixed gross constants apply.
pub const GROSS_DERIVED_UNTIL: i32 = 2032;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfrSchedule {
    pub start_tfr: f64,
    pub floor_tfr: f64,
    pub floor_year: i32,
}

impl Default for TfrSchedule {
    fn default() -> Self {
        TfrSchedule {
            start_tfr: 1.55,
            floor_tfr: 1.3,
            floor_year: 2038,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub intl_scenario: IntlScenario,
    /// Census year the county-to-county flows are taken from: 2016 or 2022.
    pub internal_flow_year: i32,
    pub start_year: i32,
    pub horizon_years: u32,
    pub master_seed: u64,
    pub tfr_schedule: TfrSchedule,
    /// Gross emigrants in the start year; interpolated to the fixed
    /// post-2032 level.
    pub emigrants_start: f64,
    /// National population the migration counts refer to.
    pub national_population: f64,
    /// Multiplier from national migration counts to the simulated
    /// population. `None` derives it from the initial population size.
    pub migration_scale: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            intl_scenario: IntlScenario::M1,
            internal_flow_year: 2022,
            start_year: 2022,
            horizon_years: 35,
            master_seed: 0,
            tfr_schedule: TfrSchedule::default(),
            emigrants_start: 60_000.0,
            national_population: 5_149_139.0,
            migration_scale: None,
        }
    }
}

impl ScenarioConfig {
    pub fn check(&self) -> Result<()> {
        if self.horizon_years < 1 {
            return Err(Error::Config("horizon must be at least one year".into()));
        }
        if self.tfr_schedule.floor_year <= self.start_year {
            return Err(Error::Config("TFR floor year must follow the start year".into()));
        }
        if !matches!(self.internal_flow_year, 2016 | 2022) {
            return Err(Error::Config(format!(
                "internal flow year {} is not 2016 or 2022",
                self.internal_flow_year
            )));
        }
        if self.emigrants_start < 0.0 || !(self.national_population > 0.0) {
            return Err(Error::Config("migration levels must be positive".into()));
        }
        if let Some(s) = self.migration_scale {
            if !(s >= 0.0) {
                return Err(Error::Config("migration scale must be non-negative".into()));
            }
        }
        Ok(())
    }

    pub fn end_year(&self) -> i32 {
        self.start_year + self.horizon_years as i32
    }

    /// Scale applied to national migration counts for a population of `size`.
    pub fn migration_scale_for(&self, size: usize) -> f64 {
        self.migration_scale
            .unwrap_or(size as f64 / self.national_population)
    }
}

/// Multiplier on every fertility rate: TFR(year) / start TFR, with TFR
/// falling linearly from the start year to the floor year.
pub fn tfr_factor(schedule: &TfrSchedule, start_year: i32, year: i32) -> f64 {
    tfr(schedule, start_year, year) / schedule.start_tfr
}

pub fn tfr(schedule: &TfrSchedule, start_year: i32, year: i32) -> f64 {
    if year <= start_year {
        schedule.start_tfr
    } else if year >= schedule.floor_year {
        schedule.floor_tfr
    } else {
        let t = f64::from(year - start_year) / f64::from(schedule.floor_year - start_year);
        schedule.start_tfr + (schedule.floor_tfr - schedule.start_tfr) * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MigrationTargets {
    /// Scheduled net migration.
    pub net: f64,
    pub immigrants: f64,
    pub emigrants: f64,
}

impl MigrationTargets {
    /// Net implied by the gross flows. Differs from `net` only where the
    /// fixed gross constants disagree with the schedule (M2 after 2032).
    pub fn gross_net(&self) -> f64 {
        self.immigrants - self.emigrants
    }
}

fn interpolate(anchors: &[(i32, f64)], year: i32) -> f64 {
    let (first_year, first) = anchors[0];
    if year <= first_year {
        return first;
    }
    for w in anchors.windows(2) {
        let ((y0, v0), (y1, v1)) = (w[0], w[1]);
        if year <= y1 {
            return v0 + (v1 - v0) * f64::from(year - y0) / f64::from(y1 - y0);
        }
    }
    anchors[anchors.len() - 1].1
}

/// National international migration counts for `year`.
pub fn migration_targets(config: &ScenarioConfig, year: i32) -> Result<MigrationTargets> {
    if year < config.start_year {
        return Err(Error::Config(format!("year {year} precedes the start year")));
    }
    let scenario = config.intl_scenario;
    let net = interpolate(scenario.net_anchors(), year);
    let (imm_fixed, emi_fixed) = scenario.gross_after_2032();
    if year > GROSS_DERIVED_UNTIL {
        return Ok(MigrationTargets {
            net,
            immigrants: imm_fixed,
            emigrants: emi_fixed,
        });
    }
    let emigrants = interpolate(
        &[(config.start_year, config.emigrants_start), (GROSS_DERIVED_UNTIL, emi_fixed)],
        year,
    );
    let immigrants = (emigrants + net).max(0.0);
    Ok(MigrationTargets {
        net,
        immigrants,
        emigrants: immigrants - net,
    })
}
