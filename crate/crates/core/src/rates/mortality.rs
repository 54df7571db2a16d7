use serde::{Deserialize, Serialize};

use crate::codes::{Sex, AGE_COUNT, MAX_AGE};
use crate::error::{Error, Result};

/// Year of the life table the base rates come from.
pub const MORTALITY_BASE_YEAR: i32 = 2016;
const EARLY_IMPROVEMENT: f64 = 0.025;
const LATE_IMPROVEMENT: f64 = 0.015;
const TAPER_START: i32 = 2022;
const TAPER_END: i32 = 2047;

/// Annual general improvement in mortality for `year`: 2.5% up to 2022,
/// tapering linearly to 1.5% by 2047 and flat afterwards.
pub fn improvement_rate(year: i32) -> f64 {
    if year <= TAPER_START {
        EARLY_IMPROVEMENT
    } else if year >= TAPER_END {
        LATE_IMPROVEMENT
    } else {
        let t = f64::from(year - TAPER_START) / f64::from(TAPER_END - TAPER_START);
        EARLY_IMPROVEMENT + (LATE_IMPROVEMENT - EARLY_IMPROVEMENT) * t
    }
}

/// Share of the general improvement an age receives: full up to 90, none
/// from 100, linear in between.
pub fn improvement_scale(age: u8) -> f64 {
    match age {
        0..=90 => 1.0,
        91..=99 => f64::from(100 - age) / 10.0,
        _ => 0.0,
    }
}

/// Probability of death within a year by sex and single age, for the base
/// year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MortalityTable {
    q: Vec<[f64; 2]>,
}

impl MortalityTable {
    /// `q[sex.index()][age]`.
    pub fn new(q: [[f64; AGE_COUNT]; 2]) -> Result<Self> {
        let mut rows = Vec::with_capacity(AGE_COUNT);
        for age in 0..AGE_COUNT {
            let pair = [q[0][age], q[1][age]];
            if pair.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Domain(format!("mortality at age {age} outside [0,1]")));
            }
            rows.push(pair);
        }
        Ok(MortalityTable { q: rows })
    }

    pub fn base(&self, age: u8, sex: Sex) -> f64 {
        self.q[age as usize][sex.index()]
    }

    /// Base rate scaled by the cumulative improvement from 2017 to `year`.
    pub fn rate(&self, age: u8, sex: Sex, year: i32) -> Result<f64> {
        if age > MAX_AGE {
            return Err(Error::Domain(format!("age {age} above {MAX_AGE}")));
        }
        if year < MORTALITY_BASE_YEAR {
            return Err(Error::Domain(format!("year {year} before {MORTALITY_BASE_YEAR}")));
        }
        Ok(self.base(age, sex) * improvement_factor(age, year))
    }

    /// Every `(sex, age)` rate for one year, `[sex][age]`.
    pub fn year_table(&self, year: i32) -> Result<[[f64; AGE_COUNT]; 2]> {
        let mut out = [[0.0; AGE_COUNT]; 2];
        for age in 0..=MAX_AGE {
            for sex in [Sex::Female, Sex::Male] {
                out[sex.index()][age as usize] = self.rate(age, sex, year)?;
            }
        }
        Ok(out)
    }
}

/// Cumulative improvement multiplier. The flat segments before 2022 and after
/// 2047 are taken as powers; only the taper is multiplied out.
fn improvement_factor(age: u8, year: i32) -> f64 {
    let s = improvement_scale(age);
    if s == 0.0 {
        return 1.0;
    }
    let early_years = year.min(TAPER_START) - MORTALITY_BASE_YEAR;
    let mut f = (1.0 - EARLY_IMPROVEMENT * s).powi(early_years);
    for y in (TAPER_START + 1)..=year.min(TAPER_END) {
        f *= 1.0 - improvement_rate(y) * s;
    }
    if year > TAPER_END {
        f *= (1.0 - LATE_IMPROVEMENT * s).powi(year - TAPER_END);
    }
    f
}
