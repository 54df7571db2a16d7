use serde::{Deserialize, Serialize};

use super::migration::PROBABILITY_TOLERANCE;
use crate::codes::{AgeBands, EconStatus, EducationLevel, Sex, EDUCATION_LEVELS};
use crate::error::{Error, Result};

pub const ECON_BANDS: usize = 16;
const ROWS: usize = ECON_BANDS * 2 * EDUCATION_LEVELS;

/// Next-status probabilities over [`EconStatus::LABOUR`].
pub type EconRow = [f64; 6];

/// One `(age_band, sex, education, status, probability)` record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconRecord {
    pub age_band: usize,
    pub sex: Sex,
    pub education: EducationLevel,
    pub status: EconStatus,
    pub probability: f64,
}

/// Memoryless economic-status distribution by age band, sex and education.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconTransitionTable {
    rows: Vec<Option<EconRow>>,
}

fn slot(band: usize, sex: Sex, level: EducationLevel) -> usize {
    (band * 2 + sex.index()) * EDUCATION_LEVELS + level.rank().expect("ranked level")
}

fn labour_index(status: EconStatus) -> Option<usize> {
    EconStatus::LABOUR.iter().position(|s| *s == status)
}

impl EconTransitionTable {
    pub fn empty() -> Self {
        EconTransitionTable { rows: vec![None; ROWS] }
    }

    /// Builds the table, checking every present row sums to one. Errors
    /// carry the 0-based index of the offending record.
    pub fn from_records(records: &[EconRecord]) -> std::result::Result<Self, (usize, Error)> {
        let mut t = Self::empty();
        let mut first_row = vec![usize::MAX; ROWS];
        for (i, r) in records.iter().enumerate() {
            if r.age_band >= ECON_BANDS {
                return Err((i, Error::Domain(format!("age band {} out of range", r.age_band))));
            }
            if r.education.is_na() {
                return Err((i, Error::Domain("education NA has no transition row".into())));
            }
            let Some(k) = labour_index(r.status) else {
                return Err((i, Error::Domain(format!("status {} is not a labour-market outcome", r.status))));
            };
            if !(r.probability >= 0.0) {
                return Err((i, Error::Domain(format!("negative probability {}", r.probability))));
            }
            let s = slot(r.age_band, r.sex, r.education);
            let row = t.rows[s].get_or_insert([0.0; 6]);
            row[k] += r.probability;
            first_row[s] = first_row[s].min(i);
        }
        for (s, row) in t.rows.iter().enumerate() {
            if let Some(row) = row {
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
                    let band = s / (2 * EDUCATION_LEVELS);
                    let sex = Sex::ALL[(s / EDUCATION_LEVELS) % 2];
                    let level = EducationLevel::RANKED[s % EDUCATION_LEVELS];
                    return Err((
                        first_row[s],
                        Error::Normalisation {
                            file: "econ_transitions.csv".into(),
                            key: format!("{},{},{}", AgeBands::ECON.label(band), sex, level),
                            sum,
                        },
                    ));
                }
            }
        }
        Ok(t)
    }

    pub fn set(&mut self, band: usize, sex: Sex, level: EducationLevel, row: EconRow) -> Result<()> {
        super::migration::check_distribution(&row, "econ row")?;
        self.rows[slot(band, sex, level)] = Some(row);
        Ok(())
    }

    pub fn exact(&self, band: usize, sex: Sex, level: EducationLevel) -> Option<&EconRow> {
        self.rows[slot(band, sex, level)].as_ref()
    }

    /// Row for an age, falling back to the nearest age band with data for the
    /// same sex and education. The flag reports whether a fallback was used.
    pub fn row(&self, age: u8, sex: Sex, level: EducationLevel) -> Option<(&EconRow, bool)> {
        let band = AgeBands::ECON.index(age)?;
        level.rank()?;
        if let Some(r) = self.exact(band, sex, level) {
            return Some((r, false));
        }
        (1..ECON_BANDS).find_map(|d| {
            [band.checked_sub(d), Some(band + d)]
                .into_iter()
                .flatten()
                .filter(|&b| b < ECON_BANDS)
                .find_map(|b| self.exact(b, sex, level))
                .map(|r| (r, true))
        })
    }

    pub fn records(&self) -> Vec<EconRecord> {
        let mut out = Vec::new();
        for band in 0..ECON_BANDS {
            for sex in [Sex::Female, Sex::Male] {
                for level in EducationLevel::RANKED {
                    if let Some(row) = self.exact(band, sex, level) {
                        for (k, &p) in row.iter().enumerate() {
                            out.push(EconRecord {
                                age_band: band,
                                sex,
                                education: level,
                                status: EconStatus::LABOUR[k],
                                probability: p,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}
