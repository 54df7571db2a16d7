use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::migration::PROBABILITY_TOLERANCE;
use crate::codes::{AgeBands, EconStatus, EducationLevel, Sex, EDUCATION_LEVELS};
use crate::error::{Error, Result};
use crate::population::RegionId;

/// Coarse attainment bands used for parent-to-child transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BroadBand {
    #[serde(rename = "LowerSecondaryAndBelow")]
    LowerSecondaryAndBelow,
    #[serde(rename = "LC_PLC")]
    LcPlc,
    #[serde(rename = "ThirdLevel")]
    ThirdLevel,
}

impl BroadBand {
    pub const ALL: [BroadBand; 3] = [BroadBand::LowerSecondaryAndBelow, BroadBand::LcPlc, BroadBand::ThirdLevel];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            BroadBand::LowerSecondaryAndBelow => "LowerSecondaryAndBelow",
            BroadBand::LcPlc => "LC_PLC",
            BroadBand::ThirdLevel => "ThirdLevel",
        }
    }
}

/// Which students drop out first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DropoutPriority {
    /// Lifetime target above the course being studied.
    #[default]
    Above,
    /// Lifetime target below the course being studied.
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondaryDropout {
    pub base: f64,
    /// Relative yearly decline of the rate.
    pub annual_improvement: f64,
    pub floor: f64,
}

impl Default for SecondaryDropout {
    fn default() -> Self {
        SecondaryDropout {
            base: 0.025,
            annual_improvement: 0.03,
            floor: 0.005,
        }
    }
}

pub const DEFAULT_COURSE_DURATIONS: [(EducationLevel, u32); 8] = [
    (EducationLevel::Primary, 8),
    (EducationLevel::LowerSecondary, 3),
    (EducationLevel::UpperSecondary, 2),
    (EducationLevel::PostLeavingCert, 1),
    (EducationLevel::HigherCert, 2),
    (EducationLevel::Degree, 3),
    (EducationLevel::Postgraduate, 1),
    (EducationLevel::Doctorate, 4),
];

/// Outcome row over economic statuses, indexed by [`EconStatus::index`].
/// The `S` entry means staying in (or re-entering) education.
pub type OutcomeRow = [f64; 8];

pub const ADULT_LEARNER_CELLS: usize = 20;

pub fn learner_cell(sex: Sex, age: u8) -> Option<usize> {
    AgeBands::LEARNER
        .index(age)
        .map(|b| sex.index() * AgeBands::LEARNER.len() + b)
}

/// Education pipeline parameters. Serialised through
/// [`EducationRatesFile`], the `education_rates.json` layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EducationRatesFile", into = "EducationRatesFile")]
pub struct EducationRates {
    /// `[parent band][child band]`.
    pub parent_to_broad: [[f64; 3]; 3],
    pub marginal_broad: [f64; 3],
    dropout: [f64; EDUCATION_LEVELS],
    pub secondary_dropout: SecondaryDropout,
    dropout_outcomes: [Option<OutcomeRow>; EDUCATION_LEVELS],
    graduate_outcomes: [Option<OutcomeRow>; EDUCATION_LEVELS],
    course_duration: [u32; EDUCATION_LEVELS],
    enrolment_by_attained: [[f64; EDUCATION_LEVELS]; EDUCATION_LEVELS],
    young_course_shares: [f64; EDUCATION_LEVELS],
    degree_entry_attained: [f64; EDUCATION_LEVELS],
    pub adult_student_share_18_24: f64,
    pub adult_student_rate_25_69: BTreeMap<RegionId, f64>,
    /// `[sex][learner age band]`, flattened.
    pub adult_learner_age_sex: [f64; ADULT_LEARNER_CELLS],
    pub hc_band: BroadBand,
    pub dropout_priority: DropoutPriority,
}

fn rank(l: EducationLevel) -> usize {
    l.rank().expect("ranked level")
}

impl EducationRates {
    pub fn broad_band(&self, level: EducationLevel) -> Option<BroadBand> {
        use EducationLevel::*;
        Some(match level {
            NoFormal | Primary | LowerSecondary => BroadBand::LowerSecondaryAndBelow,
            UpperSecondary | PostLeavingCert => BroadBand::LcPlc,
            HigherCert => self.hc_band,
            Degree | Postgraduate | Doctorate => BroadBand::ThirdLevel,
            NotApplicable => return None,
        })
    }

    pub fn band_levels(&self, band: BroadBand) -> Vec<EducationLevel> {
        EducationLevel::RANKED
            .into_iter()
            .filter(|l| self.broad_band(*l) == Some(band))
            .collect()
    }

    /// Annual dropout probability for students of `course` in `year`.
    pub fn dropout_rate(&self, course: EducationLevel, year: i32, start_year: i32) -> f64 {
        match course {
            EducationLevel::Primary | EducationLevel::NoFormal | EducationLevel::NotApplicable => 0.0,
            c if c.is_secondary() => {
                let s = self.secondary_dropout;
                let years = (year - start_year).max(0);
                (s.base * (1.0 - s.annual_improvement).powi(years)).max(s.floor.min(s.base))
            }
            c => self.dropout[rank(c)],
        }
    }

    pub fn dropout_outcomes(&self, course: EducationLevel) -> Option<&OutcomeRow> {
        course.rank().and_then(|r| self.dropout_outcomes[r].as_ref())
    }

    pub fn graduate_outcomes(&self, course: EducationLevel) -> Option<&OutcomeRow> {
        course.rank().and_then(|r| self.graduate_outcomes[r].as_ref())
    }

    pub fn duration(&self, course: EducationLevel) -> u32 {
        course.rank().map_or(1, |r| self.course_duration[r])
    }

    pub fn max_duration(&self) -> u32 {
        self.course_duration.iter().copied().max().unwrap_or(1)
    }

    /// Probabilities of each next course for someone with `attained`.
    /// All-zero when no further course is open.
    pub fn enrolment_row(&self, attained: EducationLevel) -> &[f64; EDUCATION_LEVELS] {
        const NONE: [f64; EDUCATION_LEVELS] = [0.0; EDUCATION_LEVELS];
        match attained.rank() {
            Some(r) => &self.enrolment_by_attained[r],
            None => &NONE,
        }
    }

    pub fn can_enrol(&self, attained: EducationLevel) -> bool {
        self.enrolment_row(attained).iter().any(|&p| p > 0.0)
    }

    pub fn young_course_shares(&self) -> &[f64; EDUCATION_LEVELS] {
        &self.young_course_shares
    }

    pub fn degree_entry_attained(&self) -> &[f64; EDUCATION_LEVELS] {
        &self.degree_entry_attained
    }

    pub fn adult_student_rate(&self, region: RegionId) -> f64 {
        self.adult_student_rate_25_69.get(&region).copied().unwrap_or(0.0)
    }

    pub fn set_dropout_outcomes(&mut self, course: EducationLevel, row: OutcomeRow) {
        self.dropout_outcomes[rank(course)] = Some(row);
    }

    pub fn set_graduate_outcomes(&mut self, course: EducationLevel, row: OutcomeRow) {
        self.graduate_outcomes[rank(course)] = Some(row);
    }

    pub fn set_dropout(&mut self, course: EducationLevel, rate: f64) {
        self.dropout[rank(course)] = rate;
    }
}

type LevelMap<T> = BTreeMap<String, T>;

/// On-disk layout of `education_rates.json`; keys are level and status codes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EducationRatesFile {
    /// Rows keyed by parent band name plus `marginal`; values over
    /// `[LowerSecondaryAndBelow, LC_PLC, ThirdLevel]`.
    pub parent_to_broad: BTreeMap<String, [f64; 3]>,
    pub dropout: LevelMap<f64>,
    #[serde(default)]
    pub secondary_dropout: SecondaryDropout,
    pub dropout_outcomes: LevelMap<BTreeMap<String, f64>>,
    pub graduate_outcomes: LevelMap<BTreeMap<String, f64>>,
    #[serde(default)]
    pub course_duration: LevelMap<u32>,
    pub enrolment_by_attained: LevelMap<LevelMap<f64>>,
    pub young_course_shares: LevelMap<f64>,
    pub degree_entry_attained: LevelMap<f64>,
    #[serde(default = "default_young_share")]
    pub adult_student_share_18_24: f64,
    pub adult_student_rate_25_69: BTreeMap<RegionId, f64>,
    /// `sex → learner age band → share`.
    pub adult_learner_age_sex: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default = "default_hc_band")]
    pub hc_band: BroadBand,
    #[serde(default)]
    pub dropout_priority: DropoutPriority,
}

fn default_young_share() -> f64 {
    0.61
}

fn default_hc_band() -> BroadBand {
    BroadBand::ThirdLevel
}

fn level(code: &str) -> Result<EducationLevel> {
    let l: EducationLevel = code.parse()?;
    if l.is_na() {
        return Err(Error::Domain("NA is not a course level".into()));
    }
    Ok(l)
}

fn check_row(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::Domain(format!("{what} has a negative entry")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::Normalisation {
            file: "education_rates.json".into(),
            key: what.to_string(),
            sum,
        });
    }
    Ok(())
}

fn outcome_rows(
    map: &LevelMap<BTreeMap<String, f64>>,
    what: &str,
) -> Result<[Option<OutcomeRow>; EDUCATION_LEVELS]> {
    let mut out = [None; EDUCATION_LEVELS];
    for (code, row) in map {
        let l = level(code)?;
        let mut r = [0.0; 8];
        for (status, &p) in row {
            let s: EconStatus = status.parse()?;
            if s == EconStatus::NotApplicable {
                return Err(Error::Domain(format!("{what}[{code}] may not lead to NA")));
            }
            r[s.index()] = p;
        }
        check_row(&r, &format!("{what}[{code}]"))?;
        out[rank(l)] = Some(r);
    }
    Ok(out)
}

fn level_dist(map: &LevelMap<f64>, what: &str) -> Result<[f64; EDUCATION_LEVELS]> {
    let mut out = [0.0; EDUCATION_LEVELS];
    for (code, &p) in map {
        out[rank(level(code)?)] = p;
    }
    check_row(&out, what)?;
    Ok(out)
}

impl TryFrom<EducationRatesFile> for EducationRates {
    type Error = Error;

    fn try_from(f: EducationRatesFile) -> Result<Self> {
        let mut parent_to_broad = [[0.0; 3]; 3];
        let mut marginal_broad = None;
        for (key, row) in &f.parent_to_broad {
            check_row(row, &format!("parent_to_broad[{key}]"))?;
            match key.as_str() {
                "marginal" => marginal_broad = Some(*row),
                name => {
                    let band = BroadBand::ALL
                        .into_iter()
                        .find(|b| b.name() == name)
                        .ok_or_else(|| Error::Domain(format!("unknown broad band {name:?}")))?;
                    parent_to_broad[band.index()] = *row;
                }
            }
        }
        if f.parent_to_broad.len() != 4 {
            return Err(Error::Domain("parent_to_broad needs three band rows and `marginal`".into()));
        }
        let marginal_broad = marginal_broad.ok_or_else(|| Error::Domain("parent_to_broad lacks `marginal`".into()))?;

        let mut dropout = [0.0; EDUCATION_LEVELS];
        for (code, &p) in &f.dropout {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("dropout[{code}] = {p} outside [0,1]")));
            }
            dropout[rank(level(code)?)] = p;
        }
        dropout[rank(EducationLevel::Primary)] = 0.0;

        let mut course_duration = [1u32; EDUCATION_LEVELS];
        for (l, d) in DEFAULT_COURSE_DURATIONS {
            course_duration[rank(l)] = d;
        }
        for (code, &d) in &f.course_duration {
            if d < 1 {
                return Err(Error::Domain(format!("course_duration[{code}] must be at least 1")));
            }
            course_duration[rank(level(code)?)] = d;
        }

        let mut enrolment_by_attained = [[0.0; EDUCATION_LEVELS]; EDUCATION_LEVELS];
        for (code, row) in &f.enrolment_by_attained {
            let from = level(code)?;
            let mut r = [0.0; EDUCATION_LEVELS];
            for (to_code, &p) in row {
                let to = level(to_code)?;
                if p > 0.0 && !to.is_above(from) {
                    return Err(Error::Domain(format!("enrolment from {from} into {to} is not a step up")));
                }
                r[rank(to)] = p;
            }
            check_row(&r, &format!("enrolment_by_attained[{code}]"))?;
            enrolment_by_attained[rank(from)] = r;
        }

        let s = f.secondary_dropout;
        if !(0.0..=1.0).contains(&s.base) || !(0.0..1.0).contains(&s.annual_improvement) || s.floor < 0.0 {
            return Err(Error::Domain("secondary dropout schedule out of range".into()));
        }
        if !(0.0..=1.0).contains(&f.adult_student_share_18_24) {
            return Err(Error::Domain("adult_student_share_18_24 outside [0,1]".into()));
        }
        for (r, &v) in &f.adult_student_rate_25_69 {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("adult student rate for region {r} outside [0,1]")));
            }
        }

        let mut learners = [0.0; ADULT_LEARNER_CELLS];
        for (sex_code, bands) in &f.adult_learner_age_sex {
            let sex: Sex = sex_code.parse()?;
            for (label, &p) in bands {
                let b = AgeBands::LEARNER
                    .parse(label)
                    .ok_or_else(|| Error::Domain(format!("unknown adult learner band {label:?}")))?;
                learners[sex.index() * AgeBands::LEARNER.len() + b] = p;
            }
        }
        check_row(&learners, "adult_learner_age_sex")?;

        Ok(EducationRates {
            parent_to_broad,
            marginal_broad,
            dropout,
            secondary_dropout: s,
            dropout_outcomes: outcome_rows(&f.dropout_outcomes, "dropout_outcomes")?,
            graduate_outcomes: outcome_rows(&f.graduate_outcomes, "graduate_outcomes")?,
            course_duration,
            enrolment_by_attained,
            young_course_shares: level_dist(&f.young_course_shares, "young_course_shares")?,
            degree_entry_attained: level_dist(&f.degree_entry_attained, "degree_entry_attained")?,
            adult_student_share_18_24: f.adult_student_share_18_24,
            adult_student_rate_25_69: f.adult_student_rate_25_69,
            adult_learner_age_sex: learners,
            hc_band: f.hc_band,
            dropout_priority: f.dropout_priority,
        })
    }
}

fn level_map(values: &[f64; EDUCATION_LEVELS]) -> LevelMap<f64> {
    values
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| (EducationLevel::RANKED[i].code().to_string(), p))
        .collect()
}

fn outcome_map(rows: &[Option<OutcomeRow>; EDUCATION_LEVELS]) -> LevelMap<BTreeMap<String, f64>> {
    rows.iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .map(|(i, r)| {
            let m = r
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(s, &p)| (EconStatus::ALL[s].code().to_string(), p))
                .collect();
            (EducationLevel::RANKED[i].code().to_string(), m)
        })
        .collect()
}

impl From<EducationRates> for EducationRatesFile {
    fn from(r: EducationRates) -> Self {
        let mut parent_to_broad: BTreeMap<String, [f64; 3]> = BroadBand::ALL
            .iter()
            .map(|b| (b.name().to_string(), r.parent_to_broad[b.index()]))
            .collect();
        parent_to_broad.insert("marginal".into(), r.marginal_broad);
        let mut learners: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for sex in [Sex::Female, Sex::Male] {
            for b in 0..AgeBands::LEARNER.len() {
                let p = r.adult_learner_age_sex[sex.index() * AgeBands::LEARNER.len() + b];
                learners
                    .entry(sex.code().to_string())
                    .or_default()
                    .insert(AgeBands::LEARNER.label(b), p);
            }
        }
        EducationRatesFile {
            parent_to_broad,
            dropout: r
                .dropout
                .iter()
                .enumerate()
                .filter(|(i, _)| {
                    let l = EducationLevel::RANKED[*i];
                    !l.is_secondary() && l != EducationLevel::Primary && l != EducationLevel::NoFormal
                })
                .map(|(i, &p)| (EducationLevel::RANKED[i].code().to_string(), p))
                .collect(),
            secondary_dropout: r.secondary_dropout,
            dropout_outcomes: outcome_map(&r.dropout_outcomes),
            graduate_outcomes: outcome_map(&r.graduate_outcomes),
            course_duration: r
                .course_duration
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &d)| (EducationLevel::RANKED[i].code().to_string(), d))
                .collect(),
            enrolment_by_attained: r
                .enrolment_by_attained
                .iter()
                .enumerate()
                .filter(|(_, row)| row.iter().any(|&p| p > 0.0))
                .map(|(i, row)| (EducationLevel::RANKED[i].code().to_string(), level_map(row)))
                .collect(),
            young_course_shares: level_map(&r.young_course_shares),
            degree_entry_attained: level_map(&r.degree_entry_attained),
            adult_student_share_18_24: r.adult_student_share_18_24,
            adult_student_rate_25_69: r.adult_student_rate_25_69,
            adult_learner_age_sex: learners,
            hc_band: r.hc_band,
            dropout_priority: r.dropout_priority,
        }
    }
}
