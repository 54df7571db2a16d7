use serde::{Deserialize, Serialize};

use super::migration::check_distribution;
use crate::error::{Error, Result};

pub const AGE_GROUPS: usize = 18;

/// How the marriage rate is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarriageRateUnit {
    /// Couples formed per person per year.
    #[default]
    Couples,
    /// Persons marrying per person per year.
    Persons,
}

/// Candidate weights over five-year age groups, one set per marriage type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateAges {
    pub bride: Vec<f64>,
    pub groom: Vec<f64>,
    pub same_sex_male: Vec<f64>,
    pub same_sex_female: Vec<f64>,
}

fn peaked(peak_group: usize) -> Vec<f64> {
    // 20-24 … 65-69 with a hump around the peak group.
    let mut w = vec![0.0; AGE_GROUPS];
    for (g, v) in w.iter_mut().enumerate().take(14).skip(4) {
        let d = g as f64 - peak_group as f64;
        *v = (-0.5 * d * d / 2.0).exp();
    }
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

impl Default for CandidateAges {
    fn default() -> Self {
        CandidateAges {
            bride: peaked(6),
            groom: peaked(7),
            same_sex_male: peaked(7),
            same_sex_female: peaked(7),
        }
    }
}

impl CandidateAges {
    fn check(&self) -> Result<()> {
        for (name, v) in [
            ("bride", &self.bride),
            ("groom", &self.groom),
            ("same_sex_male", &self.same_sex_male),
            ("same_sex_female", &self.same_sex_female),
        ] {
            if v.len() != AGE_GROUPS {
                return Err(Error::Domain(format!("{name} candidate ages need {AGE_GROUPS} groups")));
            }
            check_distribution(v, name)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NuptialityConfig {
    pub marriage_rate: f64,
    pub marriage_rate_unit: MarriageRateUnit,
    pub same_sex_share: f64,
    /// Fixed separation rate per married person; when absent it is derived
    /// at initialisation from `separations_per_year`.
    pub separation_rate: Option<f64>,
    /// National persons separating per year, scaled like migration counts.
    pub separations_per_year: f64,
    pub lambda: f64,
    pub concentration: f64,
    pub pool_size: usize,
    pub min_age: u8,
    pub candidate_ages: CandidateAges,
}

impl Default for NuptialityConfig {
    fn default() -> Self {
        NuptialityConfig {
            marriage_rate: 0.004,
            marriage_rate_unit: MarriageRateUnit::Couples,
            same_sex_share: 0.03,
            separation_rate: None,
            separations_per_year: 8_000.0,
            lambda: 2.0,
            concentration: 1.0,
            pool_size: 20,
            min_age: 18,
            candidate_ages: CandidateAges::default(),
        }
    }
}

impl NuptialityConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.marriage_rate >= 0.0) {
            return Err(Error::Domain("marriage_rate must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&self.same_sex_share) {
            return Err(Error::Domain("same_sex_share outside [0,1]".into()));
        }
        if let Some(r) = self.separation_rate {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Domain("separation_rate outside [0,1]".into()));
            }
        }
        if !(self.separations_per_year >= 0.0) || !(self.lambda >= 0.0) || !(self.concentration > 0.0) {
            return Err(Error::Domain("nuptiality parameters must be nonnegative".into()));
        }
        if self.pool_size == 0 {
            return Err(Error::Domain("pool_size must be at least 1".into()));
        }
        self.candidate_ages.check()
    }

    /// Couples to form in a population of `size` persons.
    pub fn target_couples(&self, size: usize) -> u64 {
        let x = self.marriage_rate * size as f64;
        match self.marriage_rate_unit {
            MarriageRateUnit::Couples => x.round() as u64,
            MarriageRateUnit::Persons => (x / 2.0).round() as u64,
        }
    }

    /// Separation rate for a base population with `married` married persons
    /// when counts are scaled by `scale`.
    pub fn derive_separation_rate(&self, married: usize, scale: f64) -> f64 {
        match self.separation_rate {
            Some(r) => r,
            None if married == 0 => 0.0,
            None => (self.separations_per_year * scale / married as f64).min(1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        NuptialityConfig::default().check().unwrap();
    }

    #[test]
    fn couples_reading() {
        let mut c = NuptialityConfig::default();
        assert_eq!(c.target_couples(10_000), 40);
        c.marriage_rate_unit = MarriageRateUnit::Persons;
        assert_eq!(c.target_couples(10_000), 20);
    }

    #[test]
    fn separation_rate_from_counts() {
        let c = NuptialityConfig::default();
        let r = c.derive_separation_rate(800_000, 0.5);
        assert!((r - 0.005).abs() < 1e-15);
        let fixed = NuptialityConfig { separation_rate: Some(0.002), ..c };
        assert_eq!(fixed.derive_separation_rate(10, 1.0), 0.002);
    }
}
