use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codes::AgeBands;
use crate::error::{Error, Result};
use crate::population::RegionId;

pub const FERTILITY_GROUPS: usize = 7;
/// Groups below this index (mothers under 25) carry a single rate.
pub const FIRST_MARITAL_GROUP: usize = 2;
pub const BASE_TFR: f64 = 1.55;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MaritalBand {
    #[serde(rename = "ALL")]
    All,
    #[serde(rename = "MAR")]
    Married,
    #[serde(rename = "NOT_MAR")]
    NotMarried,
}

impl fmt::Display for MaritalBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaritalBand::All => "ALL",
            MaritalBand::Married => "MAR",
            MaritalBand::NotMarried => "NOT_MAR",
        })
    }
}

impl FromStr for MaritalBand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ALL" => Ok(MaritalBand::All),
            "MAR" => Ok(MaritalBand::Married),
            "NOT_MAR" => Ok(MaritalBand::NotMarried),
            other => Err(Error::Domain(format!("unknown marital band {other:?}"))),
        }
    }
}

/// Rates for one region and age group. Under-25 groups use `married` for
/// everyone (band `ALL`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupRates {
    pub married: f64,
    pub not_married: f64,
}

/// Births per woman per year by region, five-year age group and, from 25,
/// marital band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FertilityTable {
    rates: BTreeMap<RegionId, [GroupRates; FERTILITY_GROUPS]>,
    pub base_tfr: f64,
}

/// One `(region, age_group, band, rate)` row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FertilityRow {
    pub region: RegionId,
    pub group: usize,
    pub band: MaritalBand,
    pub rate: f64,
}

impl FertilityTable {
    /// Builds the table from rows, requiring exactly one `ALL` row per
    /// under-25 group and a `MAR` and `NOT_MAR` row for older groups. Errors
    /// carry the 0-based row index.
    pub fn from_rows(rows: &[FertilityRow]) -> std::result::Result<Self, (usize, String)> {
        let mut seen: BTreeMap<RegionId, [[bool; 2]; FERTILITY_GROUPS]> = BTreeMap::new();
        let mut rates: BTreeMap<RegionId, [GroupRates; FERTILITY_GROUPS]> = BTreeMap::new();
        for (i, r) in rows.iter().enumerate() {
            if !(r.rate >= 0.0) || !r.rate.is_finite() {
                return Err((i, format!("fertility rate {} is negative or not finite", r.rate)));
            }
            if r.group >= FERTILITY_GROUPS {
                return Err((i, format!("age group index {} out of range", r.group)));
            }
            let under_25 = r.group < FIRST_MARITAL_GROUP;
            let slot = match (under_25, r.band) {
                (true, MaritalBand::All) => 0,
                (false, MaritalBand::Married) => 0,
                (false, MaritalBand::NotMarried) => 1,
                (true, b) => return Err((i, format!("band {b} not allowed under 25"))),
                (false, MaritalBand::All) => return Err((i, "band ALL only allowed under 25".into())),
            };
            let flags = &mut seen.entry(r.region).or_default()[r.group];
            if flags[slot] {
                return Err((i, "duplicate fertility row".into()));
            }
            flags[slot] = true;
            let g = &mut rates.entry(r.region).or_default()[r.group];
            match (under_25, slot) {
                (true, _) => {
                    g.married = r.rate;
                    g.not_married = r.rate;
                }
                (false, 0) => g.married = r.rate,
                (false, _) => g.not_married = r.rate,
            }
        }
        for (region, flags) in &seen {
            for (g, f) in flags.iter().enumerate() {
                let complete = if g < FIRST_MARITAL_GROUP { f[0] } else { f[0] && f[1] };
                if !complete {
                    return Err((rows.len(), format!("region {region} missing rows for {}", AgeBands::FERTILITY.label(g))));
                }
            }
        }
        Ok(FertilityTable {
            rates,
            base_tfr: BASE_TFR,
        })
    }

    pub fn regions(&self) -> impl Iterator<Item = RegionId> + '_ {
        self.rates.keys().copied()
    }

    pub fn has_region(&self, region: RegionId) -> bool {
        self.rates.contains_key(&region)
    }

    /// Base-year rate; regions without rows have zero fertility.
    pub fn rate(&self, region: RegionId, group: usize, married: bool) -> f64 {
        self.rates.get(&region).map_or(0.0, |g| {
            let r = g[group];
            if married {
                r.married
            } else {
                r.not_married
            }
        })
    }

    /// Every rate multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut t = self.clone();
        for r in t.rates.values_mut().flat_map(|g| g.iter_mut()) {
            r.married *= k;
            r.not_married *= k;
        }
        t
    }

    pub fn rows(&self) -> Vec<FertilityRow> {
        let mut out = Vec::new();
        for (&region, groups) in &self.rates {
            for (group, r) in groups.iter().enumerate() {
                if group < FIRST_MARITAL_GROUP {
                    out.push(FertilityRow { region, group, band: MaritalBand::All, rate: r.married });
                } else {
                    out.push(FertilityRow { region, group, band: MaritalBand::Married, rate: r.married });
                    out.push(FertilityRow { region, group, band: MaritalBand::NotMarried, rate: r.not_married });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(region: u32, rate: f64) -> Vec<FertilityRow> {
        let mut rows = Vec::new();
        for group in 0..FERTILITY_GROUPS {
            if group < FIRST_MARITAL_GROUP {
                rows.push(FertilityRow { region: RegionId(region), group, band: MaritalBand::All, rate });
            } else {
                rows.push(FertilityRow { region: RegionId(region), group, band: MaritalBand::Married, rate: rate * 2.0 });
                rows.push(FertilityRow { region: RegionId(region), group, band: MaritalBand::NotMarried, rate });
            }
        }
        rows
    }

    #[test]
    fn lookup_by_band() {
        let t = FertilityTable::from_rows(&full(1, 0.05)).unwrap();
        assert_eq!(t.rate(RegionId(1), 0, true), 0.05);
        assert_eq!(t.rate(RegionId(1), 0, false), 0.05);
        assert_eq!(t.rate(RegionId(1), 3, true), 0.1);
        assert_eq!(t.rate(RegionId(1), 3, false), 0.05);
        assert_eq!(t.rate(RegionId(9), 3, false), 0.0);
        assert_eq!(FertilityTable::from_rows(&t.rows()).unwrap(), t);
    }

    #[test]
    fn negative_rate_names_the_row() {
        let mut rows = full(1, 0.05);
        rows[4].rate = -0.01;
        assert_eq!(FertilityTable::from_rows(&rows).unwrap_err().0, 4);
    }

    #[test]
    fn band_rules_enforced() {
        let mut rows = full(1, 0.05);
        rows[0].band = MaritalBand::Married;
        assert!(FertilityTable::from_rows(&rows).is_err());
        let mut rows = full(1, 0.05);
        rows.pop();
        assert!(FertilityTable::from_rows(&rows).is_err());
    }
}
