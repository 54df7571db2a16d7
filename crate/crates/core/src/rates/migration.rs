use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::{CountyId, RegionId, AGE_SEX_CELLS};

pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// Probability over (sex, five-year age group) cells; see
/// [`crate::population::age_sex_cell`] for the layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AgeSexDist(pub [f64; AGE_SEX_CELLS]);

impl AgeSexDist {
    pub fn new(cells: [f64; AGE_SEX_CELLS]) -> Result<Self> {
        check_distribution(&cells, "age-sex distribution")?;
        Ok(AgeSexDist(cells))
    }

    pub fn weights(&self) -> &[f64; AGE_SEX_CELLS] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for AgeSexDist {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        let cells: [f64; AGE_SEX_CELLS] = v
            .try_into()
            .map_err(|_| Error::Domain("age-sex distribution needs 36 cells".into()))?;
        AgeSexDist::new(cells)
    }
}

impl From<AgeSexDist> for Vec<f64> {
    fn from(d: AgeSexDist) -> Self {
        d.0.to_vec()
    }
}

/// Rejects negative entries and totals away from one.
pub fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::Domain(format!("{what} has a negative entry")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::Domain(format!("{what} sums to {sum}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MigrationContext {
    #[serde(rename = "intra")]
    Intra,
    #[serde(rename = "inter")]
    Inter,
    #[serde(rename = "intl_out")]
    IntlOut,
    #[serde(rename = "intl_in")]
    IntlIn,
}

impl MigrationContext {
    pub fn name(self) -> &'static str {
        match self {
            MigrationContext::Intra => "intra",
            MigrationContext::Inter => "inter",
            MigrationContext::IntlOut => "intl_out",
            MigrationContext::IntlIn => "intl_in",
        }
    }

    pub const ALL: [MigrationContext; 4] = [
        MigrationContext::Intra,
        MigrationContext::Inter,
        MigrationContext::IntlOut,
        MigrationContext::IntlIn,
    ];
}

impl fmt::Display for MigrationContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MigrationContext {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "intra" => Ok(MigrationContext::Intra),
            "inter" => Ok(MigrationContext::Inter),
            "intl_out" => Ok(MigrationContext::IntlOut),
            "intl_in" => Ok(MigrationContext::IntlIn),
            other => Err(Error::Domain(format!("unknown migration context {other:?}"))),
        }
    }
}

/// Age-sex profiles of each kind of mover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MigrationProfiles {
    pub intra: AgeSexDist,
    pub inter: AgeSexDist,
    pub intl_out: AgeSexDist,
    pub intl_in: AgeSexDist,
}

impl MigrationProfiles {
    pub fn get(&self, ctx: MigrationContext) -> &AgeSexDist {
        match ctx {
            MigrationContext::Intra => &self.intra,
            MigrationContext::Inter => &self.inter,
            MigrationContext::IntlOut => &self.intl_out,
            MigrationContext::IntlIn => &self.intl_in,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountyFlow {
    pub origin: CountyId,
    pub dest: CountyId,
    pub count: u64,
}

impl CountyFlow {
    pub fn is_intra(&self) -> bool {
        self.origin == self.dest
    }
}

/// County-to-county movers per year; the diagonal holds within-county moves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InternalFlowTable {
    pub year: i32,
    flows: Vec<CountyFlow>,
}

impl InternalFlowTable {
    /// Duplicate `(origin, dest)` pairs are rejected; flows are kept in
    /// `(origin, dest)` order.
    pub fn new(year: i32, mut flows: Vec<CountyFlow>) -> Result<Self> {
        flows.sort_by_key(|f| (f.origin, f.dest));
        if flows.windows(2).any(|w| (w[0].origin, w[0].dest) == (w[1].origin, w[1].dest)) {
            return Err(Error::Domain(format!("duplicate county pair in {year} flows")));
        }
        Ok(InternalFlowTable { year, flows })
    }

    pub fn flows(&self) -> &[CountyFlow] {
        &self.flows
    }

    pub fn intra(&self, county: CountyId) -> u64 {
        self.flows
            .iter()
            .find(|f| f.origin == county && f.dest == county)
            .map_or(0, |f| f.count)
    }

    pub fn total(&self) -> u64 {
        self.flows.iter().map(|f| f.count).sum()
    }

    pub fn zeroed(&self) -> Self {
        InternalFlowTable {
            year: self.year,
            flows: self.flows.iter().map(|f| CountyFlow { count: 0, ..*f }).collect(),
        }
    }
}

/// Where emigrants come from; shares over regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionShares(pub BTreeMap<RegionId, f64>);

impl RegionShares {
    pub fn new(shares: BTreeMap<RegionId, f64>) -> Result<Self> {
        let v: Vec<f64> = shares.values().copied().collect();
        check_distribution(&v, "regional emigrant shares")?;
        Ok(RegionShares(shares))
    }

    pub fn get(&self, region: RegionId) -> f64 {
        self.0.get(&region).copied().unwrap_or(0.0)
    }
}
