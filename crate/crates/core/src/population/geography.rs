use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountyId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionId(pub u32);

impl fmt::Display for EdId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for CountyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One Electoral Division with its yearly immigrant capacities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdRecord {
    pub ed_id: EdId,
    pub county_id: CountyId,
    pub region_id: RegionId,
    pub base_population: u64,
    /// Yearly cap on movers arriving from the same county.
    pub intra_county_capacity: u32,
    /// Yearly cap on movers arriving from other counties.
    pub inter_county_capacity: u32,
    /// Share of all international immigrants settling here.
    pub intl_immigrant_weight: f64,
}

/// ED → county → region hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<EdRecord>", into = "Vec<EdRecord>")]
pub struct Geography {
    eds: Vec<EdRecord>,
    position: HashMap<EdId, usize>,
    county_region: BTreeMap<CountyId, RegionId>,
    county_eds: BTreeMap<CountyId, Vec<EdId>>,
    region_eds: BTreeMap<RegionId, Vec<EdId>>,
}

pub const WEIGHT_TOLERANCE: f64 = 1e-9;

impl Geography {
    /// Builds the hierarchy, rejecting EDs listed twice and counties that
    /// straddle regions. EDs are kept sorted by id.
    pub fn new(mut eds: Vec<EdRecord>) -> Result<Self> {
        if eds.is_empty() {
            return Err(Error::Config("geography has no EDs".into()));
        }
        eds.sort_by_key(|e| e.ed_id);
        let mut position = HashMap::with_capacity(eds.len());
        let mut county_region = BTreeMap::new();
        let mut county_eds: BTreeMap<CountyId, Vec<EdId>> = BTreeMap::new();
        let mut region_eds: BTreeMap<RegionId, Vec<EdId>> = BTreeMap::new();
        for (i, ed) in eds.iter().enumerate() {
            if position.insert(ed.ed_id, i).is_some() {
                return Err(Error::Config(format!("ED {} listed more than once", ed.ed_id)));
            }
            match county_region.insert(ed.county_id, ed.region_id) {
                Some(r) if r != ed.region_id => {
                    return Err(Error::Config(format!(
                        "county {} belongs to regions {} and {}",
                        ed.county_id, r, ed.region_id
                    )))
                }
                _ => {}
            }
            if !(ed.intl_immigrant_weight >= 0.0) {
                return Err(Error::Config(format!("ED {} has a negative immigrant weight", ed.ed_id)));
            }
            county_eds.entry(ed.county_id).or_default().push(ed.ed_id);
            region_eds.entry(ed.region_id).or_default().push(ed.ed_id);
        }
        Ok(Geography {
            eds,
            position,
            county_region,
            county_eds,
            region_eds,
        })
    }

    pub fn eds(&self) -> &[EdRecord] {
        &self.eds
    }

    pub fn ed(&self, id: EdId) -> Option<&EdRecord> {
        self.position.get(&id).map(|&i| &self.eds[i])
    }

    /// Dense position of an ED in [`Geography::eds`].
    pub fn ed_position(&self, id: EdId) -> Option<usize> {
        self.position.get(&id).copied()
    }

    pub fn contains(&self, id: EdId) -> bool {
        self.position.contains_key(&id)
    }

    pub fn county_of(&self, id: EdId) -> Option<CountyId> {
        self.ed(id).map(|e| e.county_id)
    }

    pub fn region_of(&self, id: EdId) -> Option<RegionId> {
        self.ed(id).map(|e| e.region_id)
    }

    pub fn counties(&self) -> impl Iterator<Item = (CountyId, RegionId)> + '_ {
        self.county_region.iter().map(|(&c, &r)| (c, r))
    }

    pub fn regions(&self) -> impl Iterator<Item = RegionId> + '_ {
        self.region_eds.keys().copied()
    }

    pub fn region_count(&self) -> usize {
        self.region_eds.len()
    }

    pub fn county_eds(&self, county: CountyId) -> &[EdId] {
        self.county_eds.get(&county).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn region_eds(&self, region: RegionId) -> &[EdId] {
        self.region_eds.get(&region).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn total_base_population(&self) -> u64 {
        self.eds.iter().map(|e| e.base_population).sum()
    }

    /// Structural problems: immigrant weights that do not sum to one.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let total: f64 = self.eds.iter().map(|e| e.intl_immigrant_weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            out.push(format!("international immigrant weights sum to {total}"));
        }
        out
    }
}

impl TryFrom<Vec<EdRecord>> for Geography {
    type Error = Error;

    fn try_from(eds: Vec<EdRecord>) -> Result<Self> {
        Geography::new(eds)
    }
}

impl From<Geography> for Vec<EdRecord> {
    fn from(g: Geography) -> Self {
        g.eds
    }
}
