//! Result metrics computed from populations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::codes::{EconStatus, EducationLevel, ADULT_AGE, AGE_COUNT, EDUCATION_LEVELS};
use crate::error::{Error, Result};
use crate::population::{EdId, Geography, Population};

/// Head counts by single year of age, both sexes.
pub type AgeCounts = [f64; AGE_COUNT];

pub fn age_counts(pop: &Population) -> AgeCounts {
    let mut c = [0.0; AGE_COUNT];
    for p in pop.iter() {
        c[p.age as usize] += 1.0;
    }
    c
}

/// `(YDR, ODR)`: persons 0–14 and 65+ per 100 persons aged 15–64.
pub fn dependency_ratios_from_ages(ages: &AgeCounts) -> Result<(f64, f64)> {
    let young: f64 = ages[..15].iter().sum();
    let working: f64 = ages[15..65].iter().sum();
    let old: f64 = ages[65..].iter().sum();
    if working <= 0.0 {
        return Err(Error::UndefinedRatio("no one aged 15-64"));
    }
    Ok((100.0 * young / working, 100.0 * old / working))
}

pub fn dependency_ratios(pop: &Population) -> Result<(f64, f64)> {
    dependency_ratios_from_ages(&age_counts(pop))
}

fn ed_counts(pop: &Population, geo: &Geography) -> BTreeMap<EdId, usize> {
    geo.eds().iter().map(|e| (e.ed_id, pop.ed_count(e.ed_id))).collect()
}

/// End size over start size for every ED; `None` where the ED started empty.
pub fn ed_relative_sizes(start: &Population, end: &Population, geo: &Geography) -> BTreeMap<EdId, Option<f64>> {
    let s = ed_counts(start, geo);
    let e = ed_counts(end, geo);
    s.into_iter()
        .map(|(ed, n0)| (ed, (n0 > 0).then(|| e[&ed] as f64 / n0 as f64)))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ImmigrantCounts {
    pub total: u64,
    pub immigrants: u64,
    /// Residents flagged as children of recent immigrants.
    pub immigrant_children: u64,
}

impl ImmigrantCounts {
    fn share(&self, n: u64) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            n as f64 / self.total as f64
        }
    }

    pub fn immigrant_share(&self) -> f64 {
        self.share(self.immigrants)
    }

    /// Immigrants plus their children over residents; 0 for an empty ED.
    pub fn share_with_children(&self) -> f64 {
        self.share(self.immigrants + self.immigrant_children)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmigrantShares {
    pub per_ed: BTreeMap<EdId, ImmigrantCounts>,
    pub national: ImmigrantCounts,
}

pub fn recent_immigrant_shares(pop: &Population, geo: &Geography) -> ImmigrantShares {
    let mut per_ed: BTreeMap<EdId, ImmigrantCounts> =
        geo.eds().iter().map(|e| (e.ed_id, ImmigrantCounts::default())).collect();
    let mut national = ImmigrantCounts::default();
    for p in pop.iter() {
        let imm = u64::from(p.immigrated_year.is_some());
        let child = u64::from(p.immigrated_year.is_none() && p.recent_immigrant_child);
        for c in [per_ed.get_mut(&p.ed_id).expect("ED in geography"), &mut national] {
            c.total += 1;
            c.immigrants += imm;
            c.immigrant_children += child;
        }
    }
    ImmigrantShares { per_ed, national }
}

/// Counts of values in `bins` equal-width bins over `[0, 1]`; 1.0 falls in
/// the last bin.
pub fn share_histogram(values: impl IntoIterator<Item = f64>, bins: usize) -> Vec<u64> {
    let mut h = vec![0; bins];
    for v in values {
        let i = ((v.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
        h[i] += 1;
    }
    h
}

/// Shares of adults (18+) by attained level, over ranked levels only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EducationShares(pub [f64; EDUCATION_LEVELS]);

impl EducationShares {
    pub fn get(&self, level: EducationLevel) -> f64 {
        level.rank().map_or(0.0, |r| self.0[r])
    }

    /// HC, DEG, PD and D combined.
    pub fn third_level(&self) -> f64 {
        EducationLevel::RANKED
            .iter()
            .filter(|l| l.is_third_level())
            .map(|&l| self.get(l))
            .sum()
    }
}

pub fn education_shares(pop: &Population) -> EducationShares {
    let mut c = [0.0; EDUCATION_LEVELS];
    for p in pop.iter().filter(|p| p.age >= ADULT_AGE) {
        if let Some(r) = p.education_attained.rank() {
            c[r] += 1.0;
        }
    }
    let total: f64 = c.iter().sum();
    if total > 0.0 {
        c.iter_mut().for_each(|x| *x /= total);
    }
    EducationShares(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Unemployment {
    /// UNE / (W + UNE); `None` with an empty labour force.
    pub rate_lf: Option<f64>,
    /// UNE over the whole population.
    pub share_pop: f64,
}

pub fn unemployment(pop: &Population) -> Unemployment {
    let (mut une, mut w) = (0u64, 0u64);
    for p in pop.iter() {
        match p.econ_status {
            EconStatus::Unemployed => une += 1,
            EconStatus::Working => w += 1,
            _ => {}
        }
    }
    Unemployment {
        rate_lf: (une + w > 0).then(|| une as f64 / (une + w) as f64),
        share_pop: if pop.is_empty() { 0.0 } else { une as f64 / pop.len() as f64 },
    }
}

/// Students older than 17 over all residents, per ED; `None` for an empty ED.
pub fn adult_student_shares(pop: &Population, geo: &Geography) -> BTreeMap<EdId, Option<f64>> {
    let mut students: BTreeMap<EdId, u64> = geo.eds().iter().map(|e| (e.ed_id, 0)).collect();
    for p in pop.iter().filter(|p| p.age > 17 && p.is_student()) {
        *students.get_mut(&p.ed_id).expect("ED in geography") += 1;
    }
    students
        .into_iter()
        .map(|(ed, s)| {
            let n = pop.ed_count(ed);
            (ed, (n > 0).then(|| s as f64 / n as f64))
        })
        .collect()
}

/// Change in percentage points between two shares.
pub fn share_delta_points(start: f64, end: f64) -> f64 {
    100.0 * (end - start)
}

pub fn adult_student_share_delta(start: &Population, end: &Population, geo: &Geography) -> BTreeMap<EdId, Option<f64>> {
    let s = adult_student_shares(start, geo);
    let e = adult_student_shares(end, geo);
    s.into_iter()
        .map(|(ed, a)| (ed, a.zip(e[&ed]).map(|(a, b)| share_delta_points(a, b))))
        .collect()
}

/// Every metric for one start/end pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsBundle {
    pub ydr: f64,
    pub odr: f64,
    pub ed_relative_size: BTreeMap<EdId, Option<f64>>,
    pub recent_immigrants: ImmigrantShares,
    pub education_shares: EducationShares,
    pub unemployment: Unemployment,
    pub adult_student_share_delta: BTreeMap<EdId, Option<f64>>,
}

pub fn metrics_bundle(start: &Population, end: &Population, geo: &Geography) -> Result<MetricsBundle> {
    let (ydr, odr) = dependency_ratios(end)?;
    Ok(MetricsBundle {
        ydr,
        odr,
        ed_relative_size: ed_relative_sizes(start, end, geo),
        recent_immigrants: recent_immigrant_shares(end, geo),
        education_shares: education_shares(end),
        unemployment: unemployment(end),
        adult_student_share_delta: adult_student_share_delta(start, end, geo),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_puts_one_in_last_bin() {
        let h = share_histogram([0.0, 0.049, 0.05, 0.5, 1.0], 20);
        assert_eq!(h[0], 2);
        assert_eq!(h[1], 1);
        assert_eq!(h[10], 1);
        assert_eq!(h[19], 1);
    }

    #[test]
    fn all_working_age_gives_zero_ratios() {
        let mut ages = [0.0; AGE_COUNT];
        ages[30] = 10.0;
        assert_eq!(dependency_ratios_from_ages(&ages).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn no_working_age_is_undefined() {
        let mut ages = [0.0; AGE_COUNT];
        ages[3] = 1.0;
        assert!(matches!(dependency_ratios_from_ages(&ages), Err(Error::UndefinedRatio(_))));
    }
}
