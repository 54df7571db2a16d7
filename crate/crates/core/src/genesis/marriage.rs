//! Linking married people at initialisation.

use std::collections::BTreeMap;

use rand::Rng;

use super::matching::{match_partner, MatchParams, Profile};
use crate::codes::{MaritalStatus, Sex};
use crate::population::{Geography, PersonId, Population, Spouse};
use crate::rng::{rng_stream, StreamTag};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarriageInitConfig {
    pub params: MatchParams,
    pub same_sex_share: f64,
}

impl Default for MarriageInitConfig {
    fn default() -> Self {
        MarriageInitConfig {
            params: MatchParams::default(),
            same_sex_share: 0.03,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct MarriageInit {
    pub ed_couples: usize,
    pub region_couples: usize,
    pub same_sex_couples: usize,
    pub outsiders: usize,
}

impl MarriageInit {
    pub fn couples(&self) -> usize {
        self.ed_couples + self.region_couples
    }
}

/// Who a married person is looking for: their own sex or the other one.
type PoolKey = (usize, bool);

fn key_sought(sex: Sex, same_sex: bool) -> PoolKey {
    ((if same_sex { sex } else { sex.other() }).index(), same_sex)
}

fn pair_within(
    pop: &mut Population,
    focals: &[PersonId],
    pools: &mut BTreeMap<PoolKey, Vec<Profile>>,
    prefers_same: &BTreeMap<PersonId, bool>,
    config: &MarriageInitConfig,
    seed: u64,
    year: i32,
    tag: StreamTag,
) -> (usize, usize) {
    let (mut couples, mut same) = (0, 0);
    for &id in focals {
        let p = pop.get(id).expect("listed id");
        if p.spouse.is_some() {
            continue;
        }
        let same_sex = prefers_same[&id];
        let profile = Profile::from(p);
        let Some(pool) = pools.get_mut(&key_sought(p.sex, same_sex)) else { continue };
        let mut rng = rng_stream(seed, id, year, tag);
        let Some(partner) = match_partner(&profile, pool, &config.params, &mut rng) else { continue };
        pool.retain(|c| c.id != partner && c.id != id);
        if let Some(own) = pools.get_mut(&(p.sex.index(), same_sex)) {
            own.retain(|c| c.id != id && c.id != partner);
        }
        pop.link_spouses(id, partner);
        couples += 1;
        same += usize::from(same_sex);
    }
    (couples, same)
}

fn pools_for(pop: &Population, ids: &[PersonId], prefers_same: &BTreeMap<PersonId, bool>) -> BTreeMap<PoolKey, Vec<Profile>> {
    let mut pools: BTreeMap<PoolKey, Vec<Profile>> = BTreeMap::new();
    for &id in ids {
        let p = pop.get(id).expect("listed id");
        if p.spouse.is_none() {
            pools.entry((p.sex.index(), prefers_same[&id])).or_default().push(Profile::from(p));
        }
    }
    pools
}

/// Links every unlinked MAR person to a spouse in their own ED where
/// possible, then within their region, else marks the spouse as living
/// abroad. Each person independently seeks a same-sex partner with
/// probability `same_sex_share`; pairs are only formed between people seeking
/// the same kind of couple. Focal people are processed in ascending id order.
pub fn init_marriages(
    pop: &mut Population,
    geo: &Geography,
    config: &MarriageInitConfig,
    seed: u64,
    year: i32,
) -> MarriageInit {
    let single_married: Vec<PersonId> = pop
        .iter()
        .filter(|p| p.marital_status == MaritalStatus::Married && p.spouse.is_none())
        .map(|p| p.id)
        .collect();
    let prefers_same: BTreeMap<PersonId, bool> = single_married
        .iter()
        .map(|&id| {
            let mut rng = rng_stream(seed, id, year, StreamTag::InitMarriageRegion);
            (id, rng.random::<f64>() < config.same_sex_share)
        })
        .collect();

    let mut report = MarriageInit::default();
    let mut by_ed: BTreeMap<_, Vec<PersonId>> = BTreeMap::new();
    for &id in &single_married {
        by_ed.entry(pop.get(id).expect("listed").ed_id).or_default().push(id);
    }
    for ids in by_ed.values() {
        let mut pools = pools_for(pop, ids, &prefers_same);
        let (c, s) = pair_within(pop, ids, &mut pools, &prefers_same, config, seed, year, StreamTag::InitMarriageEd);
        report.ed_couples += c;
        report.same_sex_couples += s;
    }

    let mut by_region: BTreeMap<_, Vec<PersonId>> = BTreeMap::new();
    for &id in &single_married {
        let p = pop.get(id).expect("listed");
        if p.spouse.is_none() {
            let region = geo.region_of(p.ed_id).expect("ED in geography");
            by_region.entry(region).or_default().push(id);
        }
    }
    for ids in by_region.values() {
        let mut pools = pools_for(pop, ids, &prefers_same);
        let (c, s) = pair_within(pop, ids, &mut pools, &prefers_same, config, seed, year, StreamTag::InitMarriageRegion);
        report.region_couples += c;
        report.same_sex_couples += s;
    }

    for &id in &single_married {
        let p = pop.get_mut(id).expect("listed");
        if p.spouse.is_none() {
            p.spouse = Some(Spouse::Outsider);
            report.outsiders += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::EducationLevel;
    use crate::population::{EdId, EdRecord, Individual, RegionId, CountyId};

    fn geo() -> Geography {
        let ed = |id, county| EdRecord {
            ed_id: EdId(id),
            county_id: CountyId(county),
            region_id: RegionId(1),
            base_population: 10,
            intra_county_capacity: 1,
            inter_county_capacity: 1,
            intl_immigrant_weight: 0.5,
        };
        Geography::new(vec![ed(1, 1), ed(2, 2)]).unwrap()
    }

    fn married(pop: &mut Population, age: u8, sex: Sex, ed: u32) -> PersonId {
        let mut p = Individual::new(PersonId(0), age, sex, EdId(ed));
        p.marital_status = MaritalStatus::Married;
        p.education_attained = EducationLevel::UpperSecondary;
        p.econ_status = crate::codes::EconStatus::Working;
        pop.add(p)
    }

    #[test]
    fn lone_pair_in_ed_is_linked() {
        let mut pop = Population::new();
        let a = married(&mut pop, 40, Sex::Male, 1);
        let b = married(&mut pop, 38, Sex::Female, 1);
        let cfg = MarriageInitConfig { same_sex_share: 0.0, ..Default::default() };
        let r = init_marriages(&mut pop, &geo(), &cfg, 1, 2022);
        assert_eq!(r.ed_couples, 1);
        assert_eq!(pop.get(a).unwrap().spouse, Some(Spouse::Resident(b)));
        assert!(crate::population::validate(&pop, &geo()).is_empty());
    }

    #[test]
    fn region_fallback_then_outsider() {
        let mut pop = Population::new();
        let a = married(&mut pop, 40, Sex::Male, 1);
        let b = married(&mut pop, 41, Sex::Female, 2);
        let c = married(&mut pop, 50, Sex::Male, 2);
        let cfg = MarriageInitConfig { same_sex_share: 0.0, ..Default::default() };
        let r = init_marriages(&mut pop, &geo(), &cfg, 1, 2022);
        assert_eq!(r.couples(), 1);
        assert_eq!(r.outsiders, 1);
        let linked_b = pop.get(b).unwrap().resident_spouse().unwrap();
        assert!(linked_b == a || linked_b == c);
    }

    #[test]
    fn men_only_all_outsiders() {
        let mut pop = Population::new();
        for i in 0..10 {
            married(&mut pop, 30 + i, Sex::Male, 1 + u32::from(i % 2));
        }
        let cfg = MarriageInitConfig { same_sex_share: 0.0, ..Default::default() };
        let r = init_marriages(&mut pop, &geo(), &cfg, 1, 2022);
        assert_eq!(r.outsiders, 10);
        assert!(pop.iter().all(|p| p.spouse == Some(Spouse::Outsider)));
    }
}
