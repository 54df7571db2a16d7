//! Desk-scale synthetic geography and rate tables.

use std::collections::BTreeMap;

use rand::Rng;

use super::econ::{EconRow, EconTransitionTable, ECON_BANDS};
use super::education::{
    BroadBand, DropoutPriority, EducationRates, EducationRatesFile, SecondaryDropout, ADULT_LEARNER_CELLS,
};
use super::fertility::{FertilityRow, FertilityTable, MaritalBand, FERTILITY_GROUPS, FIRST_MARITAL_GROUP};
use super::migration::{AgeSexDist, CountyFlow, InternalFlowTable, MigrationProfiles, RegionShares};
use super::mortality::MortalityTable;
use super::nuptiality::NuptialityConfig;
use super::scenario::ScenarioConfig;
use super::RateTables;
use crate::codes::{AgeBands, EconStatus, EducationLevel, Sex, AGE_COUNT, MAX_AGE};
use crate::population::{age_sex_cell, CountyId, EdId, EdRecord, Geography, RegionId, AGE_SEX_CELLS};
use crate::rng::{group_stream, Stream, StreamTag};
use crate::sampling::largest_remainder;

pub const SYNTH_REGIONS: u32 = 8;
pub const COUNTIES_PER_REGION: u32 = 2;

fn jitter(rng: &mut Stream, spread: f64) -> f64 {
    1.0 + spread * (2.0 * rng.random::<f64>() - 1.0)
}

/// Eight regions of two counties each, with `ed_count` EDs spread over the
/// counties and base populations summing to `total_population`.
pub fn gen_synthetic_geography(seed: u64, ed_count: usize, total_population: u64) -> Geography {
    let mut rng = group_stream(seed, 0, 0, StreamTag::SyntheticGeography);
    let counties = (SYNTH_REGIONS * COUNTIES_PER_REGION) as usize;
    let ed_count = ed_count.max(counties);
    // The first region plays the capital: bigger EDs, more immigrants.
    let weights: Vec<f64> = (0..ed_count)
        .map(|i| {
            let county = i % counties;
            let urban = if county < COUNTIES_PER_REGION as usize { 2.5 } else { 1.0 };
            urban * (0.3 + rng.random::<f64>()).powi(2)
        })
        .collect();
    let sizes = largest_remainder(total_population, &weights);
    let attraction: Vec<f64> = (0..ed_count)
        .map(|i| {
            let county = i % counties;
            let urban = if county < COUNTIES_PER_REGION as usize { 2.0 } else { 1.0 };
            urban * (sizes[i] as f64 + 1.0) * jitter(&mut rng, 0.5)
        })
        .collect();
    let total_attraction: f64 = attraction.iter().sum();
    let mut eds: Vec<EdRecord> = (0..ed_count)
        .map(|i| {
            let county = (i % counties) as u32;
            let base = sizes[i];
            EdRecord {
                ed_id: EdId(i as u32 + 1),
                county_id: CountyId(county + 1),
                region_id: RegionId(county / COUNTIES_PER_REGION + 1),
                base_population: base,
                intra_county_capacity: (base as f64 * 0.04).ceil() as u32 + 2,
                inter_county_capacity: (base as f64 * 0.03).ceil() as u32 + 2,
                intl_immigrant_weight: attraction[i] / total_attraction,
            }
        })
        .collect();
    let drift: f64 = 1.0 - eds.iter().map(|e| e.intl_immigrant_weight).sum::<f64>();
    eds[0].intl_immigrant_weight += drift;
    Geography::new(eds).expect("synthetic geography is well formed")
}

/// Gompertz-Makeham mortality above age 0, with a separate infant rate.
fn synthetic_mortality(rng: &mut Stream) -> MortalityTable {
    let mut q = [[0.0; AGE_COUNT]; 2];
    for sex in Sex::ALL {
        let (a, b) = match sex {
            Sex::Female => (0.0002, 0.000_018),
            Sex::Male => (0.0003, 0.000_028),
        };
        let a = a * jitter(rng, 0.05);
        let b = b * jitter(rng, 0.05);
        let c = 0.1 * jitter(rng, 0.02);
        for age in 0..=MAX_AGE {
            let v = if age == 0 {
                0.003
            } else {
                let hazard = a + b * (c * age as f64).exp();
                1.0 - (-hazard).exp()
            };
            q[sex.index()][age as usize] = v.min(1.0);
        }
    }
    MortalityTable::new(q).expect("rates in range")
}

const ASFR: [f64; FERTILITY_GROUPS] = [0.008, 0.035, 0.07, 0.11, 0.065, 0.02, 0.002];

fn synthetic_fertility(rng: &mut Stream, geo: &Geography) -> FertilityTable {
    let mut rows = Vec::new();
    for region in geo.regions() {
        let f = jitter(rng, 0.05);
        for (g, &r) in ASFR.iter().enumerate() {
            let rate = r * f;
            if g < FIRST_MARITAL_GROUP {
                rows.push(FertilityRow { region, group: g, band: MaritalBand::All, rate });
            } else {
                rows.push(FertilityRow { region, group: g, band: MaritalBand::Married, rate: rate * 1.15 });
                rows.push(FertilityRow { region, group: g, band: MaritalBand::NotMarried, rate: rate * 0.85 });
            }
        }
    }
    FertilityTable::from_rows(&rows).expect("synthetic fertility rows are complete")
}

fn synthetic_flows(rng: &mut Stream, geo: &Geography, year: i32) -> InternalFlowTable {
    let mut pop: BTreeMap<CountyId, f64> = BTreeMap::new();
    for ed in geo.eds() {
        *pop.entry(ed.county_id).or_default() += ed.base_population as f64;
    }
    // Later census: a stronger pull towards the capital region.
    let capital_pull = if year >= 2022 { 1.6 } else { 1.2 };
    let mut flows = Vec::new();
    for (&origin, &p_origin) in &pop {
        let intra = (p_origin * 0.02 * jitter(rng, 0.2)).round() as u64;
        flows.push(CountyFlow { origin, dest: origin, count: intra });
        let out_total = p_origin * 0.012 * jitter(rng, 0.2);
        let pulls: Vec<(CountyId, f64)> = pop
            .iter()
            .filter(|(c, _)| **c != origin)
            .map(|(&c, &p)| {
                let region = geo.counties().find(|(k, _)| *k == c).map(|(_, r)| r);
                let pull = if region == Some(RegionId(1)) { capital_pull } else { 1.0 };
                (c, p * pull)
            })
            .collect();
        let w: Vec<f64> = pulls.iter().map(|(_, p)| *p).collect();
        for ((dest, _), n) in pulls.iter().zip(largest_remainder(out_total.round() as u64, &w)) {
            if n > 0 {
                flows.push(CountyFlow { origin, dest: *dest, count: n });
            }
        }
    }
    InternalFlowTable::new(year, flows).expect("one flow per pair")
}

fn profile(female_share: f64, peak_age: f64, spread: f64, child_weight: f64) -> AgeSexDist {
    let mut cells = [0.0; AGE_SEX_CELLS];
    for g in 0..AgeBands::FIVE_YEAR.len() {
        let mid = g as f64 * 5.0 + 2.5;
        let d = (mid - peak_age) / spread;
        let adult = (-0.5 * d * d).exp();
        let child = if mid < 15.0 { child_weight } else { 0.0 };
        let w = adult + child + 0.002;
        cells[age_sex_cell(Sex::Female, g)] = w * female_share;
        cells[age_sex_cell(Sex::Male, g)] = w * (1.0 - female_share);
    }
    let sum: f64 = cells.iter().sum();
    cells.iter_mut().for_each(|c| *c /= sum);
    AgeSexDist::new(cells).expect("normalised")
}

/// Labour-market outcome row for non-students; unemployment falls with
/// education and retirement rises with age.
pub fn synthetic_econ_row(band: usize, sex: Sex, level: EducationLevel) -> EconRow {
    let age = 15.0 + 5.0 * band as f64;
    let rank = level.rank().unwrap_or(0) as f64;
    let retired: f64 = match age as u32 {
        0..=54 => 0.0,
        55..=59 => 0.05,
        60..=64 => 0.25,
        65..=69 => 0.7,
        70..=74 => 0.88,
        _ => 0.94,
    };
    let disabled = (0.01 + 0.0006 * (age - 15.0)) * (1.0 - 0.06 * rank);
    let other = if age < 25.0 { 0.05 } else { 0.012 };
    let home = match sex {
        Sex::Female => 0.10 - 0.008 * rank,
        Sex::Male => 0.02,
    } * if age >= 65.0 { 0.3 } else { 1.0 };
    let active = (1.0 - retired - disabled - other - home).max(0.0);
    let youth = if age < 25.0 { 2.2 } else if age < 30.0 { 1.4 } else { 1.0 };
    let unemployment = (0.13 - 0.012 * rank) * youth;
    let une = active * unemployment;
    let work = active - une;
    // Order follows EconStatus::LABOUR: W, LAHF, R, UTWSD, OTH, UNE.
    let mut row = [work, home, retired, disabled, other, une];
    let sum: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= sum);
    row
}

fn synthetic_econ() -> EconTransitionTable {
    debug_assert_eq!(
        EconStatus::LABOUR,
        [
            EconStatus::Working,
            EconStatus::HomeFamily,
            EconStatus::Retired,
            EconStatus::Disabled,
            EconStatus::Other,
            EconStatus::Unemployed
        ]
    );
    let mut t = EconTransitionTable::empty();
    for band in 0..ECON_BANDS {
        for sex in [Sex::Female, Sex::Male] {
            for level in EducationLevel::RANKED {
                t.set(band, sex, level, synthetic_econ_row(band, sex, level))
                    .expect("normalised row");
            }
        }
    }
    t
}

fn map<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn synthetic_education(rng: &mut Stream, geo: &Geography) -> EducationRates {
    let outcome = |s: f64, w: f64, une: f64, oth: f64, home: f64| {
        map([("S", s), ("W", w), ("UNE", une), ("OTH", oth), ("LAHF", home)])
    };
    let mut dropout_outcomes = BTreeMap::new();
    for level in ["LS", "US", "PLC", "HC", "DEG", "PD", "D"] {
        dropout_outcomes.insert(level.to_string(), outcome(0.15, 0.5, 0.2, 0.1, 0.05));
    }
    let mut graduate_outcomes = BTreeMap::new();
    graduate_outcomes.insert("US".into(), outcome(0.6, 0.3, 0.07, 0.03, 0.0));
    graduate_outcomes.insert("PLC".into(), outcome(0.3, 0.55, 0.1, 0.05, 0.0));
    graduate_outcomes.insert("HC".into(), outcome(0.4, 0.5, 0.07, 0.03, 0.0));
    graduate_outcomes.insert("DEG".into(), outcome(0.3, 0.62, 0.05, 0.03, 0.0));
    graduate_outcomes.insert("PD".into(), outcome(0.1, 0.83, 0.04, 0.03, 0.0));
    graduate_outcomes.insert("D".into(), outcome(0.0, 0.92, 0.05, 0.03, 0.0));

    let mut enrolment = BTreeMap::new();
    enrolment.insert("NF".into(), map([("LS", 0.5), ("US", 0.3), ("PLC", 0.2)]));
    enrolment.insert("P".into(), map([("LS", 0.3), ("US", 0.4), ("PLC", 0.3)]));
    enrolment.insert("LS".into(), map([("US", 0.5), ("PLC", 0.5)]));
    enrolment.insert("US".into(), map([("PLC", 0.2), ("HC", 0.2), ("DEG", 0.6)]));
    enrolment.insert("PLC".into(), map([("HC", 0.4), ("DEG", 0.6)]));
    enrolment.insert("HC".into(), map([("DEG", 0.9), ("PD", 0.1)]));
    enrolment.insert("DEG".into(), map([("PD", 0.95), ("D", 0.05)]));
    enrolment.insert("PD".into(), map([("D", 1.0)]));

    let adult_rate: BTreeMap<RegionId, f64> = geo.regions().map(|r| (r, 0.02 * jitter(rng, 0.25))).collect();

    let mut learners: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let bands = AgeBands::LEARNER;
    let raw: Vec<f64> = (0..ADULT_LEARNER_CELLS)
        .map(|i| {
            let b = i % bands.len();
            let sex_w = if i < bands.len() { 0.55 } else { 0.45 };
            sex_w * if b == 0 { 3.0 } else { 1.0 / b as f64 }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    for (i, w) in raw.iter().enumerate() {
        let sex = if i < bands.len() { "F" } else { "M" };
        learners
            .entry(sex.to_string())
            .or_default()
            .insert(bands.label(i % bands.len()), w / total);
    }

    let file = EducationRatesFile {
        parent_to_broad: [
            ("LowerSecondaryAndBelow", [0.25, 0.40, 0.35]),
            ("LC_PLC", [0.10, 0.40, 0.50]),
            ("ThirdLevel", [0.03, 0.20, 0.77]),
            ("marginal", [0.10, 0.35, 0.55]),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect(),
        dropout: map([("PLC", 0.10), ("HC", 0.08), ("DEG", 0.05), ("PD", 0.05), ("D", 0.04)]),
        secondary_dropout: SecondaryDropout::default(),
        dropout_outcomes,
        graduate_outcomes,
        course_duration: BTreeMap::new(),
        enrolment_by_attained: enrolment,
        young_course_shares: map([
            ("US", 0.10),
            ("PLC", 0.10),
            ("HC", 0.12),
            ("DEG", 0.55),
            ("PD", 0.10),
            ("D", 0.03),
        ]),
        degree_entry_attained: map([("US", 0.8), ("PLC", 0.1), ("HC", 0.1)]),
        adult_student_share_18_24: 0.61,
        adult_student_rate_25_69: adult_rate,
        adult_learner_age_sex: learners,
        hc_band: BroadBand::ThirdLevel,
        dropout_priority: DropoutPriority::Above,
    };
    EducationRates::try_from(file).expect("synthetic education rates are consistent")
}

/// A complete, internally consistent rate bundle for `geo`. Deterministic in
/// `seed`.
pub fn gen_synthetic_rates(seed: u64, geo: &Geography) -> RateTables {
    let mut rng = group_stream(seed, 0, 0, StreamTag::SyntheticRates);
    let mortality = synthetic_mortality(&mut rng);
    let fertility = synthetic_fertility(&mut rng, geo);
    let internal_flows = [2016, 2022]
        .into_iter()
        .map(|y| (y, synthetic_flows(&mut rng, geo, y)))
        .collect();
    let profiles = MigrationProfiles {
        intra: profile(0.51, 28.0, 10.0, 0.25),
        inter: profile(0.50, 26.0, 8.0, 0.2),
        intl_out: profile(0.49, 26.0, 7.0, 0.1),
        intl_in: profile(0.50, 30.0, 9.0, 0.15),
    };
    let mut region_pop: BTreeMap<RegionId, f64> = BTreeMap::new();
    for ed in geo.eds() {
        *region_pop.entry(ed.region_id).or_default() += ed.base_population as f64 + 1.0;
    }
    let raw: BTreeMap<RegionId, f64> = region_pop
        .iter()
        .map(|(r, p)| (*r, p * jitter(&mut rng, 0.2)))
        .collect();
    let total: f64 = raw.values().sum();
    let mut shares: BTreeMap<RegionId, f64> = raw.iter().map(|(r, v)| (*r, v / total)).collect();
    let drift = 1.0 - shares.values().sum::<f64>();
    if let Some(first) = shares.values_mut().next() {
        *first += drift;
    }
    let education = synthetic_education(&mut rng, geo);
    RateTables {
        mortality,
        fertility,
        internal_flows,
        profiles,
        region_emigrant_shares: Some(RegionShares::new(shares).expect("normalised")),
        education,
        econ: synthetic_econ(),
        nuptiality: NuptialityConfig::default(),
        scenario: ScenarioConfig {
            master_seed: seed,
            ..ScenarioConfig::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables(seed: u64) -> (Geography, RateTables) {
        let geo = gen_synthetic_geography(seed, 64, 20_000);
        let rates = gen_synthetic_rates(seed, &geo);
        (geo, rates)
    }

    #[test]
    fn deterministic_in_seed() {
        let (ga, a) = tables(3);
        let (gb, b) = tables(3);
        assert_eq!(ga, gb);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let (_, c) = tables(4);
        assert_ne!(a, c);
    }

    #[test]
    fn mortality_rises_after_thirty() {
        for seed in 0..20 {
            let (_, r) = tables(seed);
            for sex in [Sex::Female, Sex::Male] {
                for age in 30..MAX_AGE {
                    assert!(r.mortality.base(age + 1, sex) >= r.mortality.base(age, sex), "seed {seed} age {age}");
                }
            }
        }
    }

    #[test]
    fn econ_rows_normalised() {
        let (_, r) = tables(1);
        for band in 0..ECON_BANDS {
            for sex in [Sex::Female, Sex::Male] {
                for level in EducationLevel::RANKED {
                    let row = r.econ.exact(band, sex, level).unwrap();
                    assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn geography_is_valid() {
        let (geo, rates) = tables(9);
        assert!(geo.problems().is_empty());
        assert_eq!(geo.total_base_population(), 20_000);
        assert_eq!(geo.region_count(), 8);
        rates.check_against(&geo).unwrap();
    }

    #[test]
    fn unemployment_falls_with_education() {
        let une = |l| synthetic_econ_row(4, Sex::Male, l)[5];
        for w in EducationLevel::RANKED.windows(2) {
            assert!(une(w[1]) < une(w[0]));
        }
    }
}
