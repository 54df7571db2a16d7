//! Synthetic base population.

use rand::Rng;

use crate::codes::{AgeBands, EconStatus, EducationLevel, MaritalStatus, Sex, EDUCATION_LEVELS, MAX_AGE};
use crate::population::{Geography, Individual, PersonId, Population};
use crate::rates::synth::synthetic_econ_row;
use crate::rng::{group_stream, Stream, StreamTag};
use crate::sampling::{largest_remainder, weighted_index, Categorical};

/// Relative size of each single-year age: a stationary population under
/// Gompertz survival with mild growth.
fn age_weights() -> Vec<f64> {
    let (a, b, c, growth) = (0.00025, 0.000_023, 0.1, 0.005);
    (0..=MAX_AGE)
        .map(|age| {
            let x = f64::from(age);
            let cumulative_hazard = a * x + b / c * ((c * x).exp() - 1.0);
            (-cumulative_hazard - growth * x).exp()
        })
        .collect()
}

const YOUNG_ADULT_EDUCATION: [f64; EDUCATION_LEVELS] = [0.005, 0.02, 0.10, 0.35, 0.15, 0.10, 0.20, 0.07, 0.005];
const RECENT_COHORT_EDUCATION: [f64; EDUCATION_LEVELS] = [0.005, 0.02, 0.06, 0.20, 0.12, 0.10, 0.30, 0.16, 0.035];
const OLD_COHORT_EDUCATION: [f64; EDUCATION_LEVELS] = [0.03, 0.30, 0.25, 0.20, 0.06, 0.04, 0.08, 0.03, 0.01];

/// Attainment of non-student adults by age: older cohorts hold less.
pub fn cohort_education_weights(age: u8) -> [f64; EDUCATION_LEVELS] {
    if age < 25 {
        return YOUNG_ADULT_EDUCATION;
    }
    let t = ((f64::from(age) - 30.0) / 50.0).clamp(0.0, 1.0);
    let mut w = [0.0; EDUCATION_LEVELS];
    for i in 0..EDUCATION_LEVELS {
        w[i] = (1.0 - t) * RECENT_COHORT_EDUCATION[i] + t * OLD_COHORT_EDUCATION[i];
    }
    w
}

/// Probabilities of (MAR, SEP, WID); the rest are single.
fn marital_weights(age: u8, sex: Sex) -> [f64; 3] {
    let married: f64 = match age {
        0..=17 => return [0.0; 3],
        18..=24 => 0.03,
        25..=29 => 0.2,
        30..=34 => 0.45,
        35..=44 => 0.6,
        45..=74 => 0.62,
        _ => 0.45,
    };
    let separated = if age >= 35 { 0.07 } else if age >= 25 { 0.02 } else { 0.0 };
    let widowed = if age < 55 {
        0.005
    } else {
        let base = (f64::from(age) - 55.0) / 40.0;
        match sex {
            Sex::Female => (0.05 + 0.55 * base).min(0.55),
            Sex::Male => (0.02 + 0.2 * base).min(0.25),
        }
    };
    let married = married.min(1.0 - separated - widowed);
    [married, separated, widowed]
}

fn student_probability(age: u8) -> f64 {
    match age {
        0..=3 => 0.0,
        4..=15 => 1.0,
        16..=17 => 0.92,
        18..=24 => 0.5,
        25..=69 => 0.035,
        _ => 0.0,
    }
}

/// Share of non-student adults whose education was not stated.
const NOT_STATED: f64 = 0.01;

fn draw_person(rng: &mut Stream, ages: &Categorical, id: PersonId, ed: crate::population::EdId) -> Individual {
    let age = ages.sample(rng) as u8;
    let sex = if rng.random::<bool>() { Sex::Female } else { Sex::Male };
    let mut p = Individual::new(id, age, sex, ed);
    let mw = marital_weights(age, sex);
    let u: f64 = rng.random();
    p.marital_status = if u < mw[0] {
        MaritalStatus::Married
    } else if u < mw[0] + mw[1] {
        MaritalStatus::Separated
    } else if u < mw[0] + mw[1] + mw[2] {
        MaritalStatus::Widowed
    } else {
        MaritalStatus::Single
    };

    if rng.random::<f64>() < student_probability(age) {
        p.econ_status = EconStatus::Student;
        // Students' attainment is left unstated, as in the survey source.
        p.education_attained = EducationLevel::NotApplicable;
        return p;
    }
    if age <= crate::codes::SCHOOL_ENTRY_AGE {
        return p;
    }
    let w = if age < 18 {
        let mut w = [0.0; EDUCATION_LEVELS];
        w[EducationLevel::LowerSecondary.rank().unwrap()] = 0.8;
        w[EducationLevel::Primary.rank().unwrap()] = 0.2;
        w
    } else {
        cohort_education_weights(age)
    };
    let level = EducationLevel::RANKED[weighted_index(&w, rng).expect("positive weights")];
    p.education_attained = if age >= 18 && rng.random::<f64>() < NOT_STATED {
        EducationLevel::NotApplicable
    } else {
        level
    };
    if let Some(band) = AgeBands::ECON.index(age) {
        let row = synthetic_econ_row(band, sex, level);
        p.econ_status = EconStatus::LABOUR[weighted_index(&row, rng).expect("normalised row")];
    }
    p
}

/// A base population of `size` people spread over `geo` in proportion to
/// each ED's base population. Spouse links are left for initialisation;
/// students carry education `NA`. Deterministic in `seed`.
pub fn gen_synthetic_base(seed: u64, geo: &Geography, size: usize) -> Population {
    let weights: Vec<f64> = geo.eds().iter().map(|e| e.base_population as f64 + 1e-9).collect();
    let counts = largest_remainder(size as u64, &weights);
    let ages = Categorical::new(&age_weights()).expect("positive weights");
    let mut pop = Population::new();
    for (i, (ed, &n)) in geo.eds().iter().zip(&counts).enumerate() {
        let mut rng = group_stream(seed, i as u64, 0, StreamTag::SyntheticBase);
        for _ in 0..n {
            let p = draw_person(&mut rng, &ages, pop.next_id(), ed.ed_id);
            pop.add(p);
        }
    }
    pop
}
