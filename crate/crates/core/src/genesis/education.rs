//! Education imputation at initialisation.

use rand::Rng;

use crate::codes::{AgeBands, EconStatus, EducationLevel, Sex, EDUCATION_LEVELS, SCHOOL_ENTRY_AGE};
use crate::population::{PersonId, Population};
use crate::rates::RateTables;
use crate::rng::{rng_stream, StreamTag};
use crate::sampling::weighted_index;

use EducationLevel::*;

/// School stage for a pupil of `age`: (course, attained, years left),
/// assuming entry at four and no repeated years.
pub fn school_stage(age: u8, durations: impl Fn(EducationLevel) -> u32) -> (EducationLevel, EducationLevel, u32) {
    let p_end = u32::from(SCHOOL_ENTRY_AGE) + durations(Primary);
    let ls_end = p_end + durations(LowerSecondary);
    let us_end = ls_end + durations(UpperSecondary);
    let age = u32::from(age.max(SCHOOL_ENTRY_AGE));
    if age < p_end {
        (Primary, NoFormal, p_end - age)
    } else if age < ls_end {
        (LowerSecondary, Primary, ls_end - age)
    } else {
        (UpperSecondary, LowerSecondary, us_end.saturating_sub(age).max(1))
    }
}

/// Attainment counts of non-student adults by (sex, five-year age group).
struct AttainmentTable {
    cells: Vec<[f64; EDUCATION_LEVELS]>,
}

impl AttainmentTable {
    fn build(pop: &Population) -> Self {
        let mut cells = vec![[0.0; EDUCATION_LEVELS]; 2 * AgeBands::FIVE_YEAR.len()];
        for p in pop.iter() {
            if p.is_student() || p.age < 18 {
                continue;
            }
            if let Some(r) = p.education_attained.rank() {
                cells[p.age_sex_cell()][r] += 1.0;
            }
        }
        AttainmentTable { cells }
    }

    /// Weights for a sex and age, widening to neighbouring groups and then
    /// to the whole sex when a cell is empty.
    fn weights(&self, sex: Sex, age: u8) -> [f64; EDUCATION_LEVELS] {
        let groups = AgeBands::FIVE_YEAR.len();
        let g = AgeBands::FIVE_YEAR.index(age).unwrap_or(0).max(3);
        for d in 0..groups {
            let mut w = [0.0; EDUCATION_LEVELS];
            for gg in [g.checked_sub(d), Some(g + d)].into_iter().flatten().filter(|&x| x < groups) {
                let c = &self.cells[crate::population::age_sex_cell(sex, gg)];
                w.iter_mut().zip(c).for_each(|(a, b)| *a += b);
            }
            if w.iter().any(|&x| x > 0.0) {
                return w;
            }
        }
        let mut w = [0.0; EDUCATION_LEVELS];
        w[UpperSecondary.rank().unwrap()] = 1.0;
        w
    }
}

/// Summary of what initialisation changed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct EducationInit {
    pub imputed_adults: usize,
    pub pupils: usize,
    pub young_students: usize,
    pub mature_students: usize,
}

/// Fills unstated attainment and gives every student a course and a
/// graduation year after `start_year`.
pub fn init_education(pop: &mut Population, rates: &RateTables, start_year: i32, seed: u64) -> EducationInit {
    let edu = &rates.education;
    let table = AttainmentTable::build(pop);
    let mut report = EducationInit::default();
    let ids: Vec<PersonId> = pop.ids().collect();
    for id in ids {
        let p = pop.get_mut(id).expect("listed id");
        let mut rng = rng_stream(seed, id, start_year, StreamTag::InitEducation);
        let draw = |w: &[f64], rng: &mut _| EducationLevel::RANKED[weighted_index(w, rng).expect("positive weights")];

        if !p.is_student() {
            if p.education_attained.is_na() && p.age > SCHOOL_ENTRY_AGE {
                p.education_attained = draw(&table.weights(p.sex, p.age), &mut rng);
                report.imputed_adults += 1;
            }
            if p.econ_status == EconStatus::NotApplicable && p.age > crate::codes::LABOUR_MARKET_AGE {
                if let Some((row, _)) = rates.econ.row(p.age, p.sex, p.education_attained) {
                    p.econ_status = EconStatus::LABOUR[weighted_index(row, &mut rng).expect("normalised row")];
                }
            }
            continue;
        }

        let (course, attained, years_left) = if p.age < 18 {
            report.pupils += 1;
            school_stage(p.age, |l| edu.duration(l))
        } else if p.age < 25 && p.education_attained.is_na() {
            report.young_students += 1;
            let course = draw(edu.young_course_shares(), &mut rng);
            let attained = match course {
                UpperSecondary => LowerSecondary,
                PostLeavingCert | HigherCert => UpperSecondary,
                Degree => draw(edu.degree_entry_attained(), &mut rng),
                Postgraduate => Degree,
                Doctorate => Postgraduate,
                _ => NoFormal,
            };
            (course, attained, rng.random_range(1..=edu.duration(course)))
        } else {
            report.mature_students += 1;
            let attained = if p.education_attained.is_na() {
                let mut w = table.weights(p.sex, p.age);
                for (i, x) in w.iter_mut().enumerate() {
                    if !edu.can_enrol(EducationLevel::RANKED[i]) {
                        *x = 0.0;
                    }
                }
                if w.iter().all(|&x| x == 0.0) {
                    w[UpperSecondary.rank().unwrap()] = 1.0;
                }
                draw(&w, &mut rng)
            } else {
                p.education_attained
            };
            match weighted_index(edu.enrolment_row(attained), &mut rng) {
                Some(i) => {
                    let course = EducationLevel::RANKED[i];
                    (course, attained, rng.random_range(1..=edu.duration(course)))
                }
                None => {
                    // Nothing left to study: treat as a non-student.
                    p.education_attained = attained;
                    p.leave_education(EconStatus::Other);
                    continue;
                }
            }
        };
        // Keep a stated attainment if it is already higher.
        if p.education_attained.is_na() || attained.is_above(p.education_attained) {
            p.education_attained = attained;
        }
        if !course.is_above(p.education_attained) {
            p.leave_education(EconStatus::Other);
            continue;
        }
        p.enrol(course, start_year + years_left as i32);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::education::DEFAULT_COURSE_DURATIONS;

    fn dur(l: EducationLevel) -> u32 {
        DEFAULT_COURSE_DURATIONS.iter().find(|(x, _)| *x == l).map_or(1, |d| d.1)
    }

    #[test]
    fn age_to_school_stage() {
        assert_eq!(school_stage(4, dur), (Primary, NoFormal, 8));
        assert_eq!(school_stage(10, dur), (Primary, NoFormal, 2));
        assert_eq!(school_stage(11, dur), (Primary, NoFormal, 1));
        assert_eq!(school_stage(12, dur), (LowerSecondary, Primary, 3));
        assert_eq!(school_stage(14, dur), (LowerSecondary, Primary, 1));
        assert_eq!(school_stage(15, dur), (UpperSecondary, LowerSecondary, 2));
        assert_eq!(school_stage(17, dur), (UpperSecondary, LowerSecondary, 1));
    }
}
