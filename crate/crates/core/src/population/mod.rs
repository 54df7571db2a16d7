//! Individuals, the registry every event module mutates, and its invariants.

mod csv_io;
mod geography;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codes::{AgeBands, EconStatus, EducationLevel, MaritalStatus, Sex};

pub use csv_io::{
    is_initialised_header, read_population, read_population_from, write_population, write_population_to,
};
pub use geography::{CountyId, EdId, EdRecord, Geography, RegionId, WEIGHT_TOLERANCE};
pub use validate::{marital_step_allowed, validate, validate_transition, Rule, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PersonId(pub u64);

impl fmt::Display for PersonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spouse {
    Resident(PersonId),
    /// Married to someone living outside the simulated population.
    Outsider,
}

impl Spouse {
    pub fn resident(self) -> Option<PersonId> {
        match self {
            Spouse::Resident(id) => Some(id),
            Spouse::Outsider => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: PersonId,
    pub age: u8,
    pub sex: Sex,
    pub marital_status: MaritalStatus,
    pub education_attained: EducationLevel,
    pub econ_status: EconStatus,
    /// Only change through [`Population::move_to_ed`] once registered.
    pub ed_id: EdId,
    pub spouse: Option<Spouse>,
    pub mother_id: Option<PersonId>,
    /// Second parent: the mother's resident spouse at birth.
    pub father_id: Option<PersonId>,
    pub children: BTreeSet<PersonId>,
    pub lifetime_education_target: Option<EducationLevel>,
    pub prospective_education: Option<EducationLevel>,
    pub graduation_year: Option<i32>,
    pub immigrated_year: Option<i32>,
    pub recent_immigrant_child: bool,
}

impl Individual {
    pub fn new(id: PersonId, age: u8, sex: Sex, ed_id: EdId) -> Self {
        Individual {
            id,
            age,
            sex,
            marital_status: MaritalStatus::Single,
            education_attained: EducationLevel::NotApplicable,
            econ_status: EconStatus::NotApplicable,
            ed_id,
            spouse: None,
            mother_id: None,
            father_id: None,
            children: BTreeSet::new(),
            lifetime_education_target: None,
            prospective_education: None,
            graduation_year: None,
            immigrated_year: None,
            recent_immigrant_child: false,
        }
    }

    pub fn is_student(&self) -> bool {
        self.econ_status == EconStatus::Student
    }

    pub fn resident_spouse(&self) -> Option<PersonId> {
        self.spouse.and_then(Spouse::resident)
    }

    /// Index into [`AgeBands::FIVE_YEAR`].
    pub fn age_group(&self) -> usize {
        AgeBands::FIVE_YEAR
            .index(self.age)
            .expect("five-year bands cover every legal age")
    }

    /// Dense (sex, five-year age group) cell used by the age-sex tables.
    pub fn age_sex_cell(&self) -> usize {
        age_sex_cell(self.sex, self.age_group())
    }

    fn clear_student(&mut self) {
        self.prospective_education = None;
        self.graduation_year = None;
    }

    /// Leaves education for `status`, dropping the course pipeline.
    pub fn leave_education(&mut self, status: EconStatus) {
        debug_assert_ne!(status, EconStatus::Student);
        self.econ_status = status;
        self.clear_student();
    }

    pub fn enrol(&mut self, course: EducationLevel, graduation_year: i32) {
        self.econ_status = EconStatus::Student;
        self.prospective_education = Some(course);
        self.graduation_year = Some(graduation_year);
    }
}

/// Cells are laid out female groups first, then male.
pub fn age_sex_cell(sex: Sex, group: usize) -> usize {
    sex.index() * AgeBands::FIVE_YEAR.len() + group
}

pub const AGE_SEX_CELLS: usize = 36;

/// What happens to a surviving resident spouse when someone leaves the
/// population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpouseFate {
    /// Death: the survivor becomes WID with no spouse.
    Widowed,
    /// Emigration: the survivor stays MAR with an outsider spouse.
    LeftBehind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Population {
    individuals: BTreeMap<PersonId, Individual>,
    ed_index: BTreeMap<EdId, BTreeSet<PersonId>>,
    next_id: u64,
}

impl Population {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn next_id(&self) -> PersonId {
        PersonId(self.next_id)
    }

    pub fn get(&self, id: PersonId) -> Option<&Individual> {
        self.individuals.get(&id)
    }

    /// Mutable access. Callers must not change `id` or `ed_id` through it.
    pub fn get_mut(&mut self, id: PersonId) -> Option<&mut Individual> {
        self.individuals.get_mut(&id)
    }

    pub fn contains(&self, id: PersonId) -> bool {
        self.individuals.contains_key(&id)
    }

    /// Individuals in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &Individual> + '_ {
        self.individuals.values()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Individual> + '_ {
        self.individuals.values_mut()
    }

    pub fn ids(&self) -> impl Iterator<Item = PersonId> + '_ {
        self.individuals.keys().copied()
    }

    pub fn residents(&self, ed: EdId) -> impl Iterator<Item = PersonId> + '_ {
        self.ed_index.get(&ed).into_iter().flatten().copied()
    }

    pub fn ed_count(&self, ed: EdId) -> usize {
        self.ed_index.get(&ed).map_or(0, BTreeSet::len)
    }

    pub(crate) fn ed_index(&self) -> &BTreeMap<EdId, BTreeSet<PersonId>> {
        &self.ed_index
    }

    /// Registers a person under a fresh id, overwriting `person.id`.
    pub fn add(&mut self, mut person: Individual) -> PersonId {
        let id = PersonId(self.next_id);
        self.next_id += 1;
        person.id = id;
        self.ed_index.entry(person.ed_id).or_default().insert(id);
        self.individuals.insert(id, person);
        id
    }

    /// Registers a person under their existing id (file loading). The id must
    /// be unused; the fresh-id counter moves past it.
    pub fn insert(&mut self, person: Individual) -> Result<(), PersonId> {
        let id = person.id;
        if self.individuals.contains_key(&id) {
            return Err(id);
        }
        self.next_id = self.next_id.max(id.0 + 1);
        self.ed_index.entry(person.ed_id).or_default().insert(id);
        self.individuals.insert(id, person);
        Ok(())
    }

    pub fn move_to_ed(&mut self, id: PersonId, ed: EdId) {
        let Some(p) = self.individuals.get_mut(&id) else { return };
        if p.ed_id == ed {
            return;
        }
        if let Some(set) = self.ed_index.get_mut(&p.ed_id) {
            set.remove(&id);
        }
        p.ed_id = ed;
        self.ed_index.entry(ed).or_default().insert(id);
    }

    /// Symmetric marriage link; both become MAR.
    pub fn link_spouses(&mut self, a: PersonId, b: PersonId) {
        assert_ne!(a, b, "self-marriage");
        for (x, y) in [(a, b), (b, a)] {
            let p = self.individuals.get_mut(&x).expect("spouse must be resident");
            p.spouse = Some(Spouse::Resident(y));
            p.marital_status = MaritalStatus::Married;
        }
    }

    /// Records `child` under each parent present in the registry.
    pub fn register_child(&mut self, child: PersonId) {
        let Some(c) = self.individuals.get(&child) else { return };
        let parents = [c.mother_id, c.father_id];
        for parent in parents.into_iter().flatten() {
            if let Some(p) = self.individuals.get_mut(&parent) {
                p.children.insert(child);
            }
        }
    }

    /// Removes a person and every reference to them.
    pub fn remove(&mut self, id: PersonId, fate: SpouseFate) -> Option<Individual> {
        let person = self.individuals.remove(&id)?;
        if let Some(set) = self.ed_index.get_mut(&person.ed_id) {
            set.remove(&id);
        }
        for child in &person.children {
            if let Some(c) = self.individuals.get_mut(child) {
                if c.mother_id == Some(id) {
                    c.mother_id = None;
                }
                if c.father_id == Some(id) {
                    c.father_id = None;
                }
            }
        }
        for parent in [person.mother_id, person.father_id].into_iter().flatten() {
            if let Some(p) = self.individuals.get_mut(&parent) {
                p.children.remove(&id);
            }
        }
        if let Some(spouse) = person.resident_spouse() {
            if let Some(s) = self.individuals.get_mut(&spouse) {
                match fate {
                    SpouseFate::Widowed => {
                        s.spouse = None;
                        s.marital_status = MaritalStatus::Widowed;
                    }
                    SpouseFate::LeftBehind => {
                        s.spouse = Some(Spouse::Outsider);
                        s.marital_status = MaritalStatus::Married;
                    }
                }
            }
        }
        Some(person)
    }

    /// Counts by `[sex][age]`.
    pub fn age_sex_counts(&self) -> [[f64; crate::codes::AGE_COUNT]; 2] {
        let mut out = [[0.0; crate::codes::AGE_COUNT]; 2];
        for p in self.iter() {
            out[p.sex.index()][p.age as usize] += 1.0;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn person(age: u8, sex: Sex, ed: u32) -> Individual {
        Individual::new(PersonId(0), age, sex, EdId(ed))
    }

    #[test]
    fn fresh_ids_are_never_reused() {
        let mut pop = Population::new();
        let a = pop.add(person(30, Sex::Female, 1));
        let b = pop.add(person(31, Sex::Male, 1));
        pop.remove(a, SpouseFate::Widowed);
        let c = pop.add(person(1, Sex::Male, 1));
        assert!(a < b && b < c);
        assert_eq!(pop.len(), 2);
    }

    #[test]
    fn removal_cleans_every_reference() {
        let mut pop = Population::new();
        let mum = pop.add(person(30, Sex::Female, 1));
        let dad = pop.add(person(32, Sex::Male, 1));
        pop.link_spouses(mum, dad);
        let mut kid = person(2, Sex::Male, 1);
        kid.mother_id = Some(mum);
        kid.father_id = Some(dad);
        let kid = pop.add(kid);
        pop.register_child(kid);

        pop.remove(dad, SpouseFate::Widowed);
        let m = pop.get(mum).unwrap();
        assert_eq!(m.marital_status, MaritalStatus::Widowed);
        assert_eq!(m.spouse, None);
        assert_eq!(pop.get(kid).unwrap().father_id, None);
        assert_eq!(pop.get(kid).unwrap().mother_id, Some(mum));

        pop.remove(kid, SpouseFate::Widowed);
        assert!(pop.get(mum).unwrap().children.is_empty());
        assert_eq!(pop.ed_count(EdId(1)), 1);
    }

    #[test]
    fn emigration_leaves_an_outsider_spouse() {
        let mut pop = Population::new();
        let a = pop.add(person(40, Sex::Female, 1));
        let b = pop.add(person(41, Sex::Male, 2));
        pop.link_spouses(a, b);
        pop.remove(b, SpouseFate::LeftBehind);
        let a = pop.get(a).unwrap();
        assert_eq!(a.spouse, Some(Spouse::Outsider));
        assert_eq!(a.marital_status, MaritalStatus::Married);
    }

    #[test]
    fn moving_updates_the_index() {
        let mut pop = Population::new();
        let a = pop.add(person(40, Sex::Female, 1));
        pop.move_to_ed(a, EdId(7));
        assert_eq!(pop.ed_count(EdId(1)), 0);
        assert_eq!(pop.residents(EdId(7)).collect::<Vec<_>>(), vec![a]);
    }
}
