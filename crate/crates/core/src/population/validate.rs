use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Geography, PersonId, Population, Spouse};
use crate::codes::{EconStatus, MaritalStatus, LABOUR_MARKET_AGE, MAX_AGE, SCHOOL_ENTRY_AGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    AgeOutOfRange,
    SelfMarriage,
    DanglingSpouse,
    AsymmetricSpouse,
    SpouseWithoutMarriage,
    MarriedWithoutSpouse,
    DanglingParent,
    DanglingChild,
    KinshipMismatch,
    StudentState,
    ProspectiveNotAbove,
    IllegalEducationNa,
    IllegalEconNa,
    IndexMismatch,
    UnknownEd,
    Geography,
    EducationDecrease,
    MaritalTransition,
}

impl Rule {
    pub fn describe(self) -> &'static str {
        match self {
            Rule::AgeOutOfRange => "age out of range",
            Rule::SelfMarriage => "self marriage",
            Rule::DanglingSpouse => "dangling spouse",
            Rule::AsymmetricSpouse => "asymmetric spouse",
            Rule::SpouseWithoutMarriage => "spouse without MAR status",
            Rule::MarriedWithoutSpouse => "MAR without spouse",
            Rule::DanglingParent => "dangling parent",
            Rule::DanglingChild => "dangling child",
            Rule::KinshipMismatch => "kinship mismatch",
            Rule::StudentState => "student state mismatch",
            Rule::ProspectiveNotAbove => "prospective education not above attained",
            Rule::IllegalEducationNa => "education NA above school entry age",
            Rule::IllegalEconNa => "econ NA above labour-market age",
            Rule::IndexMismatch => "index mismatch",
            Rule::UnknownEd => "unknown ED",
            Rule::Geography => "geography",
            Rule::EducationDecrease => "education attained decreased",
            Rule::MaritalTransition => "illegal marital transition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub id: Option<PersonId>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.id {
            Some(id) => write!(f, "person {id}: {}: {}", self.rule.describe(), self.detail),
            None => write!(f, "{}: {}", self.rule.describe(), self.detail),
        }
    }
}

/// Marital statuses reachable within one simulated year. Separations run
/// before marriages and deaths before both, so a single year moves along at
/// most one edge of SGL→MAR, MAR→{SEP, WID}, SEP→MAR, WID→MAR, with
/// MAR→SEP→MAR and MAR→WID→MAR collapsing to MAR.
pub fn marital_step_allowed(from: MaritalStatus, to: MaritalStatus) -> bool {
    use MaritalStatus::*;
    from == to
        || matches!(
            (from, to),
            (Single, Married) | (Married, Separated) | (Married, Widowed) | (Separated, Married) | (Widowed, Married)
        )
}

/// Compares everyone present in both populations: attainment never falls
/// and marital status only follows the legal graph.
pub fn validate_transition(before: &Population, after: &Population) -> Vec<Violation> {
    let mut out = Vec::new();
    for b in before.iter() {
        let Some(a) = after.get(b.id) else { continue };
        if b.education_attained.rank() > a.education_attained.rank() {
            out.push(Violation {
                id: Some(b.id),
                rule: Rule::EducationDecrease,
                detail: format!("{} -> {}", b.education_attained, a.education_attained),
            });
        }
        if !marital_step_allowed(b.marital_status, a.marital_status) {
            out.push(Violation {
                id: Some(b.id),
                rule: Rule::MaritalTransition,
                detail: format!("{} -> {}", b.marital_status, a.marital_status),
            });
        }
    }
    out
}

/// Checks every per-person and index invariant of a simulation-ready
/// population. Empty result means the state is consistent.
pub fn validate(pop: &Population, geo: &Geography) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |id: Option<PersonId>, rule: Rule, detail: String| {
        out.push(Violation { id, rule, detail })
    };

    for problem in geo.problems() {
        push(None, Rule::Geography, problem);
    }

    for p in pop.iter() {
        let id = Some(p.id);
        if p.age > MAX_AGE {
            push(id, Rule::AgeOutOfRange, format!("age {}", p.age));
        }
        if !geo.contains(p.ed_id) {
            push(id, Rule::UnknownEd, format!("ED {}", p.ed_id));
        }

        match p.spouse {
            Some(Spouse::Resident(s)) => {
                if s == p.id {
                    push(id, Rule::SelfMarriage, String::new());
                } else {
                    match pop.get(s) {
                        None => push(id, Rule::DanglingSpouse, format!("spouse {s} not resident")),
                        Some(sp) if sp.spouse != Some(Spouse::Resident(p.id)) => {
                            push(id, Rule::AsymmetricSpouse, format!("spouse {s} points elsewhere"))
                        }
                        Some(_) => {}
                    }
                }
                if p.marital_status != MaritalStatus::Married {
                    push(id, Rule::SpouseWithoutMarriage, p.marital_status.to_string());
                }
            }
            Some(Spouse::Outsider) => {
                if p.marital_status != MaritalStatus::Married {
                    push(id, Rule::SpouseWithoutMarriage, p.marital_status.to_string());
                }
            }
            None => {
                if p.marital_status == MaritalStatus::Married {
                    push(id, Rule::MarriedWithoutSpouse, String::new());
                }
            }
        }

        for parent in [p.mother_id, p.father_id].into_iter().flatten() {
            match pop.get(parent) {
                None => push(id, Rule::DanglingParent, format!("parent {parent} not resident")),
                Some(par) if !par.children.contains(&p.id) => push(
                    id,
                    Rule::KinshipMismatch,
                    format!("parent {parent} does not list this child"),
                ),
                Some(_) => {}
            }
        }
        for &child in &p.children {
            match pop.get(child) {
                None => push(id, Rule::DanglingChild, format!("child {child} not resident")),
                Some(c) if c.mother_id != Some(p.id) && c.father_id != Some(p.id) => push(
                    id,
                    Rule::KinshipMismatch,
                    format!("child {child} does not list this parent"),
                ),
                Some(_) => {}
            }
        }

        let pipeline = p.prospective_education.is_some() && p.graduation_year.is_some();
        let partial = p.prospective_education.is_some() || p.graduation_year.is_some();
        if p.is_student() != pipeline || (!p.is_student() && partial) {
            push(
                id,
                Rule::StudentState,
                format!(
                    "status {} prospective {:?} graduation {:?}",
                    p.econ_status, p.prospective_education, p.graduation_year
                ),
            );
        }
        if let Some(course) = p.prospective_education {
            if !course.is_above(p.education_attained) {
                push(
                    id,
                    Rule::ProspectiveNotAbove,
                    format!("studying {course} with {} attained", p.education_attained),
                );
            }
        }
        if p.education_attained.is_na() && p.age > SCHOOL_ENTRY_AGE {
            push(id, Rule::IllegalEducationNa, format!("age {}", p.age));
        }
        if p.econ_status == EconStatus::NotApplicable && p.age > LABOUR_MARKET_AGE {
            push(id, Rule::IllegalEconNa, format!("age {}", p.age));
        }
        if !pop.ed_index().get(&p.ed_id).is_some_and(|s| s.contains(&p.id)) {
            push(id, Rule::IndexMismatch, format!("missing from ED {} index", p.ed_id));
        }
    }

    for (ed, ids) in pop.ed_index() {
        for &pid in ids {
            match pop.get(pid) {
                Some(p) if p.ed_id == *ed => {}
                Some(p) => push(
                    Some(pid),
                    Rule::IndexMismatch,
                    format!("indexed under ED {ed} but lives in {}", p.ed_id),
                ),
                None => push(Some(pid), Rule::IndexMismatch, format!("indexed under ED {ed} but not resident")),
            }
        }
    }
    out
}
