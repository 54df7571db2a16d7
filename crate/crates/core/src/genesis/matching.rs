//! Partner choice among the least dissimilar candidates.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::codes::EducationLevel;
use crate::population::{Individual, PersonId};
use crate::sampling::weighted_index;

/// Parameters of the partner draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchParams {
    /// Years of age gap equivalent to one education level.
    pub lambda: f64,
    /// Dirichlet concentration numerator; rank `i` gets `c / i`.
    pub concentration: f64,
    pub pool_size: usize,
}

impl Default for MatchParams {
    fn default() -> Self {
        MatchParams {
            lambda: 2.0,
            concentration: 1.0,
            pool_size: 20,
        }
    }
}

/// What matching needs to know about a person.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Profile {
    pub id: PersonId,
    pub age: u8,
    pub education: EducationLevel,
}

impl From<&Individual> for Profile {
    fn from(p: &Individual) -> Self {
        Profile {
            id: p.id,
            age: p.age,
            education: p.education_attained,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchCandidate {
    pub person_id: PersonId,
    pub dissimilarity: f64,
}

pub fn dissimilarity(a: &Profile, b: &Profile, lambda: f64) -> f64 {
    let rank = |l: EducationLevel| l.rank().unwrap_or(0) as f64;
    (f64::from(a.age) - f64::from(b.age)).abs() + lambda * (rank(a.education) - rank(b.education)).abs()
}

/// The `k` least dissimilar candidates, ties broken by lower id.
pub fn shortlist(focal: &Profile, pool: &[Profile], params: &MatchParams) -> Vec<MatchCandidate> {
    let mut ranked: Vec<MatchCandidate> = pool
        .iter()
        .filter(|c| c.id != focal.id)
        .map(|c| MatchCandidate {
            person_id: c.id,
            dissimilarity: dissimilarity(focal, c, params.lambda),
        })
        .collect();
    let by_score =
        |a: &MatchCandidate, b: &MatchCandidate| a.dissimilarity.total_cmp(&b.dissimilarity).then(a.person_id.cmp(&b.person_id));
    let k = params.pool_size.min(ranked.len());
    if k < ranked.len() {
        ranked.select_nth_unstable_by(k, by_score);
        ranked.truncate(k);
    }
    ranked.sort_by(by_score);
    ranked
}

/// Picks a partner for `focal` from `pool`: the shortlist gets Dirichlet
/// weights with concentration `c / rank`, then one candidate is drawn from
/// those weights. `None` when the pool holds nobody but the focal person.
pub fn match_partner<R: Rng + ?Sized>(
    focal: &Profile,
    pool: &[Profile],
    params: &MatchParams,
    rng: &mut R,
) -> Option<PersonId> {
    let short = shortlist(focal, pool, params);
    match short.len() {
        0 => None,
        1 => Some(short[0].person_id),
        _ => {
            let weights: Vec<f64> = (1..=short.len())
                .map(|rank| {
                    let alpha = params.concentration / rank as f64;
                    Gamma::new(alpha, 1.0).expect("positive shape").sample(rng)
                })
                .collect();
            // Gamma draws with tiny shapes can underflow to zero together.
            let i = weighted_index(&weights, rng).unwrap_or(0);
            Some(short[i].person_id)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{group_stream, StreamTag};

    fn prof(id: u64, age: u8, education: EducationLevel) -> Profile {
        Profile {
            id: PersonId(id),
            age,
            education,
        }
    }

    #[test]
    fn single_candidate_always_chosen() {
        let focal = prof(1, 30, EducationLevel::Degree);
        let pool = [prof(2, 60, EducationLevel::Primary)];
        let mut rng = group_stream(1, 0, 0, StreamTag::Marriage);
        for _ in 0..50 {
            assert_eq!(match_partner(&focal, &pool, &MatchParams::default(), &mut rng), Some(PersonId(2)));
        }
    }

    #[test]
    fn empty_pool_is_no_match() {
        let focal = prof(1, 30, EducationLevel::Degree);
        let mut rng = group_stream(1, 0, 0, StreamTag::Marriage);
        assert_eq!(match_partner(&focal, &[focal], &MatchParams::default(), &mut rng), None);
    }

    #[test]
    fn identical_candidate_ranks_first() {
        let focal = prof(1, 30, EducationLevel::Degree);
        let pool = [
            prof(5, 31, EducationLevel::Degree),
            prof(9, 30, EducationLevel::Degree),
            prof(3, 30, EducationLevel::HigherCert),
        ];
        let s = shortlist(&focal, &pool, &MatchParams::default());
        assert_eq!(s[0].person_id, PersonId(9));
        assert_eq!(s[0].dissimilarity, 0.0);
        assert_eq!(s[1].person_id, PersonId(5));
        assert_eq!(s[2].dissimilarity, 2.0);
    }

    #[test]
    fn shortlist_caps_and_breaks_ties_by_id() {
        let focal = prof(0, 40, EducationLevel::UpperSecondary);
        let pool: Vec<Profile> = (1..=50).rev().map(|i| prof(i, 40, EducationLevel::UpperSecondary)).collect();
        let s = shortlist(&focal, &pool, &MatchParams::default());
        assert_eq!(s.len(), 20);
        assert!(s.iter().enumerate().all(|(i, c)| c.person_id == PersonId(i as u64 + 1)));
    }
}
