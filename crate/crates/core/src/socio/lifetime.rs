use rand::Rng;

use crate::codes::{EducationLevel, ADULT_AGE, EDUCATION_LEVELS};
use crate::population::Population;
use crate::rates::{BroadBand, EducationRates};
use crate::sampling::weighted_index;

/// Adult (18+) head counts per ranked education level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelShares(pub [f64; EDUCATION_LEVELS]);

impl LevelShares {
    pub fn from_population(pop: &Population) -> Self {
        let mut c = [0.0; EDUCATION_LEVELS];
        for p in pop.iter().filter(|p| p.age >= ADULT_AGE) {
            if let Some(r) = p.education_attained.rank() {
                c[r] += 1.0;
            }
        }
        LevelShares(c)
    }
}

/// Draws a newborn's lifetime education target. The broad band comes from the
/// row of the better-educated known parent (the marginal row without one);
/// the level within the band follows current adult shares, or is uniform
/// when nobody in the population holds a level of that band. The flag
/// reports the uniform fallback.
pub fn assign_lifetime_target<R: Rng + ?Sized>(
    parent_levels: &[EducationLevel],
    shares: &LevelShares,
    rates: &EducationRates,
    rng: &mut R,
) -> (EducationLevel, bool) {
    let parent_band = parent_levels
        .iter()
        .filter_map(|&l| rates.broad_band(l))
        .max();
    let row = match parent_band {
        Some(b) => rates.parent_to_broad[b.index()],
        None => rates.marginal_broad,
    };
    let band = BroadBand::ALL[weighted_index(&row, rng).unwrap_or(0)];
    let levels = rates.band_levels(band);
    let w: Vec<f64> = levels.iter().map(|l| shares.0[l.rank().expect("ranked")]).collect();
    match weighted_index(&w, rng) {
        Some(i) => (levels[i], false),
        None => (levels[rng.random_range(0..levels.len())], true),
    }
}
