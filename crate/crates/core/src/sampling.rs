//! Sampling primitives shared by the event modules.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::population::PersonId;

/// Splits `total` into integer parts proportional to `weights` (Hamilton /
/// largest-remainder). Parts sum to `total` exactly unless every weight is
/// zero, in which case all parts are zero. Ties go to the lower index.
pub fn largest_remainder(total: u64, weights: &[f64]) -> Vec<u64> {
    let sum: f64 = weights.iter().filter(|w| **w > 0.0).sum();
    if sum <= 0.0 || total == 0 {
        return vec![0; weights.len()];
    }
    let quotas: Vec<f64> = weights
        .iter()
        .map(|&w| if w > 0.0 { total as f64 * w / sum } else { 0.0 })
        .collect();
    let mut parts: Vec<u64> = quotas.iter().map(|q| q.floor() as u64).collect();
    let assigned: u64 = parts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut left = total.saturating_sub(assigned);
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        parts[i] += 1;
        left -= 1;
    }
    parts
}

/// Index drawn with probability proportional to `weights`; `None` when no
/// weight is positive.
pub fn weighted_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().filter(|w| **w > 0.0).sum();
    if total <= 0.0 {
        return None;
    }
    let mut u = rng.random::<f64>() * total;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            if u < w {
                return Some(i);
            }
            u -= w;
            last = Some(i);
        }
    }
    last
}

/// Precomputed cumulative table for repeated draws from a fixed distribution.
#[derive(Debug, Clone)]
pub struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    pub fn new(weights: &[f64]) -> Option<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .iter()
            .map(|&w| {
                acc += w.max(0.0);
                acc
            })
            .collect();
        (acc > 0.0).then_some(Categorical { cumulative })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        // Skip zero-width cells that share the boundary.
        i.min(self.cumulative.len() - 1)
    }
}

pub fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// People grouped into cells (typically sex × age group) for
/// cell-first sampling without replacement.
#[derive(Debug, Clone, Default)]
pub struct CellPool {
    cells: Vec<Vec<PersonId>>,
}

impl CellPool {
    pub fn new(cells: usize) -> Self {
        CellPool {
            cells: vec![Vec::new(); cells],
        }
    }

    pub fn push(&mut self, cell: usize, id: PersonId) {
        self.cells[cell].push(id);
    }

    pub fn cell_len(&self, cell: usize) -> usize {
        self.cells[cell].len()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(Vec::is_empty)
    }

    pub fn cell(&self, cell: usize) -> &[PersonId] {
        &self.cells[cell]
    }

    /// Removes a uniformly chosen member of `cell`.
    pub fn take_from<R: Rng + ?Sized>(&mut self, cell: usize, rng: &mut R) -> Option<PersonId> {
        let v = &mut self.cells[cell];
        if v.is_empty() {
            return None;
        }
        let i = rng.random_range(0..v.len());
        Some(v.swap_remove(i))
    }

    /// Picks a non-empty cell with probability proportional to its weight,
    /// then removes a uniform member of it.
    pub fn take_weighted<R: Rng + ?Sized>(&mut self, weights: &[f64], rng: &mut R) -> Option<(usize, PersonId)> {
        let masked: Vec<f64> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| if self.cells[i].is_empty() { 0.0 } else { w })
            .collect();
        let cell = weighted_index(&masked, rng)?;
        self.take_from(cell, rng).map(|id| (cell, id))
    }

    pub fn remove(&mut self, cell: usize, id: PersonId) -> bool {
        let v = &mut self.cells[cell];
        match v.iter().position(|&x| x == id) {
            Some(i) => {
                v.swap_remove(i);
                true
            }
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{group_stream, StreamTag};
    use proptest::prelude::*;

    #[test]
    fn largest_remainder_known_cases() {
        assert_eq!(largest_remainder(10, &[1.0, 1.0, 1.0]), vec![4, 3, 3]);
        assert_eq!(largest_remainder(7, &[0.5, 0.3, 0.2]), vec![4, 2, 1]);
        assert_eq!(largest_remainder(5, &[0.0, 0.0]), vec![0, 0]);
        assert_eq!(largest_remainder(3, &[0.0, 2.0]), vec![0, 3]);
    }

    proptest! {
        #[test]
        fn largest_remainder_is_exact_and_within_one(total in 0u64..100_000,
                                                    w in proptest::collection::vec(0.0f64..10.0, 1..20)) {
            let parts = largest_remainder(total, &w);
            let s: f64 = w.iter().sum();
            if s > 0.0 {
                prop_assert_eq!(parts.iter().sum::<u64>(), total);
                for (p, wi) in parts.iter().zip(&w) {
                    let q = total as f64 * wi / s;
                    prop_assert!((*p as f64 - q).abs() < 1.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn weighted_index_skips_zero_weights() {
        let mut rng = group_stream(1, 0, 2022, StreamTag::Marriage);
        for _ in 0..1000 {
            let i = weighted_index(&[0.0, 1.0, 0.0, 3.0], &mut rng).unwrap();
            assert!(i == 1 || i == 3);
        }
        assert!(weighted_index(&[0.0, 0.0], &mut rng).is_none());
    }

    #[test]
    fn categorical_never_returns_zero_weight_cells() {
        let c = Categorical::new(&[0.0, 0.5, 0.0, 0.5, 0.0]).unwrap();
        let mut rng = group_stream(1, 1, 2022, StreamTag::Marriage);
        for _ in 0..10_000 {
            let i = c.sample(&mut rng);
            assert!(i == 1 || i == 3, "{i}");
        }
    }

    #[test]
    fn cell_pool_samples_without_replacement() {
        let mut pool = CellPool::new(2);
        for i in 0..5 {
            pool.push(0, PersonId(i));
        }
        pool.push(1, PersonId(99));
        let mut rng = group_stream(1, 2, 2022, StreamTag::Marriage);
        let mut seen = std::collections::BTreeSet::new();
        while let Some((_, id)) = pool.take_weighted(&[1.0, 0.0], &mut rng) {
            assert!(seen.insert(id));
        }
        assert_eq!(seen.len(), 5);
        assert_eq!(pool.len(), 1);
    }
}
