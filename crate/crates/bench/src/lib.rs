//! Fixtures shared by the benchmarks.

use microsim_core::engine::SimState;
use microsim_core::genesis::{gen_synthetic_base, initialise};
use microsim_core::rates::{gen_synthetic_geography, gen_synthetic_rates};

/// An initialised synthetic state of `size` people over `eds` EDs.
pub fn synthetic_state(seed: u64, size: usize, eds: usize) -> SimState {
    let geo = gen_synthetic_geography(seed, eds, size as u64);
    let rates = gen_synthetic_rates(seed, &geo);
    let mut pop = gen_synthetic_base(seed, &geo, size);
    initialise(&mut pop, &geo, &rates, seed).expect("synthetic inputs initialise");
    let mut scenario = rates.scenario.clone();
    scenario.master_seed = seed;
    SimState::new(pop, geo, rates, scenario).expect("synthetic inputs are consistent")
}
