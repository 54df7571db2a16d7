//! Counter-based random streams.
//!
//! Every draw in a run comes from a ChaCha8 stream whose 256-bit key is the
//! tuple `(master_seed, entity, year, module)`. ChaCha is a counter-mode
//! cipher, so a stream is a pure function of its key: the same key always
//! yields the same sequence and no generator state has to be carried between
//! years, threads or checkpoints. Entities are person ids for per-person
//! draws, or [`group`] keys for draws shared by a bracket, flow or region.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::population::PersonId;

pub type Stream = ChaCha8Rng;

/// Module that consumes a stream. Values are part of the key and must stay
/// stable across releases or recorded runs stop reproducing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u32)]
pub enum StreamTag {
    Mortality = 1,
    InternalMigration = 2,
    Emigration = 3,
    Immigration = 4,
    Fertility = 5,
    Separation = 6,
    Marriage = 7,
    LifetimeTarget = 8,
    Dropout = 9,
    DropoutOutcome = 10,
    Graduation = 11,
    AdultLearners = 12,
    Employment = 13,
    InitMarriageEd = 14,
    InitMarriageRegion = 15,
    InitEducation = 16,
    SyntheticBase = 17,
    SyntheticRates = 18,
    SyntheticGeography = 19,
    Newborn = 20,
}

const GROUP_BIT: u64 = 1 << 63;

/// Entity key for draws not owned by a single person.
pub fn group(index: u64) -> u64 {
    GROUP_BIT | index
}

/// Stream for one entity's draws in one module and year.
pub fn keyed_stream(master_seed: u64, entity: u64, year: i32, tag: StreamTag) -> Stream {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&entity.to_le_bytes());
    key[16..24].copy_from_slice(&i64::from(year).to_le_bytes());
    key[24..32].copy_from_slice(&u64::from(tag as u32).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

pub fn rng_stream(master_seed: u64, person: PersonId, year: i32, tag: StreamTag) -> Stream {
    debug_assert!(person.0 & GROUP_BIT == 0, "person ids must not collide with group keys");
    keyed_stream(master_seed, person.0, year, tag)
}

pub fn group_stream(master_seed: u64, index: u64, year: i32, tag: StreamTag) -> Stream {
    keyed_stream(master_seed, group(index), year, tag)
}
