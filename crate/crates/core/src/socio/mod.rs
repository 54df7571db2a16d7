//! Education, lifetime targets and labour-market status.

mod education;
mod employment;
mod lifetime;

pub use education::{apply_dropouts, apply_graduations, enrol_adult_learners, enrol_primary, EducationCounts};
pub use employment::apply_employment;
pub use lifetime::{assign_lifetime_target, LevelShares};

use crate::codes::EconStatus;

/// Status given to children who leave school before the labour-market age.
pub const NON_STUDENT_CHILD: EconStatus = EconStatus::NotApplicable;
