//! Closed code sets for individual characteristics and the age brackets
//! that rate tables are keyed by.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_AGE: u8 = 105;
pub const AGE_COUNT: usize = MAX_AGE as usize + 1;
/// Age at which children enter primary school.
pub const SCHOOL_ENTRY_AGE: u8 = 4;
/// Employment transitions apply to individuals strictly older than this.
pub const LABOUR_MARKET_AGE: u8 = 15;
pub const ADULT_AGE: u8 = 18;

macro_rules! code_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident = $code:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $code)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn code(self) -> &'static str {
                match self {
                    $($name::$variant => $code),+
                }
            }

            pub fn index(self) -> usize {
                self as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.code())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($code => Ok($name::$variant),)+
                    other => Err(Error::Domain(format!(
                        concat!("unknown ", stringify!($name), " code {:?}"),
                        other
                    ))),
                }
            }
        }
    };
}

code_enum!(Sex { Female = "F", Male = "M" });

impl Sex {
    pub fn other(self) -> Sex {
        match self {
            Sex::Female => Sex::Male,
            Sex::Male => Sex::Female,
        }
    }
}

code_enum!(
    /// Divorced and separated share the `SEP` code.
    MaritalStatus {
        Married = "MAR",
        Single = "SGL",
        Separated = "SEP",
        Widowed = "WID",
    }
);

code_enum!(
    /// Highest level of education attained. The nine real levels are totally
    /// ordered by [`EducationLevel::ordinal`]; `NA` is only for young children
    /// and has no rank. No `Ord` impl on purpose: compare ranks, not variants.
    EducationLevel {
        NoFormal = "NF",
        Primary = "P",
        LowerSecondary = "LS",
        UpperSecondary = "US",
        PostLeavingCert = "PLC",
        HigherCert = "HC",
        Degree = "DEG",
        Postgraduate = "PD",
        Doctorate = "D",
        NotApplicable = "NA",
    }
);

pub const EDUCATION_LEVELS: usize = 9;

impl EducationLevel {
    /// The nine ranked levels, lowest first.
    pub const RANKED: [EducationLevel; EDUCATION_LEVELS] = [
        EducationLevel::NoFormal,
        EducationLevel::Primary,
        EducationLevel::LowerSecondary,
        EducationLevel::UpperSecondary,
        EducationLevel::PostLeavingCert,
        EducationLevel::HigherCert,
        EducationLevel::Degree,
        EducationLevel::Postgraduate,
        EducationLevel::Doctorate,
    ];

    pub fn ordinal(self) -> Result<u8> {
        match self {
            EducationLevel::NotApplicable => {
                Err(Error::Domain("education level NA has no ordinal rank".into()))
            }
            other => Ok(other as u8),
        }
    }

    /// Rank for levels known not to be `NA`.
    pub fn rank(self) -> Option<usize> {
        (!self.is_na()).then_some(self as usize)
    }

    pub fn from_rank(rank: usize) -> Option<EducationLevel> {
        Self::RANKED.get(rank).copied()
    }

    pub fn is_na(self) -> bool {
        self == EducationLevel::NotApplicable
    }

    /// Strict ordinal comparison; `NA` is below every ranked level.
    pub fn is_above(self, other: EducationLevel) -> bool {
        match (self.rank(), other.rank()) {
            (Some(a), Some(b)) => a > b,
            (Some(_), None) => true,
            _ => false,
        }
    }

    /// School stages students move through automatically.
    pub fn is_school_stage(self) -> bool {
        matches!(
            self,
            EducationLevel::Primary | EducationLevel::LowerSecondary | EducationLevel::UpperSecondary
        )
    }

    pub fn is_secondary(self) -> bool {
        matches!(self, EducationLevel::LowerSecondary | EducationLevel::UpperSecondary)
    }

    pub fn is_third_level(self) -> bool {
        matches!(
            self,
            EducationLevel::HigherCert
                | EducationLevel::Degree
                | EducationLevel::Postgraduate
                | EducationLevel::Doctorate
        )
    }
}

/// Free function form of [`EducationLevel::ordinal`].
pub fn education_ordinal(level: EducationLevel) -> Result<u8> {
    level.ordinal()
}

code_enum!(EconStatus {
    Working = "W",
    Student = "S",
    HomeFamily = "LAHF",
    Retired = "R",
    Disabled = "UTWSD",
    Other = "OTH",
    Unemployed = "UNE",
    NotApplicable = "NA",
});

impl EconStatus {
    /// Statuses the employment module may draw (everything but S and NA).
    pub const LABOUR: [EconStatus; 6] = [
        EconStatus::Working,
        EconStatus::HomeFamily,
        EconStatus::Retired,
        EconStatus::Disabled,
        EconStatus::Other,
        EconStatus::Unemployed,
    ];
}

/// A partition of ages into contiguous brackets, optionally with an open top
/// bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgeBands {
    lows: &'static [u8],
    /// Inclusive upper age of the last bracket.
    last_high: u8,
    open_top: bool,
}

impl AgeBands {
    /// `0-4`, `5-9`, …, `80-84`, `85+`.
    pub const FIVE_YEAR: AgeBands = AgeBands {
        lows: &[0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70, 75, 80, 85],
        last_high: MAX_AGE,
        open_top: true,
    };

    /// Child-bearing ages `15-19` … `45-49`.
    pub const FERTILITY: AgeBands = AgeBands {
        lows: &[15, 20, 25, 30, 35, 40, 45],
        last_high: 49,
        open_top: false,
    };

    /// `15-19` … `85-89`, `90+`.
    pub const ECON: AgeBands = AgeBands {
        lows: &[15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70, 75, 80, 85, 90],
        last_high: MAX_AGE,
        open_top: true,
    };

    /// `18-24`, `25-29` … `65-69`.
    pub const LEARNER: AgeBands = AgeBands {
        lows: &[18, 25, 30, 35, 40, 45, 50, 55, 60, 65],
        last_high: 69,
        open_top: false,
    };

    pub fn len(&self) -> usize {
        self.lows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lows.is_empty()
    }

    pub fn index(&self, age: u8) -> Option<usize> {
        if age < self.lows[0] || age > self.last_high {
            return None;
        }
        Some(self.lows.partition_point(|&lo| lo <= age) - 1)
    }

    pub fn range(&self, i: usize) -> std::ops::RangeInclusive<u8> {
        let lo = self.lows[i];
        let hi = self.lows.get(i + 1).map(|&n| n - 1).unwrap_or(self.last_high);
        lo..=hi
    }

    pub fn label(&self, i: usize) -> String {
        let r = self.range(i);
        if self.open_top && i + 1 == self.lows.len() {
            format!("{}+", r.start())
        } else {
            format!("{}-{}", r.start(), r.end())
        }
    }

    pub fn parse(&self, label: &str) -> Option<usize> {
        let label = label.trim();
        (0..self.len()).find(|&i| self.label(i) == label)
    }
}
