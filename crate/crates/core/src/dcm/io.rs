use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CohortLedger;
use crate::codes::{Sex, MAX_AGE};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct LedgerRow {
    year: i32,
    sex: Sex,
    age: u8,
    count: f64,
}

/// Writes `year,sex,age,count` rows, one per cohort per year.
pub fn write_ledgers(path: &Path, ledgers: &[CohortLedger]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
    for l in ledgers {
        for sex in Sex::ALL {
            for age in 0..=MAX_AGE {
                w.serialize(LedgerRow {
                    year: l.year,
                    sex: *sex,
                    age,
                    count: l.get(*sex, age),
                })
                .map_err(|e| Error::Domain(e.to_string()))?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_ledgers(path: &Path) -> Result<Vec<CohortLedger>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let name = path.display().to_string();
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::parse(&name, 1, e.to_string()))?;
    let mut out: Vec<CohortLedger> = Vec::new();
    for (i, row) in r.deserialize::<LedgerRow>().enumerate() {
        let row = row.map_err(|e| Error::parse(&name, i + 2, e.to_string()))?;
        if row.age > MAX_AGE || !(row.count >= 0.0) {
            return Err(Error::parse(&name, i + 2, "age or count out of range"));
        }
        if out.last().is_none_or(|l| l.year != row.year) {
            if out.iter().any(|l| l.year == row.year) {
                return Err(Error::parse(&name, i + 2, format!("year {} is not contiguous", row.year)));
            }
            out.push(CohortLedger::zero(row.year));
        }
        out.last_mut().expect("pushed").set(row.sex, row.age, row.count);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledgers_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.csv");
        let mut a = CohortLedger::zero(2022);
        a.set(Sex::Female, 3, 1.0 / 3.0);
        let mut b = CohortLedger::zero(2023);
        b.set(Sex::Male, 105, 12.5);
        write_ledgers(&path, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(read_ledgers(&path).unwrap(), vec![a, b]);
    }
}
