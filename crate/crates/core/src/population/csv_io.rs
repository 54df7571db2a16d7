//! Population CSV files.
//!
//! Base files carry `id,ed_id,age,sex,marital_status,education_attained,
//! econ_status,spouse_id,mother_id,father_id`. Simulation-ready files add
//! `prospective_education,graduation_year,lifetime_education_target,
//! immigrated_year,recent_immigrant_child`; readers accept either form.

use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::{EdId, Individual, PersonId, Population, Spouse};
use crate::codes::{EconStatus, EducationLevel, MaritalStatus, Sex, MAX_AGE};
use crate::error::{Error, Result};

const BASE_COLUMNS: [&str; 10] = [
    "id",
    "ed_id",
    "age",
    "sex",
    "marital_status",
    "education_attained",
    "econ_status",
    "spouse_id",
    "mother_id",
    "father_id",
];

const EXTRA_COLUMNS: [&str; 5] = [
    "prospective_education",
    "graduation_year",
    "lifetime_education_target",
    "immigrated_year",
    "recent_immigrant_child",
];

pub fn read_population(path: &Path) -> Result<Population> {
    let file = std::fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::io(path, e),
    })?;
    read_population_from(file, &path.display().to_string())
}

pub fn read_population_from<R: Read>(reader: R, name: &str) -> Result<Population> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(name, 1, e.to_string()))?
        .clone();
    let col = |c: &str| headers.iter().position(|h| h == c);
    let mut base = [0usize; 10];
    for (slot, name_) in base.iter_mut().zip(BASE_COLUMNS) {
        *slot = col(name_).ok_or_else(|| Error::parse(name, 1, format!("missing column {name_}")))?;
    }
    let extra: Vec<Option<usize>> = EXTRA_COLUMNS.iter().map(|c| col(c)).collect();

    let mut pop = Population::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::parse(name, row, e.to_string()))?;
        let field = |idx: usize| rec.get(idx).unwrap_or("");
        let err = |msg: String| Error::parse(name, row, msg);

        let id = PersonId(parse_num(field(base[0])).map_err(err)?);
        let ed = EdId(parse_num(field(base[1])).map_err(err)?);
        let age: u8 = parse_num(field(base[2])).map_err(err)?;
        if age > MAX_AGE {
            return Err(err(format!("age {age} above {MAX_AGE}")));
        }
        let sex = Sex::from_str(field(base[3])).map_err(|e| err(e.to_string()))?;
        let mut p = Individual::new(id, age, sex, ed);
        p.marital_status = MaritalStatus::from_str(field(base[4])).map_err(|e| err(e.to_string()))?;
        p.education_attained = parse_education(field(base[5])).map_err(err)?;
        p.econ_status = EconStatus::from_str(field(base[6])).map_err(|e| err(e.to_string()))?;
        p.spouse = match field(base[7]) {
            "" => None,
            "OUTSIDER" => Some(Spouse::Outsider),
            s => Some(Spouse::Resident(PersonId(parse_num(s).map_err(err)?))),
        };
        p.mother_id = opt_num(field(base[8])).map_err(err)?.map(PersonId);
        p.father_id = opt_num(field(base[9])).map_err(err)?.map(PersonId);

        let get = |k: usize| extra[k].map(|idx| field(idx)).unwrap_or("");
        p.prospective_education = match get(0) {
            "" => None,
            s => Some(EducationLevel::from_str(s).map_err(|e| err(e.to_string()))?),
        };
        p.graduation_year = opt_num(get(1)).map_err(err)?;
        p.lifetime_education_target = match get(2) {
            "" => None,
            s => Some(EducationLevel::from_str(s).map_err(|e| err(e.to_string()))?),
        };
        p.immigrated_year = opt_num(get(3)).map_err(err)?;
        p.recent_immigrant_child = match get(4) {
            "" | "0" | "false" => false,
            "1" | "true" => true,
            other => return Err(err(format!("bad boolean {other:?}"))),
        };
        pop.insert(p).map_err(|dup| err(format!("duplicate id {dup}")))?;
    }

    let ids: Vec<PersonId> = pop.ids().collect();
    for id in ids {
        pop.register_child(id);
    }
    Ok(pop)
}

/// Not-stated education codes are read as NA and imputed at initialisation.
fn parse_education(s: &str) -> std::result::Result<EducationLevel, String> {
    match s {
        "" | "NS" => Ok(EducationLevel::NotApplicable),
        other => EducationLevel::from_str(other).map_err(|e| e.to_string()),
    }
}

fn parse_num<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("bad number {s:?}"))
}

fn opt_num<T: FromStr>(s: &str) -> std::result::Result<Option<T>, String> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_num(s).map(Some)
    }
}

pub fn write_population(pop: &Population, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_population_to(pop, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the full (simulation-ready) column set in ascending id order.
pub fn write_population_to<W: Write>(pop: &Population, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BASE_COLUMNS.iter().chain(EXTRA_COLUMNS.iter()))?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for p in pop.iter() {
        let spouse = match p.spouse {
            None => String::new(),
            Some(Spouse::Outsider) => "OUTSIDER".to_string(),
            Some(Spouse::Resident(id)) => id.to_string(),
        };
        w.write_record([
            p.id.to_string(),
            p.ed_id.to_string(),
            p.age.to_string(),
            p.sex.to_string(),
            p.marital_status.to_string(),
            p.education_attained.to_string(),
            p.econ_status.to_string(),
            spouse,
            opt(p.mother_id.map(|x| x.to_string())),
            opt(p.father_id.map(|x| x.to_string())),
            opt(p.prospective_education.map(|x| x.to_string())),
            opt(p.graduation_year.map(|x| x.to_string())),
            opt(p.lifetime_education_target.map(|x| x.to_string())),
            opt(p.immigrated_year.map(|x| x.to_string())),
            u8::from(p.recent_immigrant_child).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// True when the file header carries the simulation-ready columns.
pub fn is_initialised_header(header: &str) -> bool {
    header.split(',').any(|c| c.trim() == "graduation_year")
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
id,ed_id,age,sex,marital_status,education_attained,econ_status,spouse_id,mother_id,father_id
1,10,40,F,MAR,DEG,W,2,,
2,10,42,M,MAR,US,W,1,,
3,10,8,F,SGL,NA,S,,1,2
4,11,70,M,MAR,NS,R,OUTSIDER,,
";

    #[test]
    fn reads_base_file_and_links_children() {
        let pop = read_population_from(BASE.as_bytes(), "base").unwrap();
        assert_eq!(pop.len(), 4);
        assert_eq!(pop.get(PersonId(1)).unwrap().children.len(), 1);
        assert_eq!(pop.get(PersonId(4)).unwrap().spouse, Some(Spouse::Outsider));
        assert!(pop.get(PersonId(4)).unwrap().education_attained.is_na());
        assert_eq!(pop.next_id(), PersonId(5));
    }

    #[test]
    fn round_trip_preserves_everything() {
        let mut pop = read_population_from(BASE.as_bytes(), "base").unwrap();
        let kid = pop.get_mut(PersonId(3)).unwrap();
        kid.prospective_education = Some(EducationLevel::Primary);
        kid.graduation_year = Some(2026);
        kid.recent_immigrant_child = true;
        let mut buf = Vec::new();
        write_population_to(&pop, &mut buf).unwrap();
        let back = read_population_from(buf.as_slice(), "rt").unwrap();
        // NS is normalised to NA on the first read, so the states match.
        assert_eq!(back, pop);
        assert!(is_initialised_header(std::str::from_utf8(&buf).unwrap().lines().next().unwrap()));
    }

    #[test]
    fn bad_rows_name_the_row() {
        let bad = "id,ed_id,age,sex,marital_status,education_attained,econ_status,spouse_id,mother_id,father_id\n1,1,200,F,SGL,NA,NA,,,\n";
        match read_population_from(bad.as_bytes(), "f") {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
    }
}
