//! Reading and writing a rates directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::econ::{EconRecord, EconTransitionTable};
use super::education::EducationRates;
use super::fertility::{FertilityRow, FertilityTable, MaritalBand};
use super::migration::{AgeSexDist, CountyFlow, InternalFlowTable, MigrationContext, MigrationProfiles, RegionShares};
use super::mortality::MortalityTable;
use super::nuptiality::NuptialityConfig;
use super::scenario::ScenarioConfig;
use super::RateTables;
use crate::codes::{AgeBands, EconStatus, EducationLevel, Sex, AGE_COUNT, MAX_AGE};
use crate::error::{Error, Result};
use crate::population::{age_sex_cell, CountyId, EdRecord, Geography, RegionId, AGE_SEX_CELLS};

pub const FLOW_YEARS: [i32; 2] = [2016, 2022];

fn open_csv(dir: &Path, name: &str) -> Result<csv::Reader<fs::File>> {
    let path = dir.join(name);
    match fs::File::open(&path) {
        Ok(f) => Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(f)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingFile(path)),
        Err(e) => Err(Error::io(path, e)),
    }
}

/// Rows keyed by header name; row numbers count the header as row 1.
fn read_rows(dir: &Path, name: &str, columns: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rdr = open_csv(dir, name)?;
    let headers = rdr.headers().map_err(|e| Error::parse(name, 1, e.to_string()))?.clone();
    let idx: Vec<usize> = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h == *c)
                .ok_or_else(|| Error::parse(name, 1, format!("missing column {c:?}")))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::parse(name, row, e.to_string()))?;
        out.push((row, idx.iter().map(|&j| rec.get(j).unwrap_or("").to_string()).collect()));
    }
    Ok(out)
}

fn field<T: FromStr>(file: &str, row: usize, col: &str, s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>()
        .map_err(|e| Error::parse(file, row, format!("bad {col} {s:?}: {e}")))
}

fn read_json<T: serde::de::DeserializeOwned>(dir: &Path, name: &str) -> Result<Option<T>> {
    let path = dir.join(name);
    match fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| Error::parse(name, e.line(), e.to_string())),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::io(path, e)),
    }
}

pub fn load_geography(dir: &Path) -> Result<Geography> {
    const FILE: &str = "geography.csv";
    let mut rdr = open_csv(dir, FILE)?;
    let mut eds = Vec::new();
    for (i, rec) in rdr.deserialize::<EdRecord>().enumerate() {
        eds.push(rec.map_err(|e| Error::parse(FILE, i + 2, e.to_string()))?);
    }
    let geo = Geography::new(eds)?;
    if let Some(p) = geo.problems().into_iter().next() {
        return Err(Error::Domain(format!("{FILE}: {p}")));
    }
    Ok(geo)
}

fn load_mortality(dir: &Path) -> Result<MortalityTable> {
    const FILE: &str = "mortality.csv";
    let mut q = [[f64::NAN; AGE_COUNT]; 2];
    for (row, v) in read_rows(dir, FILE, &["sex", "age", "q"])? {
        let sex: Sex = field(FILE, row, "sex", &v[0])?;
        let age: u8 = field(FILE, row, "age", &v[1])?;
        let p: f64 = field(FILE, row, "q", &v[2])?;
        if age > MAX_AGE {
            return Err(Error::parse(FILE, row, format!("age {age} above {MAX_AGE}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::parse(FILE, row, format!("q {p} outside [0,1]")));
        }
        q[sex.index()][age as usize] = p;
    }
    for sex in Sex::ALL {
        if let Some(age) = q[sex.index()].iter().position(|x| x.is_nan()) {
            return Err(Error::Domain(format!("{FILE}: no rate for sex {sex} age {age}")));
        }
    }
    MortalityTable::new(q)
}

fn load_fertility(dir: &Path) -> Result<FertilityTable> {
    const FILE: &str = "fertility.csv";
    let rows = read_rows(dir, FILE, &["region", "age_group", "marital_band", "rate"])?;
    let mut parsed = Vec::with_capacity(rows.len());
    for (row, v) in &rows {
        let group = AgeBands::FERTILITY
            .parse(&v[1])
            .ok_or_else(|| Error::parse(FILE, *row, format!("unknown age group {:?}", v[1])))?;
        parsed.push(FertilityRow {
            region: RegionId(field(FILE, *row, "region", &v[0])?),
            group,
            band: field::<MaritalBand>(FILE, *row, "marital_band", &v[2])?,
            rate: field(FILE, *row, "rate", &v[3])?,
        });
    }
    FertilityTable::from_rows(&parsed).map_err(|(i, msg)| match rows.get(i) {
        Some((row, _)) => Error::parse(FILE, *row, msg),
        None => Error::Domain(format!("{FILE}: {msg}")),
    })
}

fn load_flows(dir: &Path, year: i32) -> Result<InternalFlowTable> {
    let file = format!("internal_flows_{year}.csv");
    let mut flows = Vec::new();
    for (row, v) in read_rows(dir, &file, &["origin_county", "dest_county", "count"])? {
        flows.push(CountyFlow {
            origin: CountyId(field(&file, row, "origin_county", &v[0])?),
            dest: CountyId(field(&file, row, "dest_county", &v[1])?),
            count: field(&file, row, "count", &v[2])?,
        });
    }
    InternalFlowTable::new(year, flows).map_err(|e| Error::Domain(format!("{file}: {e}")))
}

fn load_profiles(dir: &Path) -> Result<MigrationProfiles> {
    const FILE: &str = "migration_age_sex.csv";
    let mut cells: BTreeMap<&'static str, [f64; AGE_SEX_CELLS]> = BTreeMap::new();
    for (row, v) in read_rows(dir, FILE, &["context", "sex", "age_group", "share"])? {
        let ctx: MigrationContext = field(FILE, row, "context", &v[0])?;
        let sex: Sex = field(FILE, row, "sex", &v[1])?;
        let group = AgeBands::FIVE_YEAR
            .parse(&v[2])
            .ok_or_else(|| Error::parse(FILE, row, format!("unknown age group {:?}", v[2])))?;
        let share: f64 = field(FILE, row, "share", &v[3])?;
        if !(share >= 0.0) {
            return Err(Error::parse(FILE, row, format!("negative share {share}")));
        }
        cells.entry(ctx.name()).or_insert([0.0; AGE_SEX_CELLS])[age_sex_cell(sex, group)] += share;
    }
    let get = |ctx: MigrationContext| -> Result<AgeSexDist> {
        let c = cells
            .get(ctx.name())
            .ok_or_else(|| Error::Domain(format!("{FILE}: no rows for context {ctx}")))?;
        let sum: f64 = c.iter().sum();
        if (sum - 1.0).abs() > super::PROBABILITY_TOLERANCE {
            return Err(Error::Normalisation {
                file: FILE.into(),
                key: ctx.to_string(),
                sum,
            });
        }
        AgeSexDist::new(*c)
    };
    Ok(MigrationProfiles {
        intra: get(MigrationContext::Intra)?,
        inter: get(MigrationContext::Inter)?,
        intl_out: get(MigrationContext::IntlOut)?,
        intl_in: get(MigrationContext::IntlIn)?,
    })
}

fn load_region_shares(dir: &Path) -> Result<Option<RegionShares>> {
    const FILE: &str = "region_emigrant_shares.csv";
    let rows = match read_rows(dir, FILE, &["region", "share"]) {
        Ok(r) => r,
        Err(Error::MissingFile(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut shares = BTreeMap::new();
    for (row, v) in rows {
        let share: f64 = field(FILE, row, "share", &v[1])?;
        if !(share >= 0.0) {
            return Err(Error::parse(FILE, row, format!("negative share {share}")));
        }
        shares.insert(RegionId(field(FILE, row, "region", &v[0])?), share);
    }
    RegionShares::new(shares).map(Some).map_err(|e| Error::Domain(format!("{FILE}: {e}")))
}

fn load_education(dir: &Path) -> Result<EducationRates> {
    const FILE: &str = "education_rates.json";
    read_json(dir, FILE)?.ok_or_else(|| Error::MissingFile(dir.join(FILE)))
}

fn load_econ(dir: &Path) -> Result<EconTransitionTable> {
    const FILE: &str = "econ_transitions.csv";
    let rows = read_rows(dir, FILE, &["age_band", "sex", "education", "status", "probability"])?;
    let mut recs = Vec::with_capacity(rows.len());
    for (row, v) in &rows {
        let age_band = AgeBands::ECON
            .parse(&v[0])
            .ok_or_else(|| Error::parse(FILE, *row, format!("unknown age band {:?}", v[0])))?;
        recs.push(EconRecord {
            age_band,
            sex: field(FILE, *row, "sex", &v[1])?,
            education: field::<EducationLevel>(FILE, *row, "education", &v[2])?,
            status: field::<EconStatus>(FILE, *row, "status", &v[3])?,
            probability: field(FILE, *row, "probability", &v[4])?,
        });
    }
    EconTransitionTable::from_records(&recs).map_err(|(i, e)| match e {
        Error::Normalisation { .. } => e,
        other => Error::parse(FILE, rows[i].0, other.to_string()),
    })
}

/// Loads and validates a rates directory. Optional files
/// (`region_emigrant_shares.csv`, `nuptiality.json`, `scenario.json`, and the
/// flow table for the census year not selected) fall back to defaults.
pub fn load_rates(dir: &Path) -> Result<RateTables> {
    let scenario: ScenarioConfig = read_json(dir, "scenario.json")?.unwrap_or_default();
    scenario.check()?;
    let nuptiality: NuptialityConfig = read_json(dir, "nuptiality.json")?.unwrap_or_default();
    nuptiality.check()?;
    let mut internal_flows = BTreeMap::new();
    for year in FLOW_YEARS {
        match load_flows(dir, year) {
            Ok(t) => {
                internal_flows.insert(year, t);
            }
            Err(Error::MissingFile(p)) if year == scenario.internal_flow_year => return Err(Error::MissingFile(p)),
            Err(Error::MissingFile(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(RateTables {
        mortality: load_mortality(dir)?,
        fertility: load_fertility(dir)?,
        internal_flows,
        profiles: load_profiles(dir)?,
        region_emigrant_shares: load_region_shares(dir)?,
        education: load_education(dir)?,
        econ: load_econ(dir)?,
        nuptiality,
        scenario,
    })
}

fn create(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>> {
    let path = dir.join(name);
    let f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok(csv::Writer::from_writer(f))
}

fn csv_err(name: &str) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Domain(format!("writing {name}: {e}"))
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Domain(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

pub fn write_geography(dir: &Path, geo: &Geography) -> Result<()> {
    const FILE: &str = "geography.csv";
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut w = create(dir, FILE)?;
    for ed in geo.eds() {
        w.serialize(ed).map_err(csv_err(FILE))?;
    }
    w.flush().map_err(|e| Error::io(dir.join(FILE), e))
}

/// Writes every table in the layout [`load_rates`] reads.
pub fn write_rates(dir: &Path, rates: &RateTables) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut w = create(dir, "mortality.csv")?;
    w.write_record(["sex", "age", "q"]).map_err(csv_err("mortality.csv"))?;
    for sex in Sex::ALL {
        for age in 0..=MAX_AGE {
            w.write_record([sex.code().to_string(), age.to_string(), rates.mortality.base(age, *sex).to_string()])
                .map_err(csv_err("mortality.csv"))?;
        }
    }
    w.flush().map_err(|e| Error::io(dir.join("mortality.csv"), e))?;

    let mut w = create(dir, "fertility.csv")?;
    w.write_record(["region", "age_group", "marital_band", "rate"])
        .map_err(csv_err("fertility.csv"))?;
    for r in rates.fertility.rows() {
        w.write_record([
            r.region.to_string(),
            AgeBands::FERTILITY.label(r.group),
            r.band.to_string(),
            r.rate.to_string(),
        ])
        .map_err(csv_err("fertility.csv"))?;
    }
    w.flush().map_err(|e| Error::io(dir.join("fertility.csv"), e))?;

    for (year, table) in &rates.internal_flows {
        let name = format!("internal_flows_{year}.csv");
        let mut w = create(dir, &name)?;
        w.write_record(["origin_county", "dest_county", "count"]).map_err(csv_err(&name))?;
        for f in table.flows() {
            w.write_record([f.origin.to_string(), f.dest.to_string(), f.count.to_string()])
                .map_err(csv_err(&name))?;
        }
        w.flush().map_err(|e| Error::io(dir.join(&name), e))?;
    }

    let mut w = create(dir, "migration_age_sex.csv")?;
    w.write_record(["context", "sex", "age_group", "share"])
        .map_err(csv_err("migration_age_sex.csv"))?;
    for ctx in MigrationContext::ALL {
        let d = rates.profiles.get(ctx);
        for sex in Sex::ALL {
            for g in 0..AgeBands::FIVE_YEAR.len() {
                w.write_record([
                    ctx.to_string(),
                    sex.code().to_string(),
                    AgeBands::FIVE_YEAR.label(g),
                    d.0[age_sex_cell(*sex, g)].to_string(),
                ])
                .map_err(csv_err("migration_age_sex.csv"))?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(dir.join("migration_age_sex.csv"), e))?;

    if let Some(shares) = &rates.region_emigrant_shares {
        let mut w = create(dir, "region_emigrant_shares.csv")?;
        w.write_record(["region", "share"]).map_err(csv_err("region_emigrant_shares.csv"))?;
        for (r, s) in &shares.0 {
            w.write_record([r.to_string(), s.to_string()])
                .map_err(csv_err("region_emigrant_shares.csv"))?;
        }
        w.flush().map_err(|e| Error::io(dir.join("region_emigrant_shares.csv"), e))?;
    }

    write_json(dir, "education_rates.json", &rates.education)?;

    let mut w = create(dir, "econ_transitions.csv")?;
    w.write_record(["age_band", "sex", "education", "status", "probability"])
        .map_err(csv_err("econ_transitions.csv"))?;
    for r in rates.econ.records() {
        w.write_record([
            AgeBands::ECON.label(r.age_band),
            r.sex.code().to_string(),
            r.education.code().to_string(),
            r.status.code().to_string(),
            r.probability.to_string(),
        ])
        .map_err(csv_err("econ_transitions.csv"))?;
    }
    w.flush().map_err(|e| Error::io(dir.join("econ_transitions.csv"), e))?;

    write_json(dir, "nuptiality.json", &rates.nuptiality)?;
    write_json(dir, "scenario.json", &rates.scenario)
}
