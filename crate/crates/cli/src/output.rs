//! CSV and JSON writers for command outputs.

use std::fs;
use std::path::Path;

use microsim_core::codes::EducationLevel;
use microsim_core::dcm::ValidationReport;
use microsim_core::engine::YearReport;
use microsim_core::metrics::{share_histogram, MetricsBundle};
use serde::Serialize;

use crate::commands::CliError;

pub fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))
}

/// Writer that leaves the header to the caller, so empty logs still get one.
pub fn csv_writer_headed(path: &Path, header: &[&str]) -> Result<csv::Writer<fs::File>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| CliError::csv(path, e))?;
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    Ok(w)
}

pub fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Json(path.into(), e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(path.into(), e))
}

fn na(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

#[derive(Serialize)]
struct SummaryRow {
    year: i32,
    population: u64,
    deaths: u64,
    births: u64,
    internal_moves: u64,
    intl_immigrants: u64,
    intl_emigrants: u64,
    marriages: u64,
    same_sex_marriages: u64,
    separations: u64,
    dropouts: u64,
    graduates: u64,
    primary_enrolments: u64,
    adult_enrolments: u64,
    accounting_ok: bool,
}

pub fn write_summary(path: &Path, reports: &[YearReport]) -> Result<(), CliError> {
    write_rows(
        path,
        reports.iter().map(|r| SummaryRow {
            year: r.year,
            population: r.population_after,
            deaths: r.counts.deaths,
            births: r.counts.births,
            internal_moves: r.counts.internal_moves,
            intl_immigrants: r.counts.intl_immigrants,
            intl_emigrants: r.counts.intl_emigrants,
            marriages: r.counts.marriages,
            same_sex_marriages: r.same_sex_marriages,
            separations: r.counts.separations,
            dropouts: r.education.dropouts,
            graduates: r.education.graduates,
            primary_enrolments: r.education.primary_enrolments,
            adult_enrolments: r.education.adult_enrolments,
            accounting_ok: r.accounting_ok,
        }),
    )
}

#[derive(Serialize)]
struct ValidationCsvRow<'a> {
    year: i32,
    metric: &'a str,
    micro: f64,
    dcm: f64,
    rel_diff: f64,
}

pub fn write_validation(path: &Path, report: &ValidationReport) -> Result<(), CliError> {
    write_rows(
        path,
        report.rows.iter().map(|r| ValidationCsvRow {
            year: r.year,
            metric: &r.metric,
            micro: r.micro,
            dcm: r.dcm,
            rel_diff: r.rel_diff,
        }),
    )
}

/// `ed_metrics.csv`, `education_shares.csv`, `immigrant_share_histogram.csv`
/// and `metrics_summary.csv`.
pub fn write_metrics(dir: &Path, m: &MetricsBundle, start_year: i32, end_year: i32) -> Result<(), CliError> {
    let path = dir.join("ed_metrics.csv");
    let mut w = csv_writer(&path)?;
    let err = |e| CliError::csv(&path, e);
    w.write_record([
        "ed_id",
        "relative_size",
        "recent_immigrant_share",
        "recent_immigrant_and_children_share",
        "adult_student_share_delta_points",
    ])
    .map_err(err)?;
    for (ed, rel) in &m.ed_relative_size {
        let imm = &m.recent_immigrants.per_ed[ed];
        w.write_record([
            ed.to_string(),
            na(*rel),
            imm.immigrant_share().to_string(),
            imm.share_with_children().to_string(),
            na(m.adult_student_share_delta[ed]),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    #[derive(Serialize)]
    struct Share {
        level: &'static str,
        share: f64,
    }
    write_rows(
        &dir.join("education_shares.csv"),
        EducationLevel::RANKED.iter().map(|&l| Share {
            level: l.code(),
            share: m.education_shares.get(l),
        }),
    )?;

    #[derive(Serialize)]
    struct Bin {
        bin_low: f64,
        bin_high: f64,
        eds: u64,
    }
    let shares = m.recent_immigrants.per_ed.values().map(|c| c.share_with_children());
    write_rows(
        &dir.join("immigrant_share_histogram.csv"),
        share_histogram(shares, 20).into_iter().enumerate().map(|(i, n)| Bin {
            bin_low: i as f64 / 20.0,
            bin_high: (i + 1) as f64 / 20.0,
            eds: n,
        }),
    )?;

    let path = dir.join("metrics_summary.csv");
    let mut w = csv_writer(&path)?;
    let err = |e| CliError::csv(&path, e);
    w.write_record(["metric", "value"]).map_err(err)?;
    let rows = [
        ("start_year", start_year.to_string()),
        ("end_year", end_year.to_string()),
        ("ydr", m.ydr.to_string()),
        ("odr", m.odr.to_string()),
        ("unemployment_rate_labour_force", na(m.unemployment.rate_lf)),
        ("unemployment_share_population", m.unemployment.share_pop.to_string()),
        ("recent_immigrant_share", m.recent_immigrants.national.immigrant_share().to_string()),
        (
            "recent_immigrant_and_children_share",
            m.recent_immigrants.national.share_with_children().to_string(),
        ),
        ("third_level_share", m.education_shares.third_level().to_string()),
    ];
    for (k, v) in rows {
        w.write_record([k, v.as_str()]).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))
}
