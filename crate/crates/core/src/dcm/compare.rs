use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::CohortLedger;
use crate::error::{Error, Result};
use crate::rates::IntlScenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub year: i32,
    /// `population`, `ydr` or `odr`.
    pub metric: String,
    pub micro: f64,
    pub dcm: f64,
    /// `(micro − dcm) / dcm`.
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub scenario: IntlScenario,
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn horizon_year(&self) -> Option<i32> {
        self.rows.last().map(|r| r.year)
    }

    pub fn get(&self, year: i32, metric: &str) -> Option<&ValidationRow> {
        self.rows.iter().find(|r| r.year == year && r.metric == metric)
    }
}

/// Lines up two per-year ledger series of the same scenario and reports
/// population size and dependency ratios from both.
pub fn compare(
    scenario_micro: IntlScenario,
    micro: &[CohortLedger],
    scenario_dcm: IntlScenario,
    dcm: &[CohortLedger],
) -> Result<ValidationReport> {
    if scenario_micro != scenario_dcm {
        return Err(Error::Comparison(format!(
            "micro run is {scenario_micro:?} but the projection is {scenario_dcm:?}"
        )));
    }
    let mut rows = Vec::new();
    for m in micro {
        let Some(d) = dcm.iter().find(|d| d.year == m.year) else {
            return Err(Error::Comparison(format!("projection has no year {}", m.year)));
        };
        let (my, mo) = m.dependency_ratios()?;
        let (dy, dd) = d.dependency_ratios()?;
        for (metric, a, b) in [("population", m.total(), d.total()), ("ydr", my, dy), ("odr", mo, dd)] {
            rows.push(ValidationRow {
                year: m.year,
                metric: metric.to_string(),
                micro: a,
                dcm: b,
                rel_diff: if b == 0.0 { f64::NAN } else { (a - b) / b },
            });
        }
    }
    Ok(ValidationReport {
        scenario: scenario_micro,
        rows,
    })
}

/// Horizon-year comparison as a plain-text table.
pub fn comparison_table(report: &ValidationReport) -> String {
    let mut s = String::new();
    let Some(year) = report.horizon_year() else {
        return s;
    };
    let row = |m: &str| report.get(year, m).expect("all metrics present per year");
    let (p, y, o) = (row("population"), row("ydr"), row("odr"));
    let _ = writeln!(s, "{:<9}{:<8}{:>14}{:>10}{:>10}", "Scenario", "Method", "Population", "YDR", "ODR");
    let _ = writeln!(s, "{:<9}{:<8}{:>14.0}{:>10.2}{:>10.2}", format!("{:?}", report.scenario), "DCM", p.dcm, y.dcm, o.dcm);
    let _ = writeln!(s, "{:<9}{:<8}{:>14.0}{:>10.2}{:>10.2}", "", "Micro", p.micro, y.micro, o.micro);
    let pct = |r: &ValidationRow| format!("{:+.1}%", 100.0 * r.rel_diff);
    let _ = writeln!(s, "{:<9}{:<8}{:>14}{:>10}{:>10}", "", "Diff", pct(p), pct(y), pct(o));
    let _ = writeln!(s, "Horizon year {year}");
    s
}
