use std::fs;
use std::path::Path;

use microsim_core::genesis::{gen_synthetic_base, initialise};
use microsim_core::population::{read_population, write_population};
use microsim_core::rates::{gen_synthetic_geography, gen_synthetic_rates, load_geography, load_rates, write_geography, write_rates};
use microsim_core::Error;

fn written(dir: &Path) -> microsim_core::RateTables {
    let geo = gen_synthetic_geography(4, 30, 10_000);
    let rates = gen_synthetic_rates(4, &geo);
    write_rates(dir, &rates).unwrap();
    write_geography(dir, &geo).unwrap();
    rates
}

fn edit_line(path: &Path, line: usize, f: impl Fn(&str) -> String) {
    let text = fs::read_to_string(path).unwrap();
    let out: Vec<String> = text
        .lines()
        .enumerate()
        .map(|(i, l)| if i + 1 == line { f(l) } else { l.to_string() })
        .collect();
    fs::write(path, out.join("\n") + "\n").unwrap();
}

#[test]
fn rates_and_geography_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rates = written(dir.path());
    assert_eq!(load_rates(dir.path()).unwrap(), rates);
    let geo = load_geography(dir.path()).unwrap();
    assert_eq!(geo, gen_synthetic_geography(4, 30, 10_000));
}

#[test]
fn population_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let geo = gen_synthetic_geography(9, 10, 3_000);
    let rates = gen_synthetic_rates(9, &geo);
    let mut pop = gen_synthetic_base(9, &geo, 3_000);
    let base = dir.path().join("base.csv");
    write_population(&pop, &base).unwrap();
    assert_eq!(read_population(&base).unwrap(), pop);
    initialise(&mut pop, &geo, &rates, 9).unwrap();
    let init = dir.path().join("init.csv");
    write_population(&pop, &init).unwrap();
    assert_eq!(read_population(&init).unwrap(), pop);
}

#[test]
fn missing_required_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    written(dir.path());
    fs::remove_file(dir.path().join("mortality.csv")).unwrap();
    match load_rates(dir.path()) {
        Err(Error::MissingFile(p)) => assert!(p.ends_with("mortality.csv")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unused_flow_year_is_optional() {
    let dir = tempfile::tempdir().unwrap();
    written(dir.path());
    fs::remove_file(dir.path().join("internal_flows_2016.csv")).unwrap();
    let rates = load_rates(dir.path()).unwrap();
    assert!(rates.flows(2022).is_ok() && rates.flows(2016).is_err());
    fs::remove_file(dir.path().join("internal_flows_2022.csv")).unwrap();
    assert!(matches!(load_rates(dir.path()), Err(Error::MissingFile(_))));
}

#[test]
fn bad_value_reports_file_and_row() {
    let dir = tempfile::tempdir().unwrap();
    written(dir.path());
    edit_line(&dir.path().join("mortality.csv"), 4, |l| {
        let (head, _) = l.rsplit_once(',').unwrap();
        format!("{head},abc")
    });
    match load_rates(dir.path()) {
        Err(Error::Parse { file, row, .. }) => assert_eq!((file.as_str(), row), ("mortality.csv", 4)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unnormalised_econ_row_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    written(dir.path());
    edit_line(&dir.path().join("econ_transitions.csv"), 2, |l| {
        let (head, p) = l.rsplit_once(',').unwrap();
        format!("{head},{}", p.parse::<f64>().unwrap() + 0.02)
    });
    match load_rates(dir.path()) {
        Err(Error::Normalisation { file, sum, .. }) => {
            assert_eq!(file, "econ_transitions.csv");
            assert!((sum - 1.02).abs() < 1e-9);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unnormalised_profile_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    written(dir.path());
    edit_line(&dir.path().join("migration_age_sex.csv"), 2, |l| {
        let (head, _) = l.rsplit_once(',').unwrap();
        format!("{head},0.9")
    });
    assert!(matches!(load_rates(dir.path()), Err(Error::Normalisation { .. })));
}

#[test]
fn geography_weights_must_sum_to_one() {
    let dir = tempfile::tempdir().unwrap();
    written(dir.path());
    let path = dir.path().join("geography.csv");
    let text = fs::read_to_string(&path).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "intl_immigrant_weight").unwrap();
    edit_line(&path, 2, |l| {
        let mut f: Vec<String> = l.split(',').map(str::to_string).collect();
        f[col] = format!("{}", f[col].parse::<f64>().unwrap() + 0.5);
        f.join(",")
    });
    assert!(load_geography(dir.path()).is_err());
}
