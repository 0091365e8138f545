//! Reproduction against externally obtained 2010-2017 play-by-play data.
//!
//! Ignored by default. Set `PARKFACTOR_REAL_DATA` to a directory holding
//! `pa.csv` (canonical rows for all eight seasons, regular season only) and,
//! for the runs correlation, `runs_2017.csv` (`park,runs_per_game`), then run
//! `cargo test --test real_data -- --ignored`. Results depend on the PA
//! filtering used when building `pa.csv`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use parkfactor::conventional_pf::conventional_pf_table;
use parkfactor::evaluation::{bases_walks_per_pa, pf_scatter_table, r_squared, ProbabilityModel};
use parkfactor::{baseline_rate, fit, read_canonical_csv, Dataset, EventClass, FitConfig};

const TABLE_TOL: f64 = 1e-4;
const FIG1_TOL: f64 = 0.002;
const FIG2_TOL: f64 = 0.01;
const CORRELATION_TOL: f64 = 0.05;

// Base log-loss by season; columns HR, 1B, 2B, 3B, BB.
const TABLE_1: [(i32, [f64; 5]); 8] = [
    (2017, [0.203984, 0.586163, 0.249777, 0.038876, 0.413728]),
    (2016, [0.191258, 0.594936, 0.245783, 0.042073, 0.399136]),
    (2015, [0.173873, 0.603291, 0.244936, 0.044745, 0.381862]),
    (2014, [0.152705, 0.608606, 0.242645, 0.041048, 0.380149]),
    (2013, [0.165164, 0.606779, 0.244254, 0.038115, 0.390933]),
    (2012, [0.172848, 0.600476, 0.245680, 0.044300, 0.392314]),
    (2011, [0.162549, 0.604597, 0.247374, 0.042836, 0.397113]),
    (2010, [0.163588, 0.606679, 0.248201, 0.041593, 0.410027]),
];

fn data_dir() -> PathBuf {
    PathBuf::from(std::env::var("PARKFACTOR_REAL_DATA").expect("set PARKFACTOR_REAL_DATA to the data directory"))
}

fn load() -> Dataset {
    let path = data_dir().join("pa.csv");
    let file = std::fs::File::open(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    read_canonical_csv(std::io::BufReader::new(file)).unwrap()
}

#[test]
#[ignore]
fn base_log_loss_table() {
    let ds = load();
    let mut misses = Vec::new();
    for (season, cells) in TABLE_1 {
        let sub = ds.filter_season(season).unwrap();
        for (ev, want) in EventClass::MODELED.iter().zip(cells) {
            let p = baseline_rate(&sub, *ev).unwrap();
            let got = ProbabilityModel::Baseline { p }.score(&sub, *ev).unwrap();
            if (got - want).abs() > TABLE_TOL {
                misses.push(format!("{season} {ev}: {got:.6} vs {want:.6}"));
            }
        }
    }
    assert!(misses.is_empty(), "{}", misses.join("\n"));
}

#[test]
#[ignore]
fn bases_plus_walks_extremes_2017() {
    let ds = load().filter_season(2017).unwrap();
    let rates = bases_walks_per_pa(&ds).unwrap();
    let max = rates.iter().map(|r| r.rate).fold(f64::MIN, f64::max);
    let min = rates.iter().map(|r| r.rate).fold(f64::MAX, f64::min);
    assert!((max - 0.495).abs() <= FIG1_TOL, "max {max}");
    assert!((min - 0.4068).abs() <= FIG1_TOL, "min {min}");
}

#[test]
#[ignore]
fn runs_correlation_2017() {
    let ds = load().filter_season(2017).unwrap();
    let mut runs: BTreeMap<String, f64> = BTreeMap::new();
    let mut rdr = csv::Reader::from_path(data_dir().join("runs_2017.csv")).unwrap();
    for rec in rdr.deserialize::<(String, f64)>() {
        let (park, r) = rec.unwrap();
        runs.insert(park, r);
    }
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for r in bases_walks_per_pa(&ds).unwrap() {
        if let Some(v) = runs.get(&r.park) {
            x.push(r.rate);
            y.push(*v);
        }
    }
    let r2 = r_squared(&x, &y).unwrap();
    assert!((r2 - 0.8522).abs() <= FIG2_TOL, "R^2 {r2}");
}

#[test]
#[ignore]
fn home_run_factor_correlation_2017() {
    let ds = load().filter_season(2017).unwrap();
    let report = fit(&ds, EventClass::HomeRun, &FitConfig::default()).unwrap();
    let (conventional, _) = conventional_pf_table(&ds, 2017, EventClass::HomeRun).unwrap();
    let conventional: Vec<(String, f64)> = conventional.into_iter().map(|r| (r.park, r.pf)).collect();
    let proposed: Vec<(String, f64)> = report
        .park_names
        .iter()
        .cloned()
        .zip(report.park_factors())
        .filter(|(park, _)| conventional.iter().any(|(c, _)| c == park))
        .collect();
    let scatter = pf_scatter_table(&proposed, &conventional).unwrap();
    assert!(
        (scatter.pearson_r - 0.81).abs() <= CORRELATION_TOL,
        "pearson {}",
        scatter.pearson_r
    );
}
