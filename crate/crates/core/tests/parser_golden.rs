use std::fs;
use std::path::PathBuf;

use parkfactor::ingest::{canonical_csv_bytes, merge_rows, parse_event_file, read_canonical_rows, write_canonical_csv};
use parkfactor::{CanonicalRow, Dataset, EventClass};

const FIXTURES: [&str; 5] = ["2017ANA.EVA", "2017OAK.EVA", "2017BOS.EVA", "2017CHN.EVN", "2017NYA.EVA"];

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn stem(name: &str) -> &str {
    name.split('.').next().unwrap()
}

fn expected_csv(name: &str) -> Vec<u8> {
    fs::read(fixture_dir().join("expected").join(format!("{}.csv", stem(name)))).unwrap()
}

fn expected_error_lines(name: &str) -> Vec<usize> {
    fs::read_to_string(fixture_dir().join("expected").join(format!("{}.errors", stem(name))))
        .unwrap()
        .lines()
        .map(|l| l.trim().parse().unwrap())
        .collect()
}

#[test]
fn every_fixture_parses_to_its_golden_rows() {
    for name in FIXTURES {
        let file = fs::File::open(fixture_dir().join("events").join(name)).unwrap();
        let parsed = parse_event_file(file, 2017).unwrap();
        let got = canonical_csv_bytes(&parsed.rows);
        assert_eq!(
            String::from_utf8(got).unwrap(),
            String::from_utf8(expected_csv(name)).unwrap(),
            "{name}"
        );
        let lines: Vec<usize> = parsed.row_errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, expected_error_lines(name), "{name}");
    }
}

#[test]
fn golden_csv_round_trips_byte_for_byte() {
    for name in FIXTURES {
        let bytes = expected_csv(name);
        let rows = read_canonical_rows(bytes.as_slice()).unwrap();
        let mut out = Vec::new();
        write_canonical_csv(&rows, &mut out).unwrap();
        assert_eq!(out, bytes, "{name}");
        // and through the id-assigning dataset
        let ds = Dataset::from_rows(&rows).unwrap();
        assert_eq!(canonical_csv_bytes(&ds.to_rows()), bytes, "{name}");
    }
}

#[test]
fn corrupt_line_costs_one_row() {
    let file = fs::File::open(fixture_dir().join("events/2017BOS.EVA")).unwrap();
    let parsed = parse_event_file(file, 2017).unwrap();
    assert_eq!(parsed.rows.len(), 9);
    assert_eq!(parsed.row_errors.len(), 1);
    assert!(parsed.row_errors[0].reason.contains("5 fields"), "{}", parsed.row_errors[0]);
    let report = parsed.error_report("2017BOS.EVA");
    assert!(report.starts_with("2017BOS.EVA:line 11:"), "{report}");
}

#[test]
fn neutral_site_game_gets_its_own_park() {
    let file = fs::File::open(fixture_dir().join("events/2017OAK.EVA")).unwrap();
    let parsed = parse_event_file(file, 2017).unwrap();
    let ds = Dataset::from_rows(&parsed.rows).unwrap();
    let tok = ds.park_id("TOK01").unwrap();
    let oak = ds.park_id("OAK01").unwrap();
    assert!(ds.is_neutral(tok));
    assert!(!ds.is_neutral(oak));
    assert_eq!(ds.team_id("OAK").unwrap().0, oak.0);
    assert!(tok.0 >= ds.n_teams());
}

#[test]
fn unknown_records_are_counted_not_fatal() {
    let file = fs::File::open(fixture_dir().join("events/2017NYA.EVA")).unwrap();
    let parsed = parse_event_file(file, 2017).unwrap();
    assert_eq!(parsed.skipped_records.get("xyz"), Some(&1));
    assert_eq!(parsed.skipped_records.len(), 1);
}

#[test]
fn malformed_files_are_rejected() {
    for text in [
        "play,1,0,a,00,X,S8\n",
        "info,visteam,SEA\n",
        "id,X201704010\ninfo,hometeam,X\nplay,1,0,a,00,X,S8\n",
    ] {
        assert!(parse_event_file(text.as_bytes(), 2017).is_err(), "{text:?}");
    }
}

#[test]
fn merged_corpus_is_sorted_by_game() {
    let all: Vec<Vec<CanonicalRow>> = FIXTURES
        .iter()
        .map(|n| read_canonical_rows(expected_csv(n).as_slice()).unwrap())
        .collect();
    let total: usize = all.iter().map(Vec::len).sum();
    let merged = merge_rows(all);
    assert_eq!(merged.len(), total);
    assert!(merged.windows(2).all(|w| w[0].game_id <= w[1].game_id));
    let hr = merged.iter().filter(|r| r.event == EventClass::HomeRun).count();
    assert_eq!(hr, 5);
}

#[test]
fn large_synthetic_dump_round_trips() {
    use parkfactor::synth::{balanced_schedule, planted_uniform};
    let planted = planted_uniform(5, 10, 10, (-1.5, -1.0), (-0.2, 0.2), EventClass::Single, 2016);
    let spec = parkfactor::SyntheticSpec {
        n_teams: 10,
        n_parks: 10,
        season: 2016,
        planted: vec![planted],
        schedule: balanced_schedule(10, 1, 556),
        rng_seed: 17,
    };
    let (ds, _) = parkfactor::generate(&spec).unwrap();
    assert!(ds.len() >= 100_000);
    let bytes = canonical_csv_bytes(&ds.to_rows());
    let back = read_canonical_rows(bytes.as_slice()).unwrap();
    assert_eq!(canonical_csv_bytes(&back), bytes);
}
