//! Play-by-play event file parsing and the canonical per-PA CSV format.
//!
//! Event files are comma-separated records, one per line:
//!
//! ```text
//! id,ANA201704030
//! info,visteam,SEA
//! info,hometeam,ANA
//! info,site,ANA01
//! play,1,0,segud001,32,CBBFBX,S7/L
//! ```
//!
//! Only `id`, `info` and `play` records matter here. `play` fields are
//! inning, half (0 = visitor batting, 1 = home batting), batter, count,
//! pitches and the event text.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use thiserror::Error;

use crate::pa_model::{CanonicalRow, Dataset, EventClass, ModelError};

pub const CANONICAL_HEADER: &str = "season,game_id,park,home_team,batting_team,defense_team,event";

const CANONICAL_COLUMNS: [&str; 7] = [
    "season",
    "game_id",
    "park",
    "home_team",
    "batting_team",
    "defense_team",
    "event",
];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("empty play event text")]
    EmptyEvent,
    #[error("malformed event file: {0}")]
    MalformedFile(String),
    #[error("wrong header: expected `{CANONICAL_HEADER}`, found `{0}`")]
    WrongHeader(String),
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How a play record's event text counts toward the PA denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlayOutcome {
    /// A completed plate appearance with its outcome class.
    PlateAppearance(EventClass),
    /// Baserunning-only or no-play record; not a plate appearance.
    NotPlateAppearance,
}

// Leading codes of records that never complete a plate appearance.
// Longer codes sharing a prefix with a PA code (SB vs S, DI vs D, WP vs W)
// must be tested before the PA codes.
const NON_PA_PREFIXES: [&str; 11] = ["NP", "BK", "CS", "DI", "OA", "PB", "WP", "POCS", "PO", "SB", "FLE"];

/// Maps the event field of a `play` record to an outcome class.
///
/// Hit-by-pitch, strikeouts, outs, errors and interference are plate
/// appearances classed as `Other`. Intentional walks count as walks.
pub fn classify_play(event_text: &str) -> Result<PlayOutcome, IngestError> {
    let text = event_text.trim();
    if text.is_empty() {
        return Err(IngestError::EmptyEvent);
    }
    // basic play is everything before modifiers and the advance section
    let basic = text.split(['/', '.']).next().unwrap_or(text);
    if basic.is_empty() {
        return Err(IngestError::EmptyEvent);
    }
    if NON_PA_PREFIXES.iter().any(|p| basic.starts_with(p)) {
        return Ok(PlayOutcome::NotPlateAppearance);
    }
    use EventClass::*;
    let class = if basic.starts_with("HP") {
        Other
    } else if basic.starts_with('H') {
        // H, HR, H7, HR9, ...
        HomeRun
    } else if basic.starts_with("IW") || basic.starts_with('I') || basic.starts_with('W') {
        Walk
    } else if basic.starts_with('S') {
        Single
    } else if basic.starts_with('D') {
        // DGR ground-rule doubles included
        Double
    } else if basic.starts_with('T') {
        Triple
    } else {
        Other
    };
    Ok(PlayOutcome::PlateAppearance(class))
}

/// A record that could not be turned into a row; parsing continues past it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedEvents {
    pub rows: Vec<CanonicalRow>,
    pub row_errors: Vec<RowError>,
    /// Record types that were not recognised, with their counts.
    pub skipped_records: BTreeMap<String, usize>,
}

impl ParsedEvents {
    /// Line-numbered error report, one error per line.
    pub fn error_report(&self, source: &str) -> String {
        let mut out = String::new();
        for e in &self.row_errors {
            out.push_str(&format!("{source}:{e}\n"));
        }
        out
    }
}

/// One comma-split line of an event file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEventRecord {
    pub record_type: String,
    pub fields: Vec<String>,
}

impl RawEventRecord {
    pub fn parse(line: &str) -> Option<Self> {
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            return None;
        }
        let mut parts = line.split(',');
        let record_type = parts.next()?.trim().to_string();
        Some(RawEventRecord {
            record_type,
            fields: parts.map(|s| s.trim().trim_matches('"').to_string()).collect(),
        })
    }
}

const KNOWN_RECORDS: [&str; 11] = [
    "id", "version", "info", "start", "sub", "play", "data", "com", "badj", "padj", "ladj",
];

struct GameHeader {
    game_id: String,
    visitor: Option<String>,
    home: Option<String>,
    site: Option<String>,
}

/// Parses a Retrosheet-style event file into canonical rows.
///
/// Every row carries `season`. The park is taken from `info,site`; a game
/// without one uses the site this home team hosts at elsewhere in the file,
/// falling back to the home team's code.
pub fn parse_event_file<R: Read>(mut input: R, season: i32) -> Result<ParsedEvents, IngestError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let records: Vec<(usize, RawEventRecord)> = text
        .lines()
        .enumerate()
        .filter_map(|(n, l)| RawEventRecord::parse(l).map(|r| (n + 1, r)))
        .collect();

    // first pass: each home team's default site is the one it hosts most
    // games at, ties going to the site seen first
    let mut site_games: BTreeMap<String, Vec<(String, usize)>> = BTreeMap::new();
    {
        let mut home: Option<String> = None;
        let mut site: Option<String> = None;
        let mut flush = |home: &mut Option<String>, site: &mut Option<String>| {
            if let (Some(h), Some(s)) = (home.take(), site.take()) {
                let sites = site_games.entry(h).or_default();
                match sites.iter_mut().find(|(name, _)| *name == s) {
                    Some((_, n)) => *n += 1,
                    None => sites.push((s, 1)),
                }
            }
        };
        for (_, rec) in &records {
            match rec.record_type.as_str() {
                "id" => flush(&mut home, &mut site),
                "info" => match rec.fields.first().map(String::as_str) {
                    Some("hometeam") => home = rec.fields.get(1).cloned(),
                    Some("site") => site = rec.fields.get(1).cloned(),
                    _ => {}
                },
                _ => {}
            }
        }
        flush(&mut home, &mut site);
    }
    let default_site: BTreeMap<String, String> = site_games
        .into_iter()
        .map(|(home, sites)| {
            let best = sites.iter().map(|(_, n)| *n).max().unwrap_or(0);
            let site = sites.into_iter().find(|(_, n)| *n == best).map(|(s, _)| s).unwrap_or_default();
            (home, site)
        })
        .collect();

    let mut out = ParsedEvents::default();
    let mut game: Option<GameHeader> = None;
    for (line, rec) in &records {
        match rec.record_type.as_str() {
            "id" => {
                let id = rec.fields.first().cloned().unwrap_or_default();
                if id.is_empty() {
                    return Err(IngestError::MalformedFile(format!("line {line}: empty game id")));
                }
                game = Some(GameHeader {
                    game_id: id,
                    visitor: None,
                    home: None,
                    site: None,
                });
            }
            "info" => {
                let Some(g) = game.as_mut() else {
                    return Err(IngestError::MalformedFile(format!("line {line}: info before id")));
                };
                let value = rec.fields.get(1).filter(|v| !v.is_empty()).cloned();
                match rec.fields.first().map(String::as_str) {
                    Some("visteam") => g.visitor = value,
                    Some("hometeam") => g.home = value,
                    Some("site") => g.site = value,
                    _ => {}
                }
            }
            "play" => {
                let Some(g) = game.as_ref() else {
                    return Err(IngestError::MalformedFile(format!("line {line}: play before id")));
                };
                let (Some(visitor), Some(home)) = (g.visitor.as_ref(), g.home.as_ref()) else {
                    return Err(IngestError::MalformedFile(format!(
                        "line {line}: game {} has no visteam/hometeam info",
                        g.game_id
                    )));
                };
                match play_row(rec, g, visitor, home, &default_site, season) {
                    Ok(Some(row)) => out.rows.push(row),
                    Ok(None) => {}
                    Err(reason) => out.row_errors.push(RowError { line: *line, reason }),
                }
            }
            t if KNOWN_RECORDS.contains(&t) => {}
            other => *out.skipped_records.entry(other.to_string()).or_default() += 1,
        }
    }
    Ok(out)
}

fn play_row(
    rec: &RawEventRecord,
    g: &GameHeader,
    visitor: &str,
    home: &str,
    default_site: &BTreeMap<String, String>,
    season: i32,
) -> Result<Option<CanonicalRow>, String> {
    if rec.fields.len() != 6 {
        return Err(format!("play record has {} fields, expected 6", rec.fields.len()));
    }
    if rec.fields[0].parse::<u32>().is_err() {
        return Err(format!("bad inning `{}`", rec.fields[0]));
    }
    let (batting, defense) = match rec.fields[1].as_str() {
        "0" => (visitor, home),
        "1" => (home, visitor),
        other => return Err(format!("bad half-inning flag `{other}`")),
    };
    let outcome = classify_play(&rec.fields[5]).map_err(|e| e.to_string())?;
    let PlayOutcome::PlateAppearance(event) = outcome else {
        return Ok(None);
    };
    let park = g
        .site
        .clone()
        .or_else(|| default_site.get(home).cloned())
        .unwrap_or_else(|| home.to_string());
    Ok(Some(CanonicalRow {
        season,
        game_id: g.game_id.clone(),
        park,
        home_team: home.to_string(),
        batting_team: batting.to_string(),
        defense_team: defense.to_string(),
        event,
    }))
}

/// Writes rows as canonical CSV (UTF-8, LF line endings).
pub fn write_canonical_csv<W: Write>(rows: &[CanonicalRow], out: W) -> Result<(), IngestError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(false)
        .from_writer(out);
    w.write_record(CANONICAL_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.season.to_string().as_str(),
            &r.game_id,
            &r.park,
            &r.home_team,
            &r.batting_team,
            &r.defense_team,
            r.event.code(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn canonical_csv_bytes(rows: &[CanonicalRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_canonical_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

/// Reads canonical CSV rows; the header must match exactly.
pub fn read_canonical_rows<R: Read>(input: R) -> Result<Vec<CanonicalRow>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(IngestError::WrongHeader(String::new())),
    };
    let joined: Vec<&str> = header.iter().collect();
    if joined != CANONICAL_COLUMNS {
        return Err(IngestError::WrongHeader(joined.join(",")));
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |reason: String| IngestError::Row { line, reason };
        if rec.len() != 7 {
            return Err(bad(format!("{} columns, expected 7", rec.len())));
        }
        let season = rec[0]
            .parse::<i32>()
            .map_err(|_| bad(format!("bad season `{}`", &rec[0])))?;
        let event = EventClass::from_code(&rec[6]).map_err(|e| bad(e.to_string()))?;
        rows.push(CanonicalRow {
            season,
            game_id: rec[1].to_string(),
            park: rec[2].to_string(),
            home_team: rec[3].to_string(),
            batting_team: rec[4].to_string(),
            defense_team: rec[5].to_string(),
            event,
        });
    }
    Ok(rows)
}

/// Reads canonical CSV into a dataset.
pub fn read_canonical_csv<R: Read>(input: R) -> Result<Dataset, IngestError> {
    let rows = read_canonical_rows(input)?;
    Ok(Dataset::from_rows(&rows)?)
}

/// Merges per-file row sets in (season, game_id, in-file order) order.
pub fn merge_rows(files: Vec<Vec<CanonicalRow>>) -> Vec<CanonicalRow> {
    let mut all: Vec<CanonicalRow> = files.into_iter().flatten().collect();
    // stable sort keeps in-file order within a game
    all.sort_by(|a, b| (a.season, &a.game_id).cmp(&(b.season, &b.game_id)));
    all
}
