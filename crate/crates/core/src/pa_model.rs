//! Plate-appearance domain types and the team/park registries.
//!
//! Team indices are dense in `[0, N_T)`. Park indices `[0, N_T)` are the home
//! parks of the same-indexed team; indices `[N_T, N_P)` are neutral sites.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("event class Other cannot be a modeled target")]
    InvalidTarget,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("unknown event code `{0}`")]
    UnknownEvent(String),
    #[error("invalid plate appearance at row {row}: {reason}")]
    InvalidRow { row: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TeamId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParkId(pub usize);

/// Outcome class of a plate appearance. `Other` covers every non-modeled
/// result (outs, strikeouts, HBP, reaches on error, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventClass {
    HomeRun,
    Single,
    Double,
    Triple,
    Walk,
    Other,
}

impl EventClass {
    /// The five modeled classes, in reporting order.
    pub const MODELED: [EventClass; 5] = [
        EventClass::HomeRun,
        EventClass::Single,
        EventClass::Double,
        EventClass::Triple,
        EventClass::Walk,
    ];

    pub const ALL: [EventClass; 6] = [
        EventClass::HomeRun,
        EventClass::Single,
        EventClass::Double,
        EventClass::Triple,
        EventClass::Walk,
        EventClass::Other,
    ];

    /// Canonical CSV code.
    pub fn code(self) -> &'static str {
        match self {
            EventClass::HomeRun => "HR",
            EventClass::Single => "1B",
            EventClass::Double => "2B",
            EventClass::Triple => "3B",
            EventClass::Walk => "BB",
            EventClass::Other => "OTHER",
        }
    }

    pub fn from_code(code: &str) -> Result<Self, ModelError> {
        match code {
            "HR" => Ok(EventClass::HomeRun),
            "1B" => Ok(EventClass::Single),
            "2B" => Ok(EventClass::Double),
            "3B" => Ok(EventClass::Triple),
            "BB" => Ok(EventClass::Walk),
            "OTHER" => Ok(EventClass::Other),
            other => Err(ModelError::UnknownEvent(other.to_string())),
        }
    }

    pub fn is_modeled(self) -> bool {
        self != EventClass::Other
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EventClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for EventClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for EventClass {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let code = String::deserialize(deserializer)?;
        EventClass::from_code(&code).map_err(serde::de::Error::custom)
    }
}

impl FromStr for EventClass {
    type Err = ModelError;

    /// Accepts canonical codes case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EventClass::from_code(&s.to_ascii_uppercase())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlateAppearance {
    pub game_id: String,
    pub batting_team: TeamId,
    pub defense_team: TeamId,
    pub park: ParkId,
    pub home_team: TeamId,
    pub event: EventClass,
    pub season: i32,
}

/// `x_l` for one plate appearance: 1 iff the outcome is the target class.
pub fn binary_outcome(pa: &PlateAppearance, target: EventClass) -> Result<u8, ModelError> {
    if !target.is_modeled() {
        return Err(ModelError::InvalidTarget);
    }
    Ok(u8::from(pa.event == target))
}

/// Per-class event counts plus the plate-appearance total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventTally {
    counts: [u64; 6],
    pub total: u64,
}

impl EventTally {
    pub fn record(&mut self, event: EventClass) {
        self.counts[event.slot()] += 1;
        self.total += 1;
    }

    pub fn get(&self, event: EventClass) -> u64 {
        self.counts[event.slot()]
    }

    /// Event rate for `event`; `None` when no plate appearances are tallied.
    pub fn rate(&self, event: EventClass) -> Option<f64> {
        (self.total > 0).then(|| self.get(event) as f64 / self.total as f64)
    }

    pub fn merge(&mut self, other: &EventTally) {
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
        self.total += other.total;
    }
}

/// One plate appearance in name space, as carried by the canonical CSV.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalRow {
    pub season: i32,
    pub game_id: String,
    pub park: String,
    pub home_team: String,
    pub batting_team: String,
    pub defense_team: String,
    pub event: EventClass,
}

/// Plate appearances in ingestion order together with the registries that
/// give them dense integer ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    plate_appearances: Vec<PlateAppearance>,
    team_names: Vec<String>,
    park_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from name-space rows.
    ///
    /// Teams get ids in first-appearance order (batting side, then defense).
    /// A team's home park is the park code it hosts at most often (ties go to
    /// the code seen first) and receives the team's own index. Every other
    /// park code is a neutral site, numbered from `N_T` in first-appearance
    /// order. A team that never hosts gets a placeholder park name `@TEAM`.
    pub fn from_rows(rows: &[CanonicalRow]) -> Result<Self, ModelError> {
        let mut team_index: BTreeMap<&str, usize> = BTreeMap::new();
        let mut team_names: Vec<String> = Vec::new();
        for (n, row) in rows.iter().enumerate() {
            validate_row(n, row)?;
            for name in [row.batting_team.as_str(), row.defense_team.as_str()] {
                if !team_index.contains_key(name) {
                    team_index.insert(name, team_names.len());
                    team_names.push(name.to_string());
                }
            }
        }

        // hosting frequency per team: park -> (count, first-seen order)
        let mut hosting: Vec<Vec<(&str, usize)>> = vec![Vec::new(); team_names.len()];
        for row in rows {
            let t = team_index[row.home_team.as_str()];
            match hosting[t].iter_mut().find(|(p, _)| *p == row.park) {
                Some(entry) => entry.1 += 1,
                None => hosting[t].push((row.park.as_str(), 1)),
            }
        }

        let mut park_names: Vec<String> = Vec::with_capacity(team_names.len());
        let mut park_index: BTreeMap<String, usize> = BTreeMap::new();
        for (t, parks) in hosting.iter().enumerate() {
            let mut best: Option<(&str, usize)> = None;
            for &(p, c) in parks {
                // a park already claimed by another team stays with that team
                if park_index.contains_key(p) {
                    continue;
                }
                if best.map_or(true, |(_, bc)| c > bc) {
                    best = Some((p, c));
                }
            }
            let name = match best {
                Some((p, _)) => p.to_string(),
                None => format!("@{}", team_names[t]),
            };
            park_index.insert(name.clone(), t);
            park_names.push(name);
        }
        for row in rows {
            if !park_index.contains_key(&row.park) {
                park_index.insert(row.park.clone(), park_names.len());
                park_names.push(row.park.clone());
            }
        }

        let plate_appearances = rows
            .iter()
            .map(|row| PlateAppearance {
                game_id: row.game_id.clone(),
                batting_team: TeamId(team_index[row.batting_team.as_str()]),
                defense_team: TeamId(team_index[row.defense_team.as_str()]),
                park: ParkId(park_index[&row.park]),
                home_team: TeamId(team_index[row.home_team.as_str()]),
                event: row.event,
                season: row.season,
            })
            .collect();

        Ok(Dataset {
            plate_appearances,
            team_names,
            park_names,
        })
    }

    /// Builds a dataset directly from id-space plate appearances.
    pub fn from_parts(
        plate_appearances: Vec<PlateAppearance>,
        team_names: Vec<String>,
        park_names: Vec<String>,
    ) -> Result<Self, ModelError> {
        let n_teams = team_names.len();
        let n_parks = park_names.len();
        if n_parks < n_teams {
            return Err(ModelError::InvalidRow {
                row: 0,
                reason: format!("{n_parks} parks registered for {n_teams} teams"),
            });
        }
        for (n, pa) in plate_appearances.iter().enumerate() {
            let bad = |reason: String| Err(ModelError::InvalidRow { row: n, reason });
            if pa.batting_team.0 >= n_teams || pa.defense_team.0 >= n_teams || pa.home_team.0 >= n_teams {
                return bad("team id out of range".into());
            }
            if pa.park.0 >= n_parks {
                return bad("park id out of range".into());
            }
            if pa.batting_team == pa.defense_team {
                return bad("batting team equals defense team".into());
            }
            if pa.home_team != pa.batting_team && pa.home_team != pa.defense_team {
                return bad("home team is neither side".into());
            }
            if pa.park.0 < n_teams && pa.park.0 != pa.home_team.0 {
                return bad("game played at another team's home park".into());
            }
        }
        Ok(Dataset {
            plate_appearances,
            team_names,
            park_names,
        })
    }

    pub fn plate_appearances(&self) -> &[PlateAppearance] {
        &self.plate_appearances
    }

    pub fn len(&self) -> usize {
        self.plate_appearances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plate_appearances.is_empty()
    }

    pub fn n_teams(&self) -> usize {
        self.team_names.len()
    }

    pub fn n_parks(&self) -> usize {
        self.park_names.len()
    }

    pub fn team_names(&self) -> &[String] {
        &self.team_names
    }

    pub fn park_names(&self) -> &[String] {
        &self.park_names
    }

    pub fn team_name(&self, id: TeamId) -> &str {
        &self.team_names[id.0]
    }

    pub fn park_name(&self, id: ParkId) -> &str {
        &self.park_names[id.0]
    }

    pub fn team_id(&self, name: &str) -> Option<TeamId> {
        self.team_names.iter().position(|n| n == name).map(TeamId)
    }

    pub fn park_id(&self, name: &str) -> Option<ParkId> {
        self.park_names.iter().position(|n| n == name).map(ParkId)
    }

    pub fn is_neutral(&self, park: ParkId) -> bool {
        park.0 >= self.n_teams()
    }

    /// Distinct seasons in ascending order.
    pub fn seasons(&self) -> Vec<i32> {
        let mut s: Vec<i32> = self.plate_appearances.iter().map(|pa| pa.season).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Name-space view of every plate appearance, in order.
    pub fn to_rows(&self) -> Vec<CanonicalRow> {
        self.plate_appearances
            .iter()
            .map(|pa| CanonicalRow {
                season: pa.season,
                game_id: pa.game_id.clone(),
                park: self.park_names[pa.park.0].clone(),
                home_team: self.team_names[pa.home_team.0].clone(),
                batting_team: self.team_names[pa.batting_team.0].clone(),
                defense_team: self.team_names[pa.defense_team.0].clone(),
                event: pa.event,
            })
            .collect()
    }

    /// Sub-dataset for one season with freshly assigned ids, so teams absent
    /// from that season do not leave parameter slots without data.
    pub fn filter_season(&self, season: i32) -> Result<Dataset, ModelError> {
        let rows: Vec<CanonicalRow> = self
            .to_rows()
            .into_iter()
            .filter(|r| r.season == season)
            .collect();
        Dataset::from_rows(&rows)
    }

    /// Sub-dataset keeping rows whose game passes `keep`, with ids reassigned.
    pub fn filter_games<F: Fn(&str) -> bool>(&self, keep: F) -> Result<Dataset, ModelError> {
        let rows: Vec<CanonicalRow> = self
            .to_rows()
            .into_iter()
            .filter(|r| keep(&r.game_id))
            .collect();
        Dataset::from_rows(&rows)
    }
}

fn validate_row(n: usize, row: &CanonicalRow) -> Result<(), ModelError> {
    let bad = |reason: &str| {
        Err(ModelError::InvalidRow {
            row: n,
            reason: reason.to_string(),
        })
    };
    if row.batting_team.is_empty() || row.defense_team.is_empty() || row.park.is_empty() {
        return bad("empty team or park code");
    }
    if row.batting_team == row.defense_team {
        return bad("batting team equals defense team");
    }
    if row.home_team != row.batting_team && row.home_team != row.defense_team {
        return bad("home team is neither side");
    }
    Ok(())
}

/// Event counts and plate-appearance total over the whole dataset.
pub fn dataset_summary(ds: &Dataset) -> Result<EventTally, ModelError> {
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let mut tally = EventTally::default();
    for pa in ds.plate_appearances() {
        tally.record(pa.event);
    }
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn row(game: &str, park: &str, home: &str, bat: &str, def: &str, ev: EventClass) -> CanonicalRow {
        CanonicalRow {
            season: 2017,
            game_id: game.into(),
            park: park.into(),
            home_team: home.into(),
            batting_team: bat.into(),
            defense_team: def.into(),
            event: ev,
        }
    }

    fn pa(event: EventClass) -> PlateAppearance {
        PlateAppearance {
            game_id: "g".into(),
            batting_team: TeamId(0),
            defense_team: TeamId(1),
            park: ParkId(0),
            home_team: TeamId(0),
            event,
            season: 2017,
        }
    }

    #[test]
    fn binary_outcome_definition() {
        assert_eq!(binary_outcome(&pa(EventClass::HomeRun), EventClass::HomeRun), Ok(1));
        assert_eq!(binary_outcome(&pa(EventClass::Walk), EventClass::HomeRun), Ok(0));
        assert_eq!(binary_outcome(&pa(EventClass::Other), EventClass::Walk), Ok(0));
        assert_eq!(
            binary_outcome(&pa(EventClass::Walk), EventClass::Other),
            Err(ModelError::InvalidTarget)
        );
    }

    #[test]
    fn at_most_one_modeled_bit_per_pa() {
        for ev in EventClass::ALL {
            let p = pa(ev);
            let s: u8 = EventClass::MODELED
                .iter()
                .map(|&t| binary_outcome(&p, t).unwrap())
                .sum();
            assert_eq!(s, u8::from(ev.is_modeled()));
        }
    }

    #[test]
    fn summary_of_walks() {
        let rows: Vec<_> = (0..3)
            .map(|_| row("g1", "AAA01", "AAA", "BBB", "AAA", EventClass::Walk))
            .collect();
        let ds = Dataset::from_rows(&rows).unwrap();
        let t = dataset_summary(&ds).unwrap();
        assert_eq!(t.get(EventClass::Walk), 3);
        for ev in [EventClass::HomeRun, EventClass::Single, EventClass::Double, EventClass::Triple, EventClass::Other] {
            assert_eq!(t.get(ev), 0);
        }
        assert_eq!(t.total, 3);
    }

    #[test]
    fn empty_summary_errors() {
        let ds = Dataset::from_rows(&[]).unwrap();
        assert_eq!(dataset_summary(&ds), Err(ModelError::EmptyDataset));
    }

    #[test]
    fn registries_are_dense_and_neutral_parks_follow_home_parks() {
        let rows = vec![
            row("g1", "AAA01", "AAA", "BBB", "AAA", EventClass::Other),
            row("g1", "AAA01", "AAA", "AAA", "BBB", EventClass::Other),
            row("g2", "TOK01", "BBB", "AAA", "BBB", EventClass::Other),
            row("g3", "BBB01", "BBB", "AAA", "BBB", EventClass::Other),
            row("g4", "BBB01", "BBB", "CCC", "BBB", EventClass::Single),
            row("g5", "BBB01", "BBB", "BBB", "CCC", EventClass::Single),
        ];
        let ds = Dataset::from_rows(&rows).unwrap();
        assert_eq!(ds.team_names(), ["BBB", "AAA", "CCC"]);
        assert_eq!(ds.park_names(), ["BBB01", "AAA01", "@CCC", "TOK01"]);
        assert!(ds.is_neutral(ds.park_id("TOK01").unwrap()));
        assert!(!ds.is_neutral(ds.park_id("AAA01").unwrap()));
        assert_eq!(ds.to_rows(), rows);
    }

    #[test]
    fn from_rows_rejects_inconsistent_rows() {
        let bad = vec![row("g1", "P", "AAA", "AAA", "AAA", EventClass::Other)];
        assert!(Dataset::from_rows(&bad).is_err());
        let bad = vec![row("g1", "P", "CCC", "AAA", "BBB", EventClass::Other)];
        assert!(Dataset::from_rows(&bad).is_err());
    }

    #[test]
    fn filter_season_reindexes() {
        let mut rows = vec![
            row("g1", "AAA01", "AAA", "BBB", "AAA", EventClass::Other),
            row("g2", "CCC01", "CCC", "DDD", "CCC", EventClass::Other),
        ];
        rows[1].season = 2016;
        let ds = Dataset::from_rows(&rows).unwrap();
        assert_eq!(ds.seasons(), vec![2016, 2017]);
        let s = ds.filter_season(2016).unwrap();
        assert_eq!(s.n_teams(), 2);
        assert_eq!(s.team_names(), ["DDD", "CCC"]);
    }

    #[test]
    fn event_codes_round_trip() {
        for ev in EventClass::ALL {
            assert_eq!(EventClass::from_code(ev.code()), Ok(ev));
        }
        assert_eq!("bb".parse::<EventClass>(), Ok(EventClass::Walk));
        assert!(EventClass::from_code("XX").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn summary_is_order_invariant(events in prop::collection::vec(0usize..6, 1..200), seed in any::<u64>()) {
                let rows: Vec<_> = events
                    .iter()
                    .map(|&e| row("g", "AAA01", "AAA", "AAA", "BBB", EventClass::ALL[e]))
                    .collect();
                let mut shuffled = rows.clone();
                // deterministic Fisher-Yates driven by the seed
                let mut s = seed;
                for i in (1..shuffled.len()).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let j = (s >> 33) as usize % (i + 1);
                    shuffled.swap(i, j);
                }
                let a = dataset_summary(&Dataset::from_rows(&rows).unwrap()).unwrap();
                let b = dataset_summary(&Dataset::from_rows(&shuffled).unwrap()).unwrap();
                prop_assert_eq!(a, b);
                prop_assert_eq!(a.total as usize, rows.len());
            }
        }
    }
}
