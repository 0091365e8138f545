//! Ratio park factor: home per-game event rate over road per-game event rate.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pa_model::{Dataset, EventClass, ModelError, ParkId, TeamId};

/// Lower/upper clamp shared by every probability model.
pub const PROB_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PfError {
    #[error("park factor undefined for team {team}: {reason}")]
    Undefined { team: usize, reason: &'static str },
    #[error("team {0} has no home/road counts")]
    MissingTeam(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Home/road event and game counts for one team.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamSplit {
    pub scored_home: u64,
    pub allowed_home: u64,
    pub games_home: u64,
    pub scored_road: u64,
    pub allowed_road: u64,
    pub games_road: u64,
}

impl TeamSplit {
    fn scaled(&self, k: u64) -> TeamSplit {
        TeamSplit {
            scored_home: self.scored_home * k,
            allowed_home: self.allowed_home * k,
            scored_road: self.scored_road * k,
            allowed_road: self.allowed_road * k,
            ..*self
        }
    }

    /// Home and road buckets exchanged.
    pub fn swapped(&self) -> TeamSplit {
        TeamSplit {
            scored_home: self.scored_road,
            allowed_home: self.allowed_road,
            games_home: self.games_road,
            scored_road: self.scored_home,
            allowed_road: self.allowed_home,
            games_road: self.games_home,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomeRoadCounts {
    pub event: EventClass,
    /// Indexed by team id.
    pub teams: Vec<TeamSplit>,
    /// Teams lacking home or road games; their park factor is undefined.
    pub excluded: Vec<TeamId>,
}

impl HomeRoadCounts {
    /// Every event count multiplied by `k`; games unchanged.
    pub fn scaled(&self, k: u64) -> HomeRoadCounts {
        HomeRoadCounts {
            event: self.event,
            teams: self.teams.iter().map(|t| t.scaled(k)).collect(),
            excluded: self.excluded.clone(),
        }
    }
}

/// Counts target events scored and allowed by each team at home and on the
/// road. A game is a home game for a team only when played at that team's
/// own park, so neutral-site games are road games for both clubs.
pub fn aggregate_home_road(ds: &Dataset, target: EventClass) -> Result<HomeRoadCounts, PfError> {
    if !target.is_modeled() {
        return Err(ModelError::InvalidTarget.into());
    }
    let n = ds.n_teams();
    let mut teams = vec![TeamSplit::default(); n];
    let mut home_games: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); n];
    let mut road_games: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); n];

    for pa in ds.plate_appearances() {
        let hit = u64::from(pa.event == target);
        for (team, scored) in [(pa.batting_team, true), (pa.defense_team, false)] {
            let at_home = pa.park.0 == team.0;
            let split = &mut teams[team.0];
            match (at_home, scored) {
                (true, true) => split.scored_home += hit,
                (true, false) => split.allowed_home += hit,
                (false, true) => split.scored_road += hit,
                (false, false) => split.allowed_road += hit,
            }
            let games = if at_home { &mut home_games } else { &mut road_games };
            games[team.0].insert(pa.game_id.as_str());
        }
    }
    let mut excluded = Vec::new();
    for (t, split) in teams.iter_mut().enumerate() {
        split.games_home = home_games[t].len() as u64;
        split.games_road = road_games[t].len() as u64;
        if split.games_home == 0 || split.games_road == 0 {
            excluded.push(TeamId(t));
        }
    }
    Ok(HomeRoadCounts {
        event: target,
        teams,
        excluded,
    })
}

/// Park factor for the park of `team`.
///
/// Zero home events give a PF of 0; zero road events (or games) leave it
/// undefined.
pub fn conventional_pf(counts: &HomeRoadCounts, team: TeamId) -> Result<f64, PfError> {
    let s = counts.teams.get(team.0).ok_or(PfError::MissingTeam(team.0))?;
    if s.games_home == 0 {
        return Err(PfError::Undefined { team: team.0, reason: "no home games" });
    }
    if s.games_road == 0 {
        return Err(PfError::Undefined { team: team.0, reason: "no road games" });
    }
    let road = (s.scored_road + s.allowed_road) as f64 / s.games_road as f64;
    if road == 0.0 {
        return Err(PfError::Undefined { team: team.0, reason: "no road events" });
    }
    let home = (s.scored_home + s.allowed_home) as f64 / s.games_home as f64;
    Ok(home / road)
}

/// Per-PA probability under the ratio model, `pf * p_average`, clamped into
/// `[PROB_EPS, 1 - PROB_EPS]`.
pub fn conventional_probability(pf: f64, p_average: f64) -> f64 {
    debug_assert!(pf >= 0.0, "negative park factor {pf}");
    debug_assert!(p_average > 0.0 && p_average < 1.0, "p_average {p_average} outside (0,1)");
    (pf * p_average).clamp(PROB_EPS, 1.0 - PROB_EPS)
}

/// One row of the conventional PF export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionalPfRow {
    pub season: i32,
    pub event: EventClass,
    pub team: String,
    pub park: String,
    pub pf: f64,
}

/// Park factors for every team in a single-season dataset. Teams whose PF is
/// undefined are left out and reported in the second return value.
pub fn conventional_pf_table(
    ds: &Dataset,
    season: i32,
    target: EventClass,
) -> Result<(Vec<ConventionalPfRow>, Vec<(String, PfError)>), PfError> {
    let counts = aggregate_home_road(ds, target)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for t in 0..ds.n_teams() {
        let team = TeamId(t);
        match conventional_pf(&counts, team) {
            Ok(pf) => rows.push(ConventionalPfRow {
                season,
                event: target,
                team: ds.team_name(team).to_string(),
                park: ds.park_name(ParkId(t)).to_string(),
                pf,
            }),
            Err(e) => skipped.push((ds.team_name(team).to_string(), e)),
        }
    }
    Ok((rows, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pa_model::CanonicalRow;

    fn row(game: &str, park: &str, home: &str, bat: &str, def: &str, ev: EventClass) -> CanonicalRow {
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

    fn split(sh: u64, ah: u64, gh: u64, sr: u64, ar: u64, gr: u64) -> HomeRoadCounts {
        HomeRoadCounts {
            event: EventClass::HomeRun,
            teams: vec![TeamSplit {
                scored_home: sh,
                allowed_home: ah,
                games_home: gh,
                scored_road: sr,
                allowed_road: ar,
                games_road: gr,
            }],
            excluded: vec![],
        }
    }

    #[test]
    fn single_game_direct_count() {
        use EventClass::*;
        let rows = vec![
            row("g1", "AAA01", "AAA", "AAA", "BBB", HomeRun),
            row("g1", "AAA01", "AAA", "AAA", "BBB", HomeRun),
            row("g1", "AAA01", "AAA", "AAA", "BBB", Other),
            row("g1", "AAA01", "AAA", "BBB", "AAA", HomeRun),
            row("g1", "AAA01", "AAA", "BBB", "AAA", Single),
        ];
        let ds = Dataset::from_rows(&rows).unwrap();
        let c = aggregate_home_road(&ds, HomeRun).unwrap();
        let home = c.teams[ds.team_id("AAA").unwrap().0];
        assert_eq!((home.scored_home, home.allowed_home, home.games_home), (2, 1, 1));
        assert_eq!(home.games_road, 0);
        let visitor = c.teams[ds.team_id("BBB").unwrap().0];
        assert_eq!((visitor.scored_road, visitor.allowed_road, visitor.games_road), (1, 2, 1));
        assert_eq!(c.excluded.len(), 2);
    }

    #[test]
    fn neutral_site_is_road_for_both() {
        use EventClass::*;
        let rows = vec![
            row("g1", "AAA01", "AAA", "AAA", "BBB", HomeRun),
            row("g1", "AAA01", "AAA", "BBB", "AAA", Other),
            row("g1", "AAA01", "AAA", "AAA", "BBB", Other),
            row("g2", "BBB01", "BBB", "AAA", "BBB", HomeRun),
            row("g3", "TOK01", "AAA", "AAA", "BBB", HomeRun),
            row("g3", "TOK01", "AAA", "BBB", "AAA", HomeRun),
        ];
        let ds = Dataset::from_rows(&rows).unwrap();
        let c = aggregate_home_road(&ds, HomeRun).unwrap();
        let a = c.teams[ds.team_id("AAA").unwrap().0];
        assert_eq!((a.games_home, a.games_road), (1, 2));
        assert_eq!((a.scored_road, a.allowed_road), (2, 1));
        let b = c.teams[ds.team_id("BBB").unwrap().0];
        assert_eq!((b.games_home, b.games_road), (1, 2));
    }

    #[test]
    fn ratio_arithmetic() {
        // 10 HR in 5 home games, 8 HR in 5 road games
        let c = split(6, 4, 5, 5, 3, 5);
        assert!((conventional_pf(&c, TeamId(0)).unwrap() - 1.25).abs() < 1e-15);
        let c = split(3, 3, 3, 2, 2, 2);
        assert_eq!(conventional_pf(&c, TeamId(0)).unwrap(), 1.0);
    }

    #[test]
    fn zero_home_events_is_zero_but_zero_road_is_undefined() {
        assert_eq!(conventional_pf(&split(0, 0, 4, 2, 1, 4), TeamId(0)).unwrap(), 0.0);
        assert!(matches!(
            conventional_pf(&split(2, 1, 4, 0, 0, 4), TeamId(0)),
            Err(PfError::Undefined { .. })
        ));
        assert!(matches!(
            conventional_pf(&split(2, 1, 4, 0, 0, 0), TeamId(0)),
            Err(PfError::Undefined { .. })
        ));
    }

    // Four games between AAA and BBB: two at each park.
    //   g1 @AAA01: AAA 1 HR, BBB 2 HR      g2 @AAA01: AAA 0 HR, BBB 1 HR
    //   g3 @BBB01: AAA 1 HR, BBB 0 HR      g4 @BBB01: AAA 0 HR, BBB 1 HR
    // AAA: home (1+0 scored + 2+1 allowed)/2 = 2.0, road (1+0 + 0+1)/2 = 1.0 -> 2.0
    // BBB: home (0+1 + 1+0)/2 = 1.0, road (2+1 + 1+0)/2 = 2.0 -> 0.5
    #[test]
    fn four_game_fixture_by_hand() {
        use EventClass::*;
        let mut rows = Vec::new();
        let mut game = |g: &str, park: &str, home: &str, a_hr: usize, b_hr: usize| {
            for _ in 0..a_hr {
                rows.push(row(g, park, home, "AAA", "BBB", HomeRun));
            }
            rows.push(row(g, park, home, "AAA", "BBB", Other));
            for _ in 0..b_hr {
                rows.push(row(g, park, home, "BBB", "AAA", HomeRun));
            }
            rows.push(row(g, park, home, "BBB", "AAA", Other));
        };
        game("g1", "AAA01", "AAA", 1, 2);
        game("g2", "AAA01", "AAA", 0, 1);
        game("g3", "BBB01", "BBB", 1, 0);
        game("g4", "BBB01", "BBB", 0, 1);
        let ds = Dataset::from_rows(&rows).unwrap();
        let c = aggregate_home_road(&ds, HomeRun).unwrap();
        let a = ds.team_id("AAA").unwrap();
        let b = ds.team_id("BBB").unwrap();
        assert!((conventional_pf(&c, a).unwrap() - 2.0).abs() < 1e-15);
        assert!((conventional_pf(&c, b).unwrap() - 0.5).abs() < 1e-15);
        let (table, skipped) = conventional_pf_table(&ds, 2017, HomeRun).unwrap();
        assert!(skipped.is_empty());
        assert_eq!(table[a.0].park, "AAA01");
    }

    #[test]
    fn probability_examples() {
        assert!((conventional_probability(1.195, 0.03193) - 0.03816).abs() < 5e-5);
        assert_eq!(conventional_probability(1.0, 0.03193), 0.03193);
        assert_eq!(conventional_probability(40.0, 0.03), 1.0 - 1e-12);
        assert_eq!(conventional_probability(0.0, 0.03), 1e-12);
    }

    #[test]
    fn other_is_not_a_target() {
        let ds = Dataset::from_rows(&[]).unwrap();
        assert!(aggregate_home_road(&ds, EventClass::Other).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn scale_and_swap(sh in 0u64..50, ah in 0u64..50, gh in 1u64..20, sr in 0u64..50, ar in 0u64..50, gr in 1u64..20, k in 1u64..10) {
                prop_assume!(sr + ar > 0 && sh + ah > 0);
                let c = split(sh, ah, gh, sr, ar, gr);
                let pf = conventional_pf(&c, TeamId(0)).unwrap();
                let scaled = conventional_pf(&c.scaled(k), TeamId(0)).unwrap();
                prop_assert!((pf - scaled).abs() <= 1e-12 * pf);
                let mut swapped = c.clone();
                swapped.teams[0] = c.teams[0].swapped();
                let inv = conventional_pf(&swapped, TeamId(0)).unwrap();
                prop_assert!((pf * inv - 1.0).abs() < 1e-12);
            }

            #[test]
            fn probability_monotone_and_open(a in 0.0f64..50.0, b in 0.0f64..50.0, p in 0.001f64..0.999) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let (plo, phi) = (conventional_probability(lo, p), conventional_probability(hi, p));
                prop_assert!(plo <= phi);
                prop_assert!(plo > 0.0 && phi < 1.0);
            }
        }
    }
}
