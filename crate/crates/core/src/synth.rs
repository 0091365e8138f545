//! Synthetic plate-appearance data drawn from planted parameters.
//!
//! Each scheduled plate appearance samples exactly one outcome. Modeled
//! events are taken in the fixed order HR, 3B, 2B, 1B, BB against one uniform
//! draw, so every class keeps its logistic marginal probability and the
//! remainder becomes `Other`. Every game has its own ChaCha8 stream derived
//! from the seed and the game's schedule index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pa_model::{Dataset, EventClass, EventTally, ModelError, ParkId, PlateAppearance, TeamId};
use crate::pairwise_fit::{proposed_pf, ParameterSet};
use crate::stats::{pearson, StatsError};

pub const RNG_ALGORITHM: &str = "ChaCha8Rng/seed_from_u64/stream=game_index";

const SAMPLING_ORDER: [EventClass; 5] = [
    EventClass::HomeRun,
    EventClass::Triple,
    EventClass::Double,
    EventClass::Single,
    EventClass::Walk,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("event probabilities sum to {sum} > 1 for batting {batting}, defense {defense}, park {park}")]
    ProbabilityOverflow {
        batting: usize,
        defense: usize,
        park: usize,
        sum: f64,
    },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("parameter size mismatch: {0}")]
    SizeMismatch(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledGame {
    pub home: usize,
    pub away: usize,
    /// Defaults to the home team's park.
    #[serde(default)]
    pub park: Option<usize>,
    pub pa_per_side: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_teams: usize,
    pub n_parks: usize,
    pub season: i32,
    /// One planted parameter set per modeled event; absent events never occur.
    pub planted: Vec<ParameterSet>,
    pub schedule: Vec<ScheduledGame>,
    pub rng_seed: u64,
}

impl SyntheticSpec {
    pub fn team_name(t: usize) -> String {
        format!("T{t:02}")
    }

    /// Home park of team `k` is `P{k}`; neutral sites are `N{k - n_teams}`.
    pub fn park_name(&self, k: usize) -> String {
        if k < self.n_teams {
            format!("P{k:02}")
        } else {
            format!("N{:02}", k - self.n_teams)
        }
    }

    fn planted_for(&self, event: EventClass) -> Option<&ParameterSet> {
        self.planted.iter().find(|p| p.event == event)
    }

    fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        if self.n_teams < 2 {
            return bad(format!("need at least 2 teams, got {}", self.n_teams));
        }
        if self.n_parks < self.n_teams {
            return bad(format!("{} parks for {} teams", self.n_parks, self.n_teams));
        }
        for (n, p) in self.planted.iter().enumerate() {
            if !p.event.is_modeled() {
                return bad(format!("planted set {n} targets Other"));
            }
            if p.b.len() != self.n_teams || p.d.len() != self.n_teams || p.r.len() != self.n_parks {
                return bad(format!("planted set for {} has the wrong shape", p.event));
            }
            if !p.is_finite() {
                return bad(format!("planted set for {} is not finite", p.event));
            }
            if self.planted[..n].iter().any(|q| q.event == p.event) {
                return bad(format!("event {} planted twice", p.event));
            }
        }
        for (n, g) in self.schedule.iter().enumerate() {
            if g.home >= self.n_teams || g.away >= self.n_teams || g.home == g.away {
                return bad(format!("game {n}: bad teams {} vs {}", g.home, g.away));
            }
            if let Some(k) = g.park {
                if k >= self.n_parks || (k < self.n_teams && k != g.home) {
                    return bad(format!("game {n}: park {k} is not the home park or a neutral site"));
                }
            }
        }
        Ok(())
    }

    /// Outcome probabilities in sampling order for one match-up.
    fn probabilities(&self, i: usize, j: usize, k: usize) -> Result<[f64; 5], SynthError> {
        let mut probs = [0.0; 5];
        for (slot, ev) in SAMPLING_ORDER.iter().enumerate() {
            if let Some(p) = self.planted_for(*ev) {
                probs[slot] = p.probability(i, j, k);
            }
        }
        let sum: f64 = probs.iter().sum();
        if sum > 1.0 {
            return Err(SynthError::ProbabilityOverflow {
                batting: i,
                defense: j,
                park: k,
                sum,
            });
        }
        Ok(probs)
    }
}

/// Exact counts per (batting, defense, park) match-up, in first-seen order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchupTally {
    pub batting: usize,
    pub defense: usize,
    pub park: usize,
    pub counts: EventTally,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyLedger {
    pub rng_algorithm: String,
    pub rng_seed: u64,
    pub season: i32,
    pub totals: EventTally,
    pub matchups: Vec<MatchupTally>,
}

impl TallyLedger {
    pub fn get(&self, batting: usize, defense: usize, park: usize) -> Option<&EventTally> {
        self.matchups
            .iter()
            .find(|m| (m.batting, m.defense, m.park) == (batting, defense, park))
            .map(|m| &m.counts)
    }
}

/// Samples a dataset from the spec. Same spec and seed give the same dataset.
pub fn generate(spec: &SyntheticSpec) -> Result<(Dataset, TallyLedger), SynthError> {
    spec.validate()?;
    let nt = spec.n_teams;
    let np = spec.n_parks;
    // probabilities per match-up, computed once and checked before sampling
    let mut cache: Vec<Option<[f64; 5]>> = vec![None; nt * nt * np];
    let mut ledger_slot: Vec<usize> = vec![usize::MAX; nt * nt * np];
    let mut matchups: Vec<MatchupTally> = Vec::new();
    for g in &spec.schedule {
        let k = g.park.unwrap_or(g.home);
        for (i, j) in [(g.away, g.home), (g.home, g.away)] {
            let key = (i * nt + j) * np + k;
            if cache[key].is_none() {
                cache[key] = Some(spec.probabilities(i, j, k)?);
            }
        }
    }

    let mut pas = Vec::with_capacity(spec.schedule.iter().map(|g| 2 * g.pa_per_side).sum());
    let mut totals = EventTally::default();
    for (gi, g) in spec.schedule.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
        rng.set_stream(gi as u64);
        let k = g.park.unwrap_or(g.home);
        let game_id = format!("SYN{}{:06}", spec.season, gi);
        for _ in 0..g.pa_per_side {
            // visitors bat first
            for (i, j) in [(g.away, g.home), (g.home, g.away)] {
                let key = (i * nt + j) * np + k;
                let probs = cache[key].expect("filled above");
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut event = EventClass::Other;
                for (slot, ev) in SAMPLING_ORDER.iter().enumerate() {
                    acc += probs[slot];
                    if u < acc {
                        event = *ev;
                        break;
                    }
                }
                if ledger_slot[key] == usize::MAX {
                    ledger_slot[key] = matchups.len();
                    matchups.push(MatchupTally {
                        batting: i,
                        defense: j,
                        park: k,
                        counts: EventTally::default(),
                    });
                }
                matchups[ledger_slot[key]].counts.record(event);
                totals.record(event);
                pas.push(PlateAppearance {
                    game_id: game_id.clone(),
                    batting_team: TeamId(i),
                    defense_team: TeamId(j),
                    park: ParkId(k),
                    home_team: TeamId(g.home),
                    event,
                    season: spec.season,
                });
            }
        }
    }
    let teams = (0..nt).map(SyntheticSpec::team_name).collect();
    let parks = (0..np).map(|k| spec.park_name(k)).collect();
    let ds = Dataset::from_parts(pas, teams, parks)?;
    Ok((
        ds,
        TallyLedger {
            rng_algorithm: RNG_ALGORITHM.to_string(),
            rng_seed: spec.rng_seed,
            season: spec.season,
            totals,
            matchups,
        },
    ))
}

/// Every ordered (home, away) pair plays `games_per_pair` games at the home
/// park, so each team has equal home and road exposure to every opponent.
pub fn balanced_schedule(n_teams: usize, games_per_pair: usize, pa_per_side: usize) -> Vec<ScheduledGame> {
    let mut games = Vec::with_capacity(n_teams * n_teams.saturating_sub(1) * games_per_pair);
    for _ in 0..games_per_pair {
        for home in 0..n_teams {
            for away in 0..n_teams {
                if home != away {
                    games.push(ScheduledGame {
                        home,
                        away,
                        park: None,
                        pa_per_side,
                                });
                }
            }
        }
    }
    games
}

/// Parameters drawn independently from `U(lo, hi)` with a seeded ChaCha8 stream.
pub fn planted_uniform(
    seed: u64,
    n_teams: usize,
    n_parks: usize,
    team_range: (f64, f64),
    park_range: (f64, f64),
    event: EventClass,
    season: i32,
) -> ParameterSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |(lo, hi): (f64, f64), n: usize| -> Vec<f64> {
        (0..n).map(|_| if hi > lo { rng.random_range(lo..hi) } else { lo }).collect()
    };
    let b = draw(team_range, n_teams);
    let d = draw(team_range, n_teams);
    let r = draw(park_range, n_parks);
    ParameterSet { b, d, r, event, season }
}

/// How well a fit recovers planted park factors. Compares the park-factor
/// vectors, which do not depend on the gauge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryScore {
    pub pearson_r: f64,
    pub max_abs_pf_error: f64,
}

pub fn recovery_score(planted: &ParameterSet, fitted: &ParameterSet) -> Result<RecoveryScore, SynthError> {
    if planted.n_parks() != fitted.n_parks() || planted.n_teams() != fitted.n_teams() {
        return Err(SynthError::SizeMismatch(format!(
            "planted {}x{}, fitted {}x{}",
            planted.n_teams(),
            planted.n_parks(),
            fitted.n_teams(),
            fitted.n_parks()
        )));
    }
    let pf = |p: &ParameterSet| -> Vec<f64> { (0..p.n_parks()).map(|k| proposed_pf(p, ParkId(k))).collect() };
    let a = pf(planted);
    let b = pf(fitted);
    let max_abs_pf_error = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let pearson_r = match pearson(&a, &b) {
        Ok(r) => r,
        // constant vectors: identical ones agree perfectly
        Err(StatsError::ZeroVariance(_)) if max_abs_pf_error == 0.0 => 1.0,
        Err(e) => return Err(e.into()),
    };
    Ok(RecoveryScore {
        pearson_r,
        max_abs_pf_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pa_model::dataset_summary;

    fn small_spec(planted: Vec<ParameterSet>, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            n_teams: 4,
            n_parks: 5,
            season: 2017,
            planted,
            schedule: balanced_schedule(4, 2, 30),
            rng_seed: seed,
        }
    }

    #[test]
    fn zero_parameters_give_half_rate() {
        let mut spec = small_spec(vec![ParameterSet::filled(4, 5, 0.0, EventClass::Walk, 2017)], 1);
        spec.schedule = balanced_schedule(4, 20, 50);
        let (ds, ledger) = generate(&spec).unwrap();
        let n = ds.len() as f64;
        let walks = ledger.totals.get(EventClass::Walk) as f64;
        let sigma = (n * 0.25).sqrt();
        assert!((walks - 0.5 * n).abs() < 3.0 * sigma, "{walks} of {n}");
    }

    #[test]
    fn high_park_parameter_suppresses_events() {
        let mut p = ParameterSet::filled(4, 5, 0.0, EventClass::HomeRun, 2017);
        p.r[0] = 10.0;
        let (ds, ledger) = generate(&small_spec(vec![p], 3)).unwrap();
        let at_park0: u64 = ledger
            .matchups
            .iter()
            .filter(|m| m.park == 0)
            .map(|m| m.counts.get(EventClass::HomeRun))
            .sum();
        let n_park0 = ds.plate_appearances().iter().filter(|pa| pa.park.0 == 0).count();
        assert!(n_park0 > 0);
        assert!(at_park0 <= 1, "{at_park0} HR in {n_park0} PA");
    }

    #[test]
    fn same_seed_same_dataset() {
        let planted = vec![planted_uniform(9, 4, 5, (-0.5, 0.5), (-0.5, 0.5), EventClass::Single, 2017)];
        let (a, la) = generate(&small_spec(planted.clone(), 42)).unwrap();
        let (b, lb) = generate(&small_spec(planted.clone(), 42)).unwrap();
        assert_eq!(a, b);
        assert_eq!(la, lb);
        let (c, _) = generate(&small_spec(planted, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn ledger_matches_summary() {
        let planted = vec![
            planted_uniform(1, 4, 5, (-0.5, 0.5), (2.0, 3.0), EventClass::HomeRun, 2017),
            planted_uniform(2, 4, 5, (-0.5, 0.5), (1.0, 2.0), EventClass::Single, 2017),
            planted_uniform(3, 4, 5, (-0.5, 0.5), (2.0, 3.0), EventClass::Walk, 2017),
        ];
        let (ds, ledger) = generate(&small_spec(planted, 1)).unwrap();
        let summary = dataset_summary(&ds).unwrap();
        assert_eq!(summary, ledger.totals);
        let mut merged = EventTally::default();
        for m in &ledger.matchups {
            merged.merge(&m.counts);
        }
        assert_eq!(merged, summary);
    }

    #[test]
    fn overflowing_probabilities_name_the_matchup() {
        let planted = vec![
            ParameterSet::filled(4, 5, 0.0, EventClass::HomeRun, 2017),
            ParameterSet::filled(4, 5, 0.0, EventClass::Single, 2017),
            ParameterSet::filled(4, 5, 0.0, EventClass::Walk, 2017),
        ];
        match generate(&small_spec(planted, 1)) {
            Err(SynthError::ProbabilityOverflow { sum, .. }) => assert!((sum - 1.5).abs() < 1e-12),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn invalid_specs() {
        let mut spec = small_spec(vec![], 1);
        spec.schedule.push(ScheduledGame {
            home: 0,
            away: 1,
            park: Some(2),
            pa_per_side: 1,
        });
        assert!(matches!(generate(&spec), Err(SynthError::InvalidSpec(_))));
        let spec = small_spec(vec![ParameterSet::filled(3, 5, 0.0, EventClass::HomeRun, 2017)], 1);
        assert!(matches!(generate(&spec), Err(SynthError::InvalidSpec(_))));
    }

    #[test]
    fn neutral_site_games_use_neutral_park() {
        let mut spec = small_spec(vec![], 1);
        spec.schedule = vec![ScheduledGame {
            home: 1,
            away: 2,
            park: Some(4),
            pa_per_side: 3,
        }];
        let (ds, _) = generate(&spec).unwrap();
        assert!(ds.plate_appearances().iter().all(|pa| pa.park == ParkId(4)));
        assert_eq!(ds.park_name(ParkId(4)), "N00");
        assert!(ds.is_neutral(ParkId(4)));
    }

    #[test]
    fn recovery_score_examples() {
        let p = planted_uniform(5, 6, 7, (-0.3, 0.3), (-0.3, 0.3), EventClass::HomeRun, 2017);
        let s = recovery_score(&p, &p).unwrap();
        assert_eq!(s.pearson_r, 1.0);
        assert_eq!(s.max_abs_pf_error, 0.0);
        let s = recovery_score(&p, &p.gauge_shifted(0.7, -0.4)).unwrap();
        assert!((s.pearson_r - 1.0).abs() < 1e-12);
        assert!(s.max_abs_pf_error < 1e-12);
        let q = ParameterSet::filled(6, 6, 0.0, EventClass::HomeRun, 2017);
        assert!(matches!(recovery_score(&p, &q), Err(SynthError::SizeMismatch(_))));
        let z = ParameterSet::filled(6, 7, 0.0, EventClass::HomeRun, 2017);
        assert_eq!(recovery_score(&z, &z).unwrap().pearson_r, 1.0);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = small_spec(vec![ParameterSet::filled(4, 5, -3.0, EventClass::HomeRun, 2017)], 11);
        let text = serde_json::to_string(&spec).unwrap();
        let back: SyntheticSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
