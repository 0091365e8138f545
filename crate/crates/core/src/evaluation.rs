//! Log-loss scoring of the constant-rate, ratio park factor and pairwise
//! models, plus descriptive per-park statistics.
//!
//! All losses are mean base-2 log-losses (bits per plate appearance).
//! Every model's probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conventional_pf::{conventional_probability, ConventionalPfRow, PROB_EPS};
use crate::pa_model::{Dataset, EventClass, ModelError, PlateAppearance};
use crate::pairwise_fit::{FitReport, ParameterSet};
use crate::stats::{pearson, StatsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("probabilities and outcomes differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no observations to score")]
    Empty,
    #[error("probability {p} at index {index} is outside (0, 1)")]
    ProbabilityOutOfRange { index: usize, p: f64 },
    #[error("park sets differ; only proposed: {only_proposed:?}; only conventional: {only_conventional:?}")]
    ParkMismatch {
        only_proposed: Vec<String>,
        only_conventional: Vec<String>,
    },
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("{0}")]
    Stats(#[from] StatsError),
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

/// Event count over plate-appearance count.
pub fn baseline_rate(ds: &Dataset, target: EventClass) -> Result<f64, EvalError> {
    if !target.is_modeled() {
        return Err(ModelError::InvalidTarget.into());
    }
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset.into());
    }
    let hits = ds.plate_appearances().iter().filter(|pa| pa.event == target).count();
    Ok(hits as f64 / ds.len() as f64)
}

/// Mean of `-x log2 p - (1 - x) log2 (1 - p)`.
pub fn log_loss(probs: &[f64], outcomes: &[u8]) -> Result<f64, EvalError> {
    if probs.len() != outcomes.len() {
        return Err(EvalError::LengthMismatch(probs.len(), outcomes.len()));
    }
    if probs.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut total = 0.0;
    for (index, (&p, &x)) in probs.iter().zip(outcomes).enumerate() {
        if !(p > 0.0 && p < 1.0) {
            return Err(EvalError::ProbabilityOutOfRange { index, p });
        }
        total += if x != 0 { -p.log2() } else { -(1.0 - p).log2() };
    }
    Ok(total / probs.len() as f64)
}

/// Entropy in bits of a Bernoulli(`q`) variable; zero at the endpoints.
pub fn binary_entropy(q: f64) -> f64 {
    let term = |v: f64| if v > 0.0 { -v * v.log2() } else { 0.0 };
    term(q) + term(1.0 - q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Baseline,
    Conventional,
    Pairwise,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Baseline => "baseline",
            ModelKind::Conventional => "conventional",
            ModelKind::Pairwise => "pairwise",
        }
    }
}

/// Per-PA event probability for one event class.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbabilityModel {
    /// Same probability for every plate appearance.
    Baseline { p: f64 },
    /// `pf_k * p_average`, with `pf` indexed by park id; parks without a
    /// factor use 1.0.
    Conventional { p_average: f64, pf_by_park: Vec<Option<f64>> },
    /// Logistic model with parameters indexed like the dataset.
    Pairwise { params: ParameterSet },
}

impl ProbabilityModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            ProbabilityModel::Baseline { .. } => ModelKind::Baseline,
            ProbabilityModel::Conventional { .. } => ModelKind::Conventional,
            ProbabilityModel::Pairwise { .. } => ModelKind::Pairwise,
        }
    }

    pub fn predict(&self, pa: &PlateAppearance) -> f64 {
        match self {
            ProbabilityModel::Baseline { p } => clamp_prob(*p),
            ProbabilityModel::Conventional { p_average, pf_by_park } => {
                let pf = pf_by_park.get(pa.park.0).copied().flatten().unwrap_or(1.0);
                conventional_probability(pf, clamp_prob(*p_average))
            }
            ProbabilityModel::Pairwise { params } => {
                clamp_prob(params.probability(pa.batting_team.0, pa.defense_team.0, pa.park.0))
            }
        }
    }

    pub fn score(&self, ds: &Dataset, target: EventClass) -> Result<f64, EvalError> {
        if !target.is_modeled() {
            return Err(ModelError::InvalidTarget.into());
        }
        let probs: Vec<f64> = ds.plate_appearances().iter().map(|pa| self.predict(pa)).collect();
        let outcomes: Vec<u8> = ds
            .plate_appearances()
            .iter()
            .map(|pa| u8::from(pa.event == target))
            .collect();
        log_loss(&probs, &outcomes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineCell {
    pub season: i32,
    pub event: EventClass,
    /// `None` when the season has no plate appearances.
    pub log_loss: Option<f64>,
    pub p_average: Option<f64>,
    pub n_pa: usize,
}

/// Constant-rate log-loss for every (season, event) cell.
pub fn baseline_table(ds: &Dataset, seasons: &[i32], events: &[EventClass]) -> Result<Vec<BaselineCell>, EvalError> {
    let mut cells = Vec::new();
    for &season in seasons {
        let sub = ds.filter_season(season)?;
        for &event in events {
            if sub.is_empty() {
                cells.push(BaselineCell {
                    season,
                    event,
                    log_loss: None,
                    p_average: None,
                    n_pa: 0,
                });
                continue;
            }
            let p = baseline_rate(&sub, event)?;
            let ll = ProbabilityModel::Baseline { p }.score(&sub, event)?;
            cells.push(BaselineCell {
                season,
                event,
                log_loss: Some(ll),
                p_average: Some(p),
                n_pa: sub.len(),
            });
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub season: i32,
    pub event: EventClass,
    pub model: ModelKind,
    pub log_loss: f64,
    pub delta_vs_baseline: f64,
    pub n_pa: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsentCell {
    pub season: i32,
    pub event: EventClass,
    pub model: ModelKind,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub absent: Vec<AbsentCell>,
}

impl EvalReport {
    pub fn get(&self, season: i32, event: EventClass, model: ModelKind) -> Option<&EvalRow> {
        self.rows
            .iter()
            .find(|r| r.season == season && r.event == event && r.model == model)
    }

    /// Long-format rows for bar charts: one per (event, season, non-baseline
    /// model), sorted by event then season.
    pub fn plot_rows(&self) -> Vec<PlotRow> {
        let mut out: Vec<PlotRow> = self
            .rows
            .iter()
            .filter(|r| r.model != ModelKind::Baseline)
            .map(|r| PlotRow {
                event: r.event,
                season: r.season,
                model: r.model,
                delta_vs_baseline: r.delta_vs_baseline,
            })
            .collect();
        out.sort_by(|a, b| (a.event, a.season, a.model).cmp(&(b.event, b.season, b.model)));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub event: EventClass,
    pub season: i32,
    pub model: ModelKind,
    pub delta_vs_baseline: f64,
}

/// Re-indexes a fit's parameters onto `ds`'s registries by name.
fn align_fit(fit: &FitReport, ds: &Dataset) -> Result<ParameterSet, String> {
    let team_pos: BTreeMap<&str, usize> = fit.team_names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let park_pos: BTreeMap<&str, usize> = fit.park_names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut out = ParameterSet::filled(ds.n_teams(), ds.n_parks(), 0.0, fit.params.event, fit.params.season);
    let mut used_team = vec![false; ds.n_teams()];
    let mut used_park = vec![false; ds.n_parks()];
    for pa in ds.plate_appearances() {
        used_team[pa.batting_team.0] = true;
        used_team[pa.defense_team.0] = true;
        used_park[pa.park.0] = true;
    }
    for (t, name) in ds.team_names().iter().enumerate() {
        match team_pos.get(name.as_str()) {
            Some(&i) => {
                out.b[t] = fit.params.b[i];
                out.d[t] = fit.params.d[i];
            }
            None if used_team[t] => return Err(format!("fit has no parameters for team {name}")),
            None => {}
        }
    }
    for (k, name) in ds.park_names().iter().enumerate() {
        match park_pos.get(name.as_str()) {
            Some(&i) => out.r[k] = fit.params.r[i],
            None if used_park[k] => return Err(format!("fit has no parameter for park {name}")),
            None => {}
        }
    }
    Ok(out)
}

/// Scores the three models for each (season of `ds`, event) cell.
///
/// Conventional factors are matched to parks by name; parks without one
/// (neutral sites, undefined factors) use 1.0. A cell whose inputs are
/// missing is listed in `absent` with the reason.
pub fn improvement_report(
    ds: &Dataset,
    events: &[EventClass],
    conventional_pfs: &[ConventionalPfRow],
    fits: &[FitReport],
) -> Result<EvalReport, EvalError> {
    let mut report = EvalReport::default();
    for season in ds.seasons() {
        let sub = ds.filter_season(season)?;
        for &event in events {
            let p_average = baseline_rate(&sub, event)?;
            let baseline = ProbabilityModel::Baseline { p: p_average }.score(&sub, event)?;
            let mut push = |model: ModelKind, ll: f64| {
                report.rows.push(EvalRow {
                    season,
                    event,
                    model,
                    log_loss: ll,
                    delta_vs_baseline: ll - baseline,
                    n_pa: sub.len(),
                })
            };
            push(ModelKind::Baseline, baseline);

            let pf_rows: Vec<&ConventionalPfRow> = conventional_pfs
                .iter()
                .filter(|r| r.season == season && r.event == event)
                .collect();
            let conventional = if pf_rows.is_empty() {
                Err("no conventional park factors for this season and event".to_string())
            } else {
                let by_name: BTreeMap<&str, f64> = pf_rows.iter().map(|r| (r.park.as_str(), r.pf)).collect();
                let pf_by_park = sub.park_names().iter().map(|n| by_name.get(n.as_str()).copied()).collect();
                Ok(ProbabilityModel::Conventional { p_average, pf_by_park })
            };
            match conventional {
                Ok(m) => push(ModelKind::Conventional, m.score(&sub, event)?),
                Err(reason) => report.absent.push(AbsentCell {
                    season,
                    event,
                    model: ModelKind::Conventional,
                    reason,
                }),
            }

            let pairwise = match fits.iter().find(|f| f.params.season == season && f.params.event == event) {
                None => Err("no pairwise fit for this season and event".to_string()),
                Some(fit) => align_fit(fit, &sub).map(|params| ProbabilityModel::Pairwise { params }),
            };
            match pairwise {
                Ok(m) => push(ModelKind::Pairwise, m.score(&sub, event)?),
                Err(reason) => report.absent.push(AbsentCell {
                    season,
                    event,
                    model: ModelKind::Pairwise,
                    reason,
                }),
            }
        }
    }
    Ok(report)
}

/// Splits a dataset by game: every `every`-th game (in first-appearance
/// order, 1-based) goes to the holdout set.
pub fn split_holdout(ds: &Dataset, every: usize) -> Result<(Dataset, Dataset), EvalError> {
    let every = every.max(2);
    let mut order: BTreeMap<&str, usize> = BTreeMap::new();
    for pa in ds.plate_appearances() {
        let n = order.len();
        order.entry(pa.game_id.as_str()).or_insert(n);
    }
    let held = |g: &str| order[g] % every == every - 1;
    let train = ds.filter_games(|g| !held(g))?;
    let test = ds.filter_games(held)?;
    Ok((train, test))
}

/// Bases (1B=1, 2B=2, 3B=3, HR=4) plus walks per plate appearance at one park.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParkRate {
    pub park: String,
    pub n_pa: u64,
    pub bases_walks: u64,
    pub rate: f64,
}

pub fn bases_walks_per_pa(ds: &Dataset) -> Result<Vec<ParkRate>, EvalError> {
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset.into());
    }
    let mut pa = vec![0u64; ds.n_parks()];
    let mut bases = vec![0u64; ds.n_parks()];
    for p in ds.plate_appearances() {
        pa[p.park.0] += 1;
        bases[p.park.0] += match p.event {
            EventClass::Single | EventClass::Walk => 1,
            EventClass::Double => 2,
            EventClass::Triple => 3,
            EventClass::HomeRun => 4,
            EventClass::Other => 0,
        };
    }
    Ok((0..ds.n_parks())
        .filter(|&k| pa[k] > 0)
        .map(|k| ParkRate {
            park: ds.park_names()[k].clone(),
            n_pa: pa[k],
            bases_walks: bases[k],
            rate: bases[k] as f64 / pa[k] as f64,
        })
        .collect())
}

/// Coefficient of determination of the least-squares line of `y` on `x`.
pub fn r_squared(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    let r = pearson(x, y)?;
    Ok(r * r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfPair {
    pub park: String,
    pub proposed: f64,
    pub conventional: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfScatter {
    pub pairs: Vec<PfPair>,
    pub pearson_r: f64,
}

/// Pairs proposed and conventional park factors by park name (sorted by
/// name) and correlates them.
pub fn pf_scatter_table(proposed: &[(String, f64)], conventional: &[(String, f64)]) -> Result<PfScatter, EvalError> {
    let a: BTreeMap<&str, f64> = proposed.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let b: BTreeMap<&str, f64> = conventional.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let ka: BTreeSet<&str> = a.keys().copied().collect();
    let kb: BTreeSet<&str> = b.keys().copied().collect();
    if ka != kb {
        return Err(EvalError::ParkMismatch {
            only_proposed: ka.difference(&kb).map(|s| s.to_string()).collect(),
            only_conventional: kb.difference(&ka).map(|s| s.to_string()).collect(),
        });
    }
    let pairs: Vec<PfPair> = a
        .iter()
        .map(|(k, &v)| PfPair {
            park: k.to_string(),
            proposed: v,
            conventional: b[k],
        })
        .collect();
    let x: Vec<f64> = pairs.iter().map(|p| p.proposed).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.conventional).collect();
    let pearson_r = pearson(&x, &y)?;
    Ok(PfScatter { pairs, pearson_r })
}
