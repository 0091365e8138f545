//! Pairwise logistic park model fitted by full-batch steepest descent.
//!
//! A plate appearance between batting team `i`, defending team `j` at park
//! `k` produces the target event with probability
//! `p = 1 / (1 + exp(-(b_i - d_j - r_k)))`. Parameters minimise the summed
//! squared error `J = sum (p - x)^2` over all plate appearances, and each
//! park's `r_k` is reported as a park factor relative to the average park.
//!
//! Only `b - d - r` is identified, so results are gauge-fixed to
//! `mean(d) = mean(r) = 0` unless disabled.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pa_model::{Dataset, EventClass, ModelError, ParkId};

/// Parks with fewer plate appearances than this are flagged in fit reports.
pub const LOW_CONFIDENCE_PA: u64 = 500;

/// Consecutive loss increases (without backtracking) treated as divergence.
const DIVERGENCE_RUN: usize = 5;

/// Maximum consecutive step halvings before the fit is declared stalled.
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("fit diverged with learning rate {alpha:e}: loss increased for {epochs} consecutive epochs")]
    Diverged { alpha: f64, epochs: usize },
    #[error("non-finite loss at epoch {epoch} with learning rate {alpha:e}")]
    NonFinite { alpha: f64, epoch: usize },
    #[error("plate appearance {index} references {what} {id} outside the parameter set")]
    DataCorruption { index: usize, what: &'static str, id: usize },
    #[error("dataset mixes seasons {0:?}; fit one season at a time")]
    MixedSeasons(Vec<i32>),
    #[error("invalid fit config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    /// Batting strength per team.
    pub b: Vec<f64>,
    /// Defense strength per team.
    pub d: Vec<f64>,
    /// Park parameter; lower values favour batters.
    pub r: Vec<f64>,
    pub event: EventClass,
    pub season: i32,
}

impl ParameterSet {
    pub fn filled(n_teams: usize, n_parks: usize, value: f64, event: EventClass, season: i32) -> Self {
        ParameterSet {
            b: vec![value; n_teams],
            d: vec![value; n_teams],
            r: vec![value; n_parks],
            event,
            season,
        }
    }

    pub fn n_teams(&self) -> usize {
        self.b.len()
    }

    pub fn n_parks(&self) -> usize {
        self.r.len()
    }

    /// Probability for batting team `i`, defense `j`, park `k`.
    pub fn probability(&self, i: usize, j: usize, k: usize) -> f64 {
        predict_probability(self.b[i], self.d[j], self.r[k])
    }

    pub fn is_finite(&self) -> bool {
        self.b.iter().chain(&self.d).chain(&self.r).all(|v| v.is_finite())
    }

    /// Moves along the gauge orbit `b + c1, d + c2, r + (c1 - c2)`.
    pub fn gauge_shifted(&self, c1: f64, c2: f64) -> ParameterSet {
        let mut p = self.clone();
        p.b.iter_mut().for_each(|v| *v += c1);
        p.d.iter_mut().for_each(|v| *v += c2);
        p.r.iter_mut().for_each(|v| *v += c1 - c2);
        p
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Numerically stable logistic function.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn predict_probability(b_i: f64, d_j: f64, r_k: f64) -> f64 {
    logistic(b_i - d_j - r_k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gradients {
    pub b: Vec<f64>,
    pub d: Vec<f64>,
    pub r: Vec<f64>,
}

impl Gradients {
    fn zeros(n_teams: usize, n_parks: usize) -> Self {
        Gradients {
            b: vec![0.0; n_teams],
            d: vec![0.0; n_teams],
            r: vec![0.0; n_parks],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.b
            .iter()
            .chain(&self.d)
            .chain(&self.r)
            .fold(0.0, |m, g| m.max(g.abs()))
    }
}

fn check_indices(params: &ParameterSet, ds: &Dataset) -> Result<(), FitError> {
    for (index, pa) in ds.plate_appearances().iter().enumerate() {
        for (what, id, bound) in [
            ("batting team", pa.batting_team.0, params.b.len()),
            ("defense team", pa.defense_team.0, params.d.len()),
            ("park", pa.park.0, params.r.len()),
        ] {
            if id >= bound {
                return Err(FitError::DataCorruption { index, what, id });
            }
        }
    }
    Ok(())
}

/// Summed squared error over every plate appearance, in dataset order.
pub fn loss(params: &ParameterSet, ds: &Dataset, target: EventClass) -> Result<f64, FitError> {
    if !target.is_modeled() {
        return Err(ModelError::InvalidTarget.into());
    }
    check_indices(params, ds)?;
    let mut j = 0.0;
    for pa in ds.plate_appearances() {
        let p = params.probability(pa.batting_team.0, pa.defense_team.0, pa.park.0);
        let x = f64::from(u8::from(pa.event == target));
        j += (p - x) * (p - x);
    }
    Ok(j)
}

/// Partial derivatives of the squared-error loss, accumulated in dataset order.
///
/// Per plate appearance `g = 2 (p - x) p (1 - p)` is added to `b_i` and
/// subtracted from `d_j` and `r_k`.
pub fn gradients(params: &ParameterSet, ds: &Dataset, target: EventClass) -> Result<Gradients, FitError> {
    if !target.is_modeled() {
        return Err(ModelError::InvalidTarget.into());
    }
    check_indices(params, ds)?;
    let mut g = Gradients::zeros(params.n_teams(), params.n_parks());
    for pa in ds.plate_appearances() {
        let (i, j, k) = (pa.batting_team.0, pa.defense_team.0, pa.park.0);
        let p = params.probability(i, j, k);
        let x = f64::from(u8::from(pa.event == target));
        let term = 2.0 * (p - x) * p * (1.0 - p);
        g.b[i] += term;
        g.d[j] -= term;
        g.r[k] -= term;
    }
    Ok(g)
}

/// Plate appearances collapsed to distinct (batting, defense, park) match-ups.
///
/// Loss and gradient depend on the data only through each match-up's count
/// `n` and event total `s`: `sum (p - x)^2 = n p^2 - 2 p s + s`. Match-ups
/// are kept in first-appearance order so the summation order is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchupTable {
    cells: Vec<Matchup>,
    n_teams: usize,
    n_parks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Matchup {
    batting: usize,
    defense: usize,
    park: usize,
    n: f64,
    s: f64,
}

impl MatchupTable {
    pub fn build(ds: &Dataset, target: EventClass) -> Result<Self, FitError> {
        if !target.is_modeled() {
            return Err(ModelError::InvalidTarget.into());
        }
        let (nt, np) = (ds.n_teams(), ds.n_parks());
        let mut slot: Vec<u32> = vec![u32::MAX; nt * nt * np];
        let mut cells: Vec<Matchup> = Vec::new();
        for pa in ds.plate_appearances() {
            let (i, j, k) = (pa.batting_team.0, pa.defense_team.0, pa.park.0);
            let key = (i * nt + j) * np + k;
            if slot[key] == u32::MAX {
                slot[key] = cells.len() as u32;
                cells.push(Matchup {
                    batting: i,
                    defense: j,
                    park: k,
                    n: 0.0,
                    s: 0.0,
                });
            }
            let c = &mut cells[slot[key] as usize];
            c.n += 1.0;
            if pa.event == target {
                c.s += 1.0;
            }
        }
        Ok(MatchupTable {
            cells,
            n_teams: nt,
            n_parks: np,
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn loss(&self, params: &ParameterSet) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let p = params.probability(c.batting, c.defense, c.park);
                c.n * p * p - 2.0 * p * c.s + c.s
            })
            .sum()
    }

    pub fn gradients(&self, params: &ParameterSet) -> Gradients {
        let mut g = Gradients::zeros(self.n_teams, self.n_parks);
        for c in &self.cells {
            let p = params.probability(c.batting, c.defense, c.park);
            let term = 2.0 * p * (1.0 - p) * (c.n * p - c.s);
            g.b[c.batting] += term;
            g.d[c.defense] -= term;
            g.r[c.park] -= term;
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Step size; `None` means `4 / N_PA`.
    pub learning_rate: Option<f64>,
    pub max_epochs: usize,
    /// Convergence when the largest absolute parameter change in an epoch
    /// falls below this.
    pub convergence_tol: f64,
    pub init_value: f64,
    pub gauge_fix: bool,
    /// Halve the step and retry whenever a step would raise the loss.
    pub backtracking: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            learning_rate: None,
            max_epochs: 10_000,
            convergence_tol: 1e-7,
            init_value: 0.0,
            gauge_fix: true,
            backtracking: true,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<(), FitError> {
        if let Some(a) = self.learning_rate {
            if !(a > 0.0 && a.is_finite()) {
                return Err(FitError::InvalidConfig(format!("learning rate must be > 0, got {a}")));
            }
        }
        if !(self.convergence_tol > 0.0) {
            return Err(FitError::InvalidConfig(format!(
                "convergence tolerance must be > 0, got {}",
                self.convergence_tol
            )));
        }
        if !self.init_value.is_finite() {
            return Err(FitError::InvalidConfig("init value must be finite".into()));
        }
        Ok(())
    }

    pub fn resolved_learning_rate(&self, n_pa: usize) -> f64 {
        self.learning_rate.unwrap_or(4.0 / n_pa.max(1) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: ParameterSet,
    pub team_names: Vec<String>,
    pub park_names: Vec<String>,
    pub config: FitConfig,
    /// Step size the fit started with, after resolving the default.
    pub initial_learning_rate: f64,
    pub final_learning_rate: f64,
    pub epochs_run: usize,
    pub final_loss: f64,
    /// Loss before the first epoch followed by the loss after each epoch.
    pub loss_trace: Vec<f64>,
    pub converged: bool,
    pub n_pa: usize,
    pub park_pa_counts: Vec<u64>,
    pub low_confidence_parks: Vec<String>,
    pub warnings: Vec<String>,
}

impl FitReport {
    /// Park factor of every park, in park-id order.
    pub fn park_factors(&self) -> Vec<f64> {
        (0..self.params.n_parks())
            .map(|k| proposed_pf(&self.params, ParkId(k)))
            .collect()
    }

    pub fn pf_rows(&self) -> Vec<ProposedPfRow> {
        self.park_factors()
            .into_iter()
            .enumerate()
            .map(|(k, pf)| ProposedPfRow {
                season: self.params.season,
                event: self.params.event,
                park: self.park_names[k].clone(),
                r: self.params.r[k],
                pf_proposed: pf,
            })
            .collect()
    }
}

/// One row of the proposed PF export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposedPfRow {
    pub season: i32,
    pub event: EventClass,
    pub park: String,
    pub r: f64,
    pub pf_proposed: f64,
}

fn single_season(ds: &Dataset) -> Result<i32, FitError> {
    let seasons = ds.seasons();
    match seasons.as_slice() {
        [] => Err(ModelError::EmptyDataset.into()),
        [s] => Ok(*s),
        _ => Err(FitError::MixedSeasons(seasons)),
    }
}

/// Fits batting, defense and park parameters for one event on a
/// single-season dataset.
pub fn fit(ds: &Dataset, target: EventClass, cfg: &FitConfig) -> Result<FitReport, FitError> {
    if !target.is_modeled() {
        return Err(ModelError::InvalidTarget.into());
    }
    cfg.validate()?;
    let season = single_season(ds)?;
    let (nt, np) = (ds.n_teams(), ds.n_parks());

    let mut warnings = Vec::new();
    let mut bats = vec![false; nt];
    let mut fields = vec![false; nt];
    let mut park_pa_counts = vec![0u64; np];
    for pa in ds.plate_appearances() {
        bats[pa.batting_team.0] = true;
        fields[pa.defense_team.0] = true;
        park_pa_counts[pa.park.0] += 1;
    }
    for t in 0..nt {
        if !bats[t] {
            warnings.push(format!("team {} never bats", ds.team_names()[t]));
        }
        if !fields[t] {
            warnings.push(format!("team {} never defends", ds.team_names()[t]));
        }
    }
    let low_confidence_parks = park_pa_counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c < LOW_CONFIDENCE_PA)
        .map(|(k, _)| ds.park_names()[k].clone())
        .collect();

    let table = MatchupTable::build(ds, target)?;
    let initial_alpha = cfg.resolved_learning_rate(ds.len());
    let mut alpha = initial_alpha;
    let mut params = ParameterSet::filled(nt, np, cfg.init_value, target, season);
    let mut current = table.loss(&params);
    let mut loss_trace = vec![current];
    let mut converged = false;
    let mut increases = 0;
    let mut halvings = 0;
    let mut epochs_run = 0;

    while epochs_run < cfg.max_epochs {
        epochs_run += 1;
        let grad = table.gradients(&params);
        let mut candidate = params.clone();
        let step = |v: &mut [f64], g: &[f64]| v.iter_mut().zip(g).for_each(|(p, g)| *p -= alpha * g);
        step(&mut candidate.b, &grad.b);
        step(&mut candidate.d, &grad.d);
        step(&mut candidate.r, &grad.r);
        let next = table.loss(&candidate);
        if !next.is_finite() || !candidate.is_finite() {
            if cfg.backtracking && halvings < MAX_HALVINGS {
                alpha *= 0.5;
                halvings += 1;
                loss_trace.push(current);
                continue;
            }
            return Err(FitError::NonFinite { alpha, epoch: epochs_run });
        }
        if next > current && cfg.backtracking {
            if halvings >= MAX_HALVINGS {
                // no representable step lowers the loss any further
                converged = true;
                break;
            }
            alpha *= 0.5;
            halvings += 1;
            loss_trace.push(current);
            continue;
        }
        halvings = 0;
        if next > current {
            increases += 1;
            if increases >= DIVERGENCE_RUN {
                return Err(FitError::Diverged {
                    alpha,
                    epochs: increases,
                });
            }
        } else {
            increases = 0;
        }
        let max_change = alpha * grad.max_abs();
        params = candidate;
        current = next;
        loss_trace.push(current);
        if max_change < cfg.convergence_tol {
            if !cfg.backtracking && current > loss_trace[0] {
                // stalled on a saturated plateau above the starting loss
                return Err(FitError::Diverged {
                    alpha,
                    epochs: epochs_run,
                });
            }
            converged = true;
            break;
        }
    }

    if cfg.gauge_fix {
        params = gauge_normalize(&params);
    }
    let final_loss = table.loss(&params);

    Ok(FitReport {
        params,
        team_names: ds.team_names().to_vec(),
        park_names: ds.park_names().to_vec(),
        config: cfg.clone(),
        initial_learning_rate: initial_alpha,
        final_learning_rate: alpha,
        epochs_run,
        final_loss,
        loss_trace,
        converged,
        n_pa: ds.len(),
        park_pa_counts,
        low_confidence_parks,
        warnings,
    })
}

/// Shifts parameters so `mean(d) = mean(r) = 0`, folding both shifts into `b`.
pub fn gauge_normalize(params: &ParameterSet) -> ParameterSet {
    let md = mean(&params.d);
    let mr = mean(&params.r);
    let mut out = params.clone();
    out.b.iter_mut().for_each(|v| *v -= md + mr);
    out.d.iter_mut().for_each(|v| *v -= md);
    out.r.iter_mut().for_each(|v| *v -= mr);
    out
}

/// Park factor of park `k`: the modeled probability for an average batting
/// team against an average defense at `k`, over the same at an average park.
pub fn proposed_pf(params: &ParameterSet, k: ParkId) -> f64 {
    let base = mean(&params.b) - mean(&params.d);
    logistic(base - params.r[k.0]) / logistic(base - mean(&params.r))
}
