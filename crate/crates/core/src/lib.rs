//! Ballpark effect estimation from per-plate-appearance data.
//!
//! Two park factor estimates are provided: the ratio of home to road
//! per-game event rates ([`conventional_pf`]) and a pairwise logistic model
//! in which every plate appearance is a match-up of batting team, defending
//! team and park ([`pairwise_fit`]). [`evaluation`] scores both against a
//! constant-rate baseline with base-2 log-loss.

pub mod cli;
pub mod conventional_pf;
pub mod evaluation;
pub mod ingest;
pub mod pa_model;
pub mod pairwise_fit;
pub mod stats;
pub mod synth;

pub use conventional_pf::{aggregate_home_road, conventional_pf, conventional_probability, PROB_EPS};
pub use evaluation::{baseline_rate, improvement_report, log_loss, EvalReport, ModelKind};
pub use ingest::{classify_play, parse_event_file, read_canonical_csv, write_canonical_csv};
pub use pa_model::{binary_outcome, dataset_summary, CanonicalRow, Dataset, EventClass, ParkId, PlateAppearance, TeamId};
pub use pairwise_fit::{fit, gauge_normalize, predict_probability, proposed_pf, FitConfig, FitReport, ParameterSet};
pub use synth::{generate, recovery_score, SyntheticSpec};
