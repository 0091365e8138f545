//! Batch command-line front end.
//!
//! Every subcommand writes its outputs plus a `run.json` echoing the
//! effective configuration into `--out`. Outputs depend only on the inputs
//! and `--seed`; nothing time- or environment-dependent is recorded.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 numerical divergence.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::conventional_pf::{conventional_pf_table, ConventionalPfRow};
use crate::evaluation::{baseline_table, bases_walks_per_pa, improvement_report, r_squared, split_holdout};
use crate::ingest::{self, merge_rows, parse_event_file, write_canonical_csv};
use crate::pa_model::{dataset_summary, Dataset, EventClass};
use crate::pairwise_fit::{fit, FitConfig, FitError, FitReport};
use crate::synth::{generate, SyntheticSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Divergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Divergence(_) => EXIT_DIVERGENCE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Divergence(m) => write!(f, "numerical divergence: {m}"),
        }
    }
}

fn data_err<E: std::fmt::Display>(ctx: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{ctx}: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "parkfactor", version, about = "Park factor estimation and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse play-by-play event files into canonical CSV.
    Ingest(IngestArgs),
    /// Compute ratio park factors from canonical CSV.
    Pf(PfArgs),
    /// Fit the pairwise model per season and event.
    Fit(FitArgs),
    /// Score baseline, ratio and pairwise models with log-loss.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic dataset from a JSON spec.
    Synth(SynthArgs),
    /// Event counts, baseline log-loss and bases+walks per PA by park.
    Describe(DescribeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventArg {
    Hr,
    #[value(name = "1b")]
    #[serde(rename = "1b")]
    Single,
    #[value(name = "2b")]
    #[serde(rename = "2b")]
    Double,
    #[value(name = "3b")]
    #[serde(rename = "3b")]
    Triple,
    Bb,
    All,
}

fn expand_events(args: &[EventArg]) -> Vec<EventClass> {
    let mut out = Vec::new();
    for a in args {
        let add: &[EventClass] = match a {
            EventArg::Hr => &[EventClass::HomeRun],
            EventArg::Single => &[EventClass::Single],
            EventArg::Double => &[EventClass::Double],
            EventArg::Triple => &[EventClass::Triple],
            EventArg::Bb => &[EventClass::Walk],
            EventArg::All => &EventClass::MODELED,
        };
        for e in add {
            if !out.contains(e) {
                out.push(*e);
            }
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Input files (repeatable).
    #[arg(long = "input", required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Restrict to these seasons (repeatable); default all.
    #[arg(long = "season")]
    pub season: Vec<i32>,
    /// Random seed recorded in run.json; `synth` uses it in place of the
    /// spec's `rng_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct IngestArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct PfArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, num_args = 1.., default_values_t = [EventArg::All])]
    pub event: Vec<EventArg>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitOverrides {
    /// Learning rate; default 4 / number of plate appearances.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub max_epochs: usize,
    /// Convergence tolerance on the largest per-epoch parameter change.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long)]
    pub no_gauge_fix: bool,
    #[arg(long)]
    pub no_backtracking: bool,
}

impl FitOverrides {
    fn config(&self) -> FitConfig {
        FitConfig {
            learning_rate: self.alpha,
            max_epochs: self.max_epochs,
            convergence_tol: self.tol,
            gauge_fix: !self.no_gauge_fix,
            backtracking: !self.no_backtracking,
            ..FitConfig::default()
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, num_args = 1.., default_values_t = [EventArg::All])]
    pub event: Vec<EventArg>,
    #[command(flatten)]
    pub fit: FitOverrides,
    /// Fit only on games not held out (every N-th game held out).
    #[arg(long)]
    pub holdout_every: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, num_args = 1.., default_values_t = [EventArg::All])]
    pub event: Vec<EventArg>,
    /// Directory of `fit_*.json` reports or individual report files.
    #[arg(long = "fits")]
    pub fits: Vec<PathBuf>,
    /// Conventional PF CSV (`season,event,team,park,pf`); default computed from the data.
    #[arg(long)]
    pub pfs: Option<PathBuf>,
    /// Score the constant-rate model only.
    #[arg(long)]
    pub baseline_only: bool,
    /// Score only held-out games (every N-th game).
    #[arg(long)]
    pub holdout_every: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct DescribeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Per-park runs per game (`park,runs_per_game`) to correlate with bases+walks per PA.
    #[arg(long)]
    pub runs: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunRecord<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    config: &'a T,
}

fn write_run_json<T: Serialize>(out: &Path, subcommand: &'static str, config: &T) -> Result<(), CliError> {
    let rec = RunRecord {
        tool: "parkfactor",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        config,
    };
    write_json(&out.join("run.json"), &rec)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(data_err("serialize"))?;
    text.push('\n');
    fs::write(path, text).map_err(data_err(&path.display().to_string()))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<(), CliError> {
    let ctx = path.display().to_string();
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(false)
        .from_path(path)
        .map_err(data_err(&ctx))?;
    w.write_record(header).map_err(data_err(&ctx))?;
    for r in rows {
        w.serialize(r).map_err(data_err(&ctx))?;
    }
    w.flush().map_err(data_err(&ctx))
}

fn write_table<T: Serialize>(out: &Path, stem: &str, format: Format, rows: &[T], header: &[&str]) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(&out.join(format!("{stem}.csv")), rows, header),
        Format::Json => write_json(&out.join(format!("{stem}.json")), &rows),
    }
}

fn prepare_out(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out.display())))
}

fn load_dataset(common: &Common) -> Result<Dataset, CliError> {
    let mut rows = Vec::new();
    for path in &common.input {
        let f = fs::File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let mut r = ingest::read_canonical_rows(std::io::BufReader::new(f)).map_err(data_err(&path.display().to_string()))?;
        rows.append(&mut r);
    }
    if !common.season.is_empty() {
        rows.retain(|r| common.season.contains(&r.season));
    }
    let ds = Dataset::from_rows(&rows).map_err(data_err("dataset"))?;
    if ds.is_empty() {
        return Err(CliError::Data("no plate appearances after filtering".into()));
    }
    Ok(ds)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("parkfactor: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command) -> Result<i32, CliError> {
    match cmd {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Pf(a) => cmd_pf(a).map(|_| EXIT_OK),
        Command::Fit(a) => cmd_fit(a).map(|_| EXIT_OK),
        Command::Evaluate(a) => cmd_evaluate(a).map(|_| EXIT_OK),
        Command::Synth(a) => cmd_synth(a).map(|_| EXIT_OK),
        Command::Describe(a) => cmd_describe(a).map(|_| EXIT_OK),
    }
}

fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            files.extend(entries);
        } else if p.is_file() {
            files.push(p.clone());
        } else {
            return Err(CliError::Usage(format!("{}: no such file or directory", p.display())));
        }
    }
    if files.is_empty() {
        return Err(CliError::Usage("no input files".into()));
    }
    Ok(files)
}

/// Season from a leading four-digit file name (`2017ANA.EVA`) or the first
/// `info,date` record.
fn infer_season(path: &Path, text: &str) -> Option<i32> {
    let name = path.file_name()?.to_string_lossy();
    if name.len() >= 4 && name[..4].chars().all(|c| c.is_ascii_digit()) {
        return name[..4].parse().ok();
    }
    text.lines()
        .find_map(|l| l.strip_prefix("info,date,"))
        .and_then(|d| d.get(..4))
        .and_then(|y| y.parse().ok())
}

pub fn cmd_ingest(a: &IngestArgs) -> Result<i32, CliError> {
    let c = &a.common;
    let files = expand_inputs(&c.input)?;
    if c.season.len() > 1 {
        return Err(CliError::Usage("ingest takes at most one --season".into()));
    }
    prepare_out(&c.out)?;
    let mut per_file = Vec::new();
    let mut report = String::new();
    let mut malformed = 0usize;
    for path in &files {
        let label = path.display().to_string();
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                malformed += 1;
                report.push_str(&format!("{label}: unreadable: {e}\n"));
                continue;
            }
        };
        let Some(season) = c.season.first().copied().or_else(|| infer_season(path, &text)) else {
            malformed += 1;
            report.push_str(&format!("{label}: malformed: cannot determine season\n"));
            continue;
        };
        match parse_event_file(text.as_bytes(), season) {
            Ok(parsed) => {
                report.push_str(&parsed.error_report(&label));
                for (rec, n) in &parsed.skipped_records {
                    report.push_str(&format!("{label}: skipped {n} unknown `{rec}` records\n"));
                }
                per_file.push(parsed.rows);
            }
            Err(e) => {
                malformed += 1;
                report.push_str(&format!("{label}: malformed: {e}\n"));
            }
        }
    }
    let rows = merge_rows(per_file);
    let f = fs::File::create(c.out.join("pa.csv")).map_err(data_err("pa.csv"))?;
    write_canonical_csv(&rows, std::io::BufWriter::new(f)).map_err(data_err("pa.csv"))?;
    fs::write(c.out.join("errors.txt"), &report).map_err(data_err("errors.txt"))?;
    write_run_json(&c.out, "ingest", a)?;
    eprintln!("parkfactor: {} rows from {} files, {} malformed", rows.len(), files.len(), malformed);
    Ok(if malformed == 0 { EXIT_OK } else { EXIT_DATA })
}

const CONVENTIONAL_HEADER: [&str; 5] = ["season", "event", "team", "park", "pf"];
const PROPOSED_HEADER: [&str; 5] = ["season", "event", "park", "r", "pf_proposed"];

fn conventional_rows(ds: &Dataset, events: &[EventClass]) -> Result<Vec<ConventionalPfRow>, CliError> {
    let mut all = Vec::new();
    for season in ds.seasons() {
        let sub = ds.filter_season(season).map_err(data_err("season"))?;
        for &ev in events {
            let (rows, skipped) = conventional_pf_table(&sub, season, ev).map_err(data_err("conventional pf"))?;
            for (team, why) in skipped {
                eprintln!("parkfactor: {season} {ev}: team {team} excluded: {why}");
            }
            all.extend(rows);
        }
    }
    Ok(all)
}

pub fn cmd_pf(a: &PfArgs) -> Result<(), CliError> {
    let c = &a.common;
    let ds = load_dataset(c)?;
    prepare_out(&c.out)?;
    let rows = conventional_rows(&ds, &expand_events(&a.event))?;
    write_table(&c.out, "pf_conventional", c.format, &rows, &CONVENTIONAL_HEADER)?;
    write_run_json(&c.out, "pf", a)
}

pub fn fit_file_name(season: i32, event: EventClass) -> String {
    format!("fit_{season}_{}.json", event.code())
}

pub fn cmd_fit(a: &FitArgs) -> Result<(), CliError> {
    let c = &a.common;
    let ds = load_dataset(c)?;
    prepare_out(&c.out)?;
    let cfg = a.fit.config();
    let mut pf_rows = Vec::new();
    for season in ds.seasons() {
        let mut sub = ds.filter_season(season).map_err(data_err("season"))?;
        if let Some(every) = a.holdout_every {
            sub = split_holdout(&sub, every).map_err(data_err("holdout"))?.0;
        }
        for ev in expand_events(&a.event) {
            let report = fit(&sub, ev, &cfg).map_err(|e| match e {
                FitError::Diverged { .. } | FitError::NonFinite { .. } => {
                    CliError::Divergence(format!("{season} {ev}: {e}"))
                }
                FitError::InvalidConfig(_) => CliError::Usage(e.to_string()),
                other => CliError::Data(format!("{season} {ev}: {other}")),
            })?;
            for w in &report.warnings {
                eprintln!("parkfactor: {season} {ev}: {w}");
            }
            if !report.converged {
                eprintln!("parkfactor: {season} {ev}: not converged after {} epochs", report.epochs_run);
            }
            write_json(&c.out.join(fit_file_name(season, ev)), &report)?;
            pf_rows.extend(report.pf_rows());
        }
    }
    write_table(&c.out, "pf_proposed", c.format, &pf_rows, &PROPOSED_HEADER)?;
    #[derive(Serialize)]
    struct Effective<'a> {
        args: &'a FitArgs,
        fit_config: FitConfig,
    }
    write_run_json(
        &c.out,
        "fit",
        &Effective {
            args: a,
            fit_config: cfg,
        },
    )
}

fn read_fit_reports(paths: &[PathBuf]) -> Result<Vec<FitReport>, CliError> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut v: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    let n = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                    n.starts_with("fit_") && n.ends_with(".json")
                })
                .collect();
            v.sort();
            files.extend(v);
        } else {
            files.push(p.clone());
        }
    }
    files
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(data_err(&p.display().to_string()))
        })
        .collect()
}

fn read_pf_csv(path: &Path) -> Result<Vec<ConventionalPfRow>, CliError> {
    let ctx = path.display().to_string();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Usage(format!("{ctx}: {e}")))?;
    let header: Vec<String> = rdr.headers().map_err(data_err(&ctx))?.iter().map(String::from).collect();
    if header != CONVENTIONAL_HEADER {
        return Err(CliError::Data(format!("{ctx}: expected header {}", CONVENTIONAL_HEADER.join(","))));
    }
    rdr.deserialize().map(|r| r.map_err(data_err(&ctx))).collect()
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> Result<(), CliError> {
    let c = &a.common;
    let mut ds = load_dataset(c)?;
    if let Some(every) = a.holdout_every {
        ds = split_holdout(&ds, every).map_err(data_err("holdout"))?.1;
    }
    prepare_out(&c.out)?;
    let events = expand_events(&a.event);
    let (pfs, fits) = if a.baseline_only {
        (Vec::new(), Vec::new())
    } else {
        let pfs = match &a.pfs {
            Some(p) => read_pf_csv(p)?,
            None => conventional_rows(&ds, &events)?,
        };
        (pfs, read_fit_reports(&a.fits)?)
    };
    let report = improvement_report(&ds, &events, &pfs, &fits).map_err(data_err("evaluate"))?;
    let mut rows = report.rows.clone();
    rows.sort_by(|x, y| (x.season, x.event, x.model).cmp(&(y.season, y.event, y.model)));
    write_table(
        &c.out,
        "eval",
        c.format,
        &rows,
        &["season", "event", "model", "log_loss", "delta_vs_baseline", "n_pa"],
    )?;
    write_table(
        &c.out,
        "eval_plot",
        c.format,
        &report.plot_rows(),
        &["event", "season", "model", "delta_vs_baseline"],
    )?;
    write_table(&c.out, "eval_absent", c.format, &report.absent, &["season", "event", "model", "reason"])?;
    for cell in &report.absent {
        eprintln!("parkfactor: {} {} {}: {}", cell.season, cell.event, cell.model.label(), cell.reason);
    }
    write_run_json(&c.out, "evaluate", a)
}

pub fn cmd_synth(a: &SynthArgs) -> Result<(), CliError> {
    let c = &a.common;
    if c.input.len() != 1 {
        return Err(CliError::Usage("synth takes exactly one --input spec".into()));
    }
    let text = fs::read_to_string(&c.input[0]).map_err(|e| CliError::Usage(format!("{}: {e}", c.input[0].display())))?;
    let mut spec: SyntheticSpec = serde_json::from_str(&text).map_err(data_err("spec"))?;
    if let Some(seed) = c.seed {
        spec.rng_seed = seed;
    }
    prepare_out(&c.out)?;
    let (ds, ledger) = generate(&spec).map_err(data_err("synth"))?;
    let f = fs::File::create(c.out.join("pa.csv")).map_err(data_err("pa.csv"))?;
    write_canonical_csv(&ds.to_rows(), std::io::BufWriter::new(f)).map_err(data_err("pa.csv"))?;
    write_json(&c.out.join("ledger.json"), &ledger)?;
    write_run_json(&c.out, "synth", a)
}

#[derive(Serialize)]
struct SummaryRow {
    season: i32,
    n_pa: u64,
    hr: u64,
    #[serde(rename = "1b")]
    single: u64,
    #[serde(rename = "2b")]
    double: u64,
    #[serde(rename = "3b")]
    triple: u64,
    bb: u64,
    other: u64,
}

#[derive(Serialize)]
struct SeasonParkRate {
    season: i32,
    park: String,
    n_pa: u64,
    bases_walks: u64,
    rate: f64,
}

pub fn cmd_describe(a: &DescribeArgs) -> Result<(), CliError> {
    let c = &a.common;
    let ds = load_dataset(c)?;
    prepare_out(&c.out)?;
    let mut summary = Vec::new();
    let mut rates = Vec::new();
    for season in ds.seasons() {
        let sub = ds.filter_season(season).map_err(data_err("season"))?;
        let t = dataset_summary(&sub).map_err(data_err("summary"))?;
        summary.push(SummaryRow {
            season,
            n_pa: t.total,
            hr: t.get(EventClass::HomeRun),
            single: t.get(EventClass::Single),
            double: t.get(EventClass::Double),
            triple: t.get(EventClass::Triple),
            bb: t.get(EventClass::Walk),
            other: t.get(EventClass::Other),
        });
        for r in bases_walks_per_pa(&sub).map_err(data_err("bases"))? {
            rates.push(SeasonParkRate {
                season,
                park: r.park,
                n_pa: r.n_pa,
                bases_walks: r.bases_walks,
                rate: r.rate,
            });
        }
    }
    write_table(
        &c.out,
        "summary",
        c.format,
        &summary,
        &["season", "n_pa", "hr", "1b", "2b", "3b", "bb", "other"],
    )?;
    write_table(
        &c.out,
        "bases_walks",
        c.format,
        &rates,
        &["season", "park", "n_pa", "bases_walks", "rate"],
    )?;
    let cells = baseline_table(&ds, &ds.seasons(), &EventClass::MODELED).map_err(data_err("baseline"))?;
    write_table(
        &c.out,
        "baseline",
        c.format,
        &cells,
        &["season", "event", "log_loss", "p_average", "n_pa"],
    )?;

    if let Some(runs_path) = &a.runs {
        let ctx = runs_path.display().to_string();
        let mut rdr = csv::Reader::from_path(runs_path).map_err(|e| CliError::Usage(format!("{ctx}: {e}")))?;
        let mut by_park = std::collections::BTreeMap::new();
        for rec in rdr.deserialize::<(String, f64)>() {
            let (park, runs) = rec.map_err(data_err(&ctx))?;
            by_park.insert(park, runs);
        }
        // pooled over the selected seasons
        let pooled = bases_walks_per_pa(&ds).map_err(data_err("bases"))?;
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for r in &pooled {
            if let Some(&runs) = by_park.get(&r.park) {
                x.push(r.rate);
                y.push(runs);
            }
        }
        let r2 = r_squared(&x, &y).map_err(data_err("r_squared"))?;
        #[derive(Serialize)]
        struct R2 {
            n_parks: usize,
            r_squared: f64,
        }
        write_json(&c.out.join("r_squared.json"), &R2 { n_parks: x.len(), r_squared: r2 })?;
        let _ = writeln!(std::io::stderr(), "parkfactor: R^2 = {r2:.4} over {} parks", x.len());
    }
    write_run_json(&c.out, "describe", a)
}
