//! Python bindings for `parkfactor`.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use parkfactor::conventional_pf::conventional_pf_table;
use parkfactor::evaluation::{self, improvement_report};
use parkfactor::ingest::{self, PlayOutcome};
use parkfactor::pa_model::{dataset_summary, Dataset, EventClass};
use parkfactor::pairwise_fit::{self, FitConfig, FitReport, ParameterSet};
use parkfactor::synth::{self, SyntheticSpec};
use parkfactor::ParkId;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_event(code: &str) -> PyResult<EventClass> {
    let ev: EventClass = code.parse().map_err(value_err)?;
    if !ev.is_modeled() {
        return Err(PyValueError::new_err("event must be one of HR, 1B, 2B, 3B, BB"));
    }
    Ok(ev)
}

#[pyclass(name = "Dataset", module = "parkfactor_py", frozen)]
pub struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        let f = std::fs::File::open(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        let inner = ingest::read_canonical_csv(std::io::BufReader::new(f)).map_err(value_err)?;
        Ok(PyDataset { inner })
    }

    #[staticmethod]
    fn from_csv_text(text: &str) -> PyResult<Self> {
        let inner = ingest::read_canonical_csv(text.as_bytes()).map_err(value_err)?;
        Ok(PyDataset { inner })
    }

    /// Parses a play-by-play event file; returns the dataset and the row errors.
    #[staticmethod]
    fn from_event_text(text: &str, season: i32) -> PyResult<(Self, Vec<String>)> {
        let parsed = ingest::parse_event_file(text.as_bytes(), season).map_err(value_err)?;
        let inner = Dataset::from_rows(&parsed.rows).map_err(value_err)?;
        let errors = parsed.row_errors.iter().map(ToString::to_string).collect();
        Ok((PyDataset { inner }, errors))
    }

    fn to_csv_text(&self) -> String {
        String::from_utf8(ingest::canonical_csv_bytes(&self.inner.to_rows())).expect("canonical CSV is UTF-8")
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn team_names(&self) -> Vec<String> {
        self.inner.team_names().to_vec()
    }

    #[getter]
    fn park_names(&self) -> Vec<String> {
        self.inner.park_names().to_vec()
    }

    fn seasons(&self) -> Vec<i32> {
        self.inner.seasons()
    }

    fn filter_season(&self, season: i32) -> PyResult<Self> {
        Ok(PyDataset {
            inner: self.inner.filter_season(season).map_err(value_err)?,
        })
    }

    /// Event counts keyed by canonical code plus `total`.
    fn summary(&self) -> PyResult<BTreeMap<String, u64>> {
        let t = dataset_summary(&self.inner).map_err(value_err)?;
        let mut out: BTreeMap<String, u64> = EventClass::ALL.iter().map(|e| (e.code().to_string(), t.get(*e))).collect();
        out.insert("total".into(), t.total);
        Ok(out)
    }

    fn baseline_rate(&self, event: &str) -> PyResult<f64> {
        evaluation::baseline_rate(&self.inner, parse_event(event)?).map_err(value_err)
    }

    /// Ratio park factors by park name for a single-season dataset.
    fn conventional_pfs(&self, event: &str) -> PyResult<BTreeMap<String, f64>> {
        let season = match self.inner.seasons().as_slice() {
            [s] => *s,
            other => return Err(PyValueError::new_err(format!("expected one season, found {other:?}"))),
        };
        let (rows, _) = conventional_pf_table(&self.inner, season, parse_event(event)?).map_err(value_err)?;
        Ok(rows.into_iter().map(|r| (r.park, r.pf)).collect())
    }

    /// `(park, n_pa, rate)` for every park with plate appearances.
    fn bases_walks_per_pa(&self) -> PyResult<Vec<(String, u64, f64)>> {
        let rows = evaluation::bases_walks_per_pa(&self.inner).map_err(value_err)?;
        Ok(rows.into_iter().map(|r| (r.park, r.n_pa, r.rate)).collect())
    }
}

#[pyclass(name = "FitResult", module = "parkfactor_py", frozen)]
pub struct PyFitResult {
    inner: FitReport,
}

#[pymethods]
impl PyFitResult {
    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.params.b.clone()
    }

    #[getter]
    fn d(&self) -> Vec<f64> {
        self.inner.params.d.clone()
    }

    #[getter]
    fn r(&self) -> Vec<f64> {
        self.inner.params.r.clone()
    }

    #[getter]
    fn team_names(&self) -> Vec<String> {
        self.inner.team_names.clone()
    }

    #[getter]
    fn park_names(&self) -> Vec<String> {
        self.inner.park_names.clone()
    }

    #[getter]
    fn loss_trace(&self) -> Vec<f64> {
        self.inner.loss_trace.clone()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn epochs_run(&self) -> usize {
        self.inner.epochs_run
    }

    #[getter]
    fn final_loss(&self) -> f64 {
        self.inner.final_loss
    }

    #[getter]
    fn event(&self) -> &'static str {
        self.inner.params.event.code()
    }

    #[getter]
    fn season(&self) -> i32 {
        self.inner.params.season
    }

    fn park_factors(&self) -> BTreeMap<String, f64> {
        self.inner
            .park_names
            .iter()
            .cloned()
            .zip(self.inner.park_factors())
            .collect()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyFitResult {
            inner: serde_json::from_str(text).map_err(value_err)?,
        })
    }
}

#[pyfunction]
fn predict_probability(b: f64, d: f64, r: f64) -> f64 {
    pairwise_fit::predict_probability(b, d, r)
}

/// Park factor of park `k` from parameter vectors.
#[pyfunction]
fn proposed_pf(b: Vec<f64>, d: Vec<f64>, r: Vec<f64>, k: usize) -> PyResult<f64> {
    if k >= r.len() {
        return Err(PyValueError::new_err(format!("park index {k} out of range")));
    }
    let params = ParameterSet {
        b,
        d,
        r,
        event: EventClass::HomeRun,
        season: 0,
    };
    Ok(pairwise_fit::proposed_pf(&params, ParkId(k)))
}

#[pyfunction]
fn log_loss(probs: Vec<f64>, outcomes: Vec<u8>) -> PyResult<f64> {
    evaluation::log_loss(&probs, &outcomes).map_err(value_err)
}

#[pyfunction]
fn binary_entropy(q: f64) -> f64 {
    evaluation::binary_entropy(q)
}

#[pyfunction]
fn conventional_probability(pf: f64, p_average: f64) -> PyResult<f64> {
    if pf < 0.0 || !(p_average > 0.0 && p_average < 1.0) {
        return Err(PyValueError::new_err("need pf >= 0 and 0 < p_average < 1"));
    }
    Ok(parkfactor::conventional_probability(pf, p_average))
}

#[pyfunction]
fn r_squared(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    evaluation::r_squared(&x, &y).map_err(value_err)
}

/// Outcome code (`HR`, `1B`, ..., `OTHER`) of a play event, or `None` when
/// the record is not a plate appearance.
#[pyfunction]
fn classify_play(event_text: &str) -> PyResult<Option<&'static str>> {
    match ingest::classify_play(event_text).map_err(value_err)? {
        PlayOutcome::PlateAppearance(ev) => Ok(Some(ev.code())),
        PlayOutcome::NotPlateAppearance => Ok(None),
    }
}

#[pyfunction]
#[pyo3(signature = (dataset, event, alpha=None, max_epochs=10_000, tol=1e-7, gauge_fix=true))]
fn fit(
    py: Python<'_>,
    dataset: &PyDataset,
    event: &str,
    alpha: Option<f64>,
    max_epochs: usize,
    tol: f64,
    gauge_fix: bool,
) -> PyResult<PyFitResult> {
    let ev = parse_event(event)?;
    let cfg = FitConfig {
        learning_rate: alpha,
        max_epochs,
        convergence_tol: tol,
        gauge_fix,
        ..FitConfig::default()
    };
    let ds = &dataset.inner;
    let report = py
        .detach(|| pairwise_fit::fit(ds, ev, &cfg))
        .map_err(value_err)?;
    Ok(PyFitResult { inner: report })
}

/// Generates a synthetic dataset from a JSON spec; returns it with the
/// tally ledger as JSON.
#[pyfunction]
fn synthesize(spec_json: &str) -> PyResult<(PyDataset, String)> {
    let spec: SyntheticSpec = serde_json::from_str(spec_json).map_err(value_err)?;
    let (inner, ledger) = synth::generate(&spec).map_err(value_err)?;
    let ledger = serde_json::to_string(&ledger).map_err(value_err)?;
    Ok((PyDataset { inner }, ledger))
}

/// Log-loss rows `(season, event, model, log_loss, delta_vs_baseline, n_pa)`.
/// Ratio park factors are computed from the dataset unless `conventional`
/// is false.
#[pyfunction]
#[pyo3(signature = (dataset, events, fits, conventional=true))]
fn evaluate(
    dataset: &PyDataset,
    events: Vec<String>,
    fits: Vec<PyRef<'_, PyFitResult>>,
    conventional: bool,
) -> PyResult<Vec<(i32, String, String, f64, f64, usize)>> {
    let events = events.iter().map(|e| parse_event(e)).collect::<PyResult<Vec<_>>>()?;
    let ds = &dataset.inner;
    let mut pfs = Vec::new();
    if conventional {
        for season in ds.seasons() {
            let sub = ds.filter_season(season).map_err(value_err)?;
            for &ev in &events {
                pfs.extend(conventional_pf_table(&sub, season, ev).map_err(value_err)?.0);
            }
        }
    }
    let fits: Vec<FitReport> = fits.iter().map(|f| f.inner.clone()).collect();
    let report = improvement_report(ds, &events, &pfs, &fits).map_err(value_err)?;
    Ok(report
        .rows
        .into_iter()
        .map(|r| {
            (
                r.season,
                r.event.code().to_string(),
                r.model.label().to_string(),
                r.log_loss,
                r.delta_vs_baseline,
                r.n_pa,
            )
        })
        .collect())
}

#[pymodule]
fn parkfactor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyFitResult>()?;
    m.add_function(wrap_pyfunction!(predict_probability, m)?)?;
    m.add_function(wrap_pyfunction!(proposed_pf, m)?)?;
    m.add_function(wrap_pyfunction!(log_loss, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(conventional_probability, m)?)?;
    m.add_function(wrap_pyfunction!(r_squared, m)?)?;
    m.add_function(wrap_pyfunction!(classify_play, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    Ok(())
}
