//! Python bindings for the lexicon-evolution library.
//!
//! Exposes the analytic moments, dating, word metrics, pair simulation,
//! and dataset estimators as a `lexiclock` extension module. Because
//! `lambda` is a Python keyword, the replacement rate appears as
//! `lambda_` in every Python-facing signature and attribute.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use lexiclock_core::analytics;
use lexiclock_core::dataio;
use lexiclock_core::error::Error as CoreError;
use lexiclock_core::estimation;
use lexiclock_core::metrics;
use lexiclock_core::params::EvolutionParams;
use lexiclock_core::simulator;

fn py_err(e: CoreError) -> PyErr {
    match e {
        CoreError::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_statistic(name: &str) -> PyResult<analytics::Statistic> {
    match name {
        "omega" => Ok(analytics::Statistic::Omega),
        "phi" => Ok(analytics::Statistic::Phi),
        "varphi" => Ok(analytics::Statistic::Varphi),
        _ => Err(PyValueError::new_err(format!(
            "unknown statistic '{name}' (expected omega, phi or varphi)"
        ))),
    }
}

fn parse_method(name: &str) -> PyResult<analytics::DatingMethod> {
    match name {
        "omega" => Ok(analytics::DatingMethod::Omega),
        "phi" => Ok(analytics::DatingMethod::Phi),
        "varphi" => Ok(analytics::DatingMethod::Varphi),
        "ancestor" => Ok(analytics::DatingMethod::Ancestor),
        _ => Err(PyValueError::new_err(format!(
            "unknown method '{name}' (expected omega, phi, varphi or ancestor)"
        ))),
    }
}

fn parse_sampler(name: &str) -> PyResult<simulator::SamplingMode> {
    match name {
        "events" => Ok(simulator::SamplingMode::Events),
        "endpoint" => Ok(simulator::SamplingMode::Endpoint),
        _ => Err(PyValueError::new_err(format!(
            "unknown sampler '{name}' (expected events or endpoint)"
        ))),
    }
}

/// Model parameters for the analytic formulas.
#[pyclass(name = "EvolutionParams", module = "lexiclock", skip_from_py_object)]
#[derive(Clone)]
struct PyEvolutionParams {
    inner: EvolutionParams,
}

#[pymethods]
impl PyEvolutionParams {
    #[new]
    #[pyo3(signature = (lambda_=1.4e-4, mu=1.6e-4, n_eff=5.18, l_eff=7.63, m=207))]
    fn new(lambda_: f64, mu: f64, n_eff: f64, l_eff: f64, m: u32) -> PyResult<Self> {
        let inner = EvolutionParams {
            lambda: lambda_,
            mu,
            n_eff,
            l_eff,
            m,
        };
        inner.validate().map_err(py_err)?;
        Ok(PyEvolutionParams { inner })
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn n_eff(&self) -> f64 {
        self.inner.n_eff
    }

    #[getter]
    fn l_eff(&self) -> f64 {
        self.inner.l_eff
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m
    }

    /// Effective character change rate `(n_eff - 1) / n_eff * mu`.
    fn mu_hat(&self) -> f64 {
        self.inner.mu_hat()
    }

    fn __repr__(&self) -> String {
        format!(
            "EvolutionParams(lambda_={}, mu={}, n_eff={}, l_eff={}, m={})",
            self.inner.lambda, self.inner.mu, self.inner.n_eff, self.inner.l_eff, self.inner.m
        )
    }
}

/// Parameters for pair simulation.
#[pyclass(name = "SimParams", module = "lexiclock", skip_from_py_object)]
#[derive(Clone)]
struct PySimParams {
    inner: simulator::SimParams,
}

#[pymethods]
impl PySimParams {
    #[new]
    #[pyo3(signature = (t, lambda_=1.4e-4, mu=1.6e-4, n_sym=5, l_word=8, m=207, seed=0))]
    fn new(
        t: f64,
        lambda_: f64,
        mu: f64,
        n_sym: u32,
        l_word: u32,
        m: u32,
        seed: u64,
    ) -> PyResult<Self> {
        let inner = simulator::SimParams {
            lambda: lambda_,
            mu,
            n_sym,
            l_word,
            m,
            t,
            seed,
        };
        inner.validate().map_err(py_err)?;
        Ok(PySimParams { inner })
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "SimParams(t={}, lambda_={}, mu={}, n_sym={}, l_word={}, m={}, seed={})",
            p.t, p.lambda, p.mu, p.n_sym, p.l_word, p.m, p.seed
        )
    }
}

/// Point estimate and 95% interval for a separation time.
#[pyclass(name = "DatingResult", module = "lexiclock", skip_from_py_object)]
#[derive(Clone)]
struct PyDatingResult {
    #[pyo3(get)]
    method: String,
    #[pyo3(get)]
    t_hat: f64,
    #[pyo3(get)]
    t_lower: f64,
    #[pyo3(get)]
    t_upper: f64,
}

#[pymethods]
impl PyDatingResult {
    fn __repr__(&self) -> String {
        format!(
            "DatingResult(method='{}', t_hat={}, t_lower={}, t_upper={})",
            self.method, self.t_hat, self.t_lower, self.t_upper
        )
    }
}

/// List-comparison statistics.
#[pyclass(name = "PairStatistics", module = "lexiclock", skip_from_py_object)]
#[derive(Clone)]
struct PyPairStatistics {
    #[pyo3(get)]
    omega: f64,
    #[pyo3(get)]
    phi: f64,
    #[pyo3(get)]
    varphi: f64,
    #[pyo3(get)]
    chi: f64,
    #[pyo3(get)]
    mean_distance: f64,
    #[pyo3(get)]
    n_compared: usize,
    #[pyo3(get)]
    n_cognate: usize,
}

impl From<metrics::PairStatistics> for PyPairStatistics {
    fn from(s: metrics::PairStatistics) -> Self {
        PyPairStatistics {
            omega: s.omega,
            phi: s.phi,
            varphi: s.varphi,
            chi: s.chi,
            mean_distance: s.mean_distance,
            n_compared: s.n_compared,
            n_cognate: s.n_cognate,
        }
    }
}

#[pymethods]
impl PyPairStatistics {
    fn __repr__(&self) -> String {
        format!(
            "PairStatistics(omega={}, phi={}, varphi={}, chi={}, n_compared={})",
            self.omega, self.phi, self.varphi, self.chi, self.n_compared
        )
    }
}

/// One simulated pair of word lists with ground-truth cognacy.
#[pyclass(name = "PairSample", module = "lexiclock")]
struct PyPairSample {
    #[pyo3(get)]
    words_a: Vec<Vec<u16>>,
    #[pyo3(get)]
    words_b: Vec<Vec<u16>>,
    #[pyo3(get)]
    cognate: Vec<bool>,
    inner: simulator::PairSample,
}

#[pymethods]
impl PyPairSample {
    /// Ground-truth statistics at the given effective alphabet size.
    fn statistics(&self, n_eff: f64) -> PyResult<PyPairStatistics> {
        Ok(self.inner.statistics(n_eff).map_err(py_err)?.into())
    }
}

/// Mean, variance and standard error of one statistic over replicates.
#[pyclass(name = "StatSummary", module = "lexiclock", skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyStatSummary {
    #[pyo3(get)]
    mean: f64,
    #[pyo3(get)]
    variance: f64,
    #[pyo3(get)]
    std_error: f64,
}

impl From<simulator::StatSummary> for PyStatSummary {
    fn from(s: simulator::StatSummary) -> Self {
        PyStatSummary {
            mean: s.mean,
            variance: s.variance,
            std_error: s.std_error,
        }
    }
}

/// Monte Carlo summary of the four statistics.
#[pyclass(name = "SampleMoments", module = "lexiclock", skip_from_py_object)]
#[derive(Clone, Copy)]
struct PySampleMoments {
    replicates: u64,
    omega: PyStatSummary,
    phi: PyStatSummary,
    varphi: PyStatSummary,
    chi: PyStatSummary,
}

#[pymethods]
impl PySampleMoments {
    #[getter]
    fn replicates(&self) -> u64 {
        self.replicates
    }

    #[getter]
    fn omega(&self) -> PyStatSummary {
        self.omega
    }

    #[getter]
    fn phi(&self) -> PyStatSummary {
        self.phi
    }

    #[getter]
    fn varphi(&self) -> PyStatSummary {
        self.varphi
    }

    #[getter]
    fn chi(&self) -> PyStatSummary {
        self.chi
    }
}

/// Mutation-rate estimate with the saturation flag.
#[pyclass(name = "MuEstimate", module = "lexiclock", skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyMuEstimate {
    #[pyo3(get)]
    mu: f64,
    #[pyo3(get)]
    mu_hat: f64,
    #[pyo3(get)]
    saturated: bool,
}

/// One row of a distance-cutoff sweep.
#[pyclass(name = "SweepRow", module = "lexiclock", skip_from_py_object)]
#[derive(Clone, Copy)]
struct PySweepRow {
    #[pyo3(get)]
    g: f64,
    #[pyo3(get)]
    pair_count: usize,
    #[pyo3(get)]
    lambda_: Option<f64>,
    #[pyo3(get)]
    mu: Option<f64>,
    #[pyo3(get)]
    mu_hat: Option<f64>,
}

/// Aligned word lists for several varieties.
#[pyclass(name = "Dataset", module = "lexiclock")]
struct PyDataset {
    inner: estimation::SwadeshDataset,
}

#[pymethods]
impl PyDataset {
    #[getter]
    fn n_varieties(&self) -> usize {
        self.inner.n_varieties()
    }

    #[getter]
    fn n_concepts(&self) -> usize {
        self.inner.n_concepts()
    }

    fn variety_ids(&self) -> Vec<String> {
        self.inner.varieties().iter().map(|v| v.id.clone()).collect()
    }

    fn concepts(&self) -> Vec<String> {
        self.inner.concepts().to_vec()
    }

    /// The word for (variety id, concept name), or None if missing.
    fn word(&self, variety: &str, concept: &str) -> PyResult<Option<String>> {
        let v = self
            .inner
            .variety_index(variety)
            .ok_or_else(|| PyValueError::new_err(format!("unknown variety '{variety}'")))?;
        let c = self
            .inner
            .concepts()
            .iter()
            .position(|name| name == concept)
            .ok_or_else(|| PyValueError::new_err(format!("unknown concept '{concept}'")))?;
        Ok(self.inner.word_text(v, c).map(str::to_string))
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset({} varieties x {} concepts)",
            self.inner.n_varieties(),
            self.inner.n_concepts()
        )
    }
}

/// Mean and variance of the cognate fraction at separation `t`.
#[pyfunction]
fn moments_omega(params: &PyEvolutionParams, t: f64) -> PyResult<(f64, f64)> {
    let m = analytics::moments_omega(&params.inner, t).map_err(py_err)?;
    Ok((m.mean, m.variance))
}

/// Mean and variance of the recentred overlap over all concepts.
#[pyfunction]
fn moments_phi(params: &PyEvolutionParams, t: f64) -> PyResult<(f64, f64)> {
    let m = analytics::moments_phi(&params.inner, t).map_err(py_err)?;
    Ok((m.mean, m.variance))
}

/// Mean and variance of the cognate-restricted recentred overlap.
#[pyfunction]
fn moments_varphi(params: &PyEvolutionParams, t: f64) -> PyResult<(f64, f64)> {
    let m = analytics::moments_varphi(&params.inner, t).map_err(py_err)?;
    Ok((m.mean, m.variance))
}

/// Mean and variance of the noise component `phi - varphi`.
#[pyfunction]
fn moments_chi(params: &PyEvolutionParams, t: f64) -> PyResult<(f64, f64)> {
    let m = analytics::moments_chi(&params.inner, t).map_err(py_err)?;
    Ok((m.mean, m.variance))
}

/// Probability that one character position agrees between cognates.
#[pyfunction]
fn char_match_prob_cognate(params: &PyEvolutionParams, t: f64) -> PyResult<f64> {
    analytics::char_match_prob_cognate(&params.inner, t).map_err(py_err)
}

/// Relative dating error of `statistic` ("omega", "phi" or "varphi") at
/// separation `t`; raises when the 95% band collapses.
#[pyfunction]
fn relative_error(params: &PyEvolutionParams, t: f64, statistic: &str) -> PyResult<f64> {
    analytics::relative_error(&params.inner, t, parse_statistic(statistic)?).map_err(py_err)
}

/// Rows `(t, r_omega, r_phi, r_varphi)` over a closed time grid; band
/// collapses appear as `inf`.
#[pyfunction]
fn error_curves(
    params: &PyEvolutionParams,
    t_min: f64,
    t_max: f64,
    step: f64,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let rows = analytics::error_curves(&params.inner, t_min, t_max, step).map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.t, r.r_omega, r.r_phi, r.r_varphi))
        .collect())
}

/// Inverts an observed value of the statistic named by `method`
/// ("omega", "phi", "varphi" or "ancestor") into a separation time.
#[pyfunction]
fn date_from_statistic(
    value: f64,
    params: &PyEvolutionParams,
    method: &str,
) -> PyResult<PyDatingResult> {
    let parsed = parse_method(method)?;
    let d = analytics::date_from_statistic(value, &params.inner, parsed).map_err(py_err)?;
    Ok(PyDatingResult {
        method: method.to_string(),
        t_hat: d.t_hat,
        t_lower: d.t_lower,
        t_upper: d.t_upper,
    })
}

/// Levenshtein edit distance between two strings.
#[pyfunction]
fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<u32> = a.chars().map(u32::from).collect();
    let b: Vec<u32> = b.chars().map(u32::from).collect();
    metrics::levenshtein(&a, &b)
}

/// Levenshtein distance divided by the longer length.
#[pyfunction]
fn normalized_levenshtein(a: &str, b: &str) -> PyResult<f64> {
    let a: Vec<u32> = a.chars().map(u32::from).collect();
    let b: Vec<u32> = b.chars().map(u32::from).collect();
    metrics::normalized_levenshtein(&a, &b).map_err(py_err)
}

/// Fraction of agreeing positions between two equal-length strings.
#[pyfunction]
fn hamming_overlap(a: &str, b: &str) -> PyResult<f64> {
    let a: Vec<u32> = a.chars().map(u32::from).collect();
    let b: Vec<u32> = b.chars().map(u32::from).collect();
    metrics::hamming_overlap(&a, &b).map_err(py_err)
}

/// Unified distance: positional for equal lengths, normalized
/// Levenshtein otherwise.
#[pyfunction]
fn word_distance(a: &str, b: &str) -> PyResult<f64> {
    let a: Vec<u32> = a.chars().map(u32::from).collect();
    let b: Vec<u32> = b.chars().map(u32::from).collect();
    metrics::word_distance(&a, &b).map_err(py_err)
}

/// Cognacy flags ("cognate", "non_cognate", "unknown") for two aligned
/// lists of words; empty strings mark missing entries.
#[pyfunction]
fn detect_cognates(a: Vec<String>, b: Vec<String>, theta: f64) -> PyResult<Vec<String>> {
    let list_a = metrics::WordList::from_strings(&a);
    let list_b = metrics::WordList::from_strings(&b);
    let flags = metrics::detect_cognates(&list_a, &list_b, theta).map_err(py_err)?;
    Ok(flags
        .into_iter()
        .map(|f| {
            match f {
                metrics::Cognacy::Cognate => "cognate",
                metrics::Cognacy::NonCognate => "non_cognate",
                metrics::Cognacy::Unknown => "unknown",
            }
            .to_string()
        })
        .collect())
}

/// Detects cognates at threshold `theta` and computes the comparison
/// statistics in one step.
#[pyfunction]
fn compare_lists(
    a: Vec<String>,
    b: Vec<String>,
    theta: f64,
    n_eff: f64,
) -> PyResult<PyPairStatistics> {
    let list_a = metrics::WordList::from_strings(&a);
    let list_b = metrics::WordList::from_strings(&b);
    let flags = metrics::detect_cognates(&list_a, &list_b, theta).map_err(py_err)?;
    Ok(metrics::pair_statistics(&list_a, &list_b, &flags, n_eff)
        .map_err(py_err)?
        .into())
}

/// Simulates one pair of lists ("events" replays the process, "endpoint"
/// draws from the exact time-t distribution).
#[pyfunction]
#[pyo3(signature = (params, sampler="events"))]
fn simulate_pair(params: &PySimParams, sampler: &str) -> PyResult<PyPairSample> {
    let sample = match parse_sampler(sampler)? {
        simulator::SamplingMode::Events => simulator::evolve_pair_events(&params.inner),
        simulator::SamplingMode::Endpoint => simulator::evolve_pair_endpoint(&params.inner),
    }
    .map_err(py_err)?;
    Ok(PyPairSample {
        words_a: sample.list_a.iter().map(|w| w.symbols.clone()).collect(),
        words_b: sample.list_b.iter().map(|w| w.symbols.clone()).collect(),
        cognate: (0..sample.n_concepts()).map(|i| sample.cognate(i)).collect(),
        inner: sample,
    })
}

/// Runs independent pair replicates and summarizes the four statistics;
/// results are independent of thread count.
#[pyfunction]
#[pyo3(signature = (params, replicates, sampler="endpoint"))]
fn monte_carlo(params: &PySimParams, replicates: u64, sampler: &str) -> PyResult<PySampleMoments> {
    let mode = parse_sampler(sampler)?;
    let s = simulator::monte_carlo(&params.inner, replicates, mode).map_err(py_err)?;
    Ok(PySampleMoments {
        replicates: s.replicates,
        omega: s.omega.into(),
        phi: s.phi.into(),
        varphi: s.varphi.into(),
        chi: s.chi.into(),
    })
}

/// Loads a dataset from a word-list TSV and a metadata CSV.
#[pyfunction]
fn load_dataset(lists: &str, meta: &str) -> PyResult<PyDataset> {
    let inner = dataio::load_dataset(std::path::Path::new(lists), std::path::Path::new(meta))
        .map_err(py_err)?;
    Ok(PyDataset { inner })
}

/// Effective alphabet size from cross-concept chance matches.
#[pyfunction]
fn estimate_n(dataset: &PyDataset) -> PyResult<f64> {
    estimation::estimate_n(&dataset.inner).map_err(py_err)
}

/// Effective word length from cross-concept overlap fluctuations.
#[pyfunction]
fn estimate_l(dataset: &PyDataset, n_eff: f64) -> PyResult<f64> {
    estimation::estimate_l(&dataset.inner, n_eff).map_err(py_err)
}

/// Replacement rate from the cognate fraction of admissible pairs.
#[pyfunction]
fn estimate_lambda(dataset: &PyDataset, t_root: f64, g: f64, theta: f64) -> PyResult<f64> {
    estimation::estimate_lambda(&dataset.inner, t_root, g, theta).map_err(py_err)
}

/// Mutation rate from mean distances of admissible pairs.
#[pyfunction]
fn estimate_mu(
    dataset: &PyDataset,
    t_root: f64,
    g: f64,
    n_eff: f64,
    lambda_: f64,
) -> PyResult<PyMuEstimate> {
    let e = estimation::estimate_mu(&dataset.inner, t_root, g, n_eff, lambda_).map_err(py_err)?;
    Ok(PyMuEstimate {
        mu: e.mu,
        mu_hat: e.mu_hat,
        saturated: e.saturated,
    })
}

/// Rate estimates over a grid of geographic cutoffs.
#[pyfunction]
fn sweep_g(
    dataset: &PyDataset,
    t_root: f64,
    g_min: f64,
    g_max: f64,
    step: f64,
    theta: f64,
) -> PyResult<Vec<PySweepRow>> {
    let rows = estimation::sweep_g(&dataset.inner, t_root, g_min, g_max, step, theta)
        .map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| PySweepRow {
            g: r.g,
            pair_count: r.pair_count,
            lambda_: r.lambda,
            mu: r.mu,
            mu_hat: r.mu_hat,
        })
        .collect())
}

/// Great-circle distance in km between two points in degrees.
#[pyfunction]
fn geo_distance(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> PyResult<f64> {
    estimation::geo_distance_deg(lat1, lon1, lat2, lon2).map_err(py_err)
}

#[pymodule]
fn lexiclock(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEvolutionParams>()?;
    m.add_class::<PySimParams>()?;
    m.add_class::<PyDatingResult>()?;
    m.add_class::<PyPairStatistics>()?;
    m.add_class::<PyPairSample>()?;
    m.add_class::<PyStatSummary>()?;
    m.add_class::<PySampleMoments>()?;
    m.add_class::<PyMuEstimate>()?;
    m.add_class::<PySweepRow>()?;
    m.add_class::<PyDataset>()?;
    m.add_function(wrap_pyfunction!(moments_omega, m)?)?;
    m.add_function(wrap_pyfunction!(moments_phi, m)?)?;
    m.add_function(wrap_pyfunction!(moments_varphi, m)?)?;
    m.add_function(wrap_pyfunction!(moments_chi, m)?)?;
    m.add_function(wrap_pyfunction!(char_match_prob_cognate, m)?)?;
    m.add_function(wrap_pyfunction!(relative_error, m)?)?;
    m.add_function(wrap_pyfunction!(error_curves, m)?)?;
    m.add_function(wrap_pyfunction!(date_from_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(levenshtein, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_levenshtein, m)?)?;
    m.add_function(wrap_pyfunction!(hamming_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(word_distance, m)?)?;
    m.add_function(wrap_pyfunction!(detect_cognates, m)?)?;
    m.add_function(wrap_pyfunction!(compare_lists, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_pair, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(load_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_n, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_l, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_mu, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_g, m)?)?;
    m.add_function(wrap_pyfunction!(geo_distance, m)?)?;
    Ok(())
}
