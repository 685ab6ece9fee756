//! Parameter estimation from real word-list datasets.
//!
//! Given lists for many related varieties, four quantities are estimated
//! without knowing the true cognacy or the ancestral words:
//!
//! * `n_eff` from cross-concept comparisons: words for different concepts
//!   are unrelated, so their mean character match frequency is `1/n_eff`.
//! * `l_eff` from the second moment of the same comparisons: the variance
//!   of chance overlap scales as `1/l_eff`.
//! * `lambda` from the mean detected-cognate fraction over admissible
//!   pairs of varieties, inverted through `e^(-2 lambda t_root)`.
//! * `mu` from the mean same-concept distance over the same pairs, whose
//!   recentred overlap decays as `e^(-2 (lambda + mu) t_root)`.
//!
//! Admissible pairs for the rate estimators belong to different clades
//! (so `t_root` is their true separation) and are farther apart than a
//! cutoff `g` km, which suppresses borrowing between neighbours. Sweeping
//! `g` shows how estimates stabilize once contact effects are excluded.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{self, WordList};
use crate::numeric::KahanSum;

/// Minimum admissible pairs for a rate estimate to be reported.
pub const MIN_PAIRS: usize = 10;

/// Mean Earth radius in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

/// Identity and location of one variety.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarietyMeta {
    /// Short unique identifier used in list files.
    pub id: String,
    /// Human-readable name.
    pub name: String,
    /// Degrees, in [-90, 90].
    pub latitude: f64,
    /// Degrees, in [-180, 180].
    pub longitude: f64,
    /// Clade label; pairs within one clade are never used for rates.
    pub clade: String,
}

impl VarietyMeta {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidParameter("variety id must be non-empty".into()));
        }
        if !(self.latitude.is_finite() && self.latitude.abs() <= 90.0) {
            return Err(Error::InvalidParameter(format!(
                "latitude of '{}' must be in [-90, 90] (got {})",
                self.id, self.latitude
            )));
        }
        if !(self.longitude.is_finite() && self.longitude.abs() <= 180.0) {
            return Err(Error::InvalidParameter(format!(
                "longitude of '{}' must be in [-180, 180] (got {})",
                self.id, self.longitude
            )));
        }
        if self.clade.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "clade of '{}' must be non-empty",
                self.id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Entry {
    text: String,
    symbols: Vec<u32>,
}

/// Aligned word lists for several varieties over a shared concept set.
#[derive(Debug, Clone)]
pub struct SwadeshDataset {
    varieties: Vec<VarietyMeta>,
    concepts: Vec<String>,
    // Row-major: entries[v * concepts.len() + c].
    entries: Vec<Option<Entry>>,
}

impl SwadeshDataset {
    /// Assembles a dataset; `words` is row-major over
    /// `(variety, concept)` with `None` (or an empty string) marking a
    /// missing entry.
    pub fn new(
        varieties: Vec<VarietyMeta>,
        concepts: Vec<String>,
        words: Vec<Option<String>>,
    ) -> Result<Self> {
        if varieties.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 varieties (got {})",
                varieties.len()
            )));
        }
        if concepts.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 concepts (got {})",
                concepts.len()
            )));
        }
        if words.len() != varieties.len() * concepts.len() {
            return Err(Error::InvalidParameter(format!(
                "word table has {} cells, expected {} x {}",
                words.len(),
                varieties.len(),
                concepts.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &varieties {
            v.validate()?;
            if !seen.insert(v.id.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate variety id '{}'",
                    v.id
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &concepts {
            if c.is_empty() {
                return Err(Error::InvalidParameter("concept name must be non-empty".into()));
            }
            if !seen.insert(c.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate concept '{c}'")));
            }
        }
        let entries = words
            .into_iter()
            .map(|w| {
                w.filter(|s| !s.is_empty()).map(|text| {
                    let symbols = text.chars().map(u32::from).collect();
                    Entry { text, symbols }
                })
            })
            .collect();
        Ok(SwadeshDataset {
            varieties,
            concepts,
            entries,
        })
    }

    pub fn n_varieties(&self) -> usize {
        self.varieties.len()
    }

    pub fn n_concepts(&self) -> usize {
        self.concepts.len()
    }

    pub fn varieties(&self) -> &[VarietyMeta] {
        &self.varieties
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn variety_index(&self, id: &str) -> Option<usize> {
        self.varieties.iter().position(|v| v.id == id)
    }

    pub fn word_text(&self, variety: usize, concept: usize) -> Option<&str> {
        self.entries[variety * self.concepts.len() + concept]
            .as_ref()
            .map(|e| e.text.as_str())
    }

    pub fn word_symbols(&self, variety: usize, concept: usize) -> Option<&[u32]> {
        self.entries[variety * self.concepts.len() + concept]
            .as_ref()
            .map(|e| e.symbols.as_slice())
    }

    /// The full word list of one variety, with gaps preserved.
    pub fn word_list(&self, variety: usize) -> WordList {
        WordList::from_symbols(
            (0..self.concepts.len())
                .map(|c| self.word_symbols(variety, c).map(|s| s.to_vec()))
                .collect(),
        )
    }
}

/// Great-circle distance in km between two points given in degrees.
pub fn geo_distance_deg(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Result<f64> {
    for (value, limit, name) in [
        (lat1, 90.0, "latitude"),
        (lat2, 90.0, "latitude"),
        (lon1, 180.0, "longitude"),
        (lon2, 180.0, "longitude"),
    ] {
        if !(value.is_finite() && value.abs() <= limit) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be in [-{limit}, {limit}] (got {value})"
            )));
        }
    }
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    Ok(2.0 * EARTH_RADIUS_KM * a.sqrt().min(1.0).asin())
}

/// Great-circle distance in km between two varieties.
pub fn geo_distance(a: &VarietyMeta, b: &VarietyMeta) -> Result<f64> {
    geo_distance_deg(a.latitude, a.longitude, b.latitude, b.longitude)
}

#[derive(Debug, Clone, Copy, Default)]
struct CrossMoments {
    count: u64,
    sum: f64,
    sum_sq: f64,
}

/// Pooled first and second moments of the unified word distance over all
/// cross-concept comparisons: every language pair `alpha <= beta`
/// (self-pairs included) crossed with every ordered concept pair
/// `i != j`. Words for different concepts share no ancestry, so these
/// distances probe pure chance agreement.
fn cross_concept_moments(ds: &SwadeshDataset) -> CrossMoments {
    let v = ds.n_varieties();
    let mut pairs = Vec::with_capacity(v * (v + 1) / 2);
    for a in 0..v {
        for b in a..v {
            pairs.push((a, b));
        }
    }
    let partials: Vec<CrossMoments> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let c = ds.n_concepts();
            let mut sum = KahanSum::new();
            let mut sum_sq = KahanSum::new();
            let mut count = 0u64;
            for i in 0..c {
                let Some(wa) = ds.word_symbols(a, i) else { continue };
                for j in 0..c {
                    if i == j {
                        continue;
                    }
                    let Some(wb) = ds.word_symbols(b, j) else { continue };
                    let d = metrics::word_distance(wa, wb)
                        .expect("stored words are never empty");
                    sum.add(d);
                    sum_sq.add(d * d);
                    count += 1;
                }
            }
            CrossMoments {
                count,
                sum: sum.total(),
                sum_sq: sum_sq.total(),
            }
        })
        .collect();
    // Combine in pair order so the result is thread-count independent.
    let mut total = CrossMoments::default();
    let mut sum = KahanSum::new();
    let mut sum_sq = KahanSum::new();
    for p in partials {
        total.count += p.count;
        sum.add(p.sum);
        sum_sq.add(p.sum_sq);
    }
    total.sum = sum.total();
    total.sum_sq = sum_sq.total();
    total
}

/// Estimates the effective alphabet size `n_eff` as the reciprocal of
/// the mean cross-concept match frequency.
pub fn estimate_n(ds: &SwadeshDataset) -> Result<f64> {
    let m = cross_concept_moments(ds);
    if m.count == 0 {
        return Err(Error::NoUsablePairs);
    }
    let mean_match = 1.0 - m.sum / m.count as f64;
    if mean_match <= 0.0 {
        return Err(Error::UnboundedAlphabet);
    }
    Ok(1.0 / mean_match)
}

/// Estimates the effective word length `l_eff` from the fluctuation of
/// chance overlap: `1 / l_eff = (n_eff - 1) * E[(1 - a d)^2]` with
/// `a = n_eff / (n_eff - 1)` over cross-concept distances `d`.
pub fn estimate_l(ds: &SwadeshDataset, n_eff: f64) -> Result<f64> {
    if !(n_eff > 1.0 && n_eff.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "n_eff must be finite and > 1 (got {n_eff})"
        )));
    }
    let m = cross_concept_moments(ds);
    if m.count == 0 {
        return Err(Error::NoUsablePairs);
    }
    let a = n_eff / (n_eff - 1.0);
    let mean_d = m.sum / m.count as f64;
    let mean_d2 = m.sum_sq / m.count as f64;
    // E[(1 - a d)^2] expanded in the accumulated moments.
    let mean_sq = 1.0 - 2.0 * a * mean_d + a * a * mean_d2;
    let inv_l = (n_eff - 1.0) * mean_sq;
    if inv_l <= 0.0 {
        return Err(Error::DegenerateData(
            "chance-overlap fluctuation is zero: word length unbounded".into(),
        ));
    }
    Ok(1.0 / inv_l)
}

/// Per-pair summaries entering the rate estimators: one row per
/// unordered cross-clade pair of varieties with at least one shared
/// concept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSummary {
    pub a: usize,
    pub b: usize,
    pub distance_km: f64,
    /// Fraction of shared concepts detected as cognate.
    pub omega: f64,
    /// Mean unified word distance over shared concepts.
    pub mean_distance: f64,
    pub n_compared: usize,
}

/// Computes [`PairSummary`] rows for every cross-clade pair. Cognacy is
/// detected with threshold `theta` on normalized Levenshtein distance.
pub fn pair_summaries(ds: &SwadeshDataset, theta: f64) -> Result<Vec<PairSummary>> {
    let lists: Vec<WordList> = (0..ds.n_varieties()).map(|v| ds.word_list(v)).collect();
    let mut rows = Vec::new();
    for a in 0..ds.n_varieties() {
        for b in (a + 1)..ds.n_varieties() {
            if ds.varieties()[a].clade == ds.varieties()[b].clade {
                continue;
            }
            let flags = metrics::detect_cognates(&lists[a], &lists[b], theta)?;
            let mut n_compared = 0usize;
            let mut n_cognate = 0usize;
            let mut sum_distance = KahanSum::new();
            for (i, flag) in flags.iter().enumerate() {
                let (Some(wa), Some(wb)) = (lists[a].word(i), lists[b].word(i)) else {
                    continue;
                };
                n_compared += 1;
                if *flag == metrics::Cognacy::Cognate {
                    n_cognate += 1;
                }
                sum_distance.add(metrics::word_distance(wa, wb)?);
            }
            // A pair sharing no concepts carries no signal; drop it.
            if n_compared == 0 {
                continue;
            }
            rows.push(PairSummary {
                a,
                b,
                distance_km: geo_distance(&ds.varieties()[a], &ds.varieties()[b])?,
                omega: n_cognate as f64 / n_compared as f64,
                mean_distance: sum_distance.total() / n_compared as f64,
                n_compared,
            });
        }
    }
    Ok(rows)
}

/// Unordered cross-clade pairs separated by strictly more than `g` km.
pub fn admissible_pairs(ds: &SwadeshDataset, g: f64) -> Result<Vec<(usize, usize)>> {
    check_cutoff(g)?;
    let mut pairs = Vec::new();
    for a in 0..ds.n_varieties() {
        for b in (a + 1)..ds.n_varieties() {
            let (va, vb) = (&ds.varieties()[a], &ds.varieties()[b]);
            if va.clade != vb.clade && geo_distance(va, vb)? > g {
                pairs.push((a, b));
            }
        }
    }
    Ok(pairs)
}

fn check_cutoff(g: f64) -> Result<()> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "distance cutoff g must be finite and >= 0 (got {g})"
        )));
    }
    Ok(())
}

fn check_t_root(t_root: f64) -> Result<()> {
    if !(t_root > 0.0 && t_root.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_root must be finite and > 0 (got {t_root})"
        )));
    }
    Ok(())
}

fn admissible<'a>(summaries: &'a [PairSummary], g: f64) -> Vec<&'a PairSummary> {
    summaries.iter().filter(|s| s.distance_km > g).collect()
}

fn lambda_from(pairs: &[&PairSummary], t_root: f64) -> Result<f64> {
    let mut sum = KahanSum::new();
    for p in pairs {
        sum.add(p.omega);
    }
    let mean = sum.total() / pairs.len() as f64;
    if mean <= 0.0 {
        return Err(Error::SignalSaturated(mean));
    }
    Ok(-mean.ln() / (2.0 * t_root))
}

fn combined_rate_from(pairs: &[&PairSummary], t_root: f64, n_eff: f64) -> Result<f64> {
    let a = n_eff / (n_eff - 1.0);
    let mut sum = KahanSum::new();
    for p in pairs {
        // Recentred overlap: mean distance mapped to the scale on which
        // the decay is exactly e^(-2 (lambda + mu) t_root).
        sum.add(1.0 - a * p.mean_distance);
    }
    let mean = sum.total() / pairs.len() as f64;
    if mean <= 0.0 {
        return Err(Error::SignalSaturated(mean));
    }
    Ok(-mean.ln() / (2.0 * t_root))
}

fn require_min_pairs(found: usize) -> Result<()> {
    if found < MIN_PAIRS {
        return Err(Error::InsufficientPairs {
            available: found,
            required: MIN_PAIRS,
        });
    }
    Ok(())
}

/// Estimates the replacement rate from the mean detected-cognate
/// fraction over admissible pairs at cutoff `g`.
pub fn estimate_lambda(ds: &SwadeshDataset, t_root: f64, g: f64, theta: f64) -> Result<f64> {
    check_t_root(t_root)?;
    check_cutoff(g)?;
    let summaries = pair_summaries(ds, theta)?;
    let pairs = admissible(&summaries, g);
    require_min_pairs(pairs.len())?;
    lambda_from(&pairs, t_root)
}

/// Mutation-rate estimate. `mu` can come out negative on noisy data when
/// the replacement rate alone overexplains the observed distances; that
/// is reported as a saturation warning, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuEstimate {
    pub mu: f64,
    /// Effective (observable) rate `(n_eff - 1) / n_eff * mu`.
    pub mu_hat: f64,
    /// True when `mu < 0`.
    pub saturated: bool,
}

/// Estimates the mutation rate at cutoff `g` given the alphabet size and
/// a replacement-rate estimate (normally from [`estimate_lambda`] at the
/// same cutoff).
pub fn estimate_mu(
    ds: &SwadeshDataset,
    t_root: f64,
    g: f64,
    n_eff: f64,
    lambda: f64,
) -> Result<MuEstimate> {
    check_t_root(t_root)?;
    check_cutoff(g)?;
    if !(n_eff > 1.0 && n_eff.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "n_eff must be finite and > 1 (got {n_eff})"
        )));
    }
    // Only distances enter this estimator, so the detection threshold is
    // irrelevant; any value yields the same summaries.
    let summaries = pair_summaries(ds, 0.5)?;
    let pairs = admissible(&summaries, g);
    require_min_pairs(pairs.len())?;
    let combined = combined_rate_from(&pairs, t_root, n_eff)?;
    let mu = combined - lambda;
    Ok(MuEstimate {
        mu,
        mu_hat: (n_eff - 1.0) / n_eff * mu,
        saturated: mu < 0.0,
    })
}

/// One row of a distance-cutoff sweep. `lambda`, `mu` and `mu_hat` are
/// `None` when fewer than [`MIN_PAIRS`] pairs remain or the signal is
/// saturated at this cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub g: f64,
    pub pair_count: usize,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub mu_hat: Option<f64>,
}

/// Sweeps the distance cutoff over `g_min, g_min + step, ..., g_max` and
/// estimates rates at each value. The alphabet size is estimated once
/// from the full dataset; pair summaries are computed once and filtered
/// per cutoff, so all rows are mutually consistent.
pub fn sweep_g(
    ds: &SwadeshDataset,
    t_root: f64,
    g_min: f64,
    g_max: f64,
    step: f64,
    theta: f64,
) -> Result<Vec<SweepRow>> {
    check_t_root(t_root)?;
    check_cutoff(g_min)?;
    if !(g_max.is_finite() && g_max >= g_min) {
        return Err(Error::InvalidGrid(format!(
            "g_max ({g_max}) must be finite and >= g_min ({g_min})"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidGrid(format!("step must be > 0 (got {step})")));
    }
    let n_eff = estimate_n(ds)?;
    let summaries = pair_summaries(ds, theta)?;
    let count = ((g_max - g_min) / step + 1e-9).floor() as usize;
    let mut rows = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let g = g_min + i as f64 * step;
        let pairs = admissible(&summaries, g);
        let pair_count = pairs.len();
        if pair_count < MIN_PAIRS {
            rows.push(SweepRow {
                g,
                pair_count,
                lambda: None,
                mu: None,
                mu_hat: None,
            });
            continue;
        }
        let lambda = lambda_from(&pairs, t_root).ok();
        let (mu, mu_hat) = match lambda {
            Some(l) => match combined_rate_from(&pairs, t_root, n_eff) {
                Ok(combined) => {
                    let mu = combined - l;
                    (Some(mu), Some((n_eff - 1.0) / n_eff * mu))
                }
                Err(_) => (None, None),
            },
            None => (None, None),
        };
        rows.push(SweepRow {
            g,
            pair_count,
            lambda,
            mu,
            mu_hat,
        });
    }
    Ok(rows)
}
