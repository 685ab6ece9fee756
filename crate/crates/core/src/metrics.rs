//! Word comparison: positional and edit-based distances, cognacy
//! detection, and the list-level statistics built from them.
//!
//! Words are sequences of symbols. Equal-length words are compared
//! positionally (Hamming); words of different length fall back to
//! Levenshtein distance normalized by the longer length, so every
//! comparison yields a distance in [0, 1] and an overlap `1 - distance`.

use crate::error::{Error, Result};

/// Cognacy judgement for one concept across two lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cognacy {
    /// Same ancestral word on both sides (or judged so).
    Cognate,
    /// At least one side replaced its word.
    NonCognate,
    /// At least one entry missing; the concept is excluded everywhere.
    Unknown,
}

/// A list of words indexed by concept, with gaps for missing entries.
///
/// Symbols are abstract `u32` codes; [`WordList::from_strings`] maps each
/// Unicode scalar to its code point, simulation output maps its integer
/// alphabet directly.
#[derive(Debug, Clone, PartialEq)]
pub struct WordList {
    entries: Vec<Option<Vec<u32>>>,
}

impl WordList {
    /// Builds a list from plain strings; an empty string marks a missing
    /// entry.
    pub fn from_strings<S: AsRef<str>>(entries: &[S]) -> WordList {
        WordList {
            entries: entries
                .iter()
                .map(|s| {
                    let s = s.as_ref();
                    if s.is_empty() {
                        None
                    } else {
                        Some(s.chars().map(u32::from).collect())
                    }
                })
                .collect(),
        }
    }

    /// Builds a list from pre-encoded symbol sequences.
    pub fn from_symbols(entries: Vec<Option<Vec<u32>>>) -> WordList {
        WordList { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The word at concept `i`, or `None` if missing.
    pub fn word(&self, i: usize) -> Option<&[u32]> {
        self.entries[i].as_deref()
    }
}

/// Fraction of positions that agree between two equal-length words.
pub fn hamming_overlap<T: PartialEq>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyWord);
    }
    let matches = a.iter().zip(b).filter(|(x, y)| x == y).count();
    Ok(matches as f64 / a.len() as f64)
}

/// Levenshtein edit distance (unit costs for insertion, deletion and
/// substitution). Two-row dynamic program after stripping the common
/// prefix and suffix.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Levenshtein distance divided by the longer word length; always in
/// [0, 1]. Errors if both words are empty.
pub fn normalized_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> Result<f64> {
    let longer = a.len().max(b.len());
    if longer == 0 {
        return Err(Error::EmptyWord);
    }
    Ok(levenshtein(a, b) as f64 / longer as f64)
}

/// Unified overlap in [0, 1]: positional agreement for equal-length
/// words, `1 -` normalized Levenshtein otherwise.
///
/// The positional branch matters under the evolution model: character
/// mutations preserve position, and an edit-based alignment would count
/// chance alignments of shifted characters as signal.
pub fn word_overlap<T: PartialEq>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() == b.len() {
        hamming_overlap(a, b)
    } else {
        Ok(1.0 - normalized_levenshtein(a, b)?)
    }
}

/// Unified distance `1 - word_overlap`.
pub fn word_distance<T: PartialEq>(a: &[T], b: &[T]) -> Result<f64> {
    Ok(1.0 - word_overlap(a, b)?)
}

/// Classifies each concept of two aligned lists as cognate when the
/// normalized Levenshtein distance is at most `theta` (inclusive), or
/// `Unknown` when either entry is missing.
pub fn detect_cognates(a: &WordList, b: &WordList, theta: f64) -> Result<Vec<Cognacy>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must be in [0, 1] (got {theta})"
        )));
    }
    (0..a.len())
        .map(|i| match (a.word(i), b.word(i)) {
            (Some(wa), Some(wb)) => {
                let d = normalized_levenshtein(wa, wb)?;
                Ok(if d <= theta {
                    Cognacy::Cognate
                } else {
                    Cognacy::NonCognate
                })
            }
            _ => Ok(Cognacy::Unknown),
        })
        .collect()
}

/// List-level comparison statistics over the concepts where both entries
/// are present and cognacy is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStatistics {
    /// Fraction of compared concepts judged cognate.
    pub omega: f64,
    /// Mean unified word distance.
    pub mean_distance: f64,
    /// Mean of `n/(n-1) * (overlap - 1/n)` over all compared concepts:
    /// overlap recentred so chance agreement averages to zero.
    pub phi: f64,
    /// Same sum with non-cognate concepts contributing zero.
    pub varphi: f64,
    /// `phi - varphi`, the non-cognate noise component.
    pub chi: f64,
    /// Number of concepts entering the averages.
    pub n_compared: usize,
    /// Number of those judged cognate.
    pub n_cognate: usize,
}

/// Computes [`PairStatistics`] from an explicit sequence of word pairs
/// with cognacy flags. Pairs flagged `Unknown` are skipped. Sums run in
/// input order, so results are deterministic.
pub fn pair_statistics_from_pairs<'a, T, I>(pairs: I, n_eff: f64) -> Result<PairStatistics>
where
    T: PartialEq + 'a,
    I: IntoIterator<Item = (&'a [T], &'a [T], Cognacy)>,
{
    if !(n_eff > 1.0 && n_eff.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "n_eff must be finite and > 1 (got {n_eff})"
        )));
    }
    let scale = n_eff / (n_eff - 1.0);
    let chance = 1.0 / n_eff;
    let mut n_compared = 0usize;
    let mut n_cognate = 0usize;
    let mut sum_distance = 0.0;
    let mut sum_phi = 0.0;
    let mut sum_varphi = 0.0;
    for (wa, wb, flag) in pairs {
        if flag == Cognacy::Unknown {
            continue;
        }
        let overlap = word_overlap(wa, wb)?;
        let contribution = scale * (overlap - chance);
        n_compared += 1;
        sum_distance += 1.0 - overlap;
        sum_phi += contribution;
        if flag == Cognacy::Cognate {
            n_cognate += 1;
            sum_varphi += contribution;
        }
    }
    if n_compared == 0 {
        return Err(Error::NoComparableConcepts);
    }
    let n = n_compared as f64;
    let phi = sum_phi / n;
    let varphi = sum_varphi / n;
    Ok(PairStatistics {
        omega: n_cognate as f64 / n,
        mean_distance: sum_distance / n,
        phi,
        varphi,
        // Computed by subtraction so phi = varphi + chi holds bit-exactly.
        chi: phi - varphi,
        n_compared,
        n_cognate,
    })
}

/// Computes [`PairStatistics`] for two aligned word lists. `flags` comes
/// from [`detect_cognates`] or from simulation ground truth; concepts
/// flagged `Unknown` or missing an entry on either side are excluded.
pub fn pair_statistics(
    a: &WordList,
    b: &WordList,
    flags: &[Cognacy],
    n_eff: f64,
) -> Result<PairStatistics> {
    if a.len() != b.len() || flags.len() != a.len() {
        return Err(Error::LengthMismatch {
            left: a.len().min(b.len()),
            right: flags.len(),
        });
    }
    let pairs = (0..a.len()).filter_map(|i| match (a.word(i), b.word(i)) {
        (Some(wa), Some(wb)) => Some((wa, wb, flags[i])),
        _ => None,
    });
    pair_statistics_from_pairs(pairs, n_eff)
}
