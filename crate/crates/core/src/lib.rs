//! Core library for a stochastic model of lexicon evolution.
//!
//! Vocabularies evolve under two independent random processes: wholesale
//! word replacement at rate `lambda` per year and per-character mutation
//! at rate `mu`. Comparing the word lists of two related varieties then
//! dates their separation, and the closed-form moments of the comparison
//! statistics quantify how precise that date can be.
//!
//! Modules:
//!
//! * [`params`]: shared model parameters and the effective mutation rate.
//! * [`analytics`]: closed-form moments, relative-error curves, dating.
//! * [`simulator`]: event-driven and exact-endpoint pair simulation with
//!   reproducible parallel Monte Carlo.
//! * [`metrics`]: word distances, cognacy detection, list statistics.
//! * [`estimation`]: alphabet/length/rate estimators on real datasets
//!   and the geographic-cutoff sweep.
//! * [`dataio`]: list/metadata file formats, config, result tables.

pub mod analytics;
pub mod dataio;
pub mod error;
pub mod estimation;
pub mod metrics;
pub mod numeric;
pub mod params;
pub mod simulator;

pub use error::{Error, Result};
pub use params::EvolutionParams;
