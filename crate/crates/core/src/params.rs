//! Model parameters shared by the analytic formulas and the estimators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the two-scale replacement/mutation model.
///
/// Words on a list of `m` concepts are replaced wholesale at rate `lambda`
/// per year; each character of a word mutates at rate `mu` per year by a
/// uniform redraw from the alphabet (the redraw may reproduce the same
/// character). `n_eff` and `l_eff` are the effective alphabet size and word
/// length entering the closed-form moments; they need not be integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    /// Word replacement rate per year.
    pub lambda: f64,
    /// Per-character mutation rate per year.
    pub mu: f64,
    /// Effective alphabet size.
    pub n_eff: f64,
    /// Effective word length in characters.
    pub l_eff: f64,
    /// Number of concepts per list.
    pub m: u32,
}

impl Default for EvolutionParams {
    /// Baseline calibration used throughout: rates fitted on Malagasy
    /// dialect lists and the matching effective alphabet/length.
    fn default() -> Self {
        EvolutionParams {
            lambda: 1.4e-4,
            mu: 1.6e-4,
            n_eff: 5.18,
            l_eff: 7.63,
            m: 207,
        }
    }
}

impl EvolutionParams {
    /// Checks ranges common to every formula: non-negative finite rates,
    /// `n_eff > 0`, `l_eff >= 1`, `m >= 1`.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and >= 0 (got {})",
                self.lambda
            )));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mu must be finite and >= 0 (got {})",
                self.mu
            )));
        }
        if !(self.n_eff > 0.0 && self.n_eff.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "n_eff must be finite and > 0 (got {})",
                self.n_eff
            )));
        }
        if !(self.l_eff >= 1.0 && self.l_eff.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "l_eff must be finite and >= 1 (got {})",
                self.l_eff
            )));
        }
        if self.m < 1 {
            return Err(Error::InvalidParameter("m must be >= 1".into()));
        }
        Ok(())
    }

    /// Additional requirement `n_eff > 1` for formulas containing a
    /// `1/(n_eff - 1)` factor.
    pub fn require_alphabet_above_one(&self) -> Result<()> {
        if self.n_eff <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "n_eff must be > 1 for this formula (got {})",
                self.n_eff
            )));
        }
        Ok(())
    }

    /// Effective character change rate `(n_eff - 1) / n_eff * mu`.
    ///
    /// A uniform redraw reproduces the same character with probability
    /// `1/n_eff`, so only this fraction of mutation events is observable.
    pub fn mu_hat(&self) -> f64 {
        (self.n_eff - 1.0) / self.n_eff * self.mu
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_calibration() {
        let p = EvolutionParams::default();
        assert_eq!(p.lambda, 1.4e-4);
        assert_eq!(p.mu, 1.6e-4);
        assert_eq!(p.n_eff, 5.18);
        assert_eq!(p.l_eff, 7.63);
        assert_eq!(p.m, 207);
        p.validate().unwrap();
    }

    #[test]
    fn mu_hat_discounts_self_redraws() {
        let p = EvolutionParams {
            mu: 1.611e-4,
            ..EvolutionParams::default()
        };
        // (5.18 - 1) / 5.18 * 1.611e-4 rounds to the observable 1.3e-4.
        assert!((p.mu_hat() - 1.3e-4).abs() < 5e-10);

        let q = EvolutionParams::default();
        assert!((q.mu_hat() - 1.2911196911196911e-4).abs() < 1e-19);
    }

    #[test]
    fn validate_rejects_bad_ranges() {
        let base = EvolutionParams::default();
        for bad in [
            EvolutionParams { lambda: -1.0, ..base },
            EvolutionParams { lambda: f64::NAN, ..base },
            EvolutionParams { mu: f64::INFINITY, ..base },
            EvolutionParams { n_eff: 0.0, ..base },
            EvolutionParams { l_eff: 0.5, ..base },
            EvolutionParams { m: 0, ..base },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn alphabet_above_one_requirement() {
        let p = EvolutionParams { n_eff: 1.0, ..EvolutionParams::default() };
        assert!(p.validate().is_ok());
        assert!(p.require_alphabet_above_one().is_err());
    }
}
