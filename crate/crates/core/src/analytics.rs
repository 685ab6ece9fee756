//! Closed-form moments of list-comparison statistics, relative dating
//! errors, and age estimation with confidence intervals.
//!
//! Three statistics compare two contemporary word lists separated by `2t`
//! years of independent evolution from a common ancestor:
//!
//! * `omega`: fraction of concepts whose words are still cognate
//!   (neither side replaced). Mean `e^(-2 lambda t)`.
//! * `phi`: mean positional character overlap, recentred and rescaled by
//!   the alphabet so chance matches average to zero. Mean
//!   `e^(-2 (lambda + mu) t)` over all concepts, cognate or not.
//! * `varphi`: the same sum restricted to cognate concepts (non-cognate
//!   terms set to zero). Same mean as `phi`, strictly smaller variance.
//! * `chi = phi - varphi`: pure noise from non-cognate pairs, mean zero.
//!
//! The relative dating error of a statistic with mean `E(t)` and variance
//! `V(t)` is `ln((E + 2 sqrt(V)) / (E - 2 sqrt(V))) / (4 k t)` where `k` is
//! the exponential decay rate of the mean. When `E - 2 sqrt(V) <= 0` the
//! 95% band reaches zero and the statistic cannot date the split at all.

use crate::error::{Error, Result};
use crate::params::EvolutionParams;

/// Mean and variance of a comparison statistic at a fixed separation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

/// Statistic whose dating precision is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// Cognate fraction.
    Omega,
    /// Alphabet-adjusted character overlap over all concepts.
    Phi,
    /// Alphabet-adjusted character overlap over cognate concepts only.
    Varphi,
}

/// Inversion rule used by [`date_from_statistic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatingMethod {
    /// Invert the cognate fraction between two sister lists.
    Omega,
    /// Invert the blind character overlap between two sister lists.
    Phi,
    /// Invert the cognate-restricted character overlap.
    Varphi,
    /// Compare a list against its own ancestor: only one lineage evolves,
    /// so the decay rate is `lambda` instead of `2 lambda`.
    Ancestor,
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Statistic::Omega => "omega",
            Statistic::Phi => "phi",
            Statistic::Varphi => "varphi",
        })
    }
}

impl std::fmt::Display for DatingMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DatingMethod::Omega => "omega",
            DatingMethod::Phi => "phi",
            DatingMethod::Varphi => "varphi",
            DatingMethod::Ancestor => "ancestor",
        })
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "separation time must be >= 0 (got {t})"
        )));
    }
    Ok(())
}

/// Mean and variance of the cognate fraction `omega` at separation `t`.
///
/// Each of the `m` concepts stays cognate independently with probability
/// `e^(-2 lambda t)`, so the count is binomial and the fraction has
/// variance `p (1 - p) / m`.
pub fn moments_omega(p: &EvolutionParams, t: f64) -> Result<MomentPair> {
    p.validate()?;
    check_time(t)?;
    let mean = (-2.0 * p.lambda * t).exp();
    Ok(MomentPair {
        mean,
        variance: mean * (1.0 - mean) / f64::from(p.m),
    })
}

/// Probability that one character position agrees between two cognate
/// words at separation `t`: `(n-1)/n * e^(-2 mu t) + 1/n`.
///
/// Either no observable mutation hit the position on either side, or the
/// two sides happen to agree by chance (probability `1/n`).
pub fn char_match_prob_cognate(p: &EvolutionParams, t: f64) -> Result<f64> {
    p.validate()?;
    check_time(t)?;
    let n = p.n_eff;
    Ok((n - 1.0) / n * (-2.0 * p.mu * t).exp() + 1.0 / n)
}

/// The three additive contributions to `Var[phi]`, in order:
///
/// 1. replacement noise: which concepts survived as cognates,
/// 2. mutation noise within cognate words,
/// 3. chance-agreement noise from non-cognate word pairs.
///
/// `Var[phi]` is their sum, `Var[varphi]` the first two, `Var[chi]` the
/// third alone.
pub fn phi_variance_terms(p: &EvolutionParams, t: f64) -> Result<[f64; 3]> {
    p.validate()?;
    p.require_alphabet_above_one()?;
    check_time(t)?;
    let el = (-2.0 * p.lambda * t).exp();
    let em = (-2.0 * p.mu * t).exp();
    let m = f64::from(p.m);
    let n = p.n_eff;
    let l = p.l_eff;
    let replacement = el * (1.0 - el) * em * em / m;
    let mutation = el * (1.0 - em) * (em + 1.0 / (n - 1.0)) / (m * l);
    let chance = (1.0 - el) / (m * l * (n - 1.0));
    Ok([replacement, mutation, chance])
}

/// Moments of the blind overlap statistic `phi` at separation `t`.
pub fn moments_phi(p: &EvolutionParams, t: f64) -> Result<MomentPair> {
    let [t1, t2, t3] = phi_variance_terms(p, t)?;
    Ok(MomentPair {
        mean: (-2.0 * (p.lambda + p.mu) * t).exp(),
        // Summed as (t1 + t2) + t3 so that the decomposition
        // Var[phi] = Var[varphi] + Var[chi] holds bit-exactly.
        variance: (t1 + t2) + t3,
    })
}

/// Moments of the cognate-restricted overlap `varphi` at separation `t`.
pub fn moments_varphi(p: &EvolutionParams, t: f64) -> Result<MomentPair> {
    let [t1, t2, _] = phi_variance_terms(p, t)?;
    Ok(MomentPair {
        mean: (-2.0 * (p.lambda + p.mu) * t).exp(),
        variance: t1 + t2,
    })
}

/// Moments of the noise component `chi = phi - varphi` at separation `t`.
pub fn moments_chi(p: &EvolutionParams, t: f64) -> Result<MomentPair> {
    let [_, _, t3] = phi_variance_terms(p, t)?;
    Ok(MomentPair {
        mean: 0.0,
        variance: t3,
    })
}

/// Relative dating error from explicit moments.
///
/// `rate` is the exponential decay rate of the mean (`lambda` for the
/// cognate fraction, `lambda + mu` for the overlap statistics). Errors
/// with [`Error::BandCollapse`] when `mean - 2 sqrt(variance) <= 0`.
pub fn band_relative_error(mean: f64, variance: f64, rate: f64, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "decay rate must be finite and > 0 (got {rate})"
        )));
    }
    if !(variance >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "variance must be >= 0 (got {variance})"
        )));
    }
    let half = 2.0 * variance.sqrt();
    if mean - half <= 0.0 {
        return Err(Error::BandCollapse {
            statistic: "statistic".into(),
            t,
        });
    }
    Ok(((mean + half) / (mean - half)).ln() / (4.0 * rate * t))
}

/// Relative dating error of `statistic` at separation `t` under `p`.
pub fn relative_error(p: &EvolutionParams, t: f64, statistic: Statistic) -> Result<f64> {
    let (moments, rate) = match statistic {
        Statistic::Omega => (moments_omega(p, t)?, p.lambda),
        Statistic::Phi => (moments_phi(p, t)?, p.lambda + p.mu),
        Statistic::Varphi => (moments_varphi(p, t)?, p.lambda + p.mu),
    };
    band_relative_error(moments.mean, moments.variance, rate, t).map_err(|e| match e {
        Error::BandCollapse { t, .. } => Error::BandCollapse {
            statistic: statistic.to_string(),
            t,
        },
        other => other,
    })
}

/// One grid point of the three relative-error curves. A band collapse is
/// recorded as `f64::INFINITY` rather than an error so curves can extend
/// past the usable horizon of a statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub t: f64,
    pub r_omega: f64,
    pub r_phi: f64,
    pub r_varphi: f64,
}

/// Relative-error curves for all three statistics on the closed grid
/// `t_min, t_min + step, ..., t_max`.
pub fn error_curves(
    p: &EvolutionParams,
    t_min: f64,
    t_max: f64,
    step: f64,
) -> Result<Vec<CurveRow>> {
    p.validate()?;
    p.require_alphabet_above_one()?;
    if !(t_min.is_finite() && t_max.is_finite() && step.is_finite()) {
        return Err(Error::InvalidGrid("grid bounds must be finite".into()));
    }
    if t_min <= 0.0 {
        return Err(Error::InvalidGrid(format!("t_min must be > 0 (got {t_min})")));
    }
    if t_max < t_min {
        return Err(Error::InvalidGrid(format!(
            "t_max ({t_max}) must be >= t_min ({t_min})"
        )));
    }
    if step <= 0.0 {
        return Err(Error::InvalidGrid(format!("step must be > 0 (got {step})")));
    }
    // Small slack so that an exactly divisible range includes its right
    // endpoint despite rounding in the division.
    let count = ((t_max - t_min) / step + 1e-9).floor() as usize;
    let mut rows = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let t = t_min + i as f64 * step;
        let value = |r: Result<f64>| match r {
            Ok(v) => Ok(v),
            Err(Error::BandCollapse { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        };
        rows.push(CurveRow {
            t,
            r_omega: value(relative_error(p, t, Statistic::Omega))?,
            r_phi: value(relative_error(p, t, Statistic::Phi))?,
            r_varphi: value(relative_error(p, t, Statistic::Varphi))?,
        });
    }
    Ok(rows)
}

/// Point estimate and 95% interval for the separation time recovered from
/// one observed statistic value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatingResult {
    pub method: DatingMethod,
    /// `-ln(value) / rate`.
    pub t_hat: f64,
    /// Lower bound from inverting `value + 2 sd`, clamped at zero.
    pub t_lower: f64,
    /// Upper bound from inverting `value - 2 sd`; `f64::INFINITY` when the
    /// band reaches zero and no upper bound exists.
    pub t_upper: f64,
}

fn variance_at(p: &EvolutionParams, method: DatingMethod, t: f64) -> Result<f64> {
    Ok(match method {
        DatingMethod::Omega => moments_omega(p, t)?.variance,
        DatingMethod::Phi => moments_phi(p, t)?.variance,
        DatingMethod::Varphi => moments_varphi(p, t)?.variance,
        // One lineage against a frozen ancestor: each concept survives
        // with probability e^(-lambda t), binomial over m concepts.
        DatingMethod::Ancestor => {
            let s = (-p.lambda * t).exp();
            s * (1.0 - s) / f64::from(p.m)
        }
    })
}

/// Inverts an observed statistic value into a separation time.
///
/// The point estimate is `t_hat = -ln(value) / rate` with `rate` equal to
/// `2 lambda` (omega), `2 (lambda + mu)` (phi, varphi) or `lambda`
/// (ancestor). The interval endpoints invert `value +- 2 sd`, with the
/// standard deviation taken from the model variance evaluated at `t_hat`.
/// A value of exactly 1 dates the split to the present with a degenerate
/// interval; a value at or below `2 sd` of zero has no finite upper bound.
pub fn date_from_statistic(
    value: f64,
    p: &EvolutionParams,
    method: DatingMethod,
) -> Result<DatingResult> {
    p.validate()?;
    if matches!(method, DatingMethod::Phi | DatingMethod::Varphi) {
        p.require_alphabet_above_one()?;
    }
    if value.is_nan() || value > 1.0 {
        return Err(Error::StatisticOutOfRange(value));
    }
    if value <= 0.0 {
        return Err(Error::NoAncestorSignal(value));
    }
    let rate = match method {
        DatingMethod::Omega => 2.0 * p.lambda,
        DatingMethod::Phi | DatingMethod::Varphi => 2.0 * (p.lambda + p.mu),
        DatingMethod::Ancestor => p.lambda,
    };
    if rate <= 0.0 {
        return Err(Error::InvalidParameter(
            "all decay rates are zero: statistic carries no time information".into(),
        ));
    }
    let t_hat = -value.ln() / rate;
    let half = 2.0 * variance_at(p, method, t_hat)?.sqrt();
    let upper_value = value + half;
    let lower_value = value - half;
    let t_lower = if upper_value >= 1.0 {
        0.0
    } else {
        -upper_value.ln() / rate
    };
    let t_upper = if lower_value > 0.0 {
        -lower_value.ln() / rate
    } else {
        f64::INFINITY
    };
    Ok(DatingResult {
        method,
        t_hat,
        t_lower,
        t_upper,
    })
}
