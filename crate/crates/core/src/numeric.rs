//! Small numeric helpers: compensated summation and sample moments.
//!
//! All reductions in this crate run in a fixed order so that results are
//! bit-identical regardless of thread count; these helpers keep that
//! property while limiting round-off on long sums.

/// Neumaier variant of Kahan summation.
///
/// Tracks a running compensation term so that adding many small values to
/// a large accumulator loses far less precision than naive `+=`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of a slice, in slice order.
pub fn kahan_sum(values: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

/// Mean and unbiased sample variance (denominator `n - 1`) via a two-pass
/// compensated computation. Returns variance 0 for a single observation.
pub fn sample_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!(n > 0, "sample_moments requires at least one value");
    let mean = kahan_sum(values) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let mut acc = KahanSum::new();
    for &v in values {
        let d = v - mean;
        acc.add(d * d);
    }
    (mean, acc.total() / (n - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_ill_conditioned_sum() {
        // 1 + 1e16 - 1e16 repeatedly: naive summation drops the ones.
        let mut values = vec![];
        for _ in 0..1000 {
            values.push(1.0);
            values.push(1e16);
            values.push(-1e16);
        }
        assert_eq!(kahan_sum(&values), 1000.0);
        let naive: f64 = values.iter().sum();
        assert_ne!(naive, 1000.0);
    }

    #[test]
    fn moments_match_direct_formula() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        let (mean, var) = sample_moments(&xs);
        assert!((mean - 5.0).abs() < 1e-15);
        // Sum of squared deviations is 32; unbiased variance 32/7.
        assert!((var - 32.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn single_observation_has_zero_variance() {
        let (mean, var) = sample_moments(&[3.5]);
        assert_eq!(mean, 3.5);
        assert_eq!(var, 0.0);
    }
}
