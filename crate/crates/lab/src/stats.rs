//! Exact binomial confidence intervals and small summary statistics.

use statrs::distribution::{Beta, ContinuousCDF, Normal};

/// Two-sided Clopper-Pearson interval for a binomial proportion.
///
/// The exact interval: coverage is at least `confidence` for every true
/// proportion, at the price of conservatism. Endpoints are Beta quantiles,
/// `lower = BetaInv(alpha/2; k, n-k+1)` and
/// `upper = BetaInv(1-alpha/2; k+1, n-k)`, closed to 0 and 1 at the
/// boundaries `k = 0` and `k = n`.
///
/// Panics on `trials = 0`, `successes > trials`, or a confidence outside
/// (0, 1); those are caller bugs, not data.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials >= 1, "interval needs at least one trial");
    assert!(successes <= trials, "more successes than trials");
    assert!(confidence > 0.0 && confidence < 1.0, "confidence must be in (0, 1)");
    let alpha = 1.0 - confidence;
    let (k, n) = (successes as f64, trials as f64);
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0).expect("valid Beta shape").inverse_cdf(alpha / 2.0)
    };
    let upper = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k).expect("valid Beta shape").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lower, upper)
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p)
}

/// Half-width of the normal-approximation band for the difference of two
/// proportions, each estimated from `trials` draws:
/// `z * sqrt(p1 (1-p1) / n + p2 (1-p2) / n)`.
///
/// Degenerates to zero when both counts sit at a boundary, so callers
/// comparing small counts should allow for discreteness on top of this.
pub fn two_proportion_halfwidth(k1: u64, k2: u64, trials: u64, confidence: f64) -> f64 {
    assert!(trials >= 1);
    let n = trials as f64;
    let p1 = k1 as f64 / n;
    let p2 = k2 as f64 / n;
    let z = normal_quantile(0.5 + confidence / 2.0);
    z * (p1 * (1.0 - p1) / n + p2 * (1.0 - p2) / n).sqrt()
}

/// Sample mean and standard error of the mean (unbiased variance over n).
/// A single observation reports zero standard error.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    assert!(!values.is_empty(), "mean of nothing");
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
