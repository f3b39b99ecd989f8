//! Small statistics helpers shared by the estimators.

/// Half-width of the Wilson score interval for `successes` out of `trials`
/// at `z` standard normal units. Reported as the standard error of Monte
/// Carlo probability estimates (`z = 1`); unlike the Wald width it stays
/// informative at empirical probabilities of exactly 0 or 1.
pub fn wilson_half_width(successes: u64, trials: u64, z: f64) -> f64 {
    assert!(trials > 0, "wilson interval needs at least one trial");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    (z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()) / denom
}

/// Wilson score interval `(lo, hi)` clipped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = wilson_half_width(successes, trials, z);
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_near_half_matches_wald() {
        let se = wilson_half_width(5000, 10_000, 1.0);
        let wald = (0.5f64 * 0.5 / 10_000.0).sqrt();
        assert!((se - wald).abs() < 1e-4);
    }

    #[test]
    fn wilson_nondegenerate_at_extremes() {
        let se = wilson_half_width(0, 1000, 1.0);
        assert!(se > 0.0 && se < 0.01);
        let (lo, hi) = wilson_interval(1000, 1000, 1.0);
        assert!(lo < 1.0 && hi == 1.0);
    }
}
