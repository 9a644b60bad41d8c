//! Tail statistics and the scale-free / location–scale-free hypothesis
//! tests.
//!
//! ## Purpose
//! Given the top k order statistics of a sample and a separating null F₀,
//! these statistics measure how fast the data's tail decays relative to
//! F₀'s. All three average the transformed log-survival of the top
//! exceedances; under the null each is asymptotically normal around 1 with
//! √k rate, so `score = √k·(statistic − 1)` is compared against a normal
//! critical value.
//!
//! ## The three statistics
//! - `compute_r`: plain (not invariant) — ln S₀(X₍n−k₎) − mean ln S₀(X₍i₎)
//!   over the top k.
//! - `compute_tilde_r`: scale-free — the top k are rescaled by
//!   u₀(n/k)/X₍n−k₎ before being pushed through ln S₀.
//! - `compute_hat_r`: location–scale-free — the top k are mapped affinely
//!   so that X₍n−k₎ ↦ u₀(n/k) and X₍n−2k₎ ↦ u₀(n/(2k)).
//!
//! ## Key behaviors
//! - Side `Right` rejects for large scores (sample heavier-tailed than F₀),
//!   `Left` for small scores (lighter-tailed).
//! - The scale-free score uses σ = 1; the location–scale-free score uses
//!   σ(γ) from [`sigma2`], with γ taken from the separator.
//! - `*_from_tail` variants accept the top-k values, the threshold order
//!   statistics and an *external* population size, for censored inputs
//!   where only exceedances over a threshold were recorded.
//!
//! ## Invariants & assumptions
//! - Samples are sorted ascending; ties among thresholds of the
//!   location–scale statistic (X₍n−k₎ = X₍n−2k₎) are a hard error.
//! - Values beyond F₀'s support (survival 0) are a hard error; values below
//!   the support floor contribute ln S₀ = 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::separators::SeparatorCdf;
use crate::special;

/// A validated, ascending-sorted sample.
#[derive(Debug, Clone)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Sort and validate raw data (all finite, n ≥ 3).
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::input(format!(
                "need at least 3 observations, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("sample contains non-finite values"));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
        Ok(Self { values })
    }

    /// Wrap data that is already nondecreasing (validated).
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::input(format!(
                "need at least 3 observations, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("sample contains non-finite values"));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::input("values are not sorted ascending"));
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// All values, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The k largest values, ascending. Requires 1 ≤ k ≤ n.
    pub fn top(&self, k: usize) -> Result<&[f64]> {
        let n = self.values.len();
        if k == 0 || k > n {
            return Err(Error::input(format!("k must satisfy 1 ≤ k ≤ {n}, got {k}")));
        }
        Ok(&self.values[n - k..])
    }

    /// The (k+1)-th largest value X₍n−k₎. Requires k < n.
    pub fn threshold(&self, k: usize) -> Result<f64> {
        let n = self.values.len();
        if k >= n {
            return Err(Error::input(format!("k must satisfy k < n = {n}, got {k}")));
        }
        Ok(self.values[n - k - 1])
    }
}

/// Rejection direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Reject for large scores: alternative is heavier-tailed than F₀.
    Right,
    /// Reject for small scores: alternative is lighter-tailed than F₀.
    Left,
}

/// Everything a test decision produced.
#[derive(Debug, Clone, Serialize)]
pub struct TestOutcome {
    /// The raw tail statistic (centered at 1 under the null).
    pub statistic: f64,
    /// √k·(statistic − 1).
    pub score: f64,
    /// Null standard deviation of the score.
    pub sigma: f64,
    /// Critical value the score was compared against (already scaled by σ).
    pub threshold: f64,
    /// One-sided p-value for the requested side.
    pub p_value: f64,
    pub reject: bool,
    pub side: Side,
    pub k: usize,
    /// Population size n (may exceed the number of recorded values when the
    /// tail was supplied externally).
    pub n: usize,
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Plain statistic: ln S₀(threshold) − mean ln S₀ over the top k.
pub fn compute_r(sample: &SortedSample, k: usize, f0: &SeparatorCdf) -> Result<f64> {
    let tail = sample.top(k)?;
    let threshold = sample.threshold(k)?;
    r_from_tail(tail, threshold, f0)
}

/// Plain statistic from an explicit tail: `tail` holds the k largest
/// observations and `threshold` is X₍n−k₎.
pub fn r_from_tail(tail: &[f64], threshold: f64, f0: &SeparatorCdf) -> Result<f64> {
    if tail.is_empty() {
        return Err(Error::input("tail must contain at least one value"));
    }
    let base = finite_log_sf(f0, threshold)?;
    let mut acc = 0.0;
    for &x in tail {
        acc += finite_log_sf(f0, x)?;
    }
    Ok(base - acc / tail.len() as f64)
}

/// Scale-free statistic: top k rescaled so the threshold maps to u₀(n/k).
pub fn compute_tilde_r(sample: &SortedSample, k: usize, f0: &SeparatorCdf) -> Result<f64> {
    let n = sample.n();
    if k >= n {
        return Err(Error::input(format!("k must satisfy k < n = {n}, got {k}")));
    }
    let tail = sample.top(k)?;
    let threshold = sample.threshold(k)?;
    tilde_r_from_tail(tail, threshold, n as f64, f0)
}

/// Scale-free statistic from an explicit tail with population size
/// `population_n` (which may exceed `tail.len() + 1`).
pub fn tilde_r_from_tail(
    tail: &[f64],
    threshold: f64,
    population_n: f64,
    f0: &SeparatorCdf,
) -> Result<f64> {
    let k = tail.len();
    if k == 0 {
        return Err(Error::input("tail must contain at least one value"));
    }
    if !(population_n > k as f64) {
        return Err(Error::input(format!(
            "population size must exceed k = {k}, got {population_n}"
        )));
    }
    if !(threshold > 0.0) {
        return Err(Error::input(format!(
            "scale-free statistic requires a positive threshold, got {threshold}"
        )));
    }
    let t = population_n / k as f64;
    let u0 = f0.quantile(t)?;
    let mut acc = 0.0;
    for &x in tail {
        if x < threshold {
            return Err(Error::input("tail values must lie at or above the threshold"));
        }
        acc += finite_log_sf(f0, u0 * (x / threshold))?;
    }
    // ln(k/n) = −ln t
    Ok(-t.ln() - acc / k as f64)
}

/// Location–scale-free statistic: top k mapped affinely by the two
/// thresholds X₍n−k₎ ↦ u₀(n/k), X₍n−2k₎ ↦ u₀(n/(2k)).
pub fn compute_hat_r(sample: &SortedSample, k: usize, f0: &SeparatorCdf) -> Result<f64> {
    let n = sample.n();
    if 2 * k >= n {
        return Err(Error::input(format!(
            "location–scale statistic requires 2k < n (k = {k}, n = {n})"
        )));
    }
    let tail = sample.top(k)?;
    let threshold = sample.threshold(k)?;
    let threshold2 = sample.threshold(2 * k)?;
    hat_r_from_tail(tail, threshold, threshold2, n as f64, f0)
}

/// Location–scale-free statistic from an explicit tail; `threshold` is
/// X₍n−k₎ and `threshold2` is X₍n−2k₎ of the population.
pub fn hat_r_from_tail(
    tail: &[f64],
    threshold: f64,
    threshold2: f64,
    population_n: f64,
    f0: &SeparatorCdf,
) -> Result<f64> {
    let k = tail.len();
    if k == 0 {
        return Err(Error::input("tail must contain at least one value"));
    }
    if !(population_n > 2.0 * k as f64) {
        return Err(Error::input(format!(
            "population size must exceed 2k = {}, got {population_n}",
            2 * k
        )));
    }
    if threshold == threshold2 {
        return Err(Error::input(format!(
            "tied thresholds X(n−k) = X(n−2k) = {threshold}: affine tail map is degenerate"
        )));
    }
    if threshold < threshold2 {
        return Err(Error::input("thresholds out of order: X(n−k) < X(n−2k)"));
    }
    let t = population_n / k as f64;
    let u0_k = f0.quantile(t)?;
    let u0_2k = f0.quantile(population_n / (2.0 * k as f64))?;
    let slope = (u0_k - u0_2k) / (threshold - threshold2);
    let mut acc = 0.0;
    for &x in tail {
        if x < threshold {
            return Err(Error::input("tail values must lie at or above the threshold"));
        }
        acc += finite_log_sf(f0, u0_k + (x - threshold) * slope)?;
    }
    Ok(-t.ln() - acc / k as f64)
}

fn finite_log_sf(f0: &SeparatorCdf, x: f64) -> Result<f64> {
    let v = f0.log_survival(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::input(format!(
            "value {x:e} lies beyond the support of {}",
            f0.label()
        )))
    }
}

// ---------------------------------------------------------------------------
// Null variance of the location–scale-free score
// ---------------------------------------------------------------------------

/// Asymptotic variance of the location–scale-free score when the separator
/// has tail index γ ≥ 0:
///
/// σ²(γ) = 1 + γ² / (2(γ+1)²(2^γ − 1)²),  σ²(0) = 1 + 1/(2 ln²2).
pub fn sigma2(gamma: f64) -> f64 {
    assert!(gamma >= 0.0 && gamma.is_finite(), "tail index must satisfy γ ≥ 0");
    if gamma == 0.0 {
        return 1.0 + 0.5 / (std::f64::consts::LN_2 * std::f64::consts::LN_2);
    }
    let pow_m1 = (gamma * std::f64::consts::LN_2).exp_m1(); // 2^γ − 1, stable near 0
    let ratio = gamma / ((gamma + 1.0) * pow_m1);
    1.0 + 0.5 * ratio * ratio
}

/// σ(γ) = √σ²(γ).
pub fn sigma(gamma: f64) -> f64 {
    sigma2(gamma).sqrt()
}

// ---------------------------------------------------------------------------
// Decision rules
// ---------------------------------------------------------------------------

/// Scale-free test at level `alpha` against the chosen side.
pub fn scale_free_test(
    sample: &SortedSample,
    k: usize,
    f0: &SeparatorCdf,
    alpha: f64,
    side: Side,
) -> Result<TestOutcome> {
    let statistic = compute_tilde_r(sample, k, f0)?;
    outcome_from_statistic(statistic, k, sample.n(), 1.0, alpha, side)
}

/// Location–scale-free test at level `alpha`; σ comes from the separator's
/// tail index γ.
pub fn location_scale_free_test(
    sample: &SortedSample,
    k: usize,
    f0: &SeparatorCdf,
    alpha: f64,
    side: Side,
) -> Result<TestOutcome> {
    let statistic = compute_hat_r(sample, k, f0)?;
    outcome_from_statistic(statistic, k, sample.n(), sigma(f0.gamma()), alpha, side)
}

/// Assemble a decision from a precomputed statistic: score = √k(stat − 1)
/// is compared against ±σ·z_{1−α} and converted to a one-sided p-value.
///
/// Exposed so censored-input workflows (external population size) can reuse
/// the exact same rule.
pub fn outcome_from_statistic(
    statistic: f64,
    k: usize,
    n: usize,
    sigma: f64,
    alpha: f64,
    side: Side,
) -> Result<TestOutcome> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    let score = (k as f64).sqrt() * (statistic - 1.0);
    let z = special::normal_quantile(1.0 - alpha);
    let (threshold, reject, p_value) = match side {
        Side::Right => {
            let thr = sigma * z;
            (thr, score > thr, special::normal_sf(score / sigma))
        }
        Side::Left => {
            let thr = -sigma * z;
            (thr, score < thr, special::normal_cdf(score / sigma))
        }
    };
    Ok(TestOutcome {
        statistic,
        score,
        sigma,
        threshold,
        p_value,
        reject,
        side,
        k,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedBundle;

    #[test]
    fn sorted_sample_validation() {
        assert!(SortedSample::from_unsorted(vec![1.0, 2.0]).is_err());
        assert!(SortedSample::from_unsorted(vec![1.0, f64::NAN, 2.0]).is_err());
        assert!(SortedSample::from_sorted(vec![2.0, 1.0, 3.0]).is_err());
        let s = SortedSample::from_unsorted(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.top(2).unwrap(), &[2.0, 3.0]);
        assert_eq!(s.threshold(2).unwrap(), 1.0);
    }

    #[test]
    fn plain_statistic_on_pareto_by_hand() {
        // Sample {1,2,4,8}, unit Pareto null, k = 2:
        // R = −ln(1/2) + ½(ln(1/4) + ln(1/8)) each with signs per definition.
        let s = SortedSample::from_unsorted(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        let f0 = SeparatorCdf::pareto(1.0).unwrap();
        let r = compute_r(&s, 2, &f0).unwrap();
        let expect = (0.5f64).ln() - 0.5 * ((0.25f64).ln() + (0.125f64).ln());
        assert!((r - expect).abs() < 1e-15);
    }

    #[test]
    fn scale_free_statistic_is_exactly_scale_invariant_on_pareto() {
        // For the Pareto reference the rescaling makes R̃ equal to R with
        // the threshold mapped to u₀(n/k); check hand value on {1,2,4,8}.
        let s = SortedSample::from_unsorted(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        let f0 = SeparatorCdf::pareto(1.0).unwrap();
        // u₀(4/2) = 2; rescaled top = {4, 8}: R̃ = ln(2/4) − ½(ln S(4)+ln S(8))
        let r = compute_tilde_r(&s, 2, &f0).unwrap();
        let expect = (0.5f64).ln() - 0.5 * ((0.25f64).ln() + (0.125f64).ln());
        assert!((r - expect).abs() < 1e-15);
    }

    #[test]
    fn location_scale_statistic_rejects_tied_thresholds() {
        let s = SortedSample::from_unsorted(vec![1.0, 1.0, 1.0, 2.0, 3.0]).unwrap();
        let f0 = SeparatorCdf::standard_exponential();
        // k = 1: X(n−1) = 2, X(n−2) = 1 — fine. k = 2 needs 2k < n = 5,
        // X(n−2) = 1 = X(n−4): tied.
        assert!(compute_hat_r(&s, 1, &f0).is_ok());
        assert!(compute_hat_r(&s, 2, &f0).is_err());
    }

    #[test]
    fn sigma2_values_and_continuity() {
        assert!((sigma2(0.0) - 2.040_684_490_502_803_9).abs() < 1e-15);
        assert!((sigma2(1.0) - 1.125).abs() < 1e-15);
        assert!((sigma2(1e-8) - sigma2(0.0)).abs() < 1e-6);
        assert!((sigma(0.0) - 1.428_525_285_216_472_5).abs() < 1e-15);
    }

    #[test]
    fn decision_rule_worked_examples() {
        // Statistic 1.2 at k = 100: score 2.0; right-side p = Φ̄(2).
        let o = outcome_from_statistic(1.2, 100, 1000, 1.0, 0.05, Side::Right).unwrap();
        assert!((o.score - 2.0).abs() < 1e-12);
        assert!((o.p_value - 0.022_750_131_948_179_21).abs() < 1e-12);
        assert!(o.reject && (o.threshold - 1.644_853_626_951_472_7).abs() < 1e-12);

        // Statistic 1.3 at k = 100 with γ = 0 variance: score/σ ≈ 2.10004.
        let sig = sigma(0.0);
        let o = outcome_from_statistic(1.3, 100, 1000, sig, 0.05, Side::Right).unwrap();
        assert!((o.score / o.sigma - 3.0 / 1.428_525_285_216_472_5).abs() < 1e-12);
        assert!(o.reject);

        // Left side flips the threshold and the p-value.
        let o = outcome_from_statistic(0.8, 100, 1000, 1.0, 0.05, Side::Left).unwrap();
        assert!((o.score + 2.0).abs() < 1e-12);
        assert!(o.reject && o.threshold < 0.0);
        assert!((o.p_value - 0.022_750_131_948_179_21).abs() < 1e-12);
    }

    #[test]
    fn alpha_validation() {
        assert!(outcome_from_statistic(1.0, 10, 100, 1.0, 0.0, Side::Right).is_err());
        assert!(outcome_from_statistic(1.0, 10, 100, 1.0, 1.0, Side::Right).is_err());
    }

    #[test]
    fn null_statistics_center_near_one() {
        // Quick sanity: exponential data against the exponential reference.
        let f0 = SeparatorCdf::standard_exponential();
        let xs = f0.sample(5000, SeedBundle::new(42)).unwrap();
        let s = SortedSample::from_unsorted(xs).unwrap();
        for k in [50, 200, 500] {
            let r = compute_tilde_r(&s, k, &f0).unwrap();
            assert!((r - 1.0).abs() < 4.0 / (k as f64).sqrt(), "k={k}: R̃ = {r}");
            let rh = compute_hat_r(&s, k, &f0).unwrap();
            assert!(
                (rh - 1.0).abs() < 4.0 * sigma(0.0) / (k as f64).sqrt(),
                "k={k}: R̂ = {rh}"
            );
        }
    }

    #[test]
    fn external_tail_matches_full_sample() {
        let f0 = SeparatorCdf::standard_exponential();
        let xs = f0.sample(1000, SeedBundle::new(7)).unwrap();
        let s = SortedSample::from_unsorted(xs).unwrap();
        let k = 50;
        let full = compute_tilde_r(&s, k, &f0).unwrap();
        let tail = s.top(k).unwrap().to_vec();
        let thr = s.threshold(k).unwrap();
        let ext = tilde_r_from_tail(&tail, thr, 1000.0, &f0).unwrap();
        assert_eq!(full, ext);

        let full_hat = compute_hat_r(&s, k, &f0).unwrap();
        let thr2 = s.threshold(2 * k).unwrap();
        let ext_hat = hat_r_from_tail(&tail, thr, thr2, 1000.0, &f0).unwrap();
        assert_eq!(full_hat, ext_hat);
    }
}
