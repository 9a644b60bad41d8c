//! Monte-Carlo harness: rejection-rate curves over k and the k-selection
//! heuristic.
//!
//! ## Purpose
//! Reproduce the simulation protocol behind the power studies: draw `m`
//! samples of size `n` from a chosen distribution, run a test at every k in
//! a grid, and report per-k rejection rates with Monte-Carlo standard
//! errors. A separate classifier turns a per-k trace of scores into the
//! practical accept/reject/oscillating reading used when no single k is
//! trusted.
//!
//! ## Key behaviors
//! - Deterministic: replication r draws from RNG stream r of the
//!   experiment seed, and parallel execution reduces in replication order,
//!   so identical specs produce byte-identical curves.
//! - Baseline tests calibrate their critical values internally under
//!   Exp(1), with max(m, 1000) replications on a seed derived from the
//!   experiment seed (documented constant offset), honoring the requested
//!   side.
//! - α = 1 is an allowed boundary: the critical value degenerates to ∓∞
//!   and every replication whose statistic evaluates cleanly rejects.
//! - Replications whose statistic errors (e.g. tied thresholds) are counted
//!   per k and excluded from the rate's denominator, never silently
//!   dropped.
//!
//! ## Invariants & assumptions
//! - `max(k_grid) < n/2` for the location–scale-free test (it needs
//!   2k < n); k < n for all others; Hasofer–Wang additionally needs k ≥ 2.
//! - The same replication sample is reused across the whole k-grid, as in
//!   the original protocol.

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{
    baseline_reject, baseline_statistic, calibrate_critical_values, BaselineKind,
};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::SeedBundle;
use crate::separators::SeparatorCdf;
use crate::special;
use crate::tail_tests::{compute_hat_r, compute_tilde_r, sigma, Side, SortedSample};

/// Default protocol constants (full scale and desk scale).
pub const DEFAULT_N: usize = 5000;
pub const DEFAULT_M: usize = 1000;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DESK_N: usize = 2000;
pub const DESK_M: usize = 200;

/// Offset applied to the experiment seed to derive the independent seed
/// used for internal baseline calibration.
const CALIBRATION_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

/// Default k-grid: 10, 20, …, 1000.
pub fn default_k_grid() -> Vec<usize> {
    (1..=100).map(|i| 10 * i).collect()
}

/// What population the replications sample from.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSource {
    /// One of the parametric families.
    Parametric(DistributionSpec),
    /// A separating null itself (self-calibration and dominance studies).
    Reference(SeparatorCdf),
}

impl From<DistributionSpec> for SampleSource {
    fn from(d: DistributionSpec) -> Self {
        SampleSource::Parametric(d)
    }
}

impl From<SeparatorCdf> for SampleSource {
    fn from(s: SeparatorCdf) -> Self {
        SampleSource::Reference(s)
    }
}

/// Which test the harness runs at each k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    ScaleFree,
    LocationScaleFree,
    HasoferWang,
    Ratio,
}

/// Complete description of one rejection-curve experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub distribution: SampleSource,
    pub test: TestKind,
    /// Separating null; required for the two tail tests, ignored by the
    /// baselines.
    pub f0: Option<SeparatorCdf>,
    pub n: usize,
    pub m: usize,
    /// Level in (0, 1]; α = 1 is the degenerate always-reject boundary.
    pub alpha: f64,
    pub k_grid: Vec<usize>,
    pub side: Side,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::param("m must be at least 1"));
        }
        if self.n < 3 {
            return Err(Error::param(format!("n must be at least 3, got {}", self.n)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.k_grid.is_empty() {
            return Err(Error::param("k_grid must be non-empty"));
        }
        let k_min = match self.test {
            TestKind::HasoferWang => 2,
            _ => 1,
        };
        for &k in &self.k_grid {
            if k < k_min {
                return Err(Error::param(format!(
                    "k = {k} below the minimum {k_min} for this test"
                )));
            }
            let fits = match self.test {
                TestKind::LocationScaleFree => 2 * k < self.n,
                _ => k < self.n,
            };
            if !fits {
                return Err(Error::param(format!(
                    "k = {k} too large for n = {} under this test",
                    self.n
                )));
            }
        }
        match self.test {
            TestKind::ScaleFree | TestKind::LocationScaleFree => {
                if self.f0.is_none() {
                    return Err(Error::param("tail tests require a separating null f0"));
                }
            }
            _ => {}
        }
        if let SampleSource::Parametric(d) = &self.distribution {
            d.validate()?;
        }
        Ok(())
    }
}

/// Per-k rejection rates with Monte-Carlo uncertainty.
#[derive(Debug, Clone, Serialize)]
pub struct RejectionCurve {
    pub k_grid: Vec<usize>,
    /// Fraction of clean replications that rejected, per k.
    pub rates: Vec<f64>,
    /// √(p(1−p)/m_eff) with m_eff the clean-replication count, per k.
    pub mc_stderr: Vec<f64>,
    /// Replications whose statistic errored, per k.
    pub n_errors: Vec<usize>,
    /// Echo of the spec that produced this curve.
    pub metadata: ExperimentSpec,
}

impl RejectionCurve {
    /// CSV with columns k, rate, stderr, n_errors.
    pub fn to_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().from_writer(writer);
        w.write_record(["k", "rate", "stderr", "n_errors"])
            .map_err(|e| Error::input(format!("CSV write failed: {e}")))?;
        for i in 0..self.k_grid.len() {
            w.write_record([
                self.k_grid[i].to_string(),
                format!("{:.16e}", self.rates[i]),
                format!("{:.16e}", self.mc_stderr[i]),
                self.n_errors[i].to_string(),
            ])
            .map_err(|e| Error::input(format!("CSV write failed: {e}")))?;
        }
        w.flush().map_err(|e| Error::input(format!("CSV write failed: {e}")))?;
        Ok(())
    }

    /// Pretty JSON with the full spec echo.
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::input(format!("JSON serialization failed: {e}")))
    }
}

/// Run the experiment: per-k rejection rates over m replications.
pub fn run_rejection_curve(spec: &ExperimentSpec) -> Result<RejectionCurve> {
    spec.validate()?;
    let always_reject = spec.alpha >= 1.0;

    // Baseline critical values, calibrated on the side-appropriate quantile:
    // reject-right compares against the (1−α)-quantile, reject-left against
    // the α-quantile (requested as the (1−α')-quantile with α' = 1−α).
    let baseline_kind = match spec.test {
        TestKind::HasoferWang => Some(BaselineKind::HasoferWang),
        TestKind::Ratio => Some(BaselineKind::Ratio),
        _ => None,
    };
    let critical_values: Option<Vec<f64>> = match baseline_kind {
        Some(kind) if !always_reject => {
            let level = match spec.side {
                Side::Right => spec.alpha,
                Side::Left => 1.0 - spec.alpha,
            };
            let table = calibrate_critical_values(
                kind,
                &[level],
                &spec.k_grid,
                spec.n,
                spec.m.max(1000),
                spec.seed.wrapping_add(CALIBRATION_SEED_OFFSET),
            )?;
            Some(table.values.iter().map(|row| row[0]).collect())
        }
        _ => None,
    };

    // z_{1−α} for the tail tests (unused at the α = 1 boundary).
    let z = if always_reject { f64::INFINITY } else { special::normal_quantile(1.0 - spec.alpha) };
    let sig = match (&spec.test, &spec.f0) {
        (TestKind::LocationScaleFree, Some(f0)) => sigma(f0.gamma()),
        _ => 1.0,
    };

    let k_len = spec.k_grid.len();
    let decisions: Vec<Vec<Option<bool>>> = (0..spec.m)
        .into_par_iter()
        .map(|r| {
            let bundle = SeedBundle::new(spec.seed).with_stream(r as u64);
            let drawn = match &spec.distribution {
                SampleSource::Parametric(d) => d.sample(spec.n, bundle),
                SampleSource::Reference(s) => s.sample(spec.n, bundle),
            };
            let sample = match drawn.and_then(SortedSample::from_unsorted) {
                Ok(s) => s,
                Err(_) => return vec![None; k_len],
            };
            spec.k_grid
                .iter()
                .enumerate()
                .map(|(ki, &k)| {
                    let reject = match spec.test {
                        TestKind::ScaleFree | TestKind::LocationScaleFree => {
                            let f0 = spec.f0.as_ref().expect("validated");
                            let stat = match spec.test {
                                TestKind::ScaleFree => compute_tilde_r(&sample, k, f0),
                                _ => compute_hat_r(&sample, k, f0),
                            };
                            match stat {
                                Ok(s) => {
                                    if always_reject {
                                        true
                                    } else {
                                        let score = (k as f64).sqrt() * (s - 1.0);
                                        match spec.side {
                                            Side::Right => score > sig * z,
                                            Side::Left => score < -sig * z,
                                        }
                                    }
                                }
                                Err(_) => return None,
                            }
                        }
                        TestKind::HasoferWang | TestKind::Ratio => {
                            let kind = baseline_kind.expect("matched");
                            match baseline_statistic(&sample, k, kind) {
                                Ok(s) => {
                                    if always_reject {
                                        true
                                    } else {
                                        let cv = critical_values.as_ref().expect("calibrated")[ki];
                                        baseline_reject(s, cv, spec.side)
                                    }
                                }
                                Err(_) => return None,
                            }
                        }
                    };
                    Some(reject)
                })
                .collect()
        })
        .collect();

    let mut rates = Vec::with_capacity(k_len);
    let mut stderr = Vec::with_capacity(k_len);
    let mut n_errors = Vec::with_capacity(k_len);
    for ki in 0..k_len {
        let mut rejected = 0usize;
        let mut errors = 0usize;
        for row in &decisions {
            match row[ki] {
                Some(true) => rejected += 1,
                Some(false) => {}
                None => errors += 1,
            }
        }
        let m_eff = spec.m - errors;
        // All replications erroring leaves no estimate; report 0 with the
        // full error count rather than NaN.
        let rate = if m_eff == 0 { 0.0 } else { rejected as f64 / m_eff as f64 };
        let se = if m_eff == 0 { 0.0 } else { (rate * (1.0 - rate) / m_eff as f64).sqrt() };
        rates.push(rate);
        stderr.push(se);
        n_errors.push(errors);
    }

    Ok(RejectionCurve {
        k_grid: spec.k_grid.clone(),
        rates,
        mc_stderr: stderr,
        n_errors,
        metadata: spec.clone(),
    })
}

// ---------------------------------------------------------------------------
// k-selection heuristic
// ---------------------------------------------------------------------------

/// Qualitative reading of a per-k score trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KClass {
    /// Scores trend up and exceed the critical level: reject.
    IncreasingReject,
    /// Scores trend down below the critical level: accept.
    DecreasingAccept,
    /// No well-expressed trend; decide by the small-k exceedance fraction.
    Oscillating,
}

/// Classifier output.
#[derive(Debug, Clone, Serialize)]
pub struct KBehavior {
    pub class: KClass,
    /// Fraction of small-k scores above the critical level u.
    pub exceed_fraction: f64,
    /// Kendall's τ of score against k.
    pub trend_stat: f64,
    /// (k_min, k_max) of the small-k interval the fraction was computed on.
    pub interval: (usize, usize),
}

impl KBehavior {
    /// Overall decision at level `alpha`: trends carry their own verdict,
    /// oscillation rejects when the exceedance fraction beats the level.
    pub fn reject(&self, alpha: f64) -> bool {
        match self.class {
            KClass::IncreasingReject => true,
            KClass::DecreasingAccept => false,
            KClass::Oscillating => self.exceed_fraction > alpha,
        }
    }
}

/// Tuning constants for [`classify_k_behavior`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KBehaviorParams {
    /// |τ| at or above which a trend counts as well expressed.
    pub tau_threshold: f64,
    /// Small-k interval upper edge for the oscillation fraction.
    pub oscillation_k_max: usize,
}

impl Default for KBehaviorParams {
    fn default() -> Self {
        Self { tau_threshold: 0.6, oscillation_k_max: 250 }
    }
}

/// Classify a per-k trace of scores against critical level `u`.
///
/// Needs at least 10 points. Kendall's τ (against k) at or beyond
/// `tau_threshold` in magnitude declares a monotone regime; otherwise the
/// trace counts as oscillating and the exceedance fraction over the small-k
/// window (k ≤ `oscillation_k_max`, or the whole grid if that window is
/// empty) carries the decision.
pub fn classify_k_behavior(
    k_grid: &[usize],
    scores: &[f64],
    u: f64,
    params: &KBehaviorParams,
) -> Result<KBehavior> {
    if k_grid.len() != scores.len() {
        return Err(Error::input(format!(
            "k_grid and scores lengths differ: {} vs {}",
            k_grid.len(),
            scores.len()
        )));
    }
    if k_grid.len() < 10 {
        return Err(Error::input(format!(
            "classification needs at least 10 k-points, got {}",
            k_grid.len()
        )));
    }
    if k_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("k_grid must be strictly increasing"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::input("scores must be finite"));
    }

    let ks: Vec<f64> = k_grid.iter().map(|&k| k as f64).collect();
    let tau = kendall_tau(&ks, scores);
    let class = if tau >= params.tau_threshold {
        KClass::IncreasingReject
    } else if tau <= -params.tau_threshold {
        KClass::DecreasingAccept
    } else {
        KClass::Oscillating
    };

    let in_window: Vec<usize> = (0..k_grid.len())
        .filter(|&i| k_grid[i] <= params.oscillation_k_max)
        .collect();
    let window: &[usize] = if in_window.is_empty() {
        &(0..k_grid.len()).collect::<Vec<_>>()[..]
    } else {
        &in_window[..]
    };
    let exceed = window.iter().filter(|&&i| scores[i] > u).count() as f64 / window.len() as f64;
    let interval = (k_grid[window[0]], k_grid[*window.last().unwrap()]);

    Ok(KBehavior { class, exceed_fraction: exceed, trend_stat: tau, interval })
}

/// Kendall's τ-a between two equal-length sequences:
/// (concordant − discordant) / (n(n−1)/2).
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "kendall_tau needs equal lengths");
    let n = xs.len();
    let mut num = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let sx = (xs[j] - xs[i]).partial_cmp(&0.0).expect("finite") as i64;
            let sy = (ys[j] - ys[i]).partial_cmp(&0.0).expect("finite") as i64;
            num += sx * sy;
        }
    }
    num as f64 / (n * (n - 1) / 2) as f64
}

/// Mann–Kendall trend z-statistic of a sequence (positive ⇒ upward trend),
/// with the tie-corrected variance
/// Var(S) = [n(n−1)(2n+5) − Σ tⱼ(tⱼ−1)(2tⱼ+5)]/18.
pub fn mann_kendall_z(ys: &[f64]) -> f64 {
    let n = ys.len();
    assert!(n >= 2, "mann_kendall_z needs at least 2 points");
    let mut s = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            s += match ys[j].partial_cmp(&ys[i]).expect("finite") {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
            };
        }
    }
    let mut sorted: Vec<f64> = ys.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        if t > 1.0 {
            tie_term += t * (t - 1.0) * (2.0 * t + 5.0);
        }
        i = j;
    }
    let nf = n as f64;
    let var = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - tie_term) / 18.0;
    if var <= 0.0 {
        return 0.0;
    }
    let corrected = if s > 0 {
        s as f64 - 1.0
    } else if s < 0 {
        s as f64 + 1.0
    } else {
        0.0
    };
    corrected / var.sqrt()
}
