//! Baseline extreme-value statistics and their Monte-Carlo calibration.
//!
//! ## Purpose
//! Two classical statistics used as comparison points for the tail tests:
//! the Hasofer–Wang normality-of-extremes statistic and the
//! range-over-mean-excess ratio statistic. Neither has a usable closed-form
//! null distribution at finite k, so critical values are calibrated by
//! simulation under i.i.d. Exp(1) samples.
//!
//! ## Key behaviors
//! - `hasofer_wang`: W(k) = k·(mean − X₍n−k+1₎)² / [(k−1)·Σ(mean − X₍n−j₎)²]
//!   over the top k order statistics.
//! - `ratio_statistic`: (X₍n₎ − X₍n−k₎) / (mean of top k − X₍n−k₎).
//! - `calibrate_critical_values` stores empirical (1−α)-quantiles of the
//!   statistic under the exponential null, for each requested α and k.
//! - Rejection direction matters: against heavy-tailed alternatives the
//!   Hasofer–Wang statistic *falls* (its denominator variance explodes), so
//!   its discriminating side is `Left`; the ratio statistic *rises*, side
//!   `Right`. Callers pick the side; [`suggested_side`] records these
//!   defaults.
//!
//! ## Invariants & assumptions
//! - Hasofer–Wang needs k ≥ 2; both statistics error on a degenerate
//!   (all-tied) top block rather than returning 0/0.
//! - Calibration requires m ≥ 1000 replications.

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::SeedBundle;
use crate::tail_tests::{Side, SortedSample};

/// Which baseline statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    HasoferWang,
    Ratio,
}

/// The side on which each baseline discriminates against heavy-tailed
/// alternatives (see module docs).
pub fn suggested_side(kind: BaselineKind) -> Side {
    match kind {
        BaselineKind::HasoferWang => Side::Left,
        BaselineKind::Ratio => Side::Right,
    }
}

/// Hasofer–Wang statistic over the top k order statistics (k ≥ 2).
pub fn hasofer_wang(sample: &SortedSample, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::input(format!("Hasofer–Wang needs k ≥ 2, got {k}")));
    }
    let top = sample.top(k)?;
    let kf = k as f64;
    let mean = top.iter().sum::<f64>() / kf;
    let lowest = top[0]; // X₍n−k+1₎
    let spread: f64 = top.iter().map(|&x| (mean - x) * (mean - x)).sum();
    if spread == 0.0 {
        return Err(Error::input("top-k block is constant: statistic undefined"));
    }
    Ok(kf * (mean - lowest) * (mean - lowest) / ((kf - 1.0) * spread))
}

/// Range over mean excess of the top k, both measured above X₍n−k₎
/// (requires k < n).
pub fn ratio_statistic(sample: &SortedSample, k: usize) -> Result<f64> {
    let top = sample.top(k)?;
    let threshold = sample.threshold(k)?;
    let kf = k as f64;
    let mean = top.iter().sum::<f64>() / kf;
    if mean == threshold {
        return Err(Error::input("top-k block equals the threshold: statistic undefined"));
    }
    Ok((top[k - 1] - threshold) / (mean - threshold))
}

/// Evaluate a baseline statistic by kind.
pub fn baseline_statistic(sample: &SortedSample, k: usize, kind: BaselineKind) -> Result<f64> {
    match kind {
        BaselineKind::HasoferWang => hasofer_wang(sample, k),
        BaselineKind::Ratio => ratio_statistic(sample, k),
    }
}

/// Reject when the statistic falls on the chosen side of its critical value.
pub fn baseline_reject(statistic: f64, critical_value: f64, side: Side) -> bool {
    match side {
        Side::Right => statistic > critical_value,
        Side::Left => statistic < critical_value,
    }
}

/// Monte-Carlo critical values of a baseline statistic under Exp(1).
///
/// `values[ki][ai]` is the empirical (1 − alpha_levels[ai])-quantile of the
/// statistic at k_grid[ki], over `m` replications of sample size `n`.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalValueTable {
    pub kind: BaselineKind,
    pub alpha_levels: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub values: Vec<Vec<f64>>,
}

impl CriticalValueTable {
    /// Critical value at (k, α), if both are in the table (α matched to
    /// 1e-12).
    pub fn critical_value(&self, k: usize, alpha: f64) -> Option<f64> {
        let ki = self.k_grid.iter().position(|&kk| kk == k)?;
        let ai = self
            .alpha_levels
            .iter()
            .position(|&a| (a - alpha).abs() < 1e-12)?;
        Some(self.values[ki][ai])
    }

    /// Long-form CSV: kind, n, m, seed, k, alpha, critical_value.
    pub fn to_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv_writer(writer);
        w.write_record(["kind", "n", "m", "seed", "k", "alpha", "critical_value"])
            .map_err(|e| Error::input(format!("CSV write failed: {e}")))?;
        let kind = match self.kind {
            BaselineKind::HasoferWang => "hasofer_wang",
            BaselineKind::Ratio => "ratio",
        };
        for (ki, &k) in self.k_grid.iter().enumerate() {
            for (ai, &alpha) in self.alpha_levels.iter().enumerate() {
                w.write_record([
                    kind.to_string(),
                    self.n.to_string(),
                    self.m.to_string(),
                    self.seed.to_string(),
                    k.to_string(),
                    format!("{alpha:.16e}"),
                    format!("{:.16e}", self.values[ki][ai]),
                ])
                .map_err(|e| Error::input(format!("CSV write failed: {e}")))?;
            }
        }
        w.flush().map_err(|e| Error::input(format!("CSV write failed: {e}")))?;
        Ok(())
    }
}

fn csv_writer<W: std::io::Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(writer)
}

/// Simulate `m` Exp(1) samples of size `n` (replication r on RNG stream r of
/// `seed`) and extract empirical (1−α)-quantiles of the statistic.
///
/// Quantile convention: with the m simulated values sorted ascending, the
/// p-quantile is entry ⌈p·m⌉ − 1 (clamped), the inverse-cdf convention.
pub fn calibrate_critical_values(
    kind: BaselineKind,
    alpha_levels: &[f64],
    k_grid: &[usize],
    n: usize,
    m: usize,
    seed: u64,
) -> Result<CriticalValueTable> {
    if m < 1000 {
        return Err(Error::param(format!(
            "calibration needs at least 1000 replications, got {m}"
        )));
    }
    if alpha_levels.is_empty() || k_grid.is_empty() {
        return Err(Error::input("alpha_levels and k_grid must be non-empty"));
    }
    if alpha_levels.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
        return Err(Error::param("alpha levels must lie in (0, 1)"));
    }
    let k_min = match kind {
        BaselineKind::HasoferWang => 2,
        BaselineKind::Ratio => 1,
    };
    for &k in k_grid {
        if k < k_min || k >= n {
            return Err(Error::input(format!(
                "k = {k} outside the valid range [{k_min}, {}] for n = {n}",
                n - 1
            )));
        }
    }

    let null = DistributionSpec::Exponential { rate: 1.0, location: 0.0 };
    // stats[r][ki]
    let stats: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|r| {
            let draws = null
                .sample(n, SeedBundle::new(seed).with_stream(r as u64))
                .expect("exponential sampling cannot fail");
            let sample = SortedSample::from_unsorted(draws).expect("n ≥ 3 validated");
            k_grid
                .iter()
                .map(|&k| baseline_statistic(&sample, k, kind).expect("k range validated"))
                .collect()
        })
        .collect();

    let values = k_grid
        .iter()
        .enumerate()
        .map(|(ki, _)| {
            let mut col: Vec<f64> = stats.iter().map(|row| row[ki]).collect();
            col.sort_by(|a, b| a.partial_cmp(b).expect("statistics are finite"));
            alpha_levels
                .iter()
                .map(|&alpha| {
                    let p = 1.0 - alpha;
                    let idx = ((p * m as f64).ceil() as usize).clamp(1, m) - 1;
                    col[idx]
                })
                .collect()
        })
        .collect();

    Ok(CriticalValueTable {
        kind,
        alpha_levels: alpha_levels.to_vec(),
        k_grid: k_grid.to_vec(),
        n,
        m,
        seed,
        values,
    })
}
