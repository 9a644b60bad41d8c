//! Grid checks for the tail-ordering conditions behind the tests' power
//! guarantees.
//!
//! ## Purpose
//! The one-sided power statements require that the sampled population's
//! quantile function is dominated by (or dominates) the separator's in a
//! specific relative sense. These checkers evaluate those inequalities on
//! explicit grids and report the worst margin with a witness, so a user can
//! see not only *whether* a pairing is separable but where it is tightest.
//!
//! ## Key behaviors
//! - `check_c_delta`: u_H(c^{1+δ}t)/u_G(ct) ≤ u_H(t)/u_G(t) on a (t, c)
//!   grid; margin = RHS − LHS in ratio space.
//! - `check_survival_bound`: the survival-function comparison implied by
//!   the quantile condition — with ε = δ/(1+δ),
//!   [1−H(c·u_H(t))]^{1−ε}/[1−H(u_H(t))]^{1−ε} ≤ [1−G(c·u_G(t))]/[1−G(u_G(t))]
//!   — evaluated in log space.
//! - `check_b_condition`: x ↦ (1−H(x))^{1−ε}/(1−G(x)) nonincreasing, checked
//!   on adjacent pairs of an x-grid, in log space.
//! - A condition "holds" when the worst margin is ≥ −1e-12 (`MARGIN_TOL`),
//!   absorbing grid-level floating-point noise without hiding violations.
//!
//! ## Invariants & assumptions
//! - H is the lighter-tailed function of the pair in every checker.
//! - Grids must lie inside the region where the asymptotic ordering has set
//!   in (above the crossover point t₀ of the pair); the checkers evaluate
//!   exactly the grid they are given.
//! - Default grids: 40 log-spaced t in [10², 10¹⁰] and 40 log-spaced
//!   c in (1, 10³] (c_i = 10^{3i/40}).

use serde::Serialize;

use crate::error::{Error, Result};

/// Measured inequality slack below which a grid point counts as a violation.
pub const MARGIN_TOL: f64 = 1e-12;

/// Which inequality a [`ConditionReport`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// Quantile-ratio condition at δ > 0.
    CDelta,
    /// Quantile-ratio condition at δ = 0.
    CZero,
    /// Monotone survival-ratio condition.
    B,
    /// Survival-function bound implied by the quantile condition.
    SurvivalBound,
}

/// Outcome of one grid check.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: ConditionKind,
    /// δ for the quantile conditions and the survival bound; ε for `B`.
    pub parameter: f64,
    pub t_grid: Vec<f64>,
    /// Empty for `B`, whose inequality has no second grid dimension.
    pub c_grid: Vec<f64>,
    /// Smallest slack over the grid (negative ⇒ violated there).
    pub worst_margin: f64,
    /// `worst_margin >= -MARGIN_TOL`.
    pub holds: bool,
    /// Grid point attaining the worst margin: (t, c) for the quantile
    /// conditions and the survival bound, (x_i, x_{i+1}) for `B`.
    pub witness: Option<(f64, f64)>,
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "log_spaced needs 0 < lo < hi and n ≥ 2");
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Default t-grid: 40 log-spaced points in [10², 10¹⁰].
pub fn default_t_grid() -> Vec<f64> {
    log_spaced(1e2, 1e10, 40)
}

/// Default c-grid: 40 log-spaced points in (1, 10³], c_i = 10^{3i/40}.
pub fn default_c_grid() -> Vec<f64> {
    (1..=40).map(|i| 10f64.powf(3.0 * i as f64 / 40.0)).collect()
}

/// Check u_H(c^{1+δ}·t)/u_G(c·t) ≤ u_H(t)/u_G(t) over `t_grid` × `c_grid`.
///
/// `u_h` belongs to the lighter-tailed law. δ = 0 gives the plain ordering
/// condition; the report's `condition` field records which one was checked.
pub fn check_c_delta<UH, UG>(
    u_h: UH,
    u_g: UG,
    delta: f64,
    t_grid: &[f64],
    c_grid: &[f64],
) -> Result<ConditionReport>
where
    UH: Fn(f64) -> Result<f64>,
    UG: Fn(f64) -> Result<f64>,
{
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::param(format!("delta must satisfy δ ≥ 0, got {delta}")));
    }
    validate_grid(t_grid, "t_grid", 1.0)?;
    validate_grid(c_grid, "c_grid", 1.0)?;

    let mut worst = f64::INFINITY;
    let mut witness = None;
    for &t in t_grid {
        let base = u_h(t)? / u_g(t)?;
        if !base.is_finite() {
            return Err(Error::input(format!("quantile ratio not finite at t={t:e}")));
        }
        for &c in c_grid {
            let lhs = u_h(c.powf(1.0 + delta) * t)? / u_g(c * t)?;
            let margin = base - lhs;
            if !margin.is_finite() {
                return Err(Error::input(format!(
                    "quantile ratio not finite at t={t:e}, c={c:e}"
                )));
            }
            if margin < worst {
                worst = margin;
                witness = Some((t, c));
            }
        }
    }
    Ok(ConditionReport {
        condition: if delta == 0.0 { ConditionKind::CZero } else { ConditionKind::CDelta },
        parameter: delta,
        t_grid: t_grid.to_vec(),
        c_grid: c_grid.to_vec(),
        worst_margin: worst,
        holds: worst >= -MARGIN_TOL,
        witness,
    })
}

/// Check the survival-function bound implied by the quantile condition at
/// δ: with ε = δ/(1+δ), for every (t, c) in the grid,
///
/// ```text
/// [1−H(c·u_H(t))]^{1−ε} / [1−H(u_H(t))]^{1−ε}  ≤  [1−G(c·u_G(t))] / [1−G(u_G(t))]
/// ```
///
/// Margins are log-space: ln RHS − ln LHS.
pub fn check_survival_bound<LH, LG, UH, UG>(
    log_sf_h: LH,
    u_h: UH,
    log_sf_g: LG,
    u_g: UG,
    delta: f64,
    t_grid: &[f64],
    c_grid: &[f64],
) -> Result<ConditionReport>
where
    LH: Fn(f64) -> f64,
    LG: Fn(f64) -> f64,
    UH: Fn(f64) -> Result<f64>,
    UG: Fn(f64) -> Result<f64>,
{
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::param(format!("delta must satisfy δ ≥ 0, got {delta}")));
    }
    validate_grid(t_grid, "t_grid", 1.0)?;
    validate_grid(c_grid, "c_grid", 1.0)?;
    let eps = delta / (1.0 + delta);

    let mut worst = f64::INFINITY;
    let mut witness = None;
    for &t in t_grid {
        let uh = u_h(t)?;
        let ug = u_g(t)?;
        let lsh_base = log_sf_h(uh);
        let lsg_base = log_sf_g(ug);
        for &c in c_grid {
            let lhs_log = (1.0 - eps) * (log_sf_h(c * uh) - lsh_base);
            let rhs_log = log_sf_g(c * ug) - lsg_base;
            let margin = rhs_log - lhs_log;
            if !margin.is_finite() {
                return Err(Error::input(format!(
                    "log-survival not finite at t={t:e}, c={c:e}"
                )));
            }
            if margin < worst {
                worst = margin;
                witness = Some((t, c));
            }
        }
    }
    Ok(ConditionReport {
        condition: ConditionKind::SurvivalBound,
        parameter: delta,
        t_grid: t_grid.to_vec(),
        c_grid: c_grid.to_vec(),
        worst_margin: worst,
        holds: worst >= -MARGIN_TOL,
        witness,
    })
}

/// Check that x ↦ (1−H(x))^{1−ε}/(1−G(x)) is nonincreasing along `x_grid`
/// (adjacent pairs), with margins in log space.
pub fn check_b_condition<LH, LG>(
    log_sf_h: LH,
    log_sf_g: LG,
    epsilon: f64,
    x_grid: &[f64],
) -> Result<ConditionReport>
where
    LH: Fn(f64) -> f64,
    LG: Fn(f64) -> f64,
{
    if !(epsilon >= 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("epsilon must lie in [0, 1), got {epsilon}")));
    }
    if x_grid.len() < 2 {
        return Err(Error::input("x_grid needs at least two points"));
    }
    for w in x_grid.windows(2) {
        if !(w[0].is_finite() && w[1] > w[0]) {
            return Err(Error::input("x_grid must be finite and strictly increasing"));
        }
    }

    let vals: Vec<f64> = x_grid
        .iter()
        .map(|&x| (1.0 - epsilon) * log_sf_h(x) - log_sf_g(x))
        .collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("log survival ratio not finite on x_grid"));
    }

    let mut worst = f64::INFINITY;
    let mut witness = None;
    for (i, w) in vals.windows(2).enumerate() {
        let margin = w[0] - w[1]; // nonincreasing ⇒ ≥ 0
        if margin < worst {
            worst = margin;
            witness = Some((x_grid[i], x_grid[i + 1]));
        }
    }
    Ok(ConditionReport {
        condition: ConditionKind::B,
        parameter: epsilon,
        t_grid: x_grid.to_vec(),
        c_grid: Vec::new(),
        worst_margin: worst,
        holds: worst >= -MARGIN_TOL,
        witness,
    })
}

fn validate_grid(grid: &[f64], name: &str, floor: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::input(format!("{name} must be non-empty")));
    }
    if grid.iter().any(|&v| !(v.is_finite() && v > floor)) {
        return Err(Error::input(format!("{name} entries must be finite and > {floor}")));
    }
    Ok(())
}
