//! Location/scale-free hypothesis tests that tell separable
//! distribution-tail classes apart, with the Monte-Carlo machinery to study
//! them.
//!
//! The library is organized around a simple question: given a sample, does
//! its upper tail decay like a Weibull-type law, a log-Weibull-type law, or
//! a regularly-varying (heavy) law? A *separating* null distribution F₀ is
//! placed between two classes; averaged log-survival statistics of the top
//! k order statistics ([`tail_tests`]) then score the sample against F₀,
//! invariant to scale — or to location and scale — so no nuisance fitting
//! is needed.
//!
//! Modules:
//! - [`distributions`]: the parametric zoo used in power studies (CDFs,
//!   log-survival functions, quantiles, inverse-transform samplers).
//! - [`separators`]: the separating nulls F₀, their generalized inverses
//!   and samplers.
//! - [`conditions`]: grid checkers for the quantile-domination and
//!   survival-ratio conditions under which the tests' one-sided power
//!   guarantees apply.
//! - [`tail_tests`]: the plain, scale-free and location–scale-free
//!   statistics and their normal-score decision rules.
//! - [`baselines`]: Hasofer–Wang and ratio statistics with Monte-Carlo
//!   calibration.
//! - [`harness`]: rejection-curve experiments over a k-grid and the
//!   qualitative k-behavior classifier.
//! - [`fit`]: exponential / Weibull / GPD maximum-likelihood fits and Q-Q
//!   tables for threshold exceedances.
//! - [`rng`]: seeded, streamed uniforms so every experiment is exactly
//!   reproducible.

pub mod baselines;
pub mod conditions;
pub mod distributions;
pub mod error;
pub mod fit;
pub mod harness;
pub mod rng;
pub mod separators;
pub mod solve;
pub mod special;
pub mod tail_tests;

pub use baselines::{
    baseline_reject, baseline_statistic, calibrate_critical_values, hasofer_wang,
    ratio_statistic, suggested_side, BaselineKind, CriticalValueTable,
};
pub use conditions::{
    check_b_condition, check_c_delta, check_survival_bound, default_c_grid, default_t_grid,
    log_spaced, ConditionKind, ConditionReport, MARGIN_TOL,
};
pub use distributions::DistributionSpec;
pub use error::{Error, Result};
pub use fit::{
    fit_exponential, fit_gpd, fit_weibull2, qq_table, weibull2_profile_rate, FitModel, FitResult,
    QqRow,
};
pub use harness::{
    classify_k_behavior, default_k_grid, kendall_tau, mann_kendall_z, run_rejection_curve,
    ExperimentSpec, KBehavior, KBehaviorParams, KClass, RejectionCurve, SampleSource, TestKind,
    DEFAULT_ALPHA, DEFAULT_M, DEFAULT_N, DESK_M, DESK_N,
};
pub use rng::{SeedBundle, UniformStream};
pub use separators::{
    u0_logweibull_vs_rv, u0_weibull_vs_logweibull, CustomSeparator, SeparatorCdf, SeparatorKind,
};
pub use tail_tests::{
    compute_hat_r, compute_r, compute_tilde_r, hat_r_from_tail, location_scale_free_test,
    outcome_from_statistic, r_from_tail, scale_free_test, sigma, sigma2, tilde_r_from_tail, Side,
    SortedSample, TestOutcome,
};
