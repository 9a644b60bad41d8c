//! Distribution zoo: CDFs, log-survival functions, quantiles and samplers.
//!
//! ## Purpose
//! Every null and alternative distribution used by the Monte-Carlo
//! experiments, with the three views the tests need: `cdf`, `log_survival`
//! (tails evaluated in log space so nothing underflows), and the upper
//! quantile `u(t) = F⁻¹(1 − 1/t)` parameterized by the tail time `t > 1`.
//!
//! ## Key behaviors
//! - Quantiles are closed-form wherever the family allows; Normal, Gamma,
//!   Student-t, ExtendedWeibull and part of ModifiedWeibull invert their cdf
//!   numerically (bracketed bisection + Newton, relative tolerance ~1e-11 in
//!   the inverted probability).
//! - Sampling is inverse-transform over a seeded uniform stream: draw
//!   `t = 1/(1−U)` and return `quantile(t)`. The one exception is
//!   ModifiedWeibull, which is *defined* as the law of `X·ln X` for Weibull
//!   `X` and is sampled by transforming the Weibull draw from the same
//!   uniform — identical law, and the pairing with the underlying Weibull
//!   draw is part of the contract.
//! - Upper-tail arithmetic always goes through `1/t`, never `1 − 1/t`, so
//!   tail times up to 2⁵³ keep full precision.
//!
//! ## Invariants & assumptions
//! - All shape/scale parameters strictly positive (`validate`); GPD here is
//!   the heavy-tailed γ > 0 family (the fitting module separately handles
//!   γ ≤ 0 estimates).
//! - `quantile` requires `t > 1` and reports non-convergence rather than
//!   returning a wrong value.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::rng::{SeedBundle, UniformStream};
use crate::solve::{bisect_newton, expand_bracket_upward};
use crate::special;

/// Family tag plus parameters; the complete description of a sampling
/// distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// F(x) = 1 − exp(−rate·x^shape), x ≥ 0.
    Weibull { shape: f64, rate: f64 },
    /// Gaussian with mean/standard deviation.
    Normal { mean: f64, sd: f64 },
    /// Shape–rate gamma: F(x) = P(shape, rate·x).
    Gamma { shape: f64, rate: f64 },
    /// Law of X·ln X where X ~ Weibull(shape, rate); support [−1/e, ∞).
    ModifiedWeibull { shape: f64, rate: f64 },
    /// 1 − F(x) = exp(−x^shape)/(1+x), x ≥ 0.
    ExtendedWeibull { shape: f64 },
    /// ln X ~ Normal(mu, sigma).
    LogNormal { mu: f64, sigma: f64 },
    /// F(x) = 1 − exp(−(ln(x/scale))^shape), x > scale.
    LogWeibull { shape: f64, scale: f64 },
    /// Generalized Pareto, heavy-tailed branch: F(x) = 1 − (1+γx/σ)^{−1/γ}, γ > 0.
    Gpd { gamma: f64, sigma: f64 },
    /// Student t with df degrees of freedom.
    StudentT { df: f64 },
    /// Standard Cauchy.
    Cauchy,
    /// Burr (type XII): F(x) = 1 − (1+x^c)^{−d}, x ≥ 0.
    Burr { c: f64, d: f64 },
    /// F(x) = 1 − exp(−rate·(x−location)), x ≥ location.
    Exponential { rate: f64, location: f64 },
}

impl DistributionSpec {
    /// Check the family-specific parameter constraints.
    pub fn validate(&self) -> Result<()> {
        use DistributionSpec::*;
        let ok = match *self {
            Weibull { shape, rate } | Gamma { shape, rate } | ModifiedWeibull { shape, rate } => {
                pos(shape) && pos(rate)
            }
            Normal { mean, sd } => mean.is_finite() && pos(sd),
            ExtendedWeibull { shape } => pos(shape),
            LogNormal { mu, sigma } => mu.is_finite() && pos(sigma),
            LogWeibull { shape, scale } => pos(shape) && pos(scale),
            Gpd { gamma, sigma } => pos(gamma) && pos(sigma),
            StudentT { df } => pos(df),
            Cauchy => true,
            Burr { c, d } => pos(c) && pos(d),
            Exponential { rate, location } => pos(rate) && location.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!("invalid distribution parameters: {self:?}")))
        }
    }

    /// Left edge of the support (−∞ for the real-line families).
    pub fn support_lower(&self) -> f64 {
        use DistributionSpec::*;
        match *self {
            Weibull { .. } | Gamma { .. } | ExtendedWeibull { .. } | Gpd { .. } | Burr { .. } => 0.0,
            LogNormal { .. } => 0.0,
            LogWeibull { scale, .. } => scale,
            ModifiedWeibull { .. } => NEG_INV_E,
            Exponential { location, .. } => location,
            Normal { .. } | StudentT { .. } | Cauchy => f64::NEG_INFINITY,
        }
    }

    /// Cumulative distribution function; total over the reals.
    pub fn cdf(&self, x: f64) -> f64 {
        use DistributionSpec::*;
        match *self {
            Weibull { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x.powf(shape)).exp_m1()
                }
            }
            Normal { mean, sd } => special::normal_cdf((x - mean) / sd),
            Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_lr(shape, rate * x)
                }
            }
            ModifiedWeibull { shape, rate } => mw_cdf(shape, rate, x),
            ExtendedWeibull { shape } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (-x.powf(shape)).exp() / (1.0 + x)
                }
            }
            LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    special::normal_cdf((x.ln() - mu) / sigma)
                }
            }
            LogWeibull { shape, scale } => {
                if x <= scale {
                    0.0
                } else {
                    -(-((x / scale).ln()).powf(shape)).exp_m1()
                }
            }
            Gpd { gamma, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-(gamma * x / sigma).ln_1p() / gamma).exp_m1()
                }
            }
            StudentT { df } => t_cdf(df, x),
            Cauchy => 0.5 + x.atan() / std::f64::consts::PI,
            Burr { c, d } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-d * x.powf(c).ln_1p()).exp_m1()
                }
            }
            Exponential { rate, location } => {
                if x <= location {
                    0.0
                } else {
                    -(-rate * (x - location)).exp_m1()
                }
            }
        }
    }

    /// ln(1 − F(x)); finite wherever the survival probability is positive,
    /// and well below f64 underflow range thanks to log-space evaluation.
    pub fn log_survival(&self, x: f64) -> f64 {
        use DistributionSpec::*;
        match *self {
            Weibull { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -rate * x.powf(shape)
                }
            }
            Normal { mean, sd } => special::normal_log_sf((x - mean) / sd),
            Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_log_sf(shape, rate * x)
                }
            }
            ModifiedWeibull { shape, rate } => mw_log_sf(shape, rate, x),
            ExtendedWeibull { shape } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -x.powf(shape) - x.ln_1p()
                }
            }
            LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    special::normal_log_sf((x.ln() - mu) / sigma)
                }
            }
            LogWeibull { shape, scale } => {
                if x <= scale {
                    0.0
                } else {
                    -((x / scale).ln()).powf(shape)
                }
            }
            Gpd { gamma, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(gamma * x / sigma).ln_1p() / gamma
                }
            }
            StudentT { df } => t_log_sf(df, x),
            Cauchy => {
                if x <= 0.0 {
                    (0.5 - x.atan() / std::f64::consts::PI).ln()
                } else {
                    // Exact identity: 1/2 − atan(x)/π = atan(1/x)/π for x > 0.
                    (x.recip().atan() / std::f64::consts::PI).ln()
                }
            }
            Burr { c, d } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -d * x.powf(c).ln_1p()
                }
            }
            Exponential { rate, location } => {
                if x <= location {
                    0.0
                } else {
                    -rate * (x - location)
                }
            }
        }
    }

    /// Upper quantile u(t) = F⁻¹(1 − 1/t), t > 1.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        use DistributionSpec::*;
        if !(t > 1.0) {
            return Err(Error::input(format!("quantile requires t > 1, got {t}")));
        }
        let lt = t.ln();
        match *self {
            Weibull { shape, rate } => Ok((lt / rate).powf(1.0 / shape)),
            Normal { mean, sd } => Ok(mean + sd * z_upper(t)),
            Gamma { shape, rate } => gamma_quantile(shape, rate, t),
            ModifiedWeibull { shape, rate } => mw_quantile(shape, rate, t),
            ExtendedWeibull { shape } => ew_quantile(shape, t),
            LogNormal { mu, sigma } => Ok((mu + sigma * z_upper(t)).exp()),
            LogWeibull { shape, scale } => Ok(scale * lt.powf(1.0 / shape).exp()),
            Gpd { gamma, sigma } => Ok(sigma * (gamma * lt).exp_m1() / gamma),
            StudentT { df } => t_quantile(df, t),
            Cauchy => Ok((std::f64::consts::PI / t).tan().recip()),
            Burr { c, d } => Ok((lt / d).exp_m1().powf(1.0 / c)),
            Exponential { rate, location } => Ok(location + lt / rate),
        }
    }

    /// Draw `n` i.i.d. values by inverse transform over the stream
    /// described by `seed`.
    pub fn sample(&self, n: usize, seed: SeedBundle) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::input("sample size must be at least 1"));
        }
        self.validate()?;
        let mut stream = UniformStream::new(seed);
        let mut out = Vec::with_capacity(n);
        if let DistributionSpec::ModifiedWeibull { shape, rate } = *self {
            // The law of X ln X: transform the underlying Weibull draw taken
            // from the same uniform (push-forward sampling; see module docs).
            let w = DistributionSpec::Weibull { shape, rate };
            for _ in 0..n {
                let x = w.quantile(stream.next_tail_time())?;
                out.push(x * x.ln());
            }
        } else {
            for _ in 0..n {
                out.push(self.quantile(stream.next_tail_time())?);
            }
        }
        Ok(out)
    }
}

fn pos(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Upper-tail standard normal quantile expressed through the survival
/// probability 1/t, so t up to 2⁵³ loses no precision.
fn z_upper(t: f64) -> f64 {
    -special::normal_quantile(1.0 / t)
}

// ---------------------------------------------------------------------------
// Gamma helpers
// ---------------------------------------------------------------------------

/// ln Q(shape, z) with an asymptotic branch where `gamma_ur` underflows.
fn gamma_log_sf(shape: f64, z: f64) -> f64 {
    if z < 600.0 {
        gamma_ur(shape, z).ln()
    } else {
        // Q(a,z) ~ z^{a−1} e^{−z}/Γ(a) · Σ (a−1)(a−2)…/zʲ for large z.
        let mut term = 1.0;
        let mut series = 1.0;
        for j in 1..8 {
            term *= (shape - j as f64) / z;
            series += term;
        }
        (shape - 1.0) * z.ln() - z - ln_gamma(shape) + series.max(f64::MIN_POSITIVE).ln()
    }
}

fn gamma_pdf(shape: f64, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = rate * x;
    (shape * (rate.ln()) + (shape - 1.0) * x.ln() - z - ln_gamma(shape)).exp()
}

fn gamma_quantile(shape: f64, rate: f64, t: f64) -> Result<f64> {
    // Wilson–Hilferty starting point, then a safeguarded solve on the
    // survival (upper tail) or cdf (lower tail), relative tolerance 1e-11.
    let p_upper = 1.0 / t;
    let z = -special::normal_quantile(p_upper.min(0.5).max(1e-300));
    let wh = shape * (1.0 - 1.0 / (9.0 * shape) + z / (3.0 * shape.sqrt())).powi(3);
    let guess = (wh / rate).max(1e-300);
    // The closures must be total: bracket expansion may probe x ≤ 0, where
    // the cdf is identically 0 (statrs would panic on a negative argument).
    invert_tail(
        |x| if x <= 0.0 { 0.0 } else { gamma_lr(shape, rate * x) },
        |x| if x <= 0.0 { 1.0 } else { gamma_ur(shape, rate * x) },
        |x| gamma_pdf(shape, rate, x),
        t,
        guess,
    )
}

// ---------------------------------------------------------------------------
// Student-t helpers
// ---------------------------------------------------------------------------

fn t_cdf(df: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    let z = df / (df + x * x);
    let half_tail = 0.5 * beta_reg(0.5 * df, 0.5, z);
    if x > 0.0 {
        1.0 - half_tail
    } else {
        half_tail
    }
}

fn t_sf(df: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    let z = df / (df + x * x);
    let half_tail = 0.5 * beta_reg(0.5 * df, 0.5, z);
    if x > 0.0 {
        half_tail
    } else {
        1.0 - half_tail
    }
}

fn t_log_sf(df: f64, x: f64) -> f64 {
    if x <= 0.0 {
        t_sf(df, x).ln()
    } else {
        let z = df / (df + x * x);
        (0.5 * beta_reg(0.5 * df, 0.5, z)).ln()
    }
}

fn t_pdf(df: f64, x: f64) -> f64 {
    let ln_c = ln_gamma(0.5 * (df + 1.0))
        - ln_gamma(0.5 * df)
        - 0.5 * (df * std::f64::consts::PI).ln();
    (ln_c - 0.5 * (df + 1.0) * (x * x / df).ln_1p()).exp()
}

fn t_quantile(df: f64, t: f64) -> Result<f64> {
    // Cauchy-shaped starting guess: exact for df=1, good bracket seed otherwise.
    let guess = ((std::f64::consts::PI / t).tan().recip()).max(1e-3);
    invert_tail(
        |x| t_cdf(df, x),
        |x| t_sf(df, x),
        |x| t_pdf(df, x),
        t,
        guess,
    )
}

// ---------------------------------------------------------------------------
// ExtendedWeibull helpers
// ---------------------------------------------------------------------------

fn ew_quantile(shape: f64, t: f64) -> Result<f64> {
    // Solve x^shape + ln(1+x) = ln t; left side strictly increasing from 0.
    let lt = t.ln();
    let f = |x: f64| x.powf(shape) + x.ln_1p() - lt;
    let df = |x: f64| {
        (x > 0.0).then(|| shape * x.powf(shape - 1.0) + 1.0 / (1.0 + x))
    };
    let hi = lt.powf(1.0 / shape).max(1e-12); // x^shape alone already reaches ln t here
    bisect_newton(f, df, 0.0, hi, 1e-13, 0.0)
}

// ---------------------------------------------------------------------------
// ModifiedWeibull helpers: Y = X ln X, X ~ Weibull(shape, rate)
// ---------------------------------------------------------------------------
//
// g(x) = x ln x decreases from 0⁻ to −1/e on (0, 1/e), then increases
// through 0 at x=1. For y ≥ 0 the cdf is F_X(b(y)) with b the root ≥ 1; for
// y ∈ (−1/e, 0) it is F_X(b(y)) − F_X(a(y)) with a on the decreasing branch.

const NEG_INV_E: f64 = -0.367_879_441_171_442_33;

/// Root of x ln x = y on [1, ∞) for y ≥ 0.
fn xlnx_root_upper(y: f64) -> f64 {
    if y == 0.0 {
        return 1.0;
    }
    let f = |x: f64| x * x.ln() - y;
    let hi = expand_bracket_upward(f, 1.0, (y + 1.0).max(2.0), 200)
        .expect("x ln x is unbounded, bracket expansion cannot fail");
    bisect_newton(f, |x| Some(x.ln() + 1.0), 1.0, hi, 1e-14, 0.0)
        .expect("monotone bracketed solve")
}

/// Roots (a, b) of x ln x = y for y ∈ (−1/e, 0): a ∈ (0, 1/e), b ∈ (1/e, 1).
fn xlnx_roots_negative(y: f64) -> (f64, f64) {
    let inv_e = (-1.0f64).exp();
    // Increasing branch on [1/e, 1]: f goes −1/e → 0.
    let b = bisect_newton(
        |x| x * x.ln() - y,
        |x| Some(x.ln() + 1.0),
        inv_e,
        1.0,
        1e-15,
        0.0,
    )
    .expect("monotone bracketed solve");
    // Decreasing branch on (0, 1/e]: negate for an increasing objective.
    let a = bisect_newton(
        |x| y - x * x.ln(),
        |x| Some(-(x.ln() + 1.0)),
        1e-300,
        inv_e,
        1e-15,
        0.0,
    )
    .expect("monotone bracketed solve");
    (a, b)
}

fn mw_cdf(shape: f64, rate: f64, y: f64) -> f64 {
    let w = DistributionSpec::Weibull { shape, rate };
    if y >= 0.0 {
        w.cdf(xlnx_root_upper(y))
    } else if y <= NEG_INV_E {
        0.0
    } else {
        let (a, b) = xlnx_roots_negative(y);
        (w.cdf(b) - w.cdf(a)).max(0.0)
    }
}

fn mw_log_sf(shape: f64, rate: f64, y: f64) -> f64 {
    if y >= 0.0 {
        let w = DistributionSpec::Weibull { shape, rate };
        w.log_survival(xlnx_root_upper(y))
    } else {
        (1.0 - mw_cdf(shape, rate, y)).ln()
    }
}

fn mw_quantile(shape: f64, rate: f64, t: f64) -> Result<f64> {
    let w = DistributionSpec::Weibull { shape, rate };
    let x = w.quantile(t)?;
    if x >= 1.0 {
        // Upper-tail region: u_Y(t) = g(u_X(t)) exactly.
        return Ok(x * x.ln());
    }
    // The quantile sits in the negative-support region; invert the cdf.
    let target = 1.0 - 1.0 / t;
    bisect_newton(
        |y| mw_cdf(shape, rate, y) - target,
        |_| None,
        NEG_INV_E + 1e-12,
        1.0_f64.max(x * x.ln() + 1.0),
        1e-13,
        1e-13,
    )
}

// ---------------------------------------------------------------------------
// Shared numerical inversion for cdf-only families
// ---------------------------------------------------------------------------

/// Invert a continuous distribution at tail time `t` given cdf/survival/pdf.
///
/// Works in whichever tail is numerically relative: survival for t ≥ 2,
/// cdf below. `guess` seeds the bracket.
fn invert_tail(
    cdf: impl Fn(f64) -> f64,
    sf: impl Fn(f64) -> f64,
    pdf: impl Fn(f64) -> f64,
    t: f64,
    guess: f64,
) -> Result<f64> {
    // Increasing objective with a relative formulation in the thin tail.
    let upper_branch = t >= 2.0;
    let f = |x: f64| {
        if upper_branch {
            1.0 - sf(x) * t
        } else {
            cdf(x) * t / (t - 1.0) - 1.0
        }
    };
    let df = |x: f64| {
        let d = if upper_branch {
            pdf(x) * t
        } else {
            pdf(x) * t / (t - 1.0)
        };
        (d.is_finite() && d > 0.0).then_some(d)
    };

    let mut lo = guess;
    let mut hi = guess.max(1e-12);
    let mut grow = hi.abs().max(1.0);
    for _ in 0..300 {
        if f(lo) <= 0.0 {
            break;
        }
        lo -= grow;
        grow *= 4.0;
    }
    grow = hi.abs().max(1.0);
    for _ in 0..300 {
        if f(hi) >= 0.0 {
            break;
        }
        hi += grow;
        grow *= 4.0;
    }
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::no_conv(format!(
            "quantile bracket expansion failed at t={t:e} (bracket [{lo:e},{hi:e}])"
        )));
    }
    bisect_newton(f, df, lo, hi, 0.0, 1e-11)
}
