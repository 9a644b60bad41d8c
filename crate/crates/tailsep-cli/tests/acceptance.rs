//! Full-stack acceptance checks.
//!
//! Each check pins one statistical behaviour of the library + binary at a
//! stated tolerance and prints a single PASS/FAIL line with the measured
//! numbers; the suite fails at the end if any check failed. Monte-Carlo
//! checks use fixed seeds so reruns are bit-reproducible.

use std::f64::consts::LN_2;
use std::process::Command;

use serde::Deserialize;
use tailsep::rng::SeedBundle;
use tailsep::{
    check_c_delta, check_survival_bound, compute_hat_r, compute_r, compute_tilde_r,
    default_c_grid, default_t_grid, hasofer_wang, log_spaced, ratio_statistic,
    run_rejection_curve, sigma2, special, DistributionSpec, ExperimentSpec, RejectionCurve,
    SampleSource, SeparatorCdf, Side, SortedSample, TestKind,
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

type Check = fn() -> Result<String, String>;

fn rel_close(got: f64, want: f64) -> bool {
    (got - want).abs() <= 1e-12 * want.abs().max(1.0)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Kolmogorov–Smirnov distance between the sample and N(0, 1).
fn ks_to_standard_normal(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let phi = special::normal_cdf(x);
        d = d.max(((i + 1) as f64 / n - phi).abs()).max((phi - i as f64 / n).abs());
    }
    d
}

/// Scores √k(R−1) over `m` replications of size-`n` samples from `source`.
fn null_scores<F>(source: &SeparatorCdf, statistic: F, n: usize, k: usize, m: u64, seed: u64) -> Vec<f64>
where
    F: Fn(&SortedSample) -> f64,
{
    (0..m)
        .map(|rep| {
            let draws = source.sample(n, SeedBundle::new(seed).with_stream(rep)).unwrap();
            let s = SortedSample::from_unsorted(draws).unwrap();
            (k as f64).sqrt() * (statistic(&s) - 1.0)
        })
        .collect()
}

fn curve(
    dist: DistributionSpec,
    test: TestKind,
    b: f64,
    k_grid: Vec<usize>,
    m: usize,
    seed: u64,
) -> RejectionCurve {
    let f0 = match test {
        TestKind::ScaleFree | TestKind::LocationScaleFree => {
            Some(SeparatorCdf::weibull_vs_logweibull(b).unwrap())
        }
        _ => None,
    };
    run_rejection_curve(&ExperimentSpec {
        distribution: SampleSource::Parametric(dist),
        test,
        f0,
        n: 5000,
        m,
        alpha: 0.05,
        k_grid,
        side: Side::Right,
        seed,
    })
    .unwrap()
}

// ---------------------------------------------------------------------------
// 01 — hand-computed values of all five statistics
// ---------------------------------------------------------------------------

fn c01_hand_values() -> Result<String, String> {
    let f0 = SeparatorCdf::pareto(1.0).unwrap();
    let four = SortedSample::from_unsorted(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
    let eight =
        SortedSample::from_unsorted(vec![0.2, 0.4, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0]).unwrap();
    let five = SortedSample::from_unsorted(vec![0.1, 0.5, 1.0, 2.0, 6.0]).unwrap();
    let ratio_sample = SortedSample::from_unsorted(vec![0.5, 1.0, 2.0, 6.0]).unwrap();

    // Location–scale statistic on the 8-point sample, k=2: threshold pair
    // (2, 1) maps the top values 3 and 5 onto 6 and 10 under the unit-Pareto
    // null, giving ln(1/4) − (ln(1/6) + ln(1/10))/2.
    let hat_expected = (6f64.ln() + 10f64.ln()) / 2.0 - 4f64.ln();
    let cases = [
        ("plain", compute_r(&four, 2, &f0).unwrap(), 1.5 * LN_2),
        ("scale-free", compute_tilde_r(&four, 2, &f0).unwrap(), 1.5 * LN_2),
        ("location-scale", compute_hat_r(&eight, 2, &f0).unwrap(), hat_expected),
        ("hasofer-wang", hasofer_wang(&five, 3).unwrap(), 3.0 / 7.0),
        ("ratio", ratio_statistic(&ratio_sample, 2).unwrap(), 5.0 / 3.0),
    ];
    for (name, got, want) in cases {
        if !rel_close(got, want) {
            return Err(format!("{name}: got {got:.17e}, want {want:.17e}"));
        }
    }
    Ok("all five statistics match hand-derived values to 1e-12 relative".into())
}

// ---------------------------------------------------------------------------
// 02 — scale-free score is standard normal under its exact null
// ---------------------------------------------------------------------------

fn c02_exact_null_calibration() -> Result<String, String> {
    let f0 = SeparatorCdf::pareto(1.0).unwrap();
    let scores = null_scores(&f0, |s| compute_tilde_r(s, 200, &f0).unwrap(), 5000, 200, 2000, 2001);
    let m = mean(&scores);
    let sd = sample_std(&scores);
    let ks = ks_to_standard_normal(&scores);
    let detail =
        format!("mean={m:+.4} (band ±0.1), std={sd:.4} (band 0.92–1.08), KS={ks:.4} (< 0.05)");
    if m.abs() <= 0.1 && (0.92..=1.08).contains(&sd) && ks < 0.05 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 03 — location–scale score variance under its exact null
// ---------------------------------------------------------------------------

fn c03_location_scale_variance() -> Result<String, String> {
    let f0 = SeparatorCdf::weibull_vs_logweibull(3.5).unwrap();
    let scores = null_scores(&f0, |s| compute_hat_r(s, 200, &f0).unwrap(), 5000, 200, 2000, 3001);
    let sd = sample_std(&scores);
    let target = sigma2(0.0).sqrt();
    let ratio = sd / target;
    let detail = format!("std={sd:.4}, asymptotic σ={target:.4}, ratio={ratio:.3} (band 0.90–1.10)");
    if (0.9..=1.1).contains(&ratio) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 04 — type-I level of the location–scale test on a Weibull population
// ---------------------------------------------------------------------------

fn c04_type_i_band() -> Result<String, String> {
    let w23 = DistributionSpec::Weibull { shape: 2.0 / 3.0, rate: 1.0 };
    let at = |b: f64| curve(w23.clone(), TestKind::LocationScaleFree, b, vec![100, 200], 200, 404);
    let steep = at(3.5);
    let shallow = at(1.8);
    let bound = |i: usize| 0.05 + 2.0 * steep.mc_stderr[i];
    let ok = steep.rates[0] <= bound(0) && steep.rates[1] <= bound(1);
    let detail = format!(
        "b=3.5 rates: k=100 → {:.3} (bound {:.3}), k=200 → {:.3} (bound {:.3}); \
         same protocol at b=1.8: {:.3}/{:.3} — the level band holds only for the \
         shallower separator at this sample size",
        steep.rates[0],
        bound(0),
        steep.rates[1],
        bound(1),
        shallow.rates[0],
        shallow.rates[1],
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 05 — power of the location–scale test on a lognormal population
// ---------------------------------------------------------------------------

fn c05_lognormal_power() -> Result<String, String> {
    let ln01 = DistributionSpec::LogNormal { mu: 0.0, sigma: 1.0 };
    let c = curve(ln01, TestKind::LocationScaleFree, 3.5, vec![200], 200, 505);
    let detail = format!("rejection rate at k=200: {:.3} (needs ≥ 0.8)", c.rates[0]);
    if c.rates[0] >= 0.8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 06 — power grows with the tail fraction on a regularly-varying population
// ---------------------------------------------------------------------------

fn c06_power_grows_with_k() -> Result<String, String> {
    let gpd = DistributionSpec::Gpd { gamma: 1.0, sigma: 1.0 };
    let c = curve(gpd, TestKind::ScaleFree, 0.9, vec![50, 400], 200, 606);
    let (r50, r400) = (c.rates[0], c.rates[1]);
    let combined = (c.mc_stderr[0].powi(2) + c.mc_stderr[1].powi(2)).sqrt();
    let gap = r400 - r50;
    let detail = format!(
        "rate(k=50)={r50:.3}, rate(k=400)={r400:.3}, gap={gap:.3} (needs > {:.3})",
        2.0 * combined
    );
    if gap > 2.0 * combined {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 07 — scale and affine invariance identities
// ---------------------------------------------------------------------------

fn c07_invariance_identities() -> Result<String, String> {
    let f0 = SeparatorCdf::weibull_vs_logweibull(1.8).unwrap();
    let ln01 = DistributionSpec::LogNormal { mu: 0.0, sigma: 1.0 };
    let scales = [1e-3, 1e-2, 0.1, 0.5, 2.0, 10.0, 100.0, 1e3, 1e6];
    let affine = [
        (0.1, -5.0),
        (0.1, 0.0),
        (0.1, 7.0),
        (1.0, -5.0),
        (1.0, 7.0),
        (10.0, -5.0),
        (10.0, 0.0),
        (10.0, 7.0),
        (0.5, 3.0),
    ];
    let (mut worst_scale, mut worst_affine): (f64, f64) = (0.0, 0.0);
    for rep in 0..1000u64 {
        let x = ln01.sample(200, SeedBundle::new(7007).with_stream(rep)).unwrap();
        let s = SortedSample::from_unsorted(x.clone()).unwrap();
        let tilde = compute_tilde_r(&s, 20, &f0).unwrap();
        let hat = compute_hat_r(&s, 20, &f0).unwrap();
        for &c in &scales {
            let sc = SortedSample::from_unsorted(x.iter().map(|v| c * v).collect()).unwrap();
            let t2 = compute_tilde_r(&sc, 20, &f0).unwrap();
            worst_scale = worst_scale.max((t2 - tilde).abs() / tilde.abs().max(1.0));
        }
        for &(a, b) in &affine {
            let sa = SortedSample::from_unsorted(x.iter().map(|v| a * v + b).collect()).unwrap();
            let h2 = compute_hat_r(&sa, 20, &f0).unwrap();
            worst_affine = worst_affine.max((h2 - hat).abs() / hat.abs().max(1.0));
        }
    }
    let detail = format!(
        "1000 samples × 9 settings: worst scale deviation {worst_scale:.2e}, \
         worst affine deviation {worst_affine:.2e} (both ≤ 1e-9)"
    );
    if worst_scale <= 1e-9 && worst_affine <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 08 — quantile-ordering margins for the reference pairings
// ---------------------------------------------------------------------------

fn c08_condition_margins() -> Result<String, String> {
    let f0a = SeparatorCdf::weibull_vs_logweibull(1.8).unwrap();
    let f0b = SeparatorCdf::logweibull_vs_rv(0.6).unwrap();
    let w23 = DistributionSpec::Weibull { shape: 2.0 / 3.0, rate: 1.0 };
    let ln01 = DistributionSpec::LogNormal { mu: 0.0, sigma: 1.0 };
    let lw15 = DistributionSpec::LogWeibull { shape: 1.5, scale: 1.0 };
    let gpd05 = DistributionSpec::Gpd { gamma: 0.5, sigma: 1.0 };
    let (t, c) = (default_t_grid(), default_c_grid());

    let forward = [
        (
            "W(2/3,1) ≺ F0 (C0)",
            check_c_delta(|u| w23.quantile(u), |u| f0a.quantile(u), 0.0, &t, &c).unwrap(),
        ),
        (
            "F0 ≺ LN(0,1) (C0.1)",
            check_c_delta(|u| f0a.quantile(u), |u| ln01.quantile(u), 0.1, &t, &c).unwrap(),
        ),
        (
            "F0 ≺ LN(0,1) (survival bound)",
            check_survival_bound(
                |x| f0a.log_survival(x),
                |u| f0a.quantile(u),
                |x| ln01.log_survival(x),
                |u| ln01.quantile(u),
                0.1,
                &t,
                &c,
            )
            .unwrap(),
        ),
        (
            "LW(1.5,1) ≺ F0' (C0)",
            check_c_delta(|u| lw15.quantile(u), |u| f0b.quantile(u), 0.0, &t, &c).unwrap(),
        ),
        (
            "F0' ≺ GPD(0.5,1) (C0.1)",
            check_c_delta(|u| f0b.quantile(u), |u| gpd05.quantile(u), 0.1, &t, &c).unwrap(),
        ),
        (
            "F0' ≺ GPD(0.5,1) (survival bound)",
            check_survival_bound(
                |x| f0b.log_survival(x),
                |u| f0b.quantile(u),
                |x| gpd05.log_survival(x),
                |u| gpd05.quantile(u),
                0.1,
                &t,
                &c,
            )
            .unwrap(),
        ),
    ];
    let reversed = [
        (
            "F0 ⊀ W(2/3,1)",
            check_c_delta(|u| f0a.quantile(u), |u| w23.quantile(u), 0.0, &t, &c).unwrap(),
        ),
        (
            "LN(0,1) ⊀ F0",
            check_c_delta(|u| ln01.quantile(u), |u| f0a.quantile(u), 0.1, &t, &c).unwrap(),
        ),
        (
            "F0' ⊀ LW(1.5,1)",
            check_c_delta(|u| f0b.quantile(u), |u| lw15.quantile(u), 0.0, &t, &c).unwrap(),
        ),
        (
            "GPD(0.5,1) ⊀ F0'",
            check_c_delta(|u| gpd05.quantile(u), |u| f0b.quantile(u), 0.1, &t, &c).unwrap(),
        ),
    ];

    let mut problems = Vec::new();
    let mut margins = Vec::new();
    for (name, report) in &forward {
        margins.push(format!("{name}: {:+.3e}", report.worst_margin));
        if !(report.holds && report.worst_margin > 0.0) {
            problems.push(format!(
                "{name} not positive on the default grids (margin {:+.3e} at witness {:?})",
                report.worst_margin, report.witness
            ));
        }
    }
    for (name, report) in &reversed {
        if report.holds || report.witness.is_none() {
            problems.push(format!("reversed pair {name} failed to produce a violation witness"));
        }
    }

    if problems.is_empty() {
        Ok(format!("all margins positive, reversed pairs violated [{}]", margins.join(", ")))
    } else {
        // The quantile-ratio ordering is an eventual property: for the
        // Weibull(2/3,1) / F0(b=1.8) pair the ratio peaks near t ≈ 8.6e4,
        // so the default grid (from 1e2) genuinely contains violations.
        // Above the crossover the margin is positive, measured here.
        let window = log_spaced(1e6, 1e10, 40);
        let above =
            check_c_delta(|u| w23.quantile(u), |u| f0a.quantile(u), 0.0, &window, &c).unwrap();
        Err(format!(
            "{}; on t ∈ [1e6, 1e10] (above the pair's crossover) the same check passes \
             with margin {:+.3e}; all margins: [{}]",
            problems.join("; "),
            above.worst_margin,
            margins.join(", ")
        ))
    }
}

// ---------------------------------------------------------------------------
// 09 — stochastic ordering of the scale-free statistic under tail domination
// ---------------------------------------------------------------------------

fn c09_survival_curve_ordering() -> Result<String, String> {
    let f0 = SeparatorCdf::pareto(1.0).unwrap();
    let (n, k, m) = (5000usize, 200usize, 2000u64);
    let mut r_null = Vec::with_capacity(m as usize);
    let mut r_heavy = Vec::with_capacity(m as usize);
    for rep in 0..m {
        let x0 = f0.sample(n, SeedBundle::new(909).with_stream(rep)).unwrap();
        // Squaring unit-Pareto draws yields the tail-index-2 Pareto, whose
        // quantile dominates the null's in the C0 sense.
        let x1: Vec<f64> = x0.iter().map(|v| v * v).collect();
        r_null.push(compute_tilde_r(&SortedSample::from_unsorted(x0).unwrap(), k, &f0).unwrap());
        r_heavy.push(compute_tilde_r(&SortedSample::from_unsorted(x1).unwrap(), k, &f0).unwrap());
    }
    let mf = m as f64;
    let root_k = (k as f64).sqrt();
    let mut worst = f64::INFINITY;
    let mut at = 0.0;
    for j in 0..20 {
        let probe = 1.0 + (-2.0 + 4.0 * j as f64 / 19.0) / root_k;
        let s0 = r_null.iter().filter(|&&r| r > probe).count() as f64 / mf;
        let s1 = r_heavy.iter().filter(|&&r| r > probe).count() as f64 / mf;
        let se = (s0 * (1.0 - s0) / mf + s1 * (1.0 - s1) / mf).sqrt();
        let margin = s1 - s0 + 2.0 * se;
        if margin < worst {
            worst = margin;
            at = probe;
        }
    }
    let detail = format!(
        "min over 20 probes of S_heavy − S_null + 2·stderr = {worst:+.4} (at statistic {at:.4}, needs ≥ 0)"
    );
    if worst >= 0.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 10 — external-population pipeline verdict stability
// ---------------------------------------------------------------------------

fn c10_external_pipeline_verdicts() -> Result<String, String> {
    #[derive(Deserialize)]
    struct Verdict {
        score: f64,
        reject: bool,
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let w12 = DistributionSpec::Weibull { shape: 1.2, rate: 1.0 };
    let mut rejections = 0usize;
    let mut scores = Vec::with_capacity(100);
    for seed in 0..100u64 {
        let path = dir.path().join(format!("ages{seed}.csv"));
        let mut text = String::from("age\n");
        for e in w12.sample(504, SeedBundle::new(33_000 + seed)).unwrap() {
            text.push_str(&format!("{:.16e}\n", 110.0 + e));
        }
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        let out = Command::new(env!("CARGO_BIN_EXE_tailsep"))
            .args([
                "test",
                "--input",
                path.to_str().unwrap(),
                "--column",
                "age",
                "--statistic",
                "scale-free",
                "--k",
                "504",
                "--population-n",
                "9771451",
                "--threshold",
                "110",
                "--f0",
                "weibull-logweibull",
                "--b",
                "1.8",
                "--side",
                "left",
            ])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!(
                "run {seed} exited with {}: {}",
                out.status,
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        let v: Verdict = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        if v.reject {
            rejections += 1;
        }
        scores.push(v.score);
    }
    scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let detail = format!(
        "lighter-than-null verdict in {rejections}/100 seeded runs (needs ≥ 95); median score {:.2}",
        scores[50]
    );
    if rejections >= 95 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

#[test]
fn acceptance() {
    let checks: [(&str, Check); 10] = [
        ("01 hand-computed statistic values", c01_hand_values),
        ("02 exact-null calibration of the scale-free score", c02_exact_null_calibration),
        ("03 location-scale score variance under its null", c03_location_scale_variance),
        ("04 type-I level on a Weibull population (b=3.5)", c04_type_i_band),
        ("05 power on a lognormal population", c05_lognormal_power),
        ("06 power grows with tail fraction on GPD(1,1)", c06_power_grows_with_k),
        ("07 scale and affine invariance identities", c07_invariance_identities),
        ("08 quantile-ordering margins for reference pairings", c08_condition_margins),
        ("09 survival-curve ordering under tail domination", c09_survival_curve_ordering),
        ("10 external-population pipeline verdict stability", c10_external_pipeline_verdicts),
    ];
    let mut failed = Vec::new();
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS  {name} — {detail}"),
            Err(detail) => {
                println!("FAIL  {name} — {detail}");
                failed.push(name);
            }
        }
    }
    assert!(
        failed.is_empty(),
        "{} acceptance check(s) failed: {}",
        failed.len(),
        failed.join("; ")
    );
}
