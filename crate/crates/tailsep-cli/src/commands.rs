//! One function per subcommand: translate parsed flags into library calls
//! and serialize the result.

use tailsep::harness::{ExperimentSpec, SampleSource};
use tailsep::{
    calibrate_critical_values, check_b_condition, check_c_delta, check_survival_bound,
    compute_r, default_c_grid, default_k_grid, default_t_grid, fit_exponential, fit_gpd,
    fit_weibull2, hat_r_from_tail, location_scale_free_test, log_spaced,
    outcome_from_statistic, qq_table, r_from_tail, run_rejection_curve, scale_free_test,
    sigma, tilde_r_from_tail, BaselineKind, ConditionKind, ConditionReport,
    DistributionSpec, Error, FitModel, FitResult, QqRow, Result, SeparatorCdf, Side,
    SortedSample, TestOutcome, DEFAULT_ALPHA, DEFAULT_M, DEFAULT_N, DESK_M, DESK_N,
};

use crate::io::{cell, csv_into_string, emit, pretty_json, read_column};
use crate::{
    Baseline, CalibrateArgs, CheckArgs, CliSide, Condition, F0Family, FitArgs, FitWhich,
    Format, NullArgs, OutArgs, Preset, QqArgs, SimStatistic, SimulateArgs, Statistic,
    TestArgs,
};

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

impl NullArgs {
    /// Build the separating null, taking `family`/`b` fallbacks from a
    /// preset when the user did not choose explicitly.
    fn build_with(&self, family: Option<F0Family>, preset_b: Option<f64>) -> Result<SeparatorCdf> {
        let family = self.f0.or(family).unwrap_or(F0Family::WeibullLogweibull);
        let b = self.b.or(preset_b);
        let f0 = match family {
            F0Family::WeibullLogweibull => {
                SeparatorCdf::weibull_vs_logweibull(b.unwrap_or(1.8))?
            }
            F0Family::LogweibullRv => SeparatorCdf::logweibull_vs_rv(b.unwrap_or(0.6))?,
            F0Family::Pareto => {
                if self.b.is_some() {
                    return Err(Error::param(
                        "--b does not apply to the pareto null; its shape is --gamma",
                    ));
                }
                let gamma = self
                    .gamma
                    .ok_or_else(|| Error::param("--f0 pareto requires --gamma"))?;
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return Err(Error::param(format!(
                        "pareto tail index must be positive, got {gamma}"
                    )));
                }
                return SeparatorCdf::pareto(1.0 / gamma);
            }
            F0Family::Exponential => {
                if self.b.is_some() {
                    return Err(Error::param("--b does not apply to the exponential null"));
                }
                SeparatorCdf::standard_exponential()
            }
        };
        match self.gamma {
            Some(g) => f0.with_gamma(g),
            None => Ok(f0),
        }
    }

    fn build(&self) -> Result<SeparatorCdf> {
        self.build_with(None, None)
    }
}

impl OutArgs {
    fn resolved(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::input(format!("CSV write failed: {e}"))
}

/// Parse "lo:step:hi" (inclusive arithmetic range) or "k1,k2,…".
fn parse_k_grid(s: &str) -> Result<Vec<usize>> {
    let one = |tok: &str| -> Result<usize> {
        tok.trim()
            .parse()
            .map_err(|_| Error::input(format!("cannot parse '{tok}' as a k value")))
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::input(format!("k range must be lo:step:hi, got '{s}'")));
        }
        let (lo, step, hi) = (one(parts[0])?, one(parts[1])?, one(parts[2])?);
        if step == 0 || hi < lo {
            return Err(Error::input(format!(
                "k range needs a positive step and hi >= lo, got '{s}'"
            )));
        }
        Ok((lo..=hi).step_by(step).collect())
    } else {
        s.split(',').map(one).collect()
    }
}

/// Parse a log-spaced grid "lo:hi:points".
fn parse_log_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::input(format!("grid must be lo:hi:points, got '{s}'")));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("cannot parse grid bound '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("cannot parse grid bound '{}'", parts[1])))?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("cannot parse grid size '{}'", parts[2])))?;
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Error::input(format!(
            "grid needs 0 < lo < hi and at least 2 points, got '{s}'"
        )));
    }
    Ok(log_spaced(lo, hi, n))
}

fn parse_distribution(json: &str) -> Result<DistributionSpec> {
    let d: DistributionSpec = serde_json::from_str(json)
        .map_err(|e| Error::input(format!("cannot parse distribution JSON '{json}': {e}")))?;
    d.validate()?;
    Ok(d)
}

/// Subtract the threshold and keep strict exceedances.
fn exceedances(values: Vec<f64>, threshold: Option<f64>) -> Result<Vec<f64>> {
    match threshold {
        None => Ok(values),
        Some(t) => {
            let out: Vec<f64> = values.iter().filter(|&&x| x > t).map(|&x| x - t).collect();
            if out.is_empty() {
                return Err(Error::input(format!(
                    "no observations exceed the threshold {t}"
                )));
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

pub fn cmd_test(args: TestArgs) -> Result<()> {
    let values = read_column(&args.input.input, &args.input.column)?;
    let f0 = args.null.build()?;
    let side: Side = args.side.into();
    let outcome = match args.population_n {
        None => {
            if args.threshold.is_some() {
                return Err(Error::input(
                    "--threshold only applies with --population-n; on a full sample the \
                     threshold is the (k+1)-th largest observation",
                ));
            }
            let sample = SortedSample::from_unsorted(values)?;
            match args.statistic {
                Statistic::Plain => {
                    let stat = compute_r(&sample, args.k, &f0)?;
                    outcome_from_statistic(stat, args.k, sample.n(), 1.0, args.alpha, side)?
                }
                Statistic::ScaleFree => {
                    scale_free_test(&sample, args.k, &f0, args.alpha, side)?
                }
                Statistic::LocationScaleFree => {
                    location_scale_free_test(&sample, args.k, &f0, args.alpha, side)?
                }
            }
        }
        Some(population_n) => external_test(&args, values, &f0, side, population_n)?,
    };
    let text = match args.out.resolved(Format::Json) {
        Format::Json => pretty_json(&outcome)?,
        Format::Csv => outcome_csv(&outcome)?,
    };
    emit(&args.out.out, &text)
}

/// Statistic over the top-m tail of a population of `population_n` values:
/// the file rows are the largest observations, thresholds come from the
/// data when deep enough and from --threshold when k equals the row count.
fn external_test(
    args: &TestArgs,
    values: Vec<f64>,
    f0: &SeparatorCdf,
    side: Side,
    population_n: usize,
) -> Result<TestOutcome> {
    let k = args.k;
    let m = values.len();
    if k > m {
        return Err(Error::input(format!(
            "k = {k} exceeds the {m} observations on file"
        )));
    }
    if population_n < m {
        return Err(Error::input(format!(
            "population size {population_n} is smaller than the {m} observations on file"
        )));
    }
    let sample = SortedSample::from_unsorted(values)?;
    let n = population_n as f64;
    let (statistic, score_sd) = match args.statistic {
        Statistic::Plain | Statistic::ScaleFree => {
            let threshold = if k < m {
                if args.threshold.is_some() {
                    return Err(Error::input(format!(
                        "k = {k} is below the {m} observations on file, so the threshold \
                         is the (k+1)-th largest value; --threshold only applies when k \
                         equals the row count"
                    )));
                }
                sample.threshold(k)?
            } else {
                args.threshold.ok_or_else(|| {
                    Error::input(format!(
                        "k equals the {m} observations on file: supply the population \
                         threshold X(n-k) via --threshold"
                    ))
                })?
            };
            let tail = sample.top(k)?;
            let stat = match args.statistic {
                Statistic::Plain => r_from_tail(tail, threshold, f0)?,
                _ => tilde_r_from_tail(tail, threshold, n, f0)?,
            };
            (stat, 1.0)
        }
        Statistic::LocationScaleFree => {
            if args.threshold.is_some() {
                return Err(Error::input(
                    "the location-scale-free statistic maps the tail through both \
                     X(n-k) and X(n-2k); --threshold cannot replace them",
                ));
            }
            if 2 * k >= m {
                return Err(Error::input(format!(
                    "location-scale-free external mode needs the (2k+1)-th largest \
                     observation on file (2k < rows; k = {k}, rows = {m})"
                )));
            }
            let stat = hat_r_from_tail(
                sample.top(k)?,
                sample.threshold(k)?,
                sample.threshold(2 * k)?,
                n,
                f0,
            )?;
            (stat, sigma(f0.gamma()))
        }
    };
    outcome_from_statistic(statistic, k, population_n, score_sd, args.alpha, side)
}

fn outcome_csv(o: &TestOutcome) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "statistic",
        "score",
        "sigma",
        "threshold",
        "p_value",
        "reject",
        "side",
        "k",
        "n",
    ])
    .map_err(csv_err)?;
    w.write_record([
        cell(o.statistic),
        cell(o.score),
        cell(o.sigma),
        cell(o.threshold),
        cell(o.p_value),
        o.reject.to_string(),
        match o.side {
            Side::Right => "right".to_string(),
            Side::Left => "left".to_string(),
        },
        o.k.to_string(),
        o.n.to_string(),
    ])
    .map_err(csv_err)?;
    csv_into_string(w)
}

// ---------------------------------------------------------------------------
// fit / qq
// ---------------------------------------------------------------------------

pub fn cmd_fit(args: FitArgs) -> Result<()> {
    let data = exceedances(read_column(&args.input.input, &args.input.column)?, args.threshold)?;
    let fits = match args.model {
        FitWhich::Exponential => vec![fit_exponential(&data)?],
        FitWhich::Weibull2 => vec![fit_weibull2(&data)?],
        FitWhich::Gpd => vec![fit_gpd(&data)?],
        FitWhich::All => {
            vec![fit_exponential(&data)?, fit_weibull2(&data)?, fit_gpd(&data)?]
        }
    };
    let text = match args.out.resolved(Format::Json) {
        Format::Json => pretty_json(&fits)?,
        Format::Csv => fits_csv(&fits)?,
    };
    emit(&args.out.out, &text)
}

fn fits_csv(fits: &[FitResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model", "parameter", "estimate", "log_likelihood", "n_used"])
        .map_err(csv_err)?;
    for f in fits {
        let model = match f.model {
            FitModel::Exponential => "exponential",
            FitModel::Weibull2 => "weibull2",
            FitModel::Gpd => "gpd",
        };
        for (name, value) in &f.estimates {
            w.write_record([
                model.to_string(),
                name.clone(),
                cell(*value),
                cell(f.log_likelihood),
                f.n_used.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    csv_into_string(w)
}

pub fn cmd_qq(args: QqArgs) -> Result<()> {
    let data = exceedances(read_column(&args.input.input, &args.input.column)?, args.threshold)?;
    let rows = qq_table(&data)?;
    let text = match args.out.resolved(Format::Csv) {
        Format::Csv => qq_csv(&rows)?,
        Format::Json => pretty_json(&rows)?,
    };
    emit(&args.out.out, &text)
}

fn qq_csv(rows: &[QqRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["exponential", "empirical", "gpd", "weibull"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([cell(r.exponential), cell(r.empirical), cell(r.gpd), cell(r.weibull)])
            .map_err(csv_err)?;
    }
    csv_into_string(w)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Preset-supplied fallbacks; every field an explicit flag can override.
struct SimDefaults {
    n: usize,
    m: usize,
    statistic: SimStatistic,
    side: CliSide,
    distribution: Option<DistributionSpec>,
    f0_family: Option<F0Family>,
    b: Option<f64>,
}

fn sim_defaults(preset: Option<Preset>) -> SimDefaults {
    match preset {
        None => SimDefaults {
            n: DEFAULT_N,
            m: DEFAULT_M,
            statistic: SimStatistic::ScaleFree,
            side: CliSide::Right,
            distribution: None,
            f0_family: None,
            b: None,
        },
        Some(Preset::Desk) => SimDefaults {
            n: DESK_N,
            m: DESK_M,
            statistic: SimStatistic::ScaleFree,
            side: CliSide::Right,
            distribution: Some(DistributionSpec::Exponential { rate: 1.0, location: 0.0 }),
            f0_family: Some(F0Family::Exponential),
            b: None,
        },
        Some(Preset::TypeI) => SimDefaults {
            n: DEFAULT_N,
            m: DEFAULT_M,
            statistic: SimStatistic::LocationScaleFree,
            side: CliSide::Right,
            distribution: Some(DistributionSpec::Weibull { shape: 2.0 / 3.0, rate: 1.0 }),
            f0_family: Some(F0Family::WeibullLogweibull),
            b: Some(3.5),
        },
        Some(Preset::Power) => SimDefaults {
            n: DEFAULT_N,
            m: DEFAULT_M,
            statistic: SimStatistic::LocationScaleFree,
            side: CliSide::Right,
            distribution: Some(DistributionSpec::LogNormal { mu: 0.0, sigma: 1.0 }),
            f0_family: Some(F0Family::WeibullLogweibull),
            b: Some(3.5),
        },
    }
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let d = sim_defaults(args.preset);
    let f0 = args.null.build_with(d.f0_family, d.b)?;
    let distribution = if args.from_null {
        SampleSource::Reference(f0.clone())
    } else if let Some(json) = &args.distribution {
        SampleSource::Parametric(parse_distribution(json)?)
    } else if let Some(dist) = d.distribution {
        SampleSource::Parametric(dist)
    } else {
        return Err(Error::input(
            "choose a sampling law: --distribution JSON, --from-null, or --preset",
        ));
    };
    let spec = ExperimentSpec {
        distribution,
        test: args.statistic.unwrap_or(d.statistic).into(),
        f0: Some(f0),
        n: args.n.unwrap_or(d.n),
        m: args.m.unwrap_or(d.m),
        alpha: args.alpha.unwrap_or(DEFAULT_ALPHA),
        k_grid: match &args.k_grid {
            Some(s) => parse_k_grid(s)?,
            None => default_k_grid(),
        },
        side: args.side.unwrap_or(d.side).into(),
        seed: args.seed.unwrap_or(0),
    };
    let curve = run_rejection_curve(&spec)?;
    let text = match args.out.resolved(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            curve.to_csv(&mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::input(format!("CSV not UTF-8: {e}")))?
        }
        Format::Json => curve.to_json()? + "\n",
    };
    emit(&args.out.out, &text)
}

// ---------------------------------------------------------------------------
// check-separability
// ---------------------------------------------------------------------------

/// One side of an ordering claim: a parametric law or the configured null.
enum Law {
    Null,
    Parametric(DistributionSpec),
}

fn parse_law(s: &str) -> Result<Law> {
    if s.eq_ignore_ascii_case("f0") {
        return Ok(Law::Null);
    }
    Ok(Law::Parametric(parse_distribution(s)?))
}

impl Law {
    fn quantile(&self, f0: &SeparatorCdf, t: f64) -> Result<f64> {
        match self {
            Law::Null => f0.quantile(t),
            Law::Parametric(d) => d.quantile(t),
        }
    }

    fn log_survival(&self, f0: &SeparatorCdf, x: f64) -> f64 {
        match self {
            Law::Null => f0.log_survival(x),
            Law::Parametric(d) => d.log_survival(x),
        }
    }
}

pub fn cmd_check_separability(args: CheckArgs) -> Result<()> {
    let f0 = args.null.build()?;
    let lighter = parse_law(&args.lighter)?;
    let heavier = parse_law(&args.heavier)?;
    let t_grid = match &args.t_grid {
        Some(s) => parse_log_grid(s)?,
        None => default_t_grid(),
    };
    let c_grid = match &args.c_grid {
        Some(s) => parse_log_grid(s)?,
        None => default_c_grid(),
    };
    let report = match args.condition {
        Condition::Quantile => check_c_delta(
            |t| lighter.quantile(&f0, t),
            |t| heavier.quantile(&f0, t),
            args.delta,
            &t_grid,
            &c_grid,
        )?,
        Condition::Survival => check_survival_bound(
            |x| lighter.log_survival(&f0, x),
            |t| lighter.quantile(&f0, t),
            |x| heavier.log_survival(&f0, x),
            |t| heavier.quantile(&f0, t),
            args.delta,
            &t_grid,
            &c_grid,
        )?,
        Condition::B => {
            let epsilon = args.epsilon.unwrap_or(args.delta / (1.0 + args.delta));
            let x_grid = match &args.x_grid {
                Some(s) => parse_log_grid(s)?,
                None => log_spaced(1.0, 1e4, 50),
            };
            check_b_condition(
                |x| lighter.log_survival(&f0, x),
                |x| heavier.log_survival(&f0, x),
                epsilon,
                &x_grid,
            )?
        }
    };
    let text = match args.out.resolved(Format::Json) {
        Format::Json => pretty_json(&report)?,
        Format::Csv => report_csv(&report)?,
    };
    emit(&args.out.out, &text)
}

fn report_csv(r: &ConditionReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["condition", "parameter", "worst_margin", "holds", "witness_a", "witness_b"])
        .map_err(csv_err)?;
    let kind = match r.condition {
        ConditionKind::CDelta => "c_delta",
        ConditionKind::CZero => "c_zero",
        ConditionKind::B => "b",
        ConditionKind::SurvivalBound => "survival_bound",
    };
    let (wa, wb) = match r.witness {
        Some((a, b)) => (cell(a), cell(b)),
        None => (String::new(), String::new()),
    };
    w.write_record([
        kind.to_string(),
        cell(r.parameter),
        cell(r.worst_margin),
        r.holds.to_string(),
        wa,
        wb,
    ])
    .map_err(csv_err)?;
    csv_into_string(w)
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

pub fn cmd_calibrate(args: CalibrateArgs) -> Result<()> {
    let kind = match args.baseline {
        Baseline::HasoferWang => BaselineKind::HasoferWang,
        Baseline::Ratio => BaselineKind::Ratio,
    };
    let k_grid = match &args.k_grid {
        Some(s) => parse_k_grid(s)?,
        None => default_k_grid(),
    };
    let table = calibrate_critical_values(kind, &args.alpha, &k_grid, args.n, args.m, args.seed)?;
    let text = match args.out.resolved(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            table.to_csv(&mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::input(format!("CSV not UTF-8: {e}")))?
        }
        Format::Json => pretty_json(&table)?,
    };
    emit(&args.out.out, &text)
}
