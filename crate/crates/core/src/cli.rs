//! Command dispatch behind the `farey-corr` binary.
//!
//! Every command renders its whole output file in memory, so identical
//! configurations produce identical bytes regardless of the worker count.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::{farey_exponential_sum_direct, farey_exponential_sum_identity};
use crate::farey::{self, FareyIter};
use crate::numtheory::{self, SieveTables};
use crate::spacing::{empirical_correlation, pair_correlation_histogram, BoxRegion, PointSet};
use crate::theory::{
    self, g2, g2_integral, g_reference, montecarlo, nu_level_measure, weighted_totient_log_sum,
    ReferenceModel,
};

/// Environment variable overriding the sieve-limit ceiling.
pub const SIEVE_MAX_ENV: &str = "FAREY_SIEVE_MAX";

pub const DEFAULT_SEED: u64 = 0x5eed_fa7e_2005_0118;

/// Tolerances of the exponential-sum audit, relative to N_Q.
pub const EXPSUM_ABS_TOL: f64 = 1e-6;
pub const EXPSUM_IMAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    FareyDump,
    G2Table,
    NuLevel,
    Empirical,
    Compare,
    ExpsumCheck,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Fully validated run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub q: u32,
    pub nu: usize,
    pub lambda_max: f64,
    pub bins: usize,
    pub region: Option<BoxRegion>,
    pub tol: f64,
    pub mc_samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub r_max: i64,
    pub output_path: Option<String>,
    pub format: Format,
    pub sieve_max: usize,
}

impl RunConfig {
    /// Defaults for `command`; `lambda_max` depends on the command.
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            q: 1000,
            nu: 2,
            lambda_max: default_lambda_max(command),
            bins: 12,
            region: None,
            tol: 1e-4,
            mc_samples: 0,
            seed: DEFAULT_SEED,
            workers: 1,
            r_max: 50,
            output_path: None,
            format: Format::Csv,
            sieve_max: numtheory::DEFAULT_MAX_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.q == 0 {
            return bad("--Q must be at least 1".into());
        }
        if self.nu < 2 {
            return bad(format!("--nu must be at least 2, got {}", self.nu));
        }
        if !(self.lambda_max > 0.0 && self.lambda_max.is_finite()) {
            return bad(format!(
                "--lambda-max must be positive, got {}",
                self.lambda_max
            ));
        }
        if self.bins == 0 {
            return bad("--bins must be at least 1".into());
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("--tol must be positive, got {}", self.tol));
        }
        if self.workers == 0 {
            return bad("--workers must be at least 1".into());
        }
        if self.r_max < 1 {
            return bad("--r-max must be at least 1".into());
        }
        if let Some(region) = &self.region {
            if region.nu() != self.nu {
                return bad(format!(
                    "--box has {} axes but --nu {} needs {}",
                    region.dim(),
                    self.nu,
                    self.nu - 1
                ));
            }
        }
        if self.command == Command::NuLevel && self.region.is_none() {
            return bad("nu-level needs --box".into());
        }
        if self.command == Command::Asymptotic && self.lambda_max < 10.0 {
            return bad("asymptotic needs --lambda-max of at least 10".into());
        }
        Ok(())
    }
}

pub fn default_lambda_max(command: Command) -> f64 {
    match command {
        Command::Asymptotic => 1e4,
        _ => 3.0,
    }
}

/// `%.17g`-style rendering: 17 significant digits, fixed notation for
/// moderate exponents and scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

/// Empirical-versus-theoretical comparison. Deviations are derived on
/// demand from the two value columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub q: u32,
    pub n: usize,
    pub nu: usize,
    pub grid: ReportGrid,
    pub empirical: Vec<f64>,
    pub theoretical: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportGrid {
    /// Pair-correlation bins `[lo, hi)`.
    Bins { lo: Vec<f64>, hi: Vec<f64> },
    /// A single box with the certified error of the theoretical value.
    Box { region: BoxRegion, error_bound: f64 },
}

impl CorrelationReport {
    pub fn abs_deviations(&self) -> Vec<f64> {
        self.empirical
            .iter()
            .zip(&self.theoretical)
            .map(|(e, t)| (e - t).abs())
            .collect()
    }

    /// |e − t| / t; 0 when both vanish and +∞ when only the theory does.
    pub fn rel_deviations(&self) -> Vec<f64> {
        self.empirical
            .iter()
            .zip(&self.theoretical)
            .map(|(&e, &t)| {
                let d = (e - t).abs();
                if t != 0.0 {
                    d / t.abs()
                } else if d == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    }

    pub fn max_abs_deviation(&self) -> f64 {
        self.abs_deviations().into_iter().fold(0.0, f64::max)
    }

    pub fn max_rel_deviation(&self) -> f64 {
        self.rel_deviations().into_iter().fold(0.0, f64::max)
    }

    fn to_csv(&self) -> String {
        let abs = self.abs_deviations();
        let rel = self.rel_deviations();
        let mut out = String::new();
        match &self.grid {
            ReportGrid::Bins { lo, hi } => {
                out.push_str("bin_lo,bin_hi,empirical,theoretical,abs_dev,rel_dev\n");
                for i in 0..self.empirical.len() {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        fmt_num(lo[i]),
                        fmt_num(hi[i]),
                        fmt_num(self.empirical[i]),
                        fmt_num(self.theoretical[i]),
                        fmt_num(abs[i]),
                        fmt_num(rel[i])
                    );
                }
            }
            ReportGrid::Box {
                region,
                error_bound,
            } => {
                out.push_str("box,empirical,theoretical,abs_dev,rel_dev,error_bound\n");
                let _ = writeln!(
                    out,
                    "\"{}\",{},{},{},{},{}",
                    region,
                    fmt_num(self.empirical[0]),
                    fmt_num(self.theoretical[0]),
                    fmt_num(abs[0]),
                    fmt_num(rel[0]),
                    fmt_num(*error_bound)
                );
            }
        }
        out
    }

    fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct View<'a> {
            q: u32,
            n: usize,
            nu: usize,
            grid: &'a ReportGrid,
            empirical: &'a [f64],
            theoretical: &'a [f64],
            abs_dev: Vec<f64>,
            rel_dev: Vec<Option<f64>>,
            max_abs_dev: f64,
            max_rel_dev: Option<f64>,
        }
        let finite = |x: f64| x.is_finite().then_some(x);
        let view = View {
            q: self.q,
            n: self.n,
            nu: self.nu,
            grid: &self.grid,
            empirical: &self.empirical,
            theoretical: &self.theoretical,
            abs_dev: self.abs_deviations(),
            rel_dev: self.rel_deviations().into_iter().map(finite).collect(),
            max_abs_dev: self.max_abs_deviation(),
            max_rel_dev: finite(self.max_rel_deviation()),
        };
        to_json(&view)
    }
}

/// Result of one command: the rendered file plus the comparison report
/// when the command produced one.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub body: String,
    pub report: Option<CorrelationReport>,
}

impl Artifact {
    fn data(body: String) -> Self {
        Artifact { body, report: None }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Runs `config` inside a pool of `config.workers` threads.
pub fn execute(config: &RunConfig) -> Result<Artifact> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    pool.install(|| dispatch(config))
}

fn dispatch(config: &RunConfig) -> Result<Artifact> {
    match config.command {
        Command::FareyDump => farey_dump(config),
        Command::G2Table => g2_table(config),
        Command::NuLevel => nu_level(config),
        Command::Empirical => empirical(config),
        Command::Compare => compare(config),
        Command::ExpsumCheck => expsum_check(config),
        Command::Asymptotic => asymptotic(config),
    }
}

fn sieve_for_lambda(config: &RunConfig, lambda: f64) -> Result<SieveTables> {
    let limit = (theory::c_lambda(lambda).ceil() as usize).max(1);
    numtheory::build_sieves_with_max(limit, config.sieve_max)
}

fn farey_points(config: &RunConfig) -> Result<PointSet> {
    farey::check_order(config.q, farey::DEFAULT_MAX_ORDER)?;
    Ok(PointSet::farey(config.q))
}

fn farey_dump(config: &RunConfig) -> Result<Artifact> {
    farey::check_order(config.q, farey::DEFAULT_MAX_ORDER)?;
    let mut out = String::new();
    match config.format {
        Format::Csv => {
            out.push_str("a,q,value\n");
            for f in FareyIter::new(config.q) {
                let _ = writeln!(out, "{},{},{}", f.a, f.q, fmt_num(f.value()));
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                a: u32,
                q: u32,
                value: f64,
            }
            let rows: Vec<Row> = FareyIter::new(config.q)
                .map(|f| Row {
                    a: f.a,
                    q: f.q,
                    value: f.value(),
                })
                .collect();
            out = to_json(&rows)?;
        }
    }
    Ok(Artifact::data(out))
}

fn g2_table(config: &RunConfig) -> Result<Artifact> {
    let tables = sieve_for_lambda(config, config.lambda_max)?;
    #[derive(Serialize)]
    struct Row {
        lambda: f64,
        g2: f64,
        g_gue: f64,
        g_poisson: f64,
    }
    let rows = (1..=config.bins)
        .map(|i| {
            let lambda = config.lambda_max * i as f64 / config.bins as f64;
            Ok(Row {
                lambda,
                g2: g2(&tables, lambda)?,
                g_gue: g_reference(ReferenceModel::Gue, lambda),
                g_poisson: g_reference(ReferenceModel::Poisson, lambda),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let body = match config.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut out = String::from("lambda,g2,g_gue,g_poisson\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_num(r.lambda),
                    fmt_num(r.g2),
                    fmt_num(r.g_gue),
                    fmt_num(r.g_poisson)
                );
            }
            out
        }
    };
    Ok(Artifact::data(body))
}

fn nu_level(config: &RunConfig) -> Result<Artifact> {
    let region = config.region.as_ref().expect("validated");
    let result = nu_level_measure(config.nu, region, config.tol)?;
    let mc = if config.mc_samples > 0 {
        Some(montecarlo::monte_carlo_measure(
            config.nu,
            region,
            config.mc_samples,
            config.seed,
        )?)
    } else {
        None
    };
    let body = match config.format {
        Format::Json => {
            #[derive(Serialize)]
            struct View<'a> {
                #[serde(flatten)]
                result: &'a theory::MeasureResult,
                #[serde(skip_serializing_if = "Option::is_none")]
                mc_value: Option<f64>,
                #[serde(skip_serializing_if = "Option::is_none")]
                mc_std_error: Option<f64>,
            }
            to_json(&View {
                result: &result,
                mc_value: mc.map(|m| m.value),
                mc_std_error: mc.map(|m| m.std_error),
            })?
        }
        Format::Csv => {
            let mut out = String::from("nu,box,value,error_bound,term_count,tol");
            if mc.is_some() {
                out.push_str(",mc_value,mc_std_error");
            }
            let _ = write!(
                out,
                "\n{},\"{}\",{},{},{},{}",
                result.nu,
                result.region,
                fmt_num(result.value),
                fmt_num(result.error_bound),
                result.term_count,
                fmt_num(result.tol)
            );
            if let Some(m) = mc {
                let _ = write!(out, ",{},{}", fmt_num(m.value), fmt_num(m.std_error));
            }
            out.push('\n');
            out
        }
    };
    Ok(Artifact::data(body))
}

fn empirical(config: &RunConfig) -> Result<Artifact> {
    let points = farey_points(config)?;
    if let Some(region) = &config.region {
        let est = empirical_correlation(&points, config.nu, region)?;
        let body = match config.format {
            Format::Json => to_json(&est)?,
            Format::Csv => format!(
                "nu,box,n,tuple_count,value\n{},\"{}\",{},{},{}\n",
                est.nu,
                est.region,
                est.n,
                est.tuple_count,
                fmt_num(est.value)
            ),
        };
        return Ok(Artifact::data(body));
    }
    let hist = pair_correlation_histogram(&points, config.lambda_max, config.bins)?;
    let body = match config.format {
        Format::Json => to_json(&hist)?,
        Format::Csv => {
            let mut out = String::from("bin_lo,bin_hi,density,count\n");
            for b in &hist.bins {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_num(b.lo),
                    fmt_num(b.hi),
                    fmt_num(b.density),
                    b.count
                );
            }
            out
        }
    };
    Ok(Artifact::data(body))
}

/// Empirical pair-correlation histogram of F_Q against bin averages of g₂,
/// or, with a box, the empirical ν-level value against the area formula.
pub fn compare_report(config: &RunConfig) -> Result<CorrelationReport> {
    let points = farey_points(config)?;
    if let Some(region) = &config.region {
        let est = empirical_correlation(&points, config.nu, region)?;
        let theory = nu_level_measure(config.nu, region, config.tol)?;
        return Ok(CorrelationReport {
            q: config.q,
            n: est.n,
            nu: config.nu,
            grid: ReportGrid::Box {
                region: region.clone(),
                error_bound: theory.error_bound,
            },
            empirical: vec![est.value],
            theoretical: vec![theory.value],
        });
    }
    if config.nu != 2 {
        return Err(Error::InvalidInput(
            "compare without --box evaluates pair correlation and needs --nu 2".into(),
        ));
    }
    let hist = pair_correlation_histogram(&points, config.lambda_max, config.bins)?;
    let tables = sieve_for_lambda(config, config.lambda_max)?;
    let theoretical = hist
        .bins
        .iter()
        .map(|b| Ok(g2_integral(&tables, b.lo, b.hi)? / (b.hi - b.lo)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationReport {
        q: config.q,
        n: hist.n,
        nu: 2,
        grid: ReportGrid::Bins {
            lo: hist.bins.iter().map(|b| b.lo).collect(),
            hi: hist.bins.iter().map(|b| b.hi).collect(),
        },
        empirical: hist.bins.iter().map(|b| b.density).collect(),
        theoretical,
    })
}

fn compare(config: &RunConfig) -> Result<Artifact> {
    let report = compare_report(config)?;
    let body = match config.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()?,
    };
    Ok(Artifact {
        body,
        report: Some(report),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpsumRow {
    #[serde(rename = "Q")]
    pub q: u32,
    pub r: i64,
    pub direct_re: f64,
    pub direct_im: f64,
    pub identity: i64,
    pub abs_error: f64,
}

/// Sweep of direct sums against the divisor identity over
/// `1 ≤ Q' ≤ Q` and `1 ≤ |r| ≤ r_max`.
pub fn expsum_rows(q_max: u32, r_max: i64, sieve_max: usize) -> Result<Vec<ExpsumRow>> {
    use rayon::prelude::*;
    farey::check_order(q_max, farey::DEFAULT_MAX_ORDER)?;
    let tables = numtheory::build_sieves_with_max(q_max as usize, sieve_max)?;
    let per_q = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let seq = farey::farey_sequence(q)?;
            (-r_max..=r_max)
                .filter(|&r| r != 0)
                .map(|r| {
                    let direct = farey_exponential_sum_direct(&seq, r);
                    let identity = farey_exponential_sum_identity(&tables, q as usize, r)?;
                    Ok(ExpsumRow {
                        q,
                        r,
                        direct_re: direct.re,
                        direct_im: direct.im,
                        identity,
                        abs_error: (direct - num_complex::Complex64::new(identity as f64, 0.0))
                            .norm(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_q.into_iter().flatten().collect())
}

fn expsum_check(config: &RunConfig) -> Result<Artifact> {
    let rows = expsum_rows(config.q, config.r_max, config.sieve_max)?;
    let tables = numtheory::build_sieves_with_max(config.q as usize, config.sieve_max)?;
    let body = match config.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut out = String::from("Q,r,direct_re,direct_im,identity,abs_error\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.q,
                    r.r,
                    fmt_num(r.direct_re),
                    fmt_num(r.direct_im),
                    r.identity,
                    fmt_num(r.abs_error)
                );
            }
            out
        }
    };
    if let Some(bad) = rows.iter().find(|r| {
        let n = tables.phi_cumulative(r.q as usize) as f64;
        r.abs_error > EXPSUM_ABS_TOL * n || r.direct_im.abs() > EXPSUM_IMAG_TOL * n
    }) {
        return Err(Error::CheckFailed(format!(
            "Q = {}, r = {}: direct {} + {}i vs identity {}",
            bad.q, bad.r, bad.direct_re, bad.direct_im, bad.identity
        )));
    }
    Ok(Artifact::data(body))
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRow {
    pub lambda: f64,
    pub g2: f64,
    pub scaled_deviation: f64,
    pub weighted_sum: f64,
    pub weighted_sum_ratio: f64,
}

/// λ-ladder 10, 100, … ≤ `lambda_max`, with λ·|g₂(λ) − 1| and the ratio of
/// S(x), x = π²λ/3, to its main term 3x²/(2π²).
pub fn asymptotic_rows(lambda_max: f64, sieve_max: usize) -> Result<Vec<AsymptoticRow>> {
    let limit = theory::c_lambda(lambda_max).ceil() as usize;
    let tables = numtheory::build_sieves_with_max(limit.max(1), sieve_max)?;
    let mut rows = Vec::new();
    let mut lambda = 10.0;
    while lambda <= lambda_max {
        let g = g2(&tables, lambda)?;
        let x = theory::c_lambda(lambda);
        let s = weighted_totient_log_sum(&tables, x)?;
        rows.push(AsymptoticRow {
            lambda,
            g2: g,
            scaled_deviation: lambda * (g - 1.0).abs(),
            weighted_sum: s,
            weighted_sum_ratio: s * 2.0 * theory::PI_SQ / (3.0 * x * x),
        });
        lambda *= 10.0;
    }
    Ok(rows)
}

fn asymptotic(config: &RunConfig) -> Result<Artifact> {
    let rows = asymptotic_rows(config.lambda_max, config.sieve_max)?;
    let body = match config.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut out =
                String::from("lambda,g2,scaled_deviation,weighted_sum,weighted_sum_ratio\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_num(r.lambda),
                    fmt_num(r.g2),
                    fmt_num(r.scaled_deviation),
                    fmt_num(r.weighted_sum),
                    fmt_num(r.weighted_sum_ratio)
                );
            }
            out
        }
    };
    Ok(Artifact::data(body))
}
